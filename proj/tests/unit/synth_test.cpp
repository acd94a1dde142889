#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "genprobe/featureval.hpp"
#include "genprobe/synth.hpp"
#include "support/support.hpp"

using namespace genprobe;
using testing_support::code_of;
using testing_support::TempDir;

namespace {

DatasetSpec pie_spec(std::vector<double> reds, std::size_t n, std::uint64_t seed = 7) {
  DatasetSpec spec;
  spec.generator = Generator::pie;
  spec.image_count = n;
  spec.base_seed = seed;
  std::vector<FeatureValue> values(reds.begin(), reds.end());
  spec.support = uniform_support("red_proportion", values);
  return spec;
}

DatasetSpec dots_spec(std::vector<std::int64_t> ks, std::size_t n, std::uint64_t seed = 11) {
  DatasetSpec spec;
  spec.generator = Generator::dots;
  spec.image_count = n;
  spec.base_seed = seed;
  std::vector<FeatureValue> values(ks.begin(), ks.end());
  spec.support = uniform_support("count", values);
  return spec;
}

double red_angle_fraction(const PieParams& p) {
  constexpr int kSteps = 36000;
  int red = 0;
  for (int i = 0; i < kSteps; ++i)
    if (pie_color_at(p, (i + 0.5) * 360.0 / kSteps) == pie::kRed) ++red;
  return static_cast<double>(red) / kSteps;
}

}  // namespace

TEST(PieColors, SatisfyChannelAndDistanceConstraints) {
  Rng rng(1);
  for (int t = 0; t < 2000; ++t) {
    const auto colors = draw_other_colors(rng);
    for (const auto& c : colors) {
      ASSERT_EQ(c.r, 0);
      ASSERT_GE(std::max(c.g, c.b), 80);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        ASSERT_GE(std::abs(colors[i].g - colors[j].g) + std::abs(colors[i].b - colors[j].b), 60);
  }
}

TEST(PieSwaps, FourDisjointEqualWidthArcs) {
  Rng rng(2);
  for (int t = 0; t < 2000; ++t) {
    const auto swaps = draw_swaps(rng);
    ASSERT_EQ(swaps.size(), 4u);
    for (const auto& s : swaps) {
      ASSERT_GE(s.width, 10.0);
      ASSERT_LE(s.width, 90.0);
      // b starts at least one width after a and ends before a wraps round
      const double gap = detail::wrap_degrees(s.b - s.a);
      ASSERT_GE(gap, s.width - 1e-9);
      ASSERT_LE(gap + s.width, 360.0 + 1e-9);
    }
  }
}

TEST(PieSwapsProperty, PreserveTotalRedAngle) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const double red = rng.uniform();
    const auto p = draw_pie(rng, red, 0.5, 0.0, 0.0);
    EXPECT_NEAR(red_angle_fraction(p), red, 1e-4);
  }
}

TEST(PieParams, ValidateRejectsEscapingCircleAndBadColors) {
  PieParams p;
  Rng rng(4);
  p.other_colors = draw_other_colors(rng);
  EXPECT_NO_THROW(p.validate());
  p.size = 0.9;
  p.loc_x = 0.1;
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::spec_invalid);
  p.size = 0.5;
  p.loc_x = 0.0;
  p.other_colors[0] = {10, 200, 0};
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::spec_invalid);
}

TEST(PieParamsProperty, DrawnParamsAlwaysValid) {
  Rng rng(5);
  for (int t = 0; t < 5000; ++t) EXPECT_NO_THROW(draw_pie(rng, std::nullopt, std::nullopt, std::nullopt, std::nullopt).validate());
}

TEST(GenPie, ProportionMarginalUniformByChiSquare) {
  const auto m = plan_dataset(pie_spec({0.1, 0.3, 0.5, 0.7, 0.9}, 5000));
  std::map<double, int> counts;
  for (const auto& r : m.records) ++counts[*numeric_value(r.features.at("red_proportion"))];
  ASSERT_EQ(counts.size(), 5u);
  double chi2 = 0.0;
  for (const auto& [v, c] : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  EXPECT_LT(chi2, 18.47);  // chi-square, 4 dof, p = 0.001
}

TEST(GenPie, OnlySupportValuesAppear) {
  const auto m = plan_dataset(pie_spec({0.3, 0.9}, 1000));
  std::set<double> seen;
  for (const auto& r : m.records) seen.insert(*numeric_value(r.features.at("red_proportion")));
  EXPECT_EQ(seen, (std::set<double>{0.3, 0.9}));
}

TEST(GenPie, ZeroRedHasNoRedPixels) {
  Rng rng(6);
  const auto img = render_pie(draw_pie(rng, 0.0, 0.6, 0.0, 0.0));
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) ASSERT_NE(img.at(x, y), pie::kRed);
  EXPECT_NEAR(eval_red_proportion(img, BackgroundPolicy::light()), 0.0, 0.02);
}

TEST(GenPie, WritesLayoutAndManifest) {
  TempDir dir("pie");
  const auto m = gen_pie(pie_spec({0.5}, 5), dir.path());
  EXPECT_EQ(m.size(), 5u);
  EXPECT_TRUE(std::filesystem::exists(dir / "images/img_000004.png"));
  EXPECT_TRUE(std::filesystem::exists(dir / "spec.json"));
  const auto back = read_manifest(dir / "manifest.jsonl");
  EXPECT_EQ(back.records, m.records);
  EXPECT_EQ(dataset_spec_from_json(read_json_file(dir / "spec.json")).image_count, 5u);
}

TEST(GenDots, SixDotsEverywhere) {
  const auto m = plan_dataset(dots_spec({6}, 100));
  ASSERT_EQ(m.size(), 100u);
  for (const auto& r : m.records) EXPECT_EQ(std::get<std::int64_t>(r.features.at("count")), 6);
}

TEST(GenDots, ZeroImagesGiveEmptyManifestAndNoFiles) {
  TempDir dir("dots0");
  const auto m = gen_dots(dots_spec({3}, 0), dir.path());
  EXPECT_TRUE(m.empty());
  EXPECT_TRUE(std::filesystem::is_empty(dir / "images"));
  EXPECT_EQ(read_text_file(dir / "manifest.jsonl"), "");
}

TEST(GenDots, RerunGivesByteIdenticalManifest) {
  TempDir a("dotsa"), b("dotsb");
  gen_dots(dots_spec({1, 4, 9}, 30), a.path());
  gen_dots(dots_spec({1, 4, 9}, 30), b.path());
  EXPECT_EQ(read_text_file(a / "manifest.jsonl"), read_text_file(b / "manifest.jsonl"));
  EXPECT_EQ(read_text_file(a / "images/img_000017.png"), read_text_file(b / "images/img_000017.png"));
}

TEST(GenDots, TooManyDotsExhaustsPlacement) {
  Rng rng(8);
  EXPECT_EQ(code_of([&] { place_dots(rng, 100, 64); }), ErrorCode::placement_exhausted);
}

TEST(GenDotsProperty, SpacingAndContainment) {
  Rng rng(9);
  for (int t = 0; t < 500; ++t) {
    const auto k = static_cast<std::int64_t>(rng.below(16));
    const auto p = place_dots(rng, k, 64);
    ASSERT_EQ(static_cast<std::int64_t>(p.dots.size()), k);
    for (std::size_t i = 0; i < p.dots.size(); ++i) {
      const auto& d = p.dots[i];
      ASSERT_GE(d.x - p.radius, 0.0);
      ASSERT_LE(d.x + p.radius, 64.0);
      ASSERT_GE(d.y - p.radius, 0.0);
      ASSERT_LE(d.y + p.radius, 64.0);
      ASSERT_GE(std::max({d.color.r, d.color.g, d.color.b}), 200);
      for (std::size_t j = i + 1; j < p.dots.size(); ++j)
        ASSERT_GE(std::hypot(d.x - p.dots[j].x, d.y - p.dots[j].y), dot_spacing(p.radius));
    }
  }
}

TEST(GenDotsProperty, RenderedDotsShareNoPixels) {
  Rng rng(10);
  for (int t = 0; t < 100; ++t) {
    const auto p = place_dots(rng, 1 + static_cast<std::int64_t>(rng.below(12)), 64);
    std::vector<int> owners(64 * 64, 0);
    for (const auto& d : p.dots) {
      DotsParams single = p;
      single.dots = {d};
      const auto img = render_dots(single);
      const auto m = background_mask(img, BackgroundPolicy::dark());
      for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
          if (m.is_foreground(x, y)) ++owners[y * 64 + x];
    }
    for (int o : owners) ASSERT_LE(o, 1);
    EXPECT_EQ(count_dots(render_dots(p)), p.count);
  }
}

TEST(Determinism, SliceMatchesFullRun) {
  const auto spec = pie_spec({0.1, 0.5, 0.9}, 1000, 99);
  const auto full = plan_dataset(spec);
  const auto slice = plan_dataset(spec, 100, 200);
  ASSERT_EQ(slice.size(), 100u);
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(slice.records[i], full.records[100 + i]);

  TempDir a("full"), b("slice");
  auto small = spec;
  small.image_count = 140;
  generate_dataset(small, a.path());
  generate_dataset(small, b.path(), 120, 140);
  for (std::size_t i = 120; i < 140; ++i)
    EXPECT_EQ(read_text_file(a / ("images/" + image_name(i))), read_text_file(b / ("images/" + image_name(i))));
}

TEST(DatasetSpec, JsonParsingAndValidation) {
  const auto spec = dataset_spec_from_json(json::parse(R"({
    "generator": "pie", "image_count": 10, "base_seed": 3,
    "support": [{"features": {"red_proportion": 0.3, "size": "random"}, "probability": 1.0}]})"));
  ASSERT_EQ(spec.support.size(), 1u);
  EXPECT_FALSE(spec.support[0].features.contains("size"));
  EXPECT_EQ(to_json(spec)["generator"], "pie");

  EXPECT_EQ(code_of([] {
              dataset_spec_from_json(json::parse(
                  R"({"generator":"pie","support":[{"features":{"red_proportion":0.3},"probability":0.6}]})"));
            }),
            ErrorCode::spec_invalid);
  EXPECT_EQ(code_of([] {
              dataset_spec_from_json(
                  json::parse(R"({"generator":"pie","support":[{"features":{"count":3},"probability":1}]})"));
            }),
            ErrorCode::spec_invalid);
  EXPECT_EQ(code_of([] {
              dataset_spec_from_json(json::parse(
                  R"({"generator":"pie","support":[{"features":{"size":0.9,"loc_x":0.2},"probability":1}]})"));
            }),
            ErrorCode::spec_invalid);
  EXPECT_EQ(code_of([] { dataset_spec_from_json(json::parse(R"({"generator":"dots"})")); }), ErrorCode::spec_invalid);
  EXPECT_EQ(code_of([] { dataset_spec_from_json(json::parse(R"({"generator":"cubes"})")); }), ErrorCode::spec_invalid);
}

TEST(SampleCombinations, DistinctSortedAndDeterministic) {
  const auto space = CombinationSpace::digits(3);
  const auto a = sample_combinations(space, 10, 5);
  EXPECT_EQ(a.size(), 10u);
  EXPECT_EQ(std::set<std::int64_t>(a.begin(), a.end()).size(), 10u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(a, sample_combinations(space, 10, 5));
  EXPECT_NE(a, sample_combinations(space, 10, 6));
}

TEST(SampleCombinations, EdgeCounts) {
  const auto space = CombinationSpace::digits(3);
  const auto all = sample_combinations(space, 1000, 1);
  ASSERT_EQ(all.size(), 1000u);
  for (std::int64_t i = 0; i < 1000; ++i) EXPECT_EQ(all[static_cast<std::size_t>(i)], i);
  EXPECT_TRUE(sample_combinations(space, 0, 1).empty());
  EXPECT_EQ(code_of([&] { sample_combinations(space, 1001, 1); }), ErrorCode::count_too_large);
}

TEST(SampleCombinationsProperty, EveryIdEquallyLikely) {
  const auto space = CombinationSpace::digits(1);
  std::vector<int> hits(10, 0);
  for (std::uint64_t s = 0; s < 5000; ++s)
    for (auto id : sample_combinations(space, 3, s)) ++hits[static_cast<std::size_t>(id)];
  double chi2 = 0.0;
  for (int h : hits) chi2 += (h - 1500.0) * (h - 1500.0) / 1500.0;
  EXPECT_LT(chi2, 27.88);  // 9 dof, p = 0.001
}
