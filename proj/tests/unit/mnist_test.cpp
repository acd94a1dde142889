#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <set>

#include "genprobe/mnist.hpp"
#include "support/support.hpp"

using namespace genprobe;
using testing_support::code_of;
using testing_support::TempDir;

namespace {

const std::filesystem::path kFixture = std::filesystem::path(GENPROBE_TEST_DATA) / "mnist5k";

const DigitSet& fixture() {
  static const DigitSet set =
      DigitSet::load(kFixture / "images-idx3-ubyte.gz", kFixture / "labels-idx1-ubyte.gz");
  return set;
}

std::vector<std::uint8_t> gzip(const std::vector<std::uint8_t>& raw) {
  z_stream zs{};
  deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 8, Z_DEFAULT_STRATEGY);
  std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(raw.size())) + 32);
  zs.next_in = const_cast<Bytef*>(raw.data());
  zs.avail_in = static_cast<uInt>(raw.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

double digit_accuracy(const DigitSet& refs, const DigitSet& held_out) {
  std::atomic<std::size_t> hits{0};
  parallel_for(held_out.size(), [&](std::size_t i) {
    if (classify_digit(held_out.image(i), refs) == held_out.labels[i]) ++hits;
  });
  return static_cast<double>(hits) / static_cast<double>(held_out.size());
}

double combination_accuracy(const DigitSet& refs, const DigitSet& held_out, std::size_t images) {
  ThreeMnistSpec spec;
  for (int id = 0; id < 1000; ++id) spec.support.push_back(Combination::from_id(id));
  spec.image_count = images;
  spec.base_seed = 2024;
  const auto pools = held_out.pools();
  std::atomic<std::size_t> hits{0};
  parallel_for(images, [&](std::size_t i) {
    const auto item = draw_three_mnist(spec, pools, i);
    if (classify_combination(compose_digits(held_out, item.exemplars), refs) == item.combination) ++hits;
  });
  return static_cast<double>(hits) / static_cast<double>(images);
}

}  // namespace

TEST(ParseIdx, MnistHeaderConstants) {
  const auto imgs = read_idx_file(kFixture / "images-idx3-ubyte.gz");
  EXPECT_EQ(imgs.magic, 0x00000803u);
  EXPECT_EQ(imgs.dims, (std::vector<std::uint32_t>{5000, 28, 28}));
  const auto labels = read_idx_file(kFixture / "labels-idx1-ubyte.gz");
  EXPECT_EQ(labels.magic, 0x00000801u);
  EXPECT_EQ(labels.dims, (std::vector<std::uint32_t>{5000}));
}

TEST(ParseIdx, MalformedInputs) {
  const std::vector<std::uint8_t> three{0, 0, 8};
  EXPECT_EQ(code_of([&] { parse_idx(three); }), ErrorCode::bad_magic);
  const std::vector<std::uint8_t> float_type{0, 0, 0x0D, 1, 0, 0, 0, 1, 0};
  EXPECT_EQ(code_of([&] { parse_idx(float_type); }), ErrorCode::bad_magic);
  const std::vector<std::uint8_t> short_payload{0, 0, 8, 1, 0, 0, 0, 4, 1, 2};
  EXPECT_EQ(code_of([&] { parse_idx(short_payload); }), ErrorCode::truncated_payload);
  const std::vector<std::uint8_t> short_header{0, 0, 8, 3, 0, 0, 0, 4};
  EXPECT_EQ(code_of([&] { parse_idx(short_header); }), ErrorCode::truncated_payload);
}

TEST(ParseIdxProperty, SerializeRoundTrip) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::uint32_t> dims;
    const auto rank = 1 + rng.below(3);
    std::size_t n = 1;
    for (std::uint64_t r = 0; r < rank; ++r) {
      dims.push_back(static_cast<std::uint32_t>(rng.below(6)));
      n *= dims.back();
    }
    std::vector<std::uint8_t> data(n);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng.below(256));
    const auto tensor = IdxTensor::make(dims, data);
    EXPECT_EQ(parse_idx(serialize_idx(tensor)), tensor);
  }
}

TEST(ReadIdxFile, RawAndGzipAgree) {
  TempDir dir("idx");
  const auto tensor = IdxTensor::make({2, 3}, {1, 2, 3, 4, 5, 6});
  write_bytes(dir / "raw", serialize_idx(tensor));
  write_bytes(dir / "gz", gzip(serialize_idx(tensor)));
  EXPECT_EQ(read_idx_file(dir / "raw"), tensor);
  EXPECT_EQ(read_idx_file(dir / "gz"), tensor);
  auto cut = gzip(serialize_idx(tensor));
  cut.resize(cut.size() / 2);
  write_bytes(dir / "cut", cut);
  EXPECT_EQ(code_of([&] { read_idx_file(dir / "cut"); }), ErrorCode::truncated_payload);
}

TEST(Combination, PositionalIds) {
  EXPECT_EQ(Combination::parse("717").id(), 717);
  EXPECT_EQ(Combination::from_id(42).label(), "042");
  EXPECT_EQ(three_digit_space().parse_label("913"), 913);
  EXPECT_EQ(code_of([] { Combination::parse("71"); }), ErrorCode::domain_mismatch);
  EXPECT_EQ(code_of([] { Combination::from_id(1000); }), ErrorCode::domain_mismatch);
}

TEST(ComposeThreeMnist, SupportOnlyAndDeterministic) {
  ThreeMnistSpec spec{{Combination::parse("717"), Combination::parse("913")}, 4, 3};
  const auto a = compose_three_mnist(spec, fixture());
  ASSERT_EQ(a.size(), 4u);
  for (const auto& r : a.records) {
    const auto label = std::get<std::string>(r.features.at("combination"));
    EXPECT_TRUE(label == "717" || label == "913") << label;
  }
  EXPECT_EQ(compose_three_mnist(spec, fixture()).records, a.records);
}

TEST(ComposeThreeMnist, LayoutAndFiles) {
  TempDir dir("mnist3");
  ThreeMnistSpec spec{{Combination::parse("123")}, 3, 9};
  const auto m = compose_three_mnist(spec, fixture(), dir.path());
  const auto img = read_png(dir / m.records[0].file);
  EXPECT_EQ(img.width, 56);
  EXPECT_EQ(img.height, 56);
  EXPECT_EQ(img.channels, 1);
  for (int y = 28; y < 56; ++y)
    for (int x = 28; x < 56; ++x) ASSERT_EQ(img.gray(x, y), 0);
  const auto item = draw_three_mnist(spec, fixture().pools(), 0);
  EXPECT_EQ(img, compose_digits(fixture(), item.exemplars));
  EXPECT_EQ(read_manifest(dir.path()).records, m.records);
  EXPECT_TRUE(std::filesystem::exists(dir / "spec.json"));
}

TEST(ComposeThreeMnist, MarginalUniformOverSupport) {
  ThreeMnistSpec spec{{Combination::parse("001"), Combination::parse("555"), Combination::parse("987")}, 3000, 5};
  std::map<std::string, int> counts;
  for (const auto& r : compose_three_mnist(spec, fixture()).records)
    ++counts[std::get<std::string>(r.features.at("combination"))];
  double chi2 = 0.0;
  for (const auto& [k, c] : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  EXPECT_LT(chi2, 13.82);  // 2 dof, p = 0.001
}

TEST(ComposeThreeMnist, Errors) {
  EXPECT_EQ(code_of([] { compose_three_mnist({{}, 4, 1}, fixture()); }), ErrorCode::empty_support);
  const auto only_ones = fixture().slice(0, 0);
  DigitSet ones;
  for (std::size_t i = 0; i < fixture().size() && ones.size() < 5; ++i)
    if (fixture().labels[i] == 1) {
      const auto img = fixture().image(i);
      ones.pixels.insert(ones.pixels.end(), img.begin(), img.end());
      ones.labels.push_back(1);
    }
  EXPECT_TRUE(only_ones.size() == 0);
  EXPECT_EQ(code_of([&] { compose_three_mnist({{Combination::parse("121")}, 2, 1}, ones); }),
            ErrorCode::empty_class_pool);
}

TEST(ClassifyDigit, TrivialCases) {
  const auto refs = fixture().slice(0, 500);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(classify_digit(refs.image(i), refs), refs.labels[i]);
  const std::vector<std::uint8_t> blank(kDigitPixels, 0);
  const int label = classify_digit(blank, refs);
  EXPECT_GE(label, 0);
  EXPECT_LE(label, 9);
  EXPECT_EQ(code_of([&] { classify_digit(blank, DigitSet{}); }), ErrorCode::empty_references);
}

TEST(ClassifyDigit, TiesGoToLowestIndex) {
  DigitSet refs;
  refs.pixels.assign(2 * kDigitPixels, 0);
  refs.labels = {4, 7};
  const std::vector<std::uint8_t> blank(kDigitPixels, 0);
  EXPECT_EQ(classify_digit(blank, refs), 4);
}

TEST(ClassifyCombination, ShapeCheck) {
  EXPECT_EQ(code_of([] { classify_combination(Image(28, 28, 1), fixture()); }), ErrorCode::bad_shape);
}

TEST(ClassifyCombinationProperty, SelfConsistentWithSharedPool) {
  const auto refs = fixture().slice(0, 1000);
  ThreeMnistSpec spec;
  for (int id = 0; id < 1000; id += 7) spec.support.push_back(Combination::from_id(id));
  spec.image_count = 200;
  spec.base_seed = 77;
  const auto pools = refs.pools();
  for (std::size_t i = 0; i < spec.image_count; ++i) {
    const auto item = draw_three_mnist(spec, pools, i);
    ASSERT_EQ(classify_combination(compose_digits(refs, item.exemplars), refs), item.combination) << i;
  }
}

// Floors measured on the 5k fixture with the first 4000 digits as references
// (about 400 per class) and the last 1000 held out: digit 0.942, composed
// combination 0.833.
TEST(ClassifierAccuracy, FixtureFloors) {
  const auto refs = fixture().slice(0, 4000);
  const auto held = fixture().slice(4000, 5000);
  EXPECT_GE(digit_accuracy(refs, held), 0.90);
  EXPECT_GE(combination_accuracy(refs, held, 300), 0.78);
}

// Full MNIST floors, 1000 references per class. Needs GENPROBE_MNIST_DIR with
// the four standard IDX files.
TEST(ClassifierAccuracy, FullMnistFloors) {
  const char* dir = std::getenv("GENPROBE_MNIST_DIR");
  if (!dir) GTEST_SKIP() << "GENPROBE_MNIST_DIR not set";
  const std::filesystem::path root(dir);
  const auto pick = [&](const std::string& stem) {
    return std::filesystem::exists(root / stem) ? root / stem : root / (stem + ".gz");
  };
  const auto train = DigitSet::load(pick("train-images-idx3-ubyte"), pick("train-labels-idx1-ubyte"));
  const auto test = DigitSet::load(pick("t10k-images-idx3-ubyte"), pick("t10k-labels-idx1-ubyte"));
  const auto refs = train.take_per_class(1000);
  EXPECT_GE(digit_accuracy(refs, test.slice(0, 2000)), 0.90);
  EXPECT_GE(combination_accuracy(refs, test, 500), 0.85);
}

TEST(Labels, ExternalLabelsOverrideByPathOrName) {
  TempDir dir("labels");
  write_text_file(dir / "labels.jsonl",
                  "{\"file\":\"images/img_000000.png\",\"combination\":\"111\"}\n\n{\"file\":\"img_000001.png\",\"combination\":\"222\"}\n");
  DatasetManifest m;
  for (std::size_t i = 0; i < 3; ++i) m.records.push_back({"images/" + image_name(i), {{{"combination", std::string("000")}}}, {}});
  EXPECT_EQ(apply_labels(m, read_labels_jsonl(dir / "labels.jsonl")), 2u);
  EXPECT_EQ(std::get<std::string>(m.records[0].features.at("combination")), "111");
  EXPECT_EQ(std::get<std::string>(m.records[1].features.at("combination")), "222");
  EXPECT_EQ(std::get<std::string>(m.records[2].features.at("combination")), "000");
}
