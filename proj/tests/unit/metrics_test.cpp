#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "genprobe/metrics.hpp"
#include "oracles/oracles.hpp"
#include "support/histograms.hpp"
#include "support/support.hpp"

using namespace genprobe;
using testing_support::code_of;
using testing_support::integral_histogram;
using testing_support::random_histogram;

namespace {

Axis space_axis(std::size_t groups, std::size_t values) { return Axis::of(CombinationSpace::digits(groups, values)); }

Histogram hist(const Axis& axis, std::vector<Bin> bins) { return Histogram(axis, std::move(bins)); }

}  // namespace

TEST(SupportOf, TenPercentRuleExample) {
  const auto axis = space_axis(1, 5);
  const auto q = hist(axis, {{0, 0.5}, {1, 0.3}, {2, 0.19}, {4, 0.01}});
  const auto s = support_of(q, 4);
  EXPECT_EQ(s.members, (std::vector<std::int64_t>{0, 1, 2}));
  const auto p = positive_support(hist(axis, {{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}}));
  const auto pr = precision_recall(p, s);
  EXPECT_EQ(pr.precision, 1.0);
  EXPECT_EQ(pr.recall, 0.75);
}

TEST(SupportOf, ThresholdIsInclusiveAndValidated) {
  const auto axis = space_axis(1, 4);
  const auto q = hist(axis, {{0, 0.975}, {1, 0.025}});
  EXPECT_EQ(support_of(q, 4).size(), 2u);
  EXPECT_EQ(support_of(Histogram::delta(axis, 2), 1000).members, (std::vector<std::int64_t>{2}));
  EXPECT_EQ(code_of([&] { support_of(q, 0); }), ErrorCode::bad_support_size);
}

TEST(PrecisionRecall, SetArithmetic) {
  const auto axis = space_axis(1, 10);
  const auto a = SupportSet::of(axis, {1, 2, 3, 4});
  EXPECT_EQ(precision_recall(a, a).precision, 1.0);
  EXPECT_EQ(precision_recall(a, a).recall, 1.0);
  const auto far = SupportSet::of(axis, {7, 8});
  EXPECT_EQ(precision_recall(a, far).precision, 0.0);
  EXPECT_EQ(precision_recall(a, far).recall, 0.0);
  const auto pr = precision_recall(a, SupportSet::of(axis, {1, 2, 3}));
  EXPECT_EQ(pr.precision, 1.0);
  EXPECT_EQ(pr.recall, 0.75);
  const auto vac = precision_recall(a, SupportSet::of(axis, {}));
  EXPECT_TRUE(vac.vacuous_precision);
  EXPECT_EQ(vac.precision, 1.0);
  EXPECT_EQ(code_of([&] { precision_recall(a, SupportSet::of(space_axis(2, 10), {1})); }), ErrorCode::space_mismatch);
}

TEST(PrecisionRecallProperty, EnlargingQNeverLowersRecall) {
  std::mt19937_64 gen(3);
  const auto axis = space_axis(1, 30);
  std::uniform_int_distribution<std::int64_t> id(0, 29);
  for (int t = 0; t < 500; ++t) {
    std::vector<std::int64_t> p, q;
    for (int i = 0; i < 8; ++i) p.push_back(id(gen));
    for (int i = 0; i < 5; ++i) q.push_back(id(gen));
    const auto ps = SupportSet::of(axis, p);
    double last = precision_recall(ps, SupportSet::of(axis, q)).recall;
    for (int i = 0; i < 10; ++i) {
      q.push_back(id(gen));
      const double r = precision_recall(ps, SupportSet::of(axis, q)).recall;
      ASSERT_GE(r, last);
      last = r;
    }
  }
}

TEST(CrossEntropy, Examples) {
  const auto axis = space_axis(1, 4);
  const auto u = hist(axis, {{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}});
  EXPECT_DOUBLE_EQ(cross_entropy(u, u).bits, 2.0);
  EXPECT_DOUBLE_EQ(cross_entropy(Histogram::delta(axis, 1), hist(axis, {{1, 0.5}, {2, 0.5}})).bits, 1.0);
  const auto p = hist(axis, {{0, 0.5}, {1, 0.5}});
  const auto q = hist(axis, {{0, 0.5}, {1, 0.25}, {2, 0.25}});
  EXPECT_DOUBLE_EQ(cross_entropy(p, q).bits, 1.5);
}

TEST(CrossEntropy, InfinityFlagAndSmoothing) {
  const auto axis = space_axis(1, 4);
  const auto p = hist(axis, {{0, 0.5}, {3, 0.5}});
  const auto q = Histogram::delta(axis, 0);
  EXPECT_TRUE(cross_entropy(p, q).infinite);
  const auto s = cross_entropy(p, q, 1.0);
  EXPECT_FALSE(s.infinite);
  // q~ = (q + 1) / 5 -> {0.4, 0.2, 0.2, 0.2}
  EXPECT_NEAR(s.bits, -0.5 * std::log2(0.4) - 0.5 * std::log2(0.2), 1e-12);
  EXPECT_EQ(code_of([&] { cross_entropy(p, q, -1.0); }), ErrorCode::usage);
}

TEST(CrossEntropyProperty, MatchesDirectSummation) {
  std::mt19937_64 gen(5);
  const auto axis = space_axis(1, 16);
  for (int t = 0; t < 1000; ++t) {
    const auto p = random_histogram(gen, axis, 16, 16), q = random_histogram(gen, axis, 16, 16);
    const double alpha = t % 3 == 0 ? 0.0 : 0.01 * (t % 7);
    std::vector<double> pv(16), qv(16);
    for (int z = 0; z < 16; ++z) pv[z] = p.mass(z), qv[z] = q.mass(z);
    const double ref = oracle::direct_cross_entropy(pv, qv, alpha);
    const auto ce = cross_entropy(p, q, alpha);
    if (std::isinf(ref)) {
      EXPECT_TRUE(ce.infinite);
    } else {
      EXPECT_NEAR(ce.bits, ref, 1e-9);
    }
  }
}

TEST(CrossEntropyProperty, GibbsInequality) {
  std::mt19937_64 gen(7);
  const auto axis = space_axis(1, 12);
  for (int t = 0; t < 500; ++t) {
    const auto p = random_histogram(gen, axis, 12, 12);
    std::vector<Bin> qb;
    std::uniform_real_distribution<double> m(0.01, 1.0);
    for (const auto& b : p.bins()) qb.push_back({b.id, m(gen)});
    const auto q = Histogram::normalized(axis, qb);
    double entropy = 0.0;
    for (const auto& b : p.bins()) entropy -= b.mass * std::log2(b.mass);
    EXPECT_NEAR(cross_entropy(p, p).bits, entropy, 1e-12);
    EXPECT_GE(cross_entropy(p, q).bits, entropy - 1e-12);
  }
}

TEST(Emd, Examples) {
  const auto line = Axis::lattice();
  EXPECT_DOUBLE_EQ(emd(Histogram::delta(line, 0), Histogram::delta(line, 3)), 3.0);
  const auto h = hist(line, {{0, 0.5}, {2, 0.5}});
  EXPECT_DOUBLE_EQ(emd(h, h), 0.0);
  const auto combos = space_axis(3, 10);
  EmdOptions l1{GroundMetric::digit_l1};
  EXPECT_DOUBLE_EQ(emd(Histogram::delta(combos, 0), Histogram::delta(combos, 5), l1), 5.0);
  EXPECT_DOUBLE_EQ(emd(Histogram::delta(combos, 0), Histogram::delta(combos, 999), l1), 27.0);
}

TEST(Emd, ContinuousAxisUsesBinWidth) {
  const auto axis = Axis::of(FeatureSpec::continuous("p", 0.0, 1.0, 0.02));
  EXPECT_NEAR(emd(Histogram::delta(axis, 5), Histogram::delta(axis, 15)), 0.2, 1e-12);
  EXPECT_NEAR(emd(Histogram::delta(axis, 5), Histogram::delta(axis, 15), {GroundMetric::scalar_abs, 1'000'000, true}), 0.2,
              1e-12);
}

TEST(Emd, BudgetAndMismatch) {
  const auto line = Axis::lattice();
  const auto a = hist(line, {{0, 0.5}, {1, 0.5}});
  const auto b = hist(line, {{5, 0.5}, {6, 0.5}});
  EXPECT_EQ(code_of([&] { emd(a, b, {GroundMetric::scalar_abs, 3, true}); }), ErrorCode::support_too_large);
  EXPECT_EQ(code_of([&] { emd(a, Histogram::delta(space_axis(1, 4), 0)); }), ErrorCode::space_mismatch);
}

TEST(EmdProperty, FlowMatchesExhaustiveTransport) {
  std::mt19937_64 gen(11);
  const auto line = Axis::lattice();
  const auto combos = space_axis(2, 4);
  for (int t = 0; t < 300; ++t) {
    const bool use_combos = t % 2 == 1;
    const auto& axis = use_combos ? combos : line;
    const int universe = use_combos ? 16 : 12;
    const int total = 9;
    std::vector<int> ca, cb;
    std::vector<std::int64_t> ia, ib;
    const auto p = integral_histogram(gen, axis, universe, 6, total, &ca, &ia);
    const auto q = integral_histogram(gen, axis, universe, 6, total, &cb, &ib);
    std::vector<std::vector<double>> cost(ia.size(), std::vector<double>(ib.size()));
    const auto metric = use_combos ? GroundMetric::digit_l1 : GroundMetric::scalar_abs;
    for (std::size_t i = 0; i < ia.size(); ++i)
      for (std::size_t j = 0; j < ib.size(); ++j) cost[i][j] = ground_distance(axis, metric, ia[i], ib[j]);
    const double ref = oracle::enumerate_transport(ca, cb, cost) / total;
    EXPECT_NEAR(emd_flow(p, q, metric), ref, 1e-9) << t;
    if (!use_combos) {
      EXPECT_NEAR(emd_cumulative(p, q), ref, 1e-9) << t;
    }
  }
}

TEST(EmdProperty, CumulativeEqualsFlowOn1D) {
  std::mt19937_64 gen(13);
  const auto axis = Axis::of(FeatureSpec::continuous("p", 0.0, 1.0, 0.02));
  for (int t = 0; t < 500; ++t) {
    const auto p = random_histogram(gen, axis, 50, 16), q = random_histogram(gen, axis, 50, 16);
    EXPECT_NEAR(emd_cumulative(p, q), emd_flow(p, q, GroundMetric::scalar_abs), 1e-9);
  }
}

TEST(EmdProperty, MetricAxioms) {
  std::mt19937_64 gen(17);
  const auto axis = space_axis(3, 10);
  const EmdOptions l1{GroundMetric::digit_l1};
  for (int t = 0; t < 200; ++t) {
    const auto a = random_histogram(gen, axis, 1000, 8), b = random_histogram(gen, axis, 1000, 8),
               c = random_histogram(gen, axis, 1000, 8);
    EXPECT_NEAR(emd(a, a, l1), 0.0, 1e-9);
    EXPECT_NEAR(emd(a, b, l1), emd(b, a, l1), 1e-9);
    EXPECT_LE(emd(a, c, l1), emd(a, b, l1) + emd(b, c, l1) + 1e-9);
  }
}

TEST(Auc, Examples) {
  const auto axis = space_axis(1, 4);
  const auto p = SupportSet::of(axis, {0, 1});
  EXPECT_DOUBLE_EQ(auc(p, hist(axis, {{0, 0.5}, {1, 0.3}, {2, 0.2}})), 1.0);
  EXPECT_DOUBLE_EQ(auc(p, hist(axis, {{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}})), 0.5);
  EXPECT_DOUBLE_EQ(auc(p, hist(axis, {{2, 0.5}, {3, 0.5}})), 0.0);
  EXPECT_EQ(code_of([&] { auc(SupportSet::of(axis, {}), Histogram::delta(axis, 0)); }), ErrorCode::degenerate_labels);
  EXPECT_EQ(code_of([&] { auc(SupportSet::of(axis, {0, 1, 2, 3}), Histogram::delta(axis, 0)); }),
            ErrorCode::degenerate_labels);
}

TEST(AucProperty, MatchesPairwiseBruteForce) {
  std::mt19937_64 gen(19);
  const auto axis = space_axis(1, 16);
  std::uniform_int_distribution<std::int64_t> id(0, 15);
  for (int t = 0; t < 1000; ++t) {
    // coarse masses make ties common
    std::vector<Bin> bins;
    for (int i = 0; i < 10; ++i) bins.push_back({id(gen), static_cast<double>(1 + id(gen) % 3)});
    const auto q = Histogram::normalized(axis, bins);
    std::vector<std::int64_t> members;
    for (int i = 0; i < 1 + t % 8; ++i) members.push_back(id(gen));
    const auto p = SupportSet::of(axis, members);
    if (p.size() == 16) continue;
    std::vector<double> pos, neg;
    for (std::int64_t z = 0; z < 16; ++z) (p.contains(z) ? pos : neg).push_back(q.mass(z));
    EXPECT_NEAR(auc(p, q), oracle::pairwise_auc(pos, neg), 1e-9);
  }
}

TEST(AucProperty, InvariantToMonotoneTransform) {
  std::mt19937_64 gen(23);
  const auto axis = space_axis(1, 16);
  for (int t = 0; t < 200; ++t) {
    const auto q = random_histogram(gen, axis, 16, 16);
    std::vector<Bin> squared;
    for (const auto& b : q.bins()) squared.push_back({b.id, b.mass * b.mass});
    const auto q2 = Histogram::normalized(axis, squared);
    const auto p = SupportSet::of(axis, {0, 3, 7, static_cast<std::int64_t>(t % 16)});
    EXPECT_NEAR(auc(p, q), auc(p, q2), 1e-12);
  }
}

TEST(Marginals, IdentityAndProductOfMarginals) {
  std::mt19937_64 gen(29);
  const auto space = CombinationSpace::digits(3, 10);
  const auto axis = Axis::of(space);
  const auto p = random_histogram(gen, axis, 1000, 40);
  for (std::size_t g = 0; g < 3; ++g) EXPECT_EQ(max_marginal_diff(marginal_preservation(p, p, g)), 0.0);

  const auto m0 = marginal(p, 0), m1 = marginal(p, 1), m2 = marginal(p, 2);
  std::vector<Bin> prod;
  for (std::int64_t id = 0; id < 1000; ++id) {
    const auto tu = space.tuple_of(id);
    const double m = m0[tu[0]] * m1[tu[1]] * m2[tu[2]];
    if (m > 0) prod.push_back({id, m});
  }
  const auto q = Histogram::normalized(axis, prod);
  for (std::size_t g = 0; g < 3; ++g) EXPECT_LT(max_marginal_diff(marginal_preservation(p, q, g)), 1e-12);
  const auto rows = marginal_preservation(p, q, 1);
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[7].value, "7");
}

TEST(MetricsReport, TextAndCsv) {
  MetricsReport r;
  r.precision = 1.0;
  r.recall = 0.75;
  r.ce = CrossEntropy{0.0, true};
  r.auc = 0.5;
  EXPECT_EQ(r.to_kv(), "precision 1.0\nrecall 0.75\nce_bits inf\nauc 0.5\n");
  EXPECT_EQ(r.csv_row(), "1.0,0.75,inf,,0.5");
  EXPECT_EQ(MetricsReport::csv_header(), "precision,recall,ce_bits,emd,auc");
  r.emd = -1.0;
  EXPECT_EQ(code_of([&] { r.validate(); }), ErrorCode::degenerate_histogram);
}
