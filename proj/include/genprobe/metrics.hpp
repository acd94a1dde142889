#pragma once

// Support and label-distribution metrics: the 10% support rule,
// precision/recall of supports, cross entropy, earth mover's distance, AUC and
// marginal preservation over combination spaces.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "genprobe/core.hpp"
#include "genprobe/error.hpp"
#include "genprobe/transport.hpp"

namespace genprobe {

/// Distinct combination ids over an axis (usually a CombinationSpace).
struct SupportSet {
  Axis axis;
  std::vector<std::int64_t> members;  // sorted, distinct

  std::size_t size() const { return members.size(); }
  bool contains(std::int64_t id) const { return std::binary_search(members.begin(), members.end(), id); }

  static SupportSet of(Axis axis, std::vector<std::int64_t> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (auto id : ids) require(axis.in_range(id), ErrorCode::domain_mismatch, "support member outside the space");
    return {std::move(axis), std::move(ids)};
  }
};

inline constexpr double kSupportFraction = 0.1;

/// z is in the support of q when q(z) >= 0.1 / p_support_size, i.e. at least
/// a tenth of the uniform mass over the training support.
inline SupportSet support_of(const Histogram& q, std::int64_t p_support_size) {
  require(p_support_size >= 1, ErrorCode::bad_support_size, "p_support_size must be at least 1");
  const double threshold = kSupportFraction / static_cast<double>(p_support_size);
  SupportSet s;
  s.axis = q.axis();
  for (const auto& b : q.bins())
    if (b.mass >= threshold * (1.0 - 1e-12)) s.members.push_back(b.id);
  return s;
}

/// Support of a training distribution: every bin with positive mass.
inline SupportSet positive_support(const Histogram& p) {
  SupportSet s;
  s.axis = p.axis();
  for (const auto& b : p.bins())
    if (b.mass > 0) s.members.push_back(b.id);
  return s;
}

struct PrecisionRecall {
  double precision = 1.0;
  double recall = 1.0;
  bool vacuous_precision = false;  // q support empty
  bool vacuous_recall = false;     // p support empty
};

/// recall = |p & q| / |p|, precision = |p & q| / |q|; an empty side yields 1
/// with its vacuous flag set.
inline PrecisionRecall precision_recall(const SupportSet& p, const SupportSet& q) {
  require(p.axis.compatible(q.axis), ErrorCode::space_mismatch, "supports over different spaces");
  std::vector<std::int64_t> common;
  std::set_intersection(p.members.begin(), p.members.end(), q.members.begin(), q.members.end(), std::back_inserter(common));
  PrecisionRecall pr;
  const double both = static_cast<double>(common.size());
  if (q.members.empty()) pr.vacuous_precision = true;
  else pr.precision = both / static_cast<double>(q.members.size());
  if (p.members.empty()) pr.vacuous_recall = true;
  else pr.recall = both / static_cast<double>(p.members.size());
  return pr;
}

struct CrossEntropy {
  double bits = 0.0;
  bool infinite = false;
};

/// CE = -sum_z p(z) log2 q~(z). With alpha > 0, q~ = (q + alpha) / (1 + alpha |Z|)
/// over the finite space Z; with alpha = 0 any z with p(z) > 0 = q(z) makes
/// the result infinite.
inline CrossEntropy cross_entropy(const Histogram& p, const Histogram& q, double alpha = 0.0) {
  require(p.axis().compatible(q.axis()), ErrorCode::space_mismatch, "cross entropy over different spaces");
  require(alpha >= 0.0, ErrorCode::usage, "smoothing alpha must be non-negative");
  double norm = 1.0;
  if (alpha > 0.0) {
    const auto size = q.axis().universe_size();
    require(size.has_value(), ErrorCode::space_mismatch, "smoothing needs a finite space");
    norm = 1.0 + alpha * static_cast<double>(*size);
  }
  CrossEntropy ce;
  for (const auto& b : p.bins()) {
    if (b.mass <= 0.0) continue;
    const double qz = (q.mass(b.id) + alpha) / norm;
    if (qz <= 0.0) {
      ce.infinite = true;
      ce.bits = std::numeric_limits<double>::infinity();
      return ce;
    }
    ce.bits -= b.mass * std::log2(qz);
  }
  return ce;
}

enum class GroundMetric {
  scalar_abs,  // |center(a) - center(b)| on a 1D feature axis
  digit_l1,    // sum over groups of |index_a - index_b| on a combination axis
};

inline double ground_distance(const Axis& axis, GroundMetric metric, std::int64_t a, std::int64_t b) {
  if (metric == GroundMetric::scalar_abs) {
    if (axis.kind == AxisKind::continuous || axis.kind == AxisKind::lattice)
      return std::abs(static_cast<double>(a - b)) * axis.width;
    return std::abs(static_cast<double>(a - b));
  }
  require(axis.kind == AxisKind::combination && axis.space, ErrorCode::space_mismatch, "digit_l1 needs a combination axis");
  const auto ta = axis.space->tuple_of(a), tb = axis.space->tuple_of(b);
  double d = 0.0;
  for (std::size_t g = 0; g < ta.size(); ++g) d += std::abs(static_cast<double>(ta[g]) - static_cast<double>(tb[g]));
  return d;
}

struct EmdOptions {
  GroundMetric metric = GroundMetric::scalar_abs;
  std::size_t flow_budget = 1'000'000;  // max |supp p| * |supp q| for the flow solver
  bool force_flow = false;               // skip the 1D cumulative path
};

/// 1D EMD: sum over consecutive ids of |CDF_p - CDF_q| * gap * width.
inline double emd_cumulative(const Histogram& p, const Histogram& q) {
  require(p.axis().compatible(q.axis()), ErrorCode::space_mismatch, "EMD over different axes");
  std::vector<std::int64_t> ids;
  for (const auto& b : p.bins()) ids.push_back(b.id);
  for (const auto& b : q.bins()) ids.push_back(b.id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const double unit = p.axis().kind == AxisKind::continuous || p.axis().kind == AxisKind::lattice ? p.axis().width : 1.0;
  double cdf = 0.0, total = 0.0;
  for (std::size_t k = 0; k + 1 < ids.size(); ++k) {
    cdf += p.mass(ids[k]) - q.mass(ids[k]);
    total += std::abs(cdf) * static_cast<double>(ids[k + 1] - ids[k]) * unit;
  }
  return total;
}

/// Exact transport over the bipartite graph of the two supports.
inline double emd_flow(const Histogram& p, const Histogram& q, GroundMetric metric,
                       std::size_t flow_budget = 1'000'000) {
  require(p.axis().compatible(q.axis()), ErrorCode::space_mismatch, "EMD over different axes");
  std::vector<Bin> a, b;
  for (const auto& x : p.bins())
    if (x.mass > 0) a.push_back(x);
  for (const auto& x : q.bins())
    if (x.mass > 0) b.push_back(x);
  require(a.size() * b.size() <= flow_budget, ErrorCode::support_too_large,
          std::to_string(a.size()) + " x " + std::to_string(b.size()) + " support pairs exceed the flow budget");
  std::vector<double> supply, demand, cost;
  double sa = 0, sb = 0;
  for (const auto& x : a) sa += x.mass;
  for (const auto& x : b) sb += x.mass;
  for (const auto& x : a) supply.push_back(x.mass / sa);
  for (const auto& x : b) demand.push_back(x.mass / sb);
  cost.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) cost.push_back(ground_distance(p.axis(), metric, x.id, y.id));
  return min_cost_transport(supply, demand, cost).cost;
}

inline double emd(const Histogram& p, const Histogram& q, const EmdOptions& options = {}) {
  require(p.axis().compatible(q.axis()), ErrorCode::space_mismatch, "EMD over different axes");
  if (options.metric == GroundMetric::scalar_abs && !options.force_flow) return emd_cumulative(p, q);
  return emd_flow(p, q, options.metric, options.flow_budget);
}

/// Mann-Whitney AUC of scores q(z) for labels (z in p_supp), over every id of
/// the finite space; tied pairs count 1/2.
inline double auc(const SupportSet& p_supp, const Histogram& q) {
  require(p_supp.axis.compatible(q.axis()), ErrorCode::space_mismatch, "AUC over different spaces");
  const auto range = q.axis().range;
  require(range.has_value(), ErrorCode::space_mismatch, "AUC needs a finite space");
  const std::int64_t universe = range->second - range->first + 1;
  const auto positives = static_cast<std::int64_t>(p_supp.size());
  require(positives > 0 && positives < universe, ErrorCode::degenerate_labels,
          "support must be a non-empty proper subset of the space");

  // (score, positive) for every id; ids absent from q score 0.
  std::vector<std::pair<double, bool>> scored;
  scored.reserve(static_cast<std::size_t>(universe));
  for (std::int64_t id = range->first; id <= range->second; ++id) scored.push_back({q.mass(id), p_supp.contains(id)});
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < scored.size();) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (scored[k].second) rank_sum += avg_rank;
    i = j;
  }
  const double np = static_cast<double>(positives), nn = static_cast<double>(universe - positives);
  return (rank_sum - np * (np + 1) / 2) / (np * nn);
}

struct MarginalRow {
  std::string value;
  double p = 0.0, q = 0.0, diff = 0.0;
};

inline std::vector<double> marginal(const Histogram& h, std::size_t group) {
  const Axis& axis = h.axis();
  require(axis.kind == AxisKind::combination && axis.space, ErrorCode::space_mismatch, "marginals need a combination axis");
  require(group < axis.space->groups().size(), ErrorCode::usage, "group index out of range");
  std::vector<double> out(axis.space->groups()[group].domain_size(), 0.0);
  for (const auto& b : h.bins()) out[axis.space->tuple_of(b.id)[group]] += b.mass;
  return out;
}

/// Per-value marginals of one group under p and q and their absolute difference.
inline std::vector<MarginalRow> marginal_preservation(const Histogram& p, const Histogram& q, std::size_t group) {
  require(p.axis().compatible(q.axis()), ErrorCode::space_mismatch, "marginals over different spaces");
  const auto mp = marginal(p, group), mq = marginal(q, group);
  const auto& spec = p.axis().space->groups()[group];
  std::vector<MarginalRow> rows;
  for (std::size_t v = 0; v < mp.size(); ++v) rows.push_back({spec.label(v), mp[v], mq[v], std::abs(mp[v] - mq[v])});
  return rows;
}

inline double max_marginal_diff(const std::vector<MarginalRow>& rows) {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.diff);
  return m;
}

struct MetricsReport {
  std::optional<double> precision, recall;
  std::optional<CrossEntropy> ce;
  std::optional<double> emd;
  std::optional<double> auc;

  void validate() const {
    for (const auto& v : {precision, recall, auc})
      if (v) require(*v >= 0.0 && *v <= 1.0, ErrorCode::degenerate_histogram, "metric outside [0,1]");
    if (emd) require(*emd >= 0.0, ErrorCode::degenerate_histogram, "negative EMD");
  }

  static std::string format(double v) {
    if (std::isinf(v)) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    std::string out = buf;
    if (out.find_first_of(".en") == std::string::npos) out += ".0";
    return out;
  }

  std::vector<std::pair<std::string, std::string>> fields() const {
    const auto opt = [](const std::optional<double>& v) { return v ? format(*v) : std::string{}; };
    return {{"precision", opt(precision)},
            {"recall", opt(recall)},
            {"ce_bits", ce ? (ce->infinite ? std::string("inf") : format(ce->bits)) : std::string{}},
            {"emd", opt(emd)},
            {"auc", opt(auc)}};
  }

  /// `key value` lines; unset metrics are omitted.
  std::string to_kv() const {
    std::string out;
    for (const auto& [k, v] : fields())
      if (!v.empty()) out += k + " " + v + "\n";
    return out;
  }

  static std::string csv_header() { return "precision,recall,ce_bits,emd,auc"; }

  std::string csv_row() const {
    std::string out;
    bool first = true;
    for (const auto& [k, v] : fields()) {
      if (!first) out += ',';
      out += v;
      first = false;
    }
    return out;
  }
};

}  // namespace genprobe
