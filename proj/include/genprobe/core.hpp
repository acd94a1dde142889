#pragma once

// Feature-space data model: feature specifications, feature vectors,
// normalized histograms over binned feature values or combination ids, and
// discrete convolution of histograms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "genprobe/error.hpp"

namespace genprobe {

/// Value of one feature. monostate is the null value recorded for images an
/// evaluator could not measure.
using FeatureValue = std::variant<std::monostate, double, std::int64_t, std::string>;

inline bool is_null(const FeatureValue& v) { return std::holds_alternative<std::monostate>(v); }

inline std::optional<double> numeric_value(const FeatureValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::nullopt;
}

inline std::string to_string(const FeatureValue& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(double d) const {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", d);
      return buf;
    }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

enum class FeatureKind { continuous, integer, categorical };

/// Bin assignment tolerance, in bin widths. A value within this distance below
/// a bin edge is assigned to the bin above it, so 0.3 with width 0.02 lands in
/// [0.30, 0.32) despite 0.3 / 0.02 evaluating to 14.999999999999998.
inline constexpr double kBinEdgeSlack = 1e-9;

inline constexpr double kMassTolerance = 1e-9;

/// One probing feature and its range.
struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  double lower = 0.0;
  double upper = 1.0;
  double bin_width = 0.02;
  std::vector<std::int64_t> int_values;   // integer kind
  std::vector<std::string> categories;    // categorical kind

  static FeatureSpec continuous(std::string name, double lower, double upper, double bin_width = 0.02) {
    FeatureSpec s;
    s.name = std::move(name);
    s.kind = FeatureKind::continuous;
    s.lower = lower;
    s.upper = upper;
    s.bin_width = bin_width;
    s.validate();
    return s;
  }

  static FeatureSpec integer(std::string name, std::vector<std::int64_t> values) {
    FeatureSpec s;
    s.name = std::move(name);
    s.kind = FeatureKind::integer;
    s.int_values = std::move(values);
    s.bin_width = 1.0;
    s.validate();
    return s;
  }

  /// Integer feature over the inclusive range [lo, hi].
  static FeatureSpec integer_range(std::string name, std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> values;
    for (std::int64_t v = lo; v <= hi; ++v) values.push_back(v);
    return integer(std::move(name), std::move(values));
  }

  static FeatureSpec categorical(std::string name, std::vector<std::string> categories) {
    FeatureSpec s;
    s.name = std::move(name);
    s.kind = FeatureKind::categorical;
    s.categories = std::move(categories);
    s.bin_width = 1.0;
    s.validate();
    return s;
  }

  void validate() const {
    switch (kind) {
      case FeatureKind::continuous:
        require(lower < upper, ErrorCode::spec_invalid, "feature '" + name + "': lower must be < upper");
        require(bin_width > 0 && bin_width <= (upper - lower) * (1 + 1e-12), ErrorCode::spec_invalid,
                "feature '" + name + "': bin_width must lie in (0, upper - lower]");
        break;
      case FeatureKind::integer: {
        require(!int_values.empty(), ErrorCode::spec_invalid, "feature '" + name + "': empty domain");
        std::set<std::int64_t> seen(int_values.begin(), int_values.end());
        require(seen.size() == int_values.size(), ErrorCode::spec_invalid,
                "feature '" + name + "': duplicate domain values");
        break;
      }
      case FeatureKind::categorical: {
        require(!categories.empty(), ErrorCode::spec_invalid, "feature '" + name + "': empty domain");
        std::set<std::string> seen(categories.begin(), categories.end());
        require(seen.size() == categories.size(), ErrorCode::spec_invalid,
                "feature '" + name + "': duplicate domain values");
        break;
      }
    }
  }

  bool finite() const { return kind != FeatureKind::continuous; }

  std::size_t domain_size() const {
    return kind == FeatureKind::integer ? int_values.size() : kind == FeatureKind::categorical ? categories.size() : 0;
  }

  /// Number of bins of a continuous feature; the last bin may be partial.
  std::int64_t bin_count() const {
    if (kind != FeatureKind::continuous) return static_cast<std::int64_t>(domain_size());
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil((upper - lower) / bin_width - kBinEdgeSlack)));
  }

  /// Position of a finite-domain value inside the domain list.
  std::optional<std::size_t> index_of(const FeatureValue& v) const {
    if (kind == FeatureKind::integer) {
      std::optional<std::int64_t> iv;
      if (const auto* i = std::get_if<std::int64_t>(&v)) iv = *i;
      else if (const auto* d = std::get_if<double>(&v); d && std::floor(*d) == *d) iv = static_cast<std::int64_t>(*d);
      else if (const auto* s = std::get_if<std::string>(&v)) {
        try {
          std::size_t used = 0;
          const long long parsed = std::stoll(*s, &used);
          if (used == s->size()) iv = parsed;
        } catch (const std::exception&) {
        }
      }
      if (!iv) return std::nullopt;
      const auto it = std::find(int_values.begin(), int_values.end(), *iv);
      if (it == int_values.end()) return std::nullopt;
      return static_cast<std::size_t>(it - int_values.begin());
    }
    if (kind == FeatureKind::categorical) {
      const std::string key = std::holds_alternative<std::string>(v) ? std::get<std::string>(v) : to_string(v);
      const auto it = std::find(categories.begin(), categories.end(), key);
      if (it == categories.end()) return std::nullopt;
      return static_cast<std::size_t>(it - categories.begin());
    }
    return std::nullopt;
  }

  bool contains(const FeatureValue& v) const {
    if (kind == FeatureKind::continuous) {
      const auto d = numeric_value(v);
      return d && *d >= lower && *d <= upper;
    }
    return index_of(v).has_value();
  }

  /// Domain label of a finite-domain index.
  std::string label(std::size_t index) const {
    return kind == FeatureKind::integer ? std::to_string(int_values.at(index)) : categories.at(index);
  }

  FeatureValue value_at(std::size_t index) const {
    if (kind == FeatureKind::integer) return int_values.at(index);
    return categories.at(index);
  }
};

/// Continuous bin index of v for bins anchored at `origin` with width `width`.
inline std::int64_t continuous_bin(double v, double origin, double width) {
  return static_cast<std::int64_t>(std::floor((v - origin) / width + kBinEdgeSlack));
}

/// Point z in feature space: feature name -> value.
struct FeatureVector {
  std::map<std::string, FeatureValue> values;

  bool contains(const std::string& name) const { return values.contains(name); }

  const FeatureValue& at(const std::string& name) const {
    const auto it = values.find(name);
    require(it != values.end(), ErrorCode::spec_invalid, "feature vector has no feature '" + name + "'");
    return it->second;
  }

  /// Checks keys against a declared tuple of specs and every non-null value
  /// against its domain.
  void validate(std::span<const FeatureSpec> specs) const {
    require(values.size() == specs.size(), ErrorCode::domain_mismatch, "feature vector keys differ from specs");
    for (const auto& spec : specs) {
      const auto it = values.find(spec.name);
      require(it != values.end(), ErrorCode::domain_mismatch, "missing feature '" + spec.name + "'");
      require(is_null(it->second) || spec.contains(it->second), ErrorCode::domain_mismatch,
              "feature '" + spec.name + "' value " + to_string(it->second) + " outside its domain");
    }
  }

  bool operator==(const FeatureVector&) const = default;
};

/// Cartesian product of finite per-feature domains; a combination id is the
/// mixed-radix index of its tuple with the first group most significant, so
/// with three 0-9 digit groups the id of (7,1,7) is 717.
class CombinationSpace {
 public:
  CombinationSpace() = default;

  explicit CombinationSpace(std::vector<FeatureSpec> groups) : groups_(std::move(groups)) {
    require(!groups_.empty(), ErrorCode::spec_invalid, "combination space needs at least one group");
    size_ = 1;
    for (const auto& g : groups_) {
      require(g.finite(), ErrorCode::spec_invalid, "combination group '" + g.name + "' is not finite");
      g.validate();
      size_ *= static_cast<std::int64_t>(g.domain_size());
    }
  }

  /// N groups of categorical digits "0".."v-1".
  static CombinationSpace digits(std::size_t groups, std::size_t values = 10) {
    std::vector<std::string> cats;
    for (std::size_t v = 0; v < values; ++v) cats.push_back(std::to_string(v));
    std::vector<FeatureSpec> specs;
    for (std::size_t g = 0; g < groups; ++g) specs.push_back(FeatureSpec::categorical("d" + std::to_string(g), cats));
    return CombinationSpace(std::move(specs));
  }

  const std::vector<FeatureSpec>& groups() const { return groups_; }
  std::int64_t size() const { return size_; }

  std::int64_t id_of(std::span<const std::size_t> tuple) const {
    require(tuple.size() == groups_.size(), ErrorCode::space_mismatch, "tuple length differs from group count");
    std::int64_t id = 0;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      require(tuple[g] < groups_[g].domain_size(), ErrorCode::domain_mismatch, "tuple element outside group domain");
      id = id * static_cast<std::int64_t>(groups_[g].domain_size()) + static_cast<std::int64_t>(tuple[g]);
    }
    return id;
  }

  std::vector<std::size_t> tuple_of(std::int64_t id) const {
    require(id >= 0 && id < size_, ErrorCode::domain_mismatch, "combination id out of range");
    std::vector<std::size_t> tuple(groups_.size());
    for (std::size_t g = groups_.size(); g-- > 0;) {
      const auto radix = static_cast<std::int64_t>(groups_[g].domain_size());
      tuple[g] = static_cast<std::size_t>(id % radix);
      id /= radix;
    }
    return tuple;
  }

  /// Concatenated labels when every group label is one character ("717"),
  /// otherwise '|'-joined.
  std::string label(std::int64_t id) const {
    const auto tuple = tuple_of(id);
    std::string out;
    const bool compact = single_char_labels();
    for (std::size_t g = 0; g < tuple.size(); ++g) {
      if (!compact && g) out += '|';
      out += groups_[g].label(tuple[g]);
    }
    return out;
  }

  std::int64_t parse_label(const std::string& text) const {
    std::vector<std::string> parts;
    if (single_char_labels()) {
      require(text.size() == groups_.size(), ErrorCode::domain_mismatch, "combination label '" + text + "' has wrong length");
      for (char ch : text) parts.emplace_back(1, ch);
    } else {
      std::stringstream ss(text);
      for (std::string part; std::getline(ss, part, '|');) parts.push_back(part);
      require(parts.size() == groups_.size(), ErrorCode::domain_mismatch, "combination label '" + text + "' has wrong arity");
    }
    std::vector<std::size_t> tuple;
    for (std::size_t g = 0; g < parts.size(); ++g) {
      const auto idx = groups_[g].index_of(FeatureValue{parts[g]});
      require(idx.has_value(), ErrorCode::domain_mismatch, "combination label '" + text + "' outside the space");
      tuple.push_back(*idx);
    }
    return id_of(tuple);
  }

  bool operator==(const CombinationSpace& other) const {
    if (size_ != other.size_ || groups_.size() != other.groups_.size()) return false;
    for (std::size_t g = 0; g < groups_.size(); ++g)
      if (groups_[g].domain_size() != other.groups_[g].domain_size()) return false;
    return true;
  }

 private:
  bool single_char_labels() const {
    for (const auto& g : groups_)
      for (std::size_t i = 0; i < g.domain_size(); ++i)
        if (g.label(i).size() != 1) return false;
    return true;
  }

  std::vector<FeatureSpec> groups_;
  std::int64_t size_ = 0;
};

enum class AxisKind {
  lattice,      // unbounded integer grid; kernels and offsets live here
  continuous,   // bins of a continuous FeatureSpec
  integer,      // bin id = the integer value
  categorical,  // bin id = category index
  combination,  // bin id = combination id
};

/// What a histogram's bin ids mean.
struct Axis {
  AxisKind kind = AxisKind::lattice;
  double origin = 0.0;
  double width = 1.0;
  /// Inclusive range of representable bin ids; unbounded when empty.
  std::optional<std::pair<std::int64_t, std::int64_t>> range;
  std::shared_ptr<const FeatureSpec> feature;
  std::shared_ptr<const CombinationSpace> space;

  static Axis lattice(double width = 1.0, double origin = 0.0) {
    Axis a;
    a.width = width;
    a.origin = origin;
    return a;
  }

  static Axis of(const FeatureSpec& spec) {
    spec.validate();
    Axis a;
    a.feature = std::make_shared<const FeatureSpec>(spec);
    switch (spec.kind) {
      case FeatureKind::continuous:
        a.kind = AxisKind::continuous;
        a.origin = spec.lower;
        a.width = spec.bin_width;
        a.range = std::pair<std::int64_t, std::int64_t>{0, spec.bin_count() - 1};
        break;
      case FeatureKind::integer: {
        a.kind = AxisKind::integer;
        const auto [lo, hi] = std::minmax_element(spec.int_values.begin(), spec.int_values.end());
        a.range = std::pair{*lo, *hi};
        break;
      }
      case FeatureKind::categorical:
        a.kind = AxisKind::categorical;
        a.range = std::pair<std::int64_t, std::int64_t>{0, static_cast<std::int64_t>(spec.domain_size()) - 1};
        break;
    }
    return a;
  }

  static Axis of(const CombinationSpace& space) {
    Axis a;
    a.kind = AxisKind::combination;
    a.space = std::make_shared<const CombinationSpace>(space);
    a.range = std::pair<std::int64_t, std::int64_t>{0, space.size() - 1};
    return a;
  }

  bool numeric() const { return kind == AxisKind::lattice || kind == AxisKind::continuous || kind == AxisKind::integer; }

  bool in_range(std::int64_t id) const { return !range || (id >= range->first && id <= range->second); }

  /// Number of representable ids when finite.
  std::optional<std::int64_t> universe_size() const {
    if (!range) return std::nullopt;
    return range->second - range->first + 1;
  }

  /// Feature-value coordinate of a bin's center (numeric axes), or the id.
  double center(std::int64_t id) const {
    switch (kind) {
      case AxisKind::continuous: {
        const double lo = origin + static_cast<double>(id) * width;
        const double hi = feature ? std::min(lo + width, feature->upper) : lo + width;
        return 0.5 * (lo + hi);
      }
      case AxisKind::lattice: return origin + static_cast<double>(id) * width;
      default: return static_cast<double>(id);
    }
  }

  /// Text rendering of a bin: lower edge, literal value or combination label.
  std::string label(std::int64_t id) const {
    char buf[40];
    switch (kind) {
      case AxisKind::continuous:
        std::snprintf(buf, sizeof buf, "%.12g", origin + static_cast<double>(id) * width);
        return buf;
      case AxisKind::categorical:
        return feature ? feature->categories.at(static_cast<std::size_t>(id)) : std::to_string(id);
      case AxisKind::combination:
        return space ? space->label(id) : std::to_string(id);
      default:
        return std::to_string(id);
    }
  }

  std::int64_t parse_label(const std::string& text) const {
    switch (kind) {
      case AxisKind::continuous:
        return continuous_bin(std::stod(text), origin, width);
      case AxisKind::categorical: {
        require(feature != nullptr, ErrorCode::spec_invalid, "categorical axis without feature spec");
        const auto idx = feature->index_of(FeatureValue{text});
        require(idx.has_value(), ErrorCode::domain_mismatch, "unknown category '" + text + "'");
        return static_cast<std::int64_t>(*idx);
      }
      case AxisKind::combination:
        require(space != nullptr, ErrorCode::spec_invalid, "combination axis without space");
        return space->parse_label(text);
      default:
        return std::stoll(text);
    }
  }

  /// Same kind of axis with the same bin width.
  bool compatible(const Axis& other) const {
    if (kind != other.kind) return false;
    if (std::abs(width - other.width) > 1e-12 * std::max(width, other.width)) return false;
    if (kind == AxisKind::combination && space && other.space && !(*space == *other.space)) return false;
    return true;
  }
};

struct Bin {
  std::int64_t id = 0;
  double mass = 0.0;
  bool operator==(const Bin&) const = default;
};

/// Normalized discrete distribution over the bins of an axis. Bins are kept
/// sorted by id; absent ids carry zero mass.
class Histogram {
 public:
  Histogram() = default;

  /// Takes bins as given and checks the invariants.
  Histogram(Axis axis, std::vector<Bin> bins) : axis_(std::move(axis)), bins_(std::move(bins)) {
    double total = 0.0;
    for (std::size_t i = 0; i < bins_.size(); ++i) {
      require(bins_[i].mass >= 0.0 && std::isfinite(bins_[i].mass), ErrorCode::degenerate_histogram,
              "negative or non-finite bin mass");
      require(i == 0 || bins_[i - 1].id < bins_[i].id, ErrorCode::degenerate_histogram,
              "bin ids must be strictly increasing");
      total += bins_[i].mass;
    }
    require(std::abs(total - 1.0) <= kMassTolerance, ErrorCode::degenerate_histogram,
            "histogram mass " + std::to_string(total) + " is not 1");
  }

  /// Sorts, merges duplicate ids, drops zero bins and rescales to unit mass.
  static Histogram normalized(Axis axis, std::vector<Bin> bins) {
    std::map<std::int64_t, double> acc;
    for (const auto& b : bins) {
      require(b.mass >= 0.0 && std::isfinite(b.mass), ErrorCode::degenerate_histogram, "negative or non-finite mass");
      acc[b.id] += b.mass;
    }
    double total = 0.0;
    for (const auto& [id, m] : acc) total += m;
    require(total > 0.0, ErrorCode::degenerate_histogram, "histogram carries no mass");
    std::vector<Bin> out;
    out.reserve(acc.size());
    for (const auto& [id, m] : acc)
      if (m > 0.0) out.push_back({id, m / total});
    Histogram h;
    h.axis_ = std::move(axis);
    h.bins_ = std::move(out);
    return h;
  }

  static Histogram delta(Axis axis, std::int64_t id) { return Histogram(std::move(axis), {{id, 1.0}}); }

  const Axis& axis() const { return axis_; }
  std::span<const Bin> bins() const { return bins_; }
  bool empty() const { return bins_.empty(); }

  double mass(std::int64_t id) const {
    const auto it = std::lower_bound(bins_.begin(), bins_.end(), id, [](const Bin& b, std::int64_t v) { return b.id < v; });
    return it != bins_.end() && it->id == id ? it->mass : 0.0;
  }

  double total() const {
    double t = 0.0;
    for (const auto& b : bins_) t += b.mass;
    return t;
  }

  /// Lowest and highest id carrying positive mass.
  std::pair<std::int64_t, std::int64_t> id_span() const {
    std::int64_t lo = 0, hi = -1;
    bool any = false;
    for (const auto& b : bins_) {
      if (b.mass <= 0) continue;
      if (!any) lo = b.id;
      hi = b.id;
      any = true;
    }
    require(any, ErrorCode::degenerate_histogram, "histogram carries no mass");
    return {lo, hi};
  }

  /// Mean position in feature-value coordinates.
  double mean() const {
    double m = 0.0;
    for (const auto& b : bins_) m += b.mass * axis_.center(b.id);
    return m;
  }

  double variance() const {
    const double mu = mean();
    double v = 0.0;
    for (const auto& b : bins_) v += b.mass * (axis_.center(b.id) - mu) * (axis_.center(b.id) - mu);
    return v;
  }

  /// Same masses under a different axis (e.g. re-labelled as a kernel).
  Histogram with_axis(Axis axis) const {
    Histogram h = *this;
    h.axis_ = std::move(axis);
    return h;
  }

  /// Ids shifted by `offset`.
  Histogram shifted(std::int64_t offset) const {
    Histogram h = *this;
    for (auto& b : h.bins_) b.id += offset;
    return h;
  }

 private:
  Axis axis_;
  std::vector<Bin> bins_;
};

struct SampleHistogram {
  Histogram histogram;
  std::size_t clipped = 0;  // continuous values moved onto a domain edge
};

/// Empirical distribution of `values` over the bins of `spec`. Continuous
/// bins are [lower + k*w, lower + (k+1)*w) with the last bin closed at upper;
/// out-of-domain continuous values are clipped and counted. Null values are
/// skipped.
inline SampleHistogram histogram_from_samples(std::span<const FeatureValue> values, const FeatureSpec& spec) {
  Axis axis = Axis::of(spec);
  std::map<std::int64_t, std::size_t> counts;
  std::size_t n = 0, clipped = 0;
  for (const auto& v : values) {
    if (is_null(v)) continue;
    std::int64_t id = 0;
    if (spec.kind == FeatureKind::continuous) {
      auto d = numeric_value(v);
      require(d.has_value() && std::isfinite(*d), ErrorCode::domain_mismatch,
              "non-numeric value for continuous feature '" + spec.name + "'");
      if (*d < spec.lower || *d > spec.upper) {
        ++clipped;
        d = std::clamp(*d, spec.lower, spec.upper);
      }
      id = std::clamp<std::int64_t>(continuous_bin(*d, spec.lower, spec.bin_width), 0, spec.bin_count() - 1);
    } else {
      const auto idx = spec.index_of(v);
      require(idx.has_value(), ErrorCode::domain_mismatch,
              "value " + to_string(v) + " outside the domain of '" + spec.name + "'");
      id = spec.kind == FeatureKind::integer ? spec.int_values[*idx] : static_cast<std::int64_t>(*idx);
    }
    ++counts[id];
    ++n;
  }
  require(n > 0, ErrorCode::empty_sample, "no values for feature '" + spec.name + "'");
  std::vector<Bin> bins;
  bins.reserve(counts.size());
  for (const auto& [id, c] : counts) bins.push_back({id, static_cast<double>(c) / static_cast<double>(n)});
  return {Histogram(std::move(axis), std::move(bins)), clipped};
}

inline SampleHistogram histogram_from_samples(std::span<const double> values, const FeatureSpec& spec) {
  std::vector<FeatureValue> wrapped(values.begin(), values.end());
  return histogram_from_samples(std::span<const FeatureValue>(wrapped), spec);
}

/// Empirical distribution of combination ids.
inline Histogram histogram_from_ids(std::span<const std::int64_t> ids, const Axis& axis) {
  require(!ids.empty(), ErrorCode::empty_sample, "no combination ids");
  std::map<std::int64_t, std::size_t> counts;
  for (const auto id : ids) {
    require(axis.in_range(id), ErrorCode::domain_mismatch, "id " + std::to_string(id) + " outside the axis");
    ++counts[id];
  }
  std::vector<Bin> bins;
  for (const auto& [id, c] : counts) bins.push_back({id, static_cast<double>(c) / static_cast<double>(ids.size())});
  return Histogram(axis, std::move(bins));
}

/// Raw shift-and-sum of p with kernel h (h's ids read as offsets) before any
/// truncation or renormalization.
inline std::vector<Bin> convolve_raw(const Histogram& p, const Histogram& h) {
  std::map<std::int64_t, double> acc;
  for (const auto& pb : p.bins())
    for (const auto& hb : h.bins()) acc[pb.id + hb.id] += pb.mass * hb.mass;
  std::vector<Bin> out;
  out.reserve(acc.size());
  for (const auto& [id, m] : acc) out.push_back({id, m});
  return out;
}

/// q(b) = sum_m p(m) h(b - m). h must be a centered kernel on a lattice axis
/// (or an axis of p's kind) with p's bin width. The result lives on p's axis;
/// mass outside p's representable range is dropped and the rest renormalized.
inline Histogram discrete_convolve(const Histogram& p, const Histogram& h) {
  const Axis& pa = p.axis();
  const Axis& ha = h.axis();
  require(ha.kind == AxisKind::lattice || ha.kind == pa.kind, ErrorCode::axis_mismatch, "kernel axis kind differs");
  require(std::abs(pa.width - ha.width) <= 1e-12 * std::max(pa.width, ha.width), ErrorCode::axis_mismatch,
          "bin widths differ");
  require(pa.kind != AxisKind::categorical && pa.kind != AxisKind::combination, ErrorCode::axis_mismatch,
          "convolution needs an ordered numeric axis");
  auto raw = convolve_raw(p, h);
  std::vector<Bin> kept;
  for (const auto& b : raw)
    if (pa.in_range(b.id)) kept.push_back(b);
  require(!kept.empty(), ErrorCode::degenerate_histogram, "convolution mass falls outside the axis");
  // nothing truncated: keep the raw sums so a delta kernel is an exact identity
  if (kept.size() == raw.size()) return Histogram(pa, std::move(kept));
  return Histogram::normalized(pa, std::move(kept));
}

/// 0.5 * sum |a - b| over the union of bins.
inline double total_variation(const Histogram& a, const Histogram& b) {
  require(a.axis().compatible(b.axis()), ErrorCode::axis_mismatch, "total variation over different axes");
  double sum = 0.0;
  auto ia = a.bins().begin(), ib = b.bins().begin();
  const auto ea = a.bins().end(), eb = b.bins().end();
  while (ia != ea || ib != eb) {
    if (ib == eb || (ia != ea && ia->id < ib->id)) {
      sum += ia->mass;
      ++ia;
    } else if (ia == ea || ib->id < ia->id) {
      sum += ib->mass;
      ++ib;
    } else {
      sum += std::abs(ia->mass - ib->mass);
      ++ia;
      ++ib;
    }
  }
  return std::min(1.0, 0.5 * sum);
}

/// CSV with header `bin,mass`; masses printed with 17 significant digits.
inline std::string to_csv(const Histogram& h) {
  std::string out = "bin,mass\n";
  char buf[40];
  for (const auto& b : h.bins()) {
    std::snprintf(buf, sizeof buf, "%.17g", b.mass);
    out += h.axis().label(b.id) + "," + buf + "\n";
  }
  return out;
}

inline Histogram histogram_from_csv(const std::string& text, const Axis& axis) {
  std::stringstream ss(text);
  std::string line;
  require(static_cast<bool>(std::getline(ss, line)), ErrorCode::io, "empty histogram CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "bin,mass", ErrorCode::io, "histogram CSV header must be 'bin,mass'");
  std::vector<Bin> bins;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    require(comma != std::string::npos, ErrorCode::io, "malformed histogram CSV line '" + line + "'");
    try {
      bins.push_back({axis.parse_label(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    } catch (const std::logic_error&) {
      fail(ErrorCode::io, "malformed histogram CSV line '" + line + "'");
    }
  }
  std::sort(bins.begin(), bins.end(), [](const Bin& a, const Bin& b) { return a.id < b.id; });
  return Histogram(axis, std::move(bins));
}

}  // namespace genprobe
