#pragma once

// Reference learner: a feature-space test double for image generators.
//
// It does not model pixels. Per continuous or integer feature it smooths each
// training mode with a kernel, merging modes that lie closer than
// snap_threshold * bandwidth into their weighted mean with a narrower kernel.
// Over a combination space it memorizes the training combinations when there
// are fewer than combo_threshold of them and otherwise samples each group
// independently from its training marginal.
//
// Real learners plug in through the dataset directory layout instead: they
// read <dataset>/images + manifest.jsonl and write <samples>/images
// (+ labels.jsonl).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "genprobe/core.hpp"
#include "genprobe/error.hpp"
#include "genprobe/manifest.hpp"
#include "genprobe/parallel.hpp"
#include "genprobe/random.hpp"
#include "genprobe/synth.hpp"

namespace genprobe {

enum class KernelFamily { gaussian_discrete, lognormal_discrete };

inline KernelFamily kernel_family_from_string(const std::string& s) {
  if (s == "gaussian_discrete" || s == "gaussian") return KernelFamily::gaussian_discrete;
  if (s == "lognormal_discrete" || s == "lognormal") return KernelFamily::lognormal_discrete;
  fail(ErrorCode::spec_invalid, "unknown kernel family '" + s + "'");
}

struct FeatureModelConfig {
  FeatureSpec spec;
  KernelFamily family = KernelFamily::gaussian_discrete;
  double bandwidth = 0.02;  // kernel std in feature units
};

/// Where combination ids come from: one feature per group, or one string
/// feature holding the combination label (e.g. "717").
struct ComboBinding {
  CombinationSpace space;
  std::vector<std::string> features;

  bool single_label() const { return features.size() == 1 && space.groups().size() > 1; }

  std::int64_t id_of(const FeatureVector& fv) const {
    if (single_label()) {
      const auto& v = fv.at(features[0]);
      require(std::holds_alternative<std::string>(v), ErrorCode::domain_mismatch,
              "combination feature '" + features[0] + "' must be a string label");
      return space.parse_label(std::get<std::string>(v));
    }
    require(features.size() == space.groups().size(), ErrorCode::spec_invalid, "one feature per combination group needed");
    std::vector<std::size_t> tuple;
    for (std::size_t g = 0; g < features.size(); ++g) {
      const auto idx = space.groups()[g].index_of(fv.at(features[g]));
      require(idx.has_value(), ErrorCode::domain_mismatch, "feature '" + features[g] + "' outside its group domain");
      tuple.push_back(*idx);
    }
    return space.id_of(tuple);
  }

  void write(FeatureVector& fv, std::int64_t id) const {
    if (single_label()) {
      fv.values[features[0]] = space.label(id);
      return;
    }
    const auto tuple = space.tuple_of(id);
    for (std::size_t g = 0; g < features.size(); ++g) fv.values[features[g]] = space.groups()[g].value_at(tuple[g]);
  }
};

struct LearnerConfig {
  std::vector<FeatureModelConfig> features;
  std::optional<ComboBinding> combination;
  double snap_threshold = 1.5;       // merge gap, in bandwidths
  double snap_shrink = 0.8;          // kernel std multiplier of merged modes
  std::int64_t combo_threshold = 100;  // T: memorize below, generalize at or above
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;

  void validate() const {
    for (const auto& f : features) {
      f.spec.validate();
      require(f.bandwidth > 0, ErrorCode::spec_invalid, "bandwidth must be positive for '" + f.spec.name + "'");
      require(f.spec.kind != FeatureKind::categorical, ErrorCode::spec_invalid,
              "kernel features must be continuous or integer: '" + f.spec.name + "'");
    }
    require(snap_threshold > 0, ErrorCode::spec_invalid, "snap_threshold must be positive");
    require(snap_shrink > 0 && snap_shrink <= 1, ErrorCode::spec_invalid, "snap_shrink must lie in (0, 1]");
    require(combo_threshold >= 1, ErrorCode::spec_invalid, "combo_threshold must be at least 1");
  }
};

struct Mode {
  double center = 0.0;
  double weight = 0.0;
  double std = 0.0;
  bool merged = false;
};

struct FeatureModel {
  FeatureModelConfig config;
  std::vector<Mode> modes;
};

enum class ComboMode { memorize, generalize };

struct ComboModel {
  ComboBinding binding;
  ComboMode mode = ComboMode::memorize;
  std::vector<std::int64_t> training_combos;    // distinct, ascending
  std::vector<std::vector<double>> marginals;    // per group, over domain indices
};

struct LearnerModel {
  LearnerConfig config;
  std::vector<FeatureModel> features;
  std::optional<ComboModel> combination;
};

/// Distinct training values merged left to right while adjacent gaps stay
/// below snap_threshold * bandwidth.
inline std::vector<Mode> fit_modes(const std::map<double, double>& weights, const FeatureModelConfig& f,
                                   const LearnerConfig& config) {
  std::vector<Mode> modes;
  for (const auto& [value, w] : weights) modes.push_back({value, w, f.bandwidth, false});
  const double gap_limit = config.snap_threshold * f.bandwidth;
  for (;;) {
    std::size_t best = modes.size();
    double best_gap = gap_limit;
    for (std::size_t i = 0; i + 1 < modes.size(); ++i) {
      const double gap = modes[i + 1].center - modes[i].center;
      if (gap < best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best == modes.size()) break;
    const Mode a = modes[best], b = modes[best + 1];
    const double w = a.weight + b.weight;
    modes[best] = {(a.center * a.weight + b.center * b.weight) / w, w, f.bandwidth * config.snap_shrink, true};
    modes.erase(modes.begin() + static_cast<std::ptrdiff_t>(best) + 1);
  }
  return modes;
}

inline LearnerModel fit(const DatasetManifest& train, const LearnerConfig& config) {
  require(!train.empty(), ErrorCode::empty_manifest, "training manifest is empty");
  config.validate();
  LearnerModel model;
  model.config = config;
  for (const auto& f : config.features) {
    std::map<double, double> weights;
    std::size_t n = 0;
    for (const auto& r : train.records) {
      const auto it = r.features.values.find(f.spec.name);
      if (it == r.features.values.end() || is_null(it->second)) continue;
      const auto v = numeric_value(it->second);
      require(v.has_value(), ErrorCode::domain_mismatch, "feature '" + f.spec.name + "' is not numeric");
      weights[*v] += 1.0;
      ++n;
    }
    require(n > 0, ErrorCode::empty_manifest, "no training values for '" + f.spec.name + "'");
    for (auto& [v, w] : weights) w /= static_cast<double>(n);
    model.features.push_back({f, fit_modes(weights, f, config)});
  }
  if (config.combination) {
    const auto& binding = *config.combination;
    ComboModel combo;
    combo.binding = binding;
    const auto& groups = binding.space.groups();
    combo.marginals.resize(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) combo.marginals[g].assign(groups[g].domain_size(), 0.0);
    std::size_t n = 0;
    for (const auto& r : train.records) {
      const auto id = binding.id_of(r.features);
      combo.training_combos.push_back(id);
      const auto tuple = binding.space.tuple_of(id);
      for (std::size_t g = 0; g < tuple.size(); ++g) combo.marginals[g][tuple[g]] += 1.0;
      ++n;
    }
    for (auto& m : combo.marginals)
      for (auto& x : m) x /= static_cast<double>(n);
    std::sort(combo.training_combos.begin(), combo.training_combos.end());
    combo.training_combos.erase(std::unique(combo.training_combos.begin(), combo.training_combos.end()),
                                combo.training_combos.end());
    combo.mode = static_cast<std::int64_t>(combo.training_combos.size()) < config.combo_threshold ? ComboMode::memorize
                                                                                                 : ComboMode::generalize;
    model.combination = std::move(combo);
  }
  return model;
}

namespace detail {

inline std::size_t draw_weighted(Rng& rng, const std::vector<double>& weights) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0) return i;
  return 0;
}

inline FeatureValue draw_feature(Rng& rng, const FeatureModel& fm) {
  std::vector<double> w;
  for (const auto& m : fm.modes) w.push_back(m.weight);
  const Mode& mode = fm.modes[draw_weighted(rng, w)];
  const double z = rng.normal();
  double value = mode.center + mode.std * z;
  if (fm.config.family == KernelFamily::lognormal_discrete && mode.center > 0)
    value = mode.center * std::exp(mode.std / mode.center * z);
  const auto& spec = fm.config.spec;
  if (spec.kind == FeatureKind::integer) {
    const auto [lo, hi] = std::minmax_element(spec.int_values.begin(), spec.int_values.end());
    return std::clamp<std::int64_t>(std::llround(value), *lo, *hi);
  }
  return std::clamp(value, spec.lower, spec.upper);
}

}  // namespace detail

/// n draws from the model; draw i uses item_seed(seed, i).
inline DatasetManifest sample(const LearnerModel& model, std::size_t n, std::uint64_t seed) {
  DatasetManifest out;
  out.records.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const auto s = item_seed(seed, i);
    Rng rng(s);
    auto& rec = out.records[i];
    rec.file = "images/" + image_name(i);
    rec.seed = s;
    for (const auto& fm : model.features) rec.features.values[fm.config.spec.name] = detail::draw_feature(rng, fm);
    if (model.combination) {
      const auto& combo = *model.combination;
      std::int64_t id = 0;
      if (combo.mode == ComboMode::memorize) {
        id = combo.training_combos[rng.below(combo.training_combos.size())];
      } else {
        std::vector<std::size_t> tuple;
        for (const auto& m : combo.marginals) tuple.push_back(detail::draw_weighted(rng, m));
        id = combo.binding.space.id_of(tuple);
      }
      combo.binding.write(rec.features, id);
    }
  });
  return out;
}

/// Analytic per-feature distribution of the model, binned on the feature's
/// axis (kernel mass beyond the domain is folded onto the edge bins, matching
/// the clipping done when sampling).
inline Histogram model_histogram(const FeatureModel& fm) {
  const auto& spec = fm.config.spec;
  require(spec.kind == FeatureKind::continuous && fm.config.family == KernelFamily::gaussian_discrete, ErrorCode::usage,
          "analytic histogram implemented for continuous gaussian features");
  const auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  std::vector<Bin> bins;
  const auto count = spec.bin_count();
  for (std::int64_t k = 0; k < count; ++k) {
    const double lo = k == 0 ? -INFINITY : spec.lower + static_cast<double>(k) * spec.bin_width;
    const double hi = k == count - 1 ? INFINITY : spec.lower + static_cast<double>(k + 1) * spec.bin_width;
    double mass = 0.0;
    for (const auto& m : fm.modes) mass += m.weight * (cdf((hi - m.center) / m.std) - cdf((lo - m.center) / m.std));
    bins.push_back({k, mass});
  }
  return Histogram::normalized(Axis::of(spec), std::move(bins));
}

/// Learner config document:
///   {"features": [{"name": "red_proportion", "family": "gaussian_discrete",
///                  "bandwidth": 0.05, "bin_width": 0.02}],
///    "combination": {"features": ["combination"], "groups": 3, "values": 10},
///    "snap_threshold": 1.5, "snap_shrink": 0.8, "combo_threshold": 100,
///    "sample_count": 100000, "seed": 1}
/// Feature domains come from the standard generator features, or explicitly
/// from "lower"/"upper" (continuous) or "values" (integer).
inline LearnerConfig learner_config_from_json(const json& j) {
  require(j.is_object(), ErrorCode::spec_invalid, "learner config must be a JSON object");
  LearnerConfig c;
  try {
    for (const auto& f : j.value("features", json::array())) {
      FeatureModelConfig fm;
      const auto name = f.at("name").get<std::string>();
      const double bw = f.value("bin_width", 0.02);
      if (f.contains("values")) {
        fm.spec = FeatureSpec::integer(name, f.at("values").get<std::vector<std::int64_t>>());
      } else if (f.contains("lower") || f.contains("upper")) {
        fm.spec = FeatureSpec::continuous(name, f.at("lower").get<double>(), f.at("upper").get<double>(), bw);
      } else {
        const auto standard = standard_feature_spec(name, bw);
        require(standard.has_value(), ErrorCode::spec_invalid, "feature '" + name + "' needs an explicit domain");
        fm.spec = *standard;
      }
      fm.family = kernel_family_from_string(f.value("family", std::string("gaussian_discrete")));
      fm.bandwidth = f.value("bandwidth", fm.bandwidth);
      c.features.push_back(std::move(fm));
    }
    if (j.contains("combination")) {
      const auto& cj = j.at("combination");
      ComboBinding b;
      b.space = CombinationSpace::digits(cj.value("groups", std::size_t{3}), cj.value("values", std::size_t{10}));
      b.features = cj.value("features", std::vector<std::string>{"combination"});
      c.combination = std::move(b);
    }
    c.snap_threshold = j.value("snap_threshold", c.snap_threshold);
    c.snap_shrink = j.value("snap_shrink", c.snap_shrink);
    c.combo_threshold = j.value("combo_threshold", c.combo_threshold);
    c.sample_count = j.value("sample_count", c.sample_count);
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    fail(ErrorCode::spec_invalid, std::string("learner config: ") + e.what());
  }
  c.validate();
  return c;
}

inline json to_json(const LearnerModel& model) {
  json j;
  j["features"] = json::array();
  for (const auto& f : model.features) {
    json modes = json::array();
    for (const auto& m : f.modes) modes.push_back({{"center", m.center}, {"weight", m.weight}, {"std", m.std}, {"merged", m.merged}});
    j["features"].push_back({{"name", f.config.spec.name}, {"modes", modes}});
  }
  if (model.combination) {
    j["combination"] = {{"mode", model.combination->mode == ComboMode::memorize ? "memorize" : "generalize"},
                        {"training_combinations", model.combination->training_combos.size()}};
  }
  return j;
}

}  // namespace genprobe
