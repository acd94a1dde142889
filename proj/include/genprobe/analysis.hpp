#pragma once

// Single-feature generalization analyses: impulse responses, convolution
// predictions, prototype-enhancement detection and independence reports.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "genprobe/core.hpp"
#include "genprobe/error.hpp"

namespace genprobe {

/// Mean, variance and skewness of a kernel in feature units.
struct KernelStats {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
};

struct ImpulseResponse {
  Histogram kernel;              // lattice axis, modal bin at offset 0
  double source_mode = 0.0;      // training feature value the response was measured at
  std::int64_t mode_shift = 0;   // modal bin minus the bin holding source_mode
  KernelStats stats;             // of the kernel relative to source_mode
};

namespace detail {

inline std::int64_t bin_containing(const Axis& axis, double value) {
  switch (axis.kind) {
    case AxisKind::continuous: {
      auto id = continuous_bin(value, axis.origin, axis.width);
      if (axis.range) id = std::clamp(id, axis.range->first, axis.range->second);
      return id;
    }
    case AxisKind::lattice: return static_cast<std::int64_t>(std::llround((value - axis.origin) / axis.width));
    default: return static_cast<std::int64_t>(std::llround(value));
  }
}

inline KernelStats kernel_stats(const Histogram& kernel, std::int64_t shift, double width) {
  KernelStats s;
  for (const auto& b : kernel.bins()) s.mean += b.mass * static_cast<double>(b.id + shift) * width;
  double m3 = 0.0;
  for (const auto& b : kernel.bins()) {
    const double d = static_cast<double>(b.id + shift) * width - s.mean;
    s.variance += b.mass * d * d;
    m3 += b.mass * d * d * d;
  }
  s.skewness = s.variance > 0 ? m3 / std::pow(s.variance, 1.5) : 0.0;
  return s;
}

}  // namespace detail

/// Learned distribution q for a single-mode training set, re-centered so its
/// modal bin is offset 0. Equal modal bins resolve to the one whose center is
/// nearest the training mode, then to the lower bin.
inline ImpulseResponse estimate_impulse_response(const Histogram& q, double training_mode) {
  require(!q.empty(), ErrorCode::degenerate_histogram, "impulse response of an empty histogram");
  require(q.axis().numeric(), ErrorCode::axis_mismatch, "impulse responses need an ordered numeric axis");
  const Axis& axis = q.axis();
  if (axis.feature && axis.kind == AxisKind::continuous)
    require(training_mode >= axis.feature->lower && training_mode <= axis.feature->upper, ErrorCode::domain_mismatch,
            "training mode outside the feature domain");
  double top = -1.0;
  for (const auto& b : q.bins()) top = std::max(top, b.mass);
  require(top > 0.0, ErrorCode::degenerate_histogram, "histogram carries no mass");
  std::optional<std::int64_t> modal;
  double modal_dist = 0.0;
  for (const auto& b : q.bins()) {
    if (b.mass != top) continue;
    const double dist = std::abs(axis.center(b.id) - training_mode);
    if (!modal || dist < modal_dist - 1e-12) {
      modal = b.id;
      modal_dist = dist;
    }
  }
  ImpulseResponse ir;
  ir.source_mode = training_mode;
  ir.mode_shift = *modal - detail::bin_containing(axis, training_mode);
  std::vector<Bin> bins;
  for (const auto& b : q.bins()) bins.push_back({b.id - *modal, b.mass});
  ir.kernel = Histogram::normalized(Axis::lattice(axis.kind == AxisKind::integer ? 1.0 : axis.width), std::move(bins));
  ir.stats = detail::kernel_stats(ir.kernel, ir.mode_shift, ir.kernel.axis().width);
  return ir;
}

/// Training distribution convolved with the impulse response, anchored at
/// the bin holding each training value (mode_shift restores any displacement
/// of the response's mode), truncated to the axis and renormalized.
inline Histogram predict_response(const Histogram& p_train, const ImpulseResponse& h) {
  return discrete_convolve(p_train, h.kernel.shifted(h.mode_shift));
}

struct ModeCountOptions {
  int window = 3;             // moving-average width in bins
  double prominence = 0.05;   // fraction of the global maximum
};

/// Masses on consecutive ids lo..hi, zero padded by `pad` bins on both sides.
inline std::vector<double> dense_masses(const Histogram& h, std::int64_t lo, std::int64_t hi, std::int64_t pad) {
  std::vector<double> out(static_cast<std::size_t>(hi - lo + 1 + 2 * pad), 0.0);
  for (const auto& b : h.bins())
    if (b.id >= lo && b.id <= hi) out[static_cast<std::size_t>(b.id - lo + pad)] = b.mass;
  return out;
}

inline std::vector<double> moving_average(const std::vector<double>& x, int window) {
  if (window <= 1) return x;
  const int half = window / 2;
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (int k = -half; k <= half; ++k) {
      const auto j = static_cast<std::ptrdiff_t>(i) + k;
      if (j >= 0 && j < static_cast<std::ptrdiff_t>(x.size())) s += x[static_cast<std::size_t>(j)];
    }
    out[i] = s / (2 * half + 1);
  }
  return out;
}

/// Peaks (plateaus count once) with topographic prominence at least
/// `min_prominence`. Values beyond the ends are treated as zero.
inline std::vector<std::size_t> prominent_peaks(const std::vector<double>& x, double min_prominence) {
  std::vector<std::size_t> peaks;
  const std::size_t n = x.size();
  const auto left_of = [&](std::size_t i) { return i == 0 ? 0.0 : x[i - 1]; };
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && x[j + 1] == x[i]) ++j;
    const double right = j + 1 < n ? x[j + 1] : 0.0;
    const double height = x[i];
    if (height > left_of(i) && height > right) {
      double left_min = height;
      bool blocked = false;
      for (std::size_t k = i; k-- > 0;) {
        if (x[k] > height) {
          blocked = true;
          break;
        }
        left_min = std::min(left_min, x[k]);
      }
      if (!blocked) left_min = std::min(left_min, 0.0);
      double right_min = height;
      blocked = false;
      for (std::size_t k = j + 1; k < n; ++k) {
        if (x[k] > height) {
          blocked = true;
          break;
        }
        right_min = std::min(right_min, x[k]);
      }
      if (!blocked) right_min = std::min(right_min, 0.0);
      const double prominence = height - std::max(left_min, right_min);
      if (prominence >= min_prominence && height > 0.0) peaks.push_back((i + j) / 2);
    }
    i = j + 1;
  }
  return peaks;
}

/// Number of modes after moving-average smoothing, counting local maxima whose
/// prominence reaches `prominence` times the smoothed global maximum.
inline int count_modes(const Histogram& h, const ModeCountOptions& options = {}) {
  const auto [lo, hi] = h.id_span();
  const auto smooth = moving_average(dense_masses(h, lo, hi, options.window), options.window);
  const double top = *std::max_element(smooth.begin(), smooth.end());
  return static_cast<int>(prominent_peaks(smooth, options.prominence * top).size());
}

struct PrototypeConfig {
  int window = 3;
  double prominence = 0.05;
  int delta_bins = 2;
  double ratio_threshold = 1.2;
  /// Value the concentration window is centered on; defaults to the mean of
  /// the predicted histogram.
  std::optional<double> center;
};

struct PrototypeReport {
  Histogram predicted;
  Histogram actual;
  int predicted_modes = 0;
  int actual_modes = 0;
  double center = 0.0;
  double concentration_ratio = 1.0;
  bool enhanced = false;
};

/// Mass of bins whose center lies within (delta + 1/2) bins of `center`.
inline double mass_near(const Histogram& h, double center, int delta_bins) {
  const double reach = (delta_bins + 0.5) * h.axis().width * (1.0 + 1e-9);
  double m = 0.0;
  for (const auto& b : h.bins())
    if (std::abs(h.axis().center(b.id) - center) <= reach) m += b.mass;
  return m;
}

/// Flags prototype enhancement: the prediction has >= 2 modes, the learner's
/// actual output has exactly one, and the actual output puts at least
/// ratio_threshold times the predicted mass near the center. A window empty in
/// both histograms gives ratio 1.
inline PrototypeReport detect_prototype_enhancement(const Histogram& predicted, const Histogram& actual,
                                                    const PrototypeConfig& config = {}) {
  require(predicted.axis().compatible(actual.axis()), ErrorCode::axis_mismatch, "histograms over different axes");
  require(predicted.axis().numeric(), ErrorCode::axis_mismatch, "prototype detection needs a numeric axis");
  PrototypeReport r{predicted, actual};
  const ModeCountOptions modes{config.window, config.prominence};
  r.predicted_modes = count_modes(predicted, modes);
  r.actual_modes = count_modes(actual, modes);
  r.center = config.center.value_or(predicted.mean());
  const double near_actual = mass_near(actual, r.center, config.delta_bins);
  const double near_pred = mass_near(predicted, r.center, config.delta_bins);
  if (near_pred > 0.0) r.concentration_ratio = near_actual / near_pred;
  else r.concentration_ratio = near_actual > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  r.enhanced = r.predicted_modes >= 2 && r.actual_modes == 1 && r.concentration_ratio >= config.ratio_threshold;
  return r;
}

struct IndependenceReport {
  std::string feature;
  std::vector<std::pair<int, Histogram>> configurations;  // (nuisance mode count K, marginal)
  double max_pairwise_tv = 0.0;
  std::vector<std::pair<int, double>> variance_by_k;
};

/// Quantifies how much one feature's learned marginal moves as the number of
/// random values K taken by the other features changes.
inline IndependenceReport independence_report(std::vector<std::pair<int, Histogram>> marginals, std::string feature = {}) {
  require(marginals.size() >= 2, ErrorCode::too_few_configs, "independence needs at least two configurations");
  for (const auto& [k, h] : marginals)
    require(h.axis().compatible(marginals.front().second.axis()), ErrorCode::axis_mismatch,
            "configurations use different axes");
  IndependenceReport r;
  r.feature = std::move(feature);
  for (std::size_t i = 0; i < marginals.size(); ++i)
    for (std::size_t j = i + 1; j < marginals.size(); ++j)
      r.max_pairwise_tv = std::max(r.max_pairwise_tv, total_variation(marginals[i].second, marginals[j].second));
  for (const auto& [k, h] : marginals) r.variance_by_k.push_back({k, h.variance()});
  r.configurations = std::move(marginals);
  return r;
}

namespace detail {
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
}  // namespace detail

/// Structured text records, one `key: value` per line.
inline std::string to_text(const ImpulseResponse& ir) {
  std::string out = "report: impulse_response\n";
  out += "source_mode: " + detail::fmt(ir.source_mode) + "\n";
  out += "mode_shift_bins: " + std::to_string(ir.mode_shift) + "\n";
  out += "bin_width: " + detail::fmt(ir.kernel.axis().width) + "\n";
  out += "kernel_bins: " + std::to_string(ir.kernel.bins().size()) + "\n";
  out += "mean_offset: " + detail::fmt(ir.stats.mean) + "\n";
  out += "variance: " + detail::fmt(ir.stats.variance) + "\n";
  out += "skewness: " + detail::fmt(ir.stats.skewness) + "\n";
  return out;
}

inline std::string to_text(const PrototypeReport& r) {
  std::string out = "report: prototype_enhancement\n";
  out += "predicted_modes: " + std::to_string(r.predicted_modes) + "\n";
  out += "actual_modes: " + std::to_string(r.actual_modes) + "\n";
  out += "center: " + detail::fmt(r.center) + "\n";
  out += "concentration_ratio: " + (std::isinf(r.concentration_ratio) ? std::string("inf") : detail::fmt(r.concentration_ratio)) + "\n";
  out += std::string("enhanced: ") + (r.enhanced ? "true" : "false") + "\n";
  return out;
}

inline std::string to_text(const IndependenceReport& r) {
  std::string out = "report: independence\n";
  out += "feature: " + r.feature + "\n";
  out += "configurations: " + std::to_string(r.configurations.size()) + "\n";
  out += "max_pairwise_tv: " + detail::fmt(r.max_pairwise_tv) + "\n";
  for (const auto& [k, v] : r.variance_by_k) out += "variance_k" + std::to_string(k) + ": " + detail::fmt(v) + "\n";
  return out;
}

}  // namespace genprobe
