#pragma once

// Seeded random histograms shared by the unit and acceptance suites.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "genprobe/core.hpp"

namespace testing_support {

/// Random histogram whose masses are multiples of 1/total, over <= max_bins
/// ids of [0, universe).
inline genprobe::Histogram integral_histogram(std::mt19937_64& gen, const genprobe::Axis& axis, int universe,
                                              int max_bins, int total, std::vector<int>* counts_out = nullptr,
                                              std::vector<std::int64_t>* ids_out = nullptr) {
  std::vector<std::int64_t> ids(static_cast<std::size_t>(universe));
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), gen);
  const int bins = std::uniform_int_distribution<int>(1, std::min(max_bins, total))(gen);
  ids.resize(static_cast<std::size_t>(bins));
  std::sort(ids.begin(), ids.end());
  std::vector<int> counts(static_cast<std::size_t>(bins), 1);
  for (int extra = total - bins; extra > 0; --extra)
    ++counts[std::uniform_int_distribution<std::size_t>(0, counts.size() - 1)(gen)];
  std::vector<genprobe::Bin> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out.push_back({ids[i], counts[i] / static_cast<double>(total)});
  if (counts_out) *counts_out = counts;
  if (ids_out) *ids_out = ids;
  return genprobe::Histogram::normalized(axis, out);
}

inline genprobe::Histogram random_histogram(std::mt19937_64& gen, const genprobe::Axis& axis, int universe, int max_bins) {
  std::uniform_int_distribution<int> id(0, universe - 1), n(1, max_bins);
  std::uniform_real_distribution<double> mass(0.001, 1.0);
  std::vector<genprobe::Bin> bins;
  for (int i = n(gen); i > 0; --i) bins.push_back({id(gen), mass(gen)});
  return genprobe::Histogram::normalized(axis, bins);
}

}  // namespace testing_support
