#pragma once

// Code-length model of combination supports. A support S over N groups of v
// values is described with five operations:
//   one      L({x}) = 1
//   all      L(X_i) = c,            1 < c <= v
//   and      L(A u B) <= L(A) + L(B)
//   except   L(A \ B) <= L(A) + d L(B) + 1,   d >= 1
//   product  L(A x B) <= L(A) + L(B) + 1
// Two canonical programs bound L(S): enumerating the members, or taking the
// full product space and listing the missing combinations as exceptions.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "genprobe/error.hpp"

namespace genprobe::mdl {

struct CodeCostParams {
  double c = 10.0;  // cost of one "all" set
  double d = 1.0;   // exception multiplier
  int groups = 3;   // N
  int values = 10;  // v, size of each group's domain

  void validate() const {
    require(groups >= 1, ErrorCode::spec_invalid, "group count must be at least 1");
    require(values >= 2, ErrorCode::spec_invalid, "group domain size must be at least 2");
    // c = v is admitted: the tabulated three-digit model uses c = 10 = v
    require(c > 1.0 && c <= values, ErrorCode::spec_invalid, "c must satisfy 1 < c <= v");
    require(d >= 1.0, ErrorCode::spec_invalid, "d must be at least 1");
  }

  /// v^N.
  std::int64_t space_size() const {
    std::int64_t s = 1;
    for (int g = 0; g < groups; ++g) s *= values;
    return s;
  }

  /// Cost of the full product space: N alls joined by N-1 products.
  double full_space_cost() const { return (groups - 1) + groups * c; }
};

namespace detail {
inline void check_size(std::int64_t size, const CodeCostParams& params) {
  require(size >= 0 && size <= params.space_size(), ErrorCode::size_out_of_range,
          "support size " + std::to_string(size) + " outside [0, " + std::to_string(params.space_size()) + "]");
}
}  // namespace detail

/// One unit per enumerated combination.
inline double enumeration_bound(std::int64_t support_size, const CodeCostParams& params) {
  detail::check_size(support_size, params);
  return static_cast<double>(support_size);
}

/// Full space minus the missing combinations:
///   (N-1) + N c + 1 + d (v^N - |S|),
/// i.e. 3 + 3c + 10 d (100 - g) for three digit groups and g percent.
inline double complement_bound(std::int64_t support_size, const CodeCostParams& params) {
  params.validate();
  detail::check_size(support_size, params);
  return params.full_space_cost() + 1.0 + params.d * static_cast<double>(params.space_size() - support_size);
}

inline double code_length(std::int64_t support_size, const CodeCostParams& params) {
  return std::min(enumeration_bound(support_size, params), complement_bound(support_size, params));
}

struct Crossover {
  double size = 0.0;     // |S*| where both bounds cost the same
  double percent = 0.0;  // 100 |S*| / v^N
};

/// |S*| = ((N-1) + N c + 1 + d v^N) / (1 + d); for N = 3, v = 10 the percentage
/// is (3 + 3c + 1000 d) / (10 + 10 d).
inline Crossover g_star(const CodeCostParams& params) {
  params.validate();
  const double total = static_cast<double>(params.space_size());
  const double size = (params.full_space_cost() + 1.0 + params.d * total) / (1.0 + params.d);
  return {size, 100.0 * size / total};
}

/// Support size for g percent of the space, rounded to the nearest integer.
inline std::int64_t support_size_for_percent(double percent, const CodeCostParams& params) {
  require(percent >= 0.0 && percent <= 100.0, ErrorCode::size_out_of_range, "percentage outside [0, 100]");
  return static_cast<std::int64_t>(std::llround(percent * static_cast<double>(params.space_size()) / 100.0));
}

struct TableRow {
  double percent = 0.0;
  std::int64_t support_size = 0;
  double enumeration = 0.0, complement = 0.0, length = 0.0;
};

inline std::vector<TableRow> code_length_table(const std::vector<double>& percents, const CodeCostParams& params) {
  std::vector<TableRow> rows;
  for (double g : percents) {
    const auto s = support_size_for_percent(g, params);
    rows.push_back({g, s, enumeration_bound(s, params), complement_bound(s, params), code_length(s, params)});
  }
  return rows;
}

/// The Rand% grid of the three-digit experiments.
inline const std::vector<double>& standard_grid() {
  static const std::vector<double> grid{1, 4, 16, 32, 50, 84, 96, 99};
  return grid;
}

/// Largest space the exhaustive search accepts (sets are bitmasks and every
/// pair of sets is combined at each depth).
inline constexpr std::int64_t kMaxExhaustiveSpace = 12;

/// Minimum cost of every subset of the full space reachable by expression
/// trees of depth <= max_depth over the five operations (leaves have depth 1).
///
/// Sets live over a non-empty subset G of the groups, as bitmasks over the
/// product of those groups. Leaves: the empty set (cost 0), any singleton
/// tuple over any G (cost 1) and each whole group X_i (cost c). Union and
/// except combine sets over the same G; product joins sets over disjoint
/// group subsets. Entry k of the result is the cost of the full-space set
/// with bitmask k (infinity when unreachable).
inline std::vector<double> exhaustive_code_lengths(const CodeCostParams& params, int max_depth = 6) {
  params.validate();
  const std::int64_t total = params.space_size();
  require(total <= kMaxExhaustiveSpace, ErrorCode::size_out_of_range,
          "exhaustive search limited to spaces of at most " + std::to_string(kMaxExhaustiveSpace) + " combinations");
  require(max_depth >= 1, ErrorCode::usage, "depth must be at least 1");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int n = params.groups, v = params.values;

  // one table per group subset (bitmask over groups)
  const unsigned subsets = 1u << n;
  std::vector<int> bits_of(subsets, 0);  // universe size of each group subset
  for (unsigned g = 1; g < subsets; ++g) {
    int sz = 1;
    for (int i = 0; i < n; ++i)
      if (g & (1u << i)) sz *= v;
    bits_of[g] = sz;
  }
  std::vector<std::vector<double>> best(subsets);
  for (unsigned g = 1; g < subsets; ++g) {
    best[g].assign(std::size_t{1} << bits_of[g], kInf);
    best[g][0] = 0.0;
    for (int e = 0; e < bits_of[g]; ++e) best[g][std::size_t{1} << e] = 1.0;
    if (std::popcount(g) == 1) best[g][(std::size_t{1} << v) - 1] = std::min(best[g][(std::size_t{1} << v) - 1], params.c);
  }

  // product position mapping: a tuple over G1 u G2 indexed with lower group
  // indices more significant. Precompute for each (G1, G2) the element index of
  // every (e1, e2) pair.
  auto element_of = [&](unsigned g1, int e1, unsigned g2, int e2) {
    // decode digits of e1 over g1 and e2 over g2, most significant = lowest group
    std::vector<int> digit(static_cast<std::size_t>(n), 0);
    auto decode = [&](unsigned g, int e) {
      for (int i = n - 1; i >= 0; --i)
        if (g & (1u << i)) {
          digit[static_cast<std::size_t>(i)] = e % v;
          e /= v;
        }
    };
    decode(g1, e1);
    decode(g2, e2);
    int out = 0;
    for (int i = 0; i < n; ++i)
      if ((g1 | g2) & (1u << i)) out = out * v + digit[static_cast<std::size_t>(i)];
    return out;
  };

  for (int depth = 2; depth <= max_depth; ++depth) {
    auto next = best;
    for (unsigned g = 1; g < subsets; ++g) {
      const auto& cur = best[g];
      const std::size_t sets = cur.size();
      std::vector<std::size_t> live;
      for (std::size_t s = 0; s < sets; ++s)
        if (cur[s] < kInf) live.push_back(s);
      for (auto a : live)
        for (auto b : live) {
          next[g][a | b] = std::min(next[g][a | b], cur[a] + cur[b]);
          next[g][a & ~b] = std::min(next[g][a & ~b], cur[a] + params.d * cur[b] + 1.0);
        }
    }
    for (unsigned g1 = 1; g1 < subsets; ++g1)
      for (unsigned g2 = g1 + 1; g2 < subsets; ++g2) {
        if (g1 & g2) continue;
        const unsigned g = g1 | g2;
        std::vector<std::vector<int>> index(static_cast<std::size_t>(bits_of[g1]),
                                            std::vector<int>(static_cast<std::size_t>(bits_of[g2])));
        for (int e1 = 0; e1 < bits_of[g1]; ++e1)
          for (int e2 = 0; e2 < bits_of[g2]; ++e2)
            index[static_cast<std::size_t>(e1)][static_cast<std::size_t>(e2)] = element_of(g1, e1, g2, e2);
        for (std::size_t a = 1; a < best[g1].size(); ++a) {
          if (best[g1][a] == kInf) continue;
          for (std::size_t b = 1; b < best[g2].size(); ++b) {
            if (best[g2][b] == kInf) continue;
            std::size_t mask = 0;
            for (int e1 = 0; e1 < bits_of[g1]; ++e1) {
              if (!(a >> e1 & 1)) continue;
              for (int e2 = 0; e2 < bits_of[g2]; ++e2)
                if (b >> e2 & 1) mask |= std::size_t{1} << index[static_cast<std::size_t>(e1)][static_cast<std::size_t>(e2)];
            }
            next[g][mask] = std::min(next[g][mask], best[g1][a] + best[g2][b] + 1.0);
          }
        }
      }
    best = std::move(next);
  }
  return best[subsets - 1];
}

}  // namespace genprobe::mdl
