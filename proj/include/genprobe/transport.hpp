#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "genprobe/error.hpp"

namespace genprobe {

struct TransportResult {
  double cost = 0.0;
  std::vector<double> flow;  // row-major supply x demand plan
};

/// Exact minimum-cost transportation between `supply` (n) and `demand` (m)
/// with non-negative row-major `cost` (n x m). Successive shortest paths with
/// Johnson potentials on the dense bipartite residual graph. Totals of supply
/// and demand must agree; residual mass below `eps` is treated as zero.
inline TransportResult min_cost_transport(std::span<const double> supply, std::span<const double> demand,
                                          std::span<const double> cost, double eps = 1e-14) {
  const std::size_t n = supply.size(), m = demand.size();
  require(cost.size() == n * m, ErrorCode::axis_mismatch, "cost matrix shape differs from supply x demand");
  TransportResult result;
  result.flow.assign(n * m, 0.0);
  if (n == 0 || m == 0) return result;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> left(supply.begin(), supply.end());
  std::vector<double> right(demand.begin(), demand.end());
  std::vector<double> pot_u(n, 0.0), pot_v(m, 0.0);
  std::vector<double> dist_u(n), dist_v(m);
  std::vector<char> done_u(n), done_v(m);
  std::vector<std::size_t> parent_v(m);  // source row that reached column j
  std::vector<std::size_t> parent_u(n);  // column whose backward edge reached row i

  auto remaining = [&] {
    double s = 0.0;
    for (double x : left) s += x;
    return s;
  };

  while (remaining() > eps) {
    std::fill(dist_v.begin(), dist_v.end(), kInf);
    std::fill(done_u.begin(), done_u.end(), 0);
    std::fill(done_v.begin(), done_v.end(), 0);
    for (std::size_t i = 0; i < n; ++i) dist_u[i] = left[i] > eps ? 0.0 : kInf;
    std::fill(parent_u.begin(), parent_u.end(), m);

    std::size_t target = m;
    for (;;) {
      // pick the closest unsettled node on either side
      double best = kInf;
      std::size_t bi = n, bj = m;
      for (std::size_t i = 0; i < n; ++i)
        if (!done_u[i] && dist_u[i] < best) best = dist_u[i], bi = i, bj = m;
      for (std::size_t j = 0; j < m; ++j)
        if (!done_v[j] && dist_v[j] < best) best = dist_v[j], bj = j, bi = n;
      if (best == kInf) break;
      if (bi < n) {
        done_u[bi] = 1;
        for (std::size_t j = 0; j < m; ++j) {
          if (done_v[j]) continue;
          const double reduced = std::max(0.0, cost[bi * m + j] + pot_u[bi] - pot_v[j]);
          if (dist_u[bi] + reduced < dist_v[j]) {
            dist_v[j] = dist_u[bi] + reduced;
            parent_v[j] = bi;
          }
        }
      } else {
        done_v[bj] = 1;
        if (right[bj] > eps) {
          target = bj;
          break;
        }
        for (std::size_t i = 0; i < n; ++i) {
          if (done_u[i] || result.flow[i * m + bj] <= eps) continue;
          const double reduced = std::max(0.0, -cost[i * m + bj] + pot_v[bj] - pot_u[i]);
          if (dist_v[bj] + reduced < dist_u[i]) {
            dist_u[i] = dist_v[bj] + reduced;
            parent_u[i] = bj;
          }
        }
      }
    }
    require(target < m, ErrorCode::degenerate_histogram, "supply exceeds demand in transport problem");

    const double reach = dist_v[target];
    for (std::size_t i = 0; i < n; ++i) pot_u[i] += std::min(dist_u[i], reach);
    for (std::size_t j = 0; j < m; ++j) pot_v[j] += std::min(dist_v[j], reach);

    // walk back to the source row, collecting the bottleneck
    double amount = right[target];
    std::size_t j = target;
    std::size_t i = parent_v[j];
    for (;;) {
      if (parent_u[i] == m) break;
      const std::size_t back = parent_u[i];
      amount = std::min(amount, result.flow[i * m + back]);
      j = back;
      i = parent_v[j];
    }
    amount = std::min(amount, left[i]);

    j = target;
    i = parent_v[j];
    for (;;) {
      result.flow[i * m + j] += amount;
      if (parent_u[i] == m) break;
      const std::size_t back = parent_u[i];
      result.flow[i * m + back] -= amount;
      j = back;
      i = parent_v[j];
    }
    left[i] -= amount;
    right[target] -= amount;
  }

  for (std::size_t k = 0; k < n * m; ++k) {
    if (result.flow[k] < 0.0) result.flow[k] = 0.0;
    result.cost += result.flow[k] * cost[k];
  }
  return result;
}

}  // namespace genprobe
