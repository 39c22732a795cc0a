#pragma once

// Brute-force reference for the minimum-energy rate problem: a shortest path
// over a time x data lattice. Arrival instants and every tunnel vertex value
// are lattice lines, so on each lattice interval both bounds are constant and
// a straight segment between feasible lattice points is a feasible plan. The
// optimum over the lattice is therefore an upper bound on the true optimum.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

struct Packet {
  double time;
  double size;
};

struct RateDpResult {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<double> times;
  std::vector<double> sent;  // optimal lattice path
};

inline double arrived_by(const std::vector<Packet>& packets, double t_inclusive) {
  double s = 0.0;
  for (const auto& p : packets) {
    if (p.time <= t_inclusive) s += p.size;
  }
  return s;
}

/// `lazy`: the end point may be any level at or above the final lower bound.
inline RateDpResult brute_force_rate_dp(const std::vector<Packet>& packets, double capacity,
                                        double horizon, bool lazy, int time_cells, int data_cells,
                                        const std::function<double(double)>& f) {
  double total = 0.0;
  for (const auto& p : packets) total += p.size;

  std::vector<double> times;
  for (int i = 0; i <= time_cells; ++i) times.push_back(horizon * i / time_cells);
  for (const auto& p : packets) times.push_back(p.time);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              times.end());

  std::vector<double> levels;
  for (int i = 0; i <= data_cells; ++i) levels.push_back(total * i / data_cells);
  double cum = 0.0;
  for (const auto& p : packets) {
    cum += p.size;
    levels.push_back(cum);
    if (cum - capacity > 0.0) levels.push_back(cum - capacity);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end(),
                           [&](double a, double b) { return std::abs(a - b) < 1e-12 * std::max(1.0, total); }),
               levels.end());

  const std::size_t n = times.size();
  const std::size_t m = levels.size();
  const double inf = std::numeric_limits<double>::infinity();
  const double tol = 1e-12 * std::max(1.0, total);
  std::vector<double> cost(n * m, inf);
  std::vector<int> from(n * m, -1);
  cost[0] = 0.0;  // (t=0, sent=0)
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double t0 = times[i];
    const double t1 = times[i + 1];
    const double dt = t1 - t0;
    // Bounds on the open interval (t0, t1) and at its right end.
    const double up = arrived_by(packets, t0);
    const double low = std::max(0.0, up - capacity);
    const double up_end = arrived_by(packets, t1);
    const double low_end = std::max(0.0, up_end - capacity);
    for (std::size_t a = 0; a < m; ++a) {
      const double c = cost[i * m + a];
      if (c == inf) continue;
      for (std::size_t b = a; b < m; ++b) {
        const double y1 = levels[b];
        if (y1 > up + tol) break;
        if (levels[a] < low - tol || y1 < low_end - tol) continue;
        const double cand = c + f((y1 - levels[a]) / dt) * dt;
        if (cand < cost[(i + 1) * m + b]) {
          cost[(i + 1) * m + b] = cand;
          from[(i + 1) * m + b] = static_cast<int>(a);
        }
      }
    }
  }
  RateDpResult res;
  int best = -1;
  const double final_low = std::max(0.0, total - capacity);
  for (std::size_t b = 0; b < m; ++b) {
    const bool ok = lazy ? levels[b] >= final_low - tol : std::abs(levels[b] - total) <= tol;
    if (ok && cost[(n - 1) * m + b] < res.cost) {
      res.cost = cost[(n - 1) * m + b];
      best = static_cast<int>(b);
    }
  }
  if (best < 0) return res;
  res.times = times;
  res.sent.assign(n, 0.0);
  int b = best;
  for (std::size_t i = n; i-- > 0;) {
    res.sent[i] = levels[static_cast<std::size_t>(b)];
    if (i > 0) b = from[i * m + static_cast<std::size_t>(b)];
  }
  return res;
}

}  // namespace oracle
