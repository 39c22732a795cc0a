#pragma once

// Seeded random instances shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "dter/error.hpp"
#include "dter/offline.hpp"
#include "dter/rate_plan.hpp"
#include "oracles/rate_oracle.hpp"

namespace instances {

struct RateInstance {
  dter::DataArrivalTrace trace;
  double capacity;
};

/// Up to 8 packets on a 0.1 s lattice within a 10 s horizon.
inline RateInstance random_rate_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 1 + static_cast<int>(u(rng) * 8.0);
  const double horizon = 10.0;
  const double capacity = 1.0 + 3.0 * u(rng);
  std::vector<double> times;
  for (int i = 0; i < n; ++i) times.push_back(std::round(u(rng) * 95.0) / 10.0);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  dter::DataArrivalTrace trace{{}, horizon};
  for (double t : times) trace.events.push_back({t, capacity * (0.1 + 0.9 * u(rng))});
  return {trace, capacity};
}

inline std::vector<oracle::Packet> packets_of(const dter::DataArrivalTrace& trace) {
  std::vector<oracle::Packet> ps;
  for (const auto& e : trace.events) ps.push_back({e.time, e.bytes});
  return ps;
}

inline double plan_cost(const dter::RatePlan& plan, const std::function<double(double)>& f) {
  double c = 0.0;
  for (const auto& s : plan.segments) c += f(s.rate) * (s.end - s.start);
  return c;
}

struct ScheduleInstance {
  dter::ChargingCircuit circuit;
  dter::EnergyTunnel tunnel;
  dter::Grid grid;
};

/// Tunnels a few microseconds long so charge times are comparable to the
/// column spacing and the lockout shapes the optimum.
inline ScheduleInstance random_schedule_instance(std::mt19937_64& rng, std::size_t max_columns,
                                                 std::size_t max_levels) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const dter::ChargingCircuit c(1e3, 2e-9, 2.0, 10.0, u(rng) < 0.5 ? 0.0 : 0.4e-9 * u(rng));
    const double em = c.energy_capacity();
    const double pm = dter::max_harvest_power(c);
    const int pieces = 1 + static_cast<int>(u(rng) * 3.0);
    std::vector<dter::PowerSegment> segs;
    double t = 0.0;
    for (int i = 0; i < pieces; ++i) {
      const double len = 2e-6 + 6e-6 * u(rng);
      segs.push_back({t, t + len, pm * (0.05 + 0.9 * u(rng))});
      t += len;
    }
    const double e0 = u(rng) < 0.3 ? 0.0 : em * u(rng);
    const dter::EnergyTunnel tunnel = dter::build_energy_tunnel(dter::make_power_profile(segs), c, e0);
    const double levels = static_cast<double>(3 + rng() % (max_levels - 3));
    const double top = tunnel.upper(tunnel.horizon);
    const double columns = static_cast<double>(2 + rng() % (max_columns - 2));
    dter::Grid grid;
    try {
      grid = dter::make_grid(tunnel, tunnel.horizon / columns, top / (levels - 1.0));
    } catch (const dter::Error&) {
      continue;
    }
    if (grid.columns.size() > max_columns || grid.levels.size() > max_levels) continue;
    return {c, tunnel, grid};
  }
}

}  // namespace instances
