#include "dter/offline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

#include "dter/csv.hpp"
#include "dter/error.hpp"

namespace dter {

double EnergyTunnel::lower(double t) const {
  // A floor above E0 is reached by a request at t = 0.
  if (t <= 0.0 && floor > initial_energy) return 0.0;
  return std::max(0.0, consumption.value_at(t) - (initial_energy - floor));
}

double EnergyTunnel::upper(double t) const {
  return consumption.value_at(t) - initial_energy + capacity;
}

double EnergyTunnel::residual(double t, double harvested) const {
  return initial_energy + harvested - consumption.value_at(t);
}

std::vector<double> EnergyTunnel::breakpoints() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < pieces.size(); ++i) out.push_back(pieces[i].start);
  return out;
}

EnergyTunnel build_energy_tunnel(const PowerProfile& profile, const ChargingCircuit& circuit,
                                 double initial_energy, double floor) {
  const double em = circuit.energy_capacity();
  if (!(initial_energy >= 0.0) || initial_energy > em) {
    throw Error(ErrorCode::ConfigInvalid, "initial energy must lie in [0, Em]");
  }
  if (!(floor >= 0.0) || floor >= em) {
    throw Error(ErrorCode::ConfigInvalid, "residual floor must lie in [0, Em)");
  }
  const double bound = max_harvest_power(circuit);
  EnergyTunnel tunnel;
  tunnel.capacity = em;
  tunnel.initial_energy = initial_energy;
  tunnel.floor = floor;
  tunnel.horizon = profile.horizon();
  tunnel.consumption = profile.energy;
  for (const auto& s : profile.segments) {
    if (s.power >= bound) {
      throw Error(ErrorCode::SlopeExceedsChargeBound,
                  "consumption power " + std::to_string(s.power) + " W at t=" +
                      std::to_string(s.start) + " reaches the harvest bound");
    }
    if (!tunnel.pieces.empty() && tunnel.pieces.back().slope == s.power) {
      tunnel.pieces.back().end = s.end;
    } else {
      tunnel.pieces.push_back({s.start, s.end, s.power});
    }
  }
  if (tunnel.consumption.empty()) tunnel.consumption = CumulativeCurve::zero(tunnel.horizon);
  return tunnel;
}

bool Grid::valid(const EnergyTunnel& tunnel, std::size_t j, std::size_t k) const {
  const double x = columns[j];
  return levels[k] >= tunnel.lower(x) && levels[k] <= tunnel.upper(x);
}

Grid make_grid(const EnergyTunnel& tunnel, double time_step, double level_step) {
  if (!(time_step > 0.0) || !(level_step > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "grid steps must be positive");
  }
  const double horizon = tunnel.horizon;
  Grid grid;
  const double low_end = tunnel.lower(horizon);
  double dy = level_step;
  if (low_end > 0.0) dy = low_end / std::ceil(low_end / level_step * (1.0 - 1e-12));
  if (tunnel.capacity / dy < 2.0) {
    throw Error(ErrorCode::DensityTooLow, "fewer than 2 energy levels span Em");
  }
  const double top = tunnel.upper(horizon);
  const auto count = static_cast<std::size_t>(std::floor(top / dy * (1.0 + 1e-12))) + 1;
  grid.levels.reserve(count);
  for (std::size_t k = 0; k < count; ++k) grid.levels.push_back(static_cast<double>(k) * dy);
  grid.level_step = dy;

  if (horizon > 0.0) {
    const double n = std::max(1.0, std::ceil(horizon / time_step * (1.0 - 1e-12)));
    const double dt = horizon / n;
    grid.time_step = dt;
    const auto columns = static_cast<std::size_t>(n);
    for (std::size_t j = 0; j < columns; ++j) grid.columns.push_back(static_cast<double>(j) * dt);
    grid.columns.push_back(horizon);
    const double snap = 1e-9 * dt;
    for (double b : tunnel.breakpoints()) {
      auto it = std::lower_bound(grid.columns.begin(), grid.columns.end(), b);
      if (it != grid.columns.end() && *it - b <= snap && std::next(it) != grid.columns.end()) {
        *it = b;
      } else if (it != grid.columns.begin() && b - *std::prev(it) <= snap) {
        *std::prev(it) = b;
      } else {
        grid.columns.insert(it, b);
      }
    }
    grid.columns.back() = horizon;
    // Split columns that consume more than one level, so steep pieces stay
    // representable.
    std::vector<double> refined{grid.columns.front()};
    std::size_t piece = 0;
    for (std::size_t j = 0; j + 1 < grid.columns.size(); ++j) {
      const double a = grid.columns[j];
      const double b = grid.columns[j + 1];
      while (piece + 1 < tunnel.pieces.size() && tunnel.pieces[piece].end <= a) ++piece;
      const double slope = tunnel.pieces.empty() ? 0.0 : tunnel.pieces[piece].slope;
      const double parts = std::ceil(slope * (b - a) / dy * (1.0 - 1e-12));
      for (double i = 1.0; i < parts; i += 1.0) refined.push_back(a + (b - a) * i / parts);
      refined.push_back(b);
    }
    grid.columns = std::move(refined);
  } else {
    grid.columns.push_back(0.0);
  }
  grid.density = 1.0 / (grid.time_step * dy);
  return grid;
}

Grid discretize(const EnergyTunnel& tunnel, double density) {
  if (!(density > 0.0)) throw Error(ErrorCode::ConfigInvalid, "grid density must be positive");
  const double horizon = tunnel.horizon;
  double slope = horizon > 0.0 ? tunnel.consumption.value_at(horizon) / horizon : 0.0;
  if (!(slope > 0.0)) slope = horizon > 0.0 ? tunnel.capacity / horizon : tunnel.capacity;
  const double dy = std::sqrt(slope / density);
  Grid grid = make_grid(tunnel, dy / slope, dy);
  grid.density = density;
  return grid;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Pred {
  std::int32_t j = -1;
  std::int32_t k = -1;
};

}  // namespace

RequestSchedule schedule_offline(const Grid& grid, const EnergyTunnel& tunnel,
                                 const ChargingCircuit& circuit, DpMethod method) {
  const std::size_t J = grid.columns.size();
  const std::size_t K = grid.levels.size();
  if (J == 0 || K == 0) throw Error(ErrorCode::NoFeasiblePath, "empty grid");
  const double em = circuit.energy_capacity();
  const double guard = em * (1.0 - kCapacityGuard);
  const double overhead = circuit.request_overhead();

  std::vector<double> low(J), up(J), cons(J);
  for (std::size_t j = 0; j < J; ++j) {
    low[j] = tunnel.lower(grid.columns[j]);
    up[j] = tunnel.upper(grid.columns[j]);
    cons[j] = tunnel.consumption.value_at(grid.columns[j]);
  }
  if (grid.levels[0] < low[0]) throw Error(ErrorCode::NoFeasiblePath, "origin below the tunnel");

  std::vector<double> cost(J * K, kInf);
  std::vector<Pred> pred(J * K);
  auto at = [K](std::size_t j, std::size_t k) { return j * K + k; };
  cost[at(0, 0)] = 0.0;

  double best = kInf;
  Pred best_from;                 // state the best path ends in or requests from
  std::int32_t best_level = -1;   // landing level for a request running past T

  const double lockout = max_charge_time(circuit);

  for (std::size_t j = 0; j < J; ++j) {
    const double x = grid.columns[j];
    const bool last = j + 1 == J;
    if (method == DpMethod::Auto && !last && x + lockout < grid.columns[j + 1]) {
      // Every request lands on column j+1 and costs potential(to) -
      // potential(from), so the best source for level n is a prefix minimum.
      double best_src = kInf;
      std::int32_t src = -1;
      for (std::size_t n = 0; n < K; ++n) {
        const double y = grid.levels[n];
        const double residual = std::max(0.0, tunnel.initial_energy + y - cons[j]);
        const bool can_land = y <= up[j] && residual <= guard && y >= low[j + 1];
        const double phi = residual <= guard ? charge_potential(circuit, residual) : kInf;
        const double c = cost[at(j, n)];
        if (can_land && best_src < kInf) {
          const double cw = best_src + phi + overhead;
          if (cw < cost[at(j + 1, n)]) {
            cost[at(j + 1, n)] = cw;
            pred[at(j + 1, n)] = {static_cast<std::int32_t>(j), src};
          }
        }
        if (c == kInf) continue;
        if (y >= low[j + 1] && c <= cost[at(j + 1, n)]) {
          cost[at(j + 1, n)] = c;
          pred[at(j + 1, n)] = {static_cast<std::int32_t>(j), static_cast<std::int32_t>(n)};
        }
        if (phi < kInf && c - phi < best_src) {
          best_src = c - phi;
          src = static_cast<std::int32_t>(n);
        }
      }
      continue;
    }
    for (std::size_t k = 0; k < K; ++k) {
      const double c = cost[at(j, k)];
      if (c == kInf) continue;
      const double y = grid.levels[k];
      if (last) {
        if (c < best) {
          best = c;
          best_from = {static_cast<std::int32_t>(j), static_cast<std::int32_t>(k)};
          best_level = -1;
        }
        continue;
      }
      if (y >= low[j + 1] && c < cost[at(j + 1, k)]) {
        cost[at(j + 1, k)] = c;
        pred[at(j + 1, k)] = {static_cast<std::int32_t>(j), static_cast<std::int32_t>(k)};
      }
      const double residual = std::max(0.0, tunnel.initial_energy + y - cons[j]);
      for (std::size_t n = k + 1; n < K; ++n) {
        const double target = grid.levels[n];
        if (target > up[j]) break;
        const double request = target - y;
        if (residual + request > guard) break;
        const double t_es = charge_time(circuit, residual, request);
        const double w = circuit.es_power() * t_es + overhead;
        const double cw = c + w;
        auto it = std::lower_bound(grid.columns.begin() + static_cast<std::ptrdiff_t>(j) + 1,
                                   grid.columns.end(), x + t_es);
        if (it == grid.columns.end()) {
          if (target >= low[J - 1] && cw < best) {
            best = cw;
            best_from = {static_cast<std::int32_t>(j), static_cast<std::int32_t>(k)};
            best_level = static_cast<std::int32_t>(n);
          }
          continue;
        }
        const auto jn = static_cast<std::size_t>(it - grid.columns.begin());
        if (target < low[jn]) continue;
        if (cw < cost[at(jn, n)]) {
          cost[at(jn, n)] = cw;
          pred[at(jn, n)] = {static_cast<std::int32_t>(j), static_cast<std::int32_t>(k)};
        }
      }
    }
  }
  if (best == kInf) {
    throw Error(ErrorCode::NoFeasiblePath, "no lockout-respecting staircase stays in the tunnel");
  }

  // Walk back to a list of (column, from level, to level) requests.
  struct Step {
    std::size_t j, from, to;
  };
  std::vector<Step> steps;
  std::size_t j = static_cast<std::size_t>(best_from.j);
  std::size_t k = static_cast<std::size_t>(best_from.k);
  if (best_level >= 0) steps.push_back({j, k, static_cast<std::size_t>(best_level)});
  while (j != 0) {
    const Pred p = pred[at(j, k)];
    const auto pj = static_cast<std::size_t>(p.j);
    const auto pk = static_cast<std::size_t>(p.k);
    if (pk != k) steps.push_back({pj, pk, k});
    j = pj;
    k = pk;
  }
  std::reverse(steps.begin(), steps.end());

  RequestSchedule schedule;
  for (const auto& s : steps) {
    const double y = grid.levels[s.from];
    const double residual = std::max(0.0, tunnel.initial_energy + y - cons[s.j]);
    EnergyRequest r = make_request(circuit, grid.columns[s.j], residual, grid.levels[s.to] - y);
    schedule.total_es_cost += r.es_cost + overhead;
    schedule.requests.push_back(r);
  }
  return schedule;
}

double schedule_cost(const RequestSchedule& schedule, const ChargingCircuit& circuit) {
  const double em = circuit.energy_capacity();
  double total = 0.0;
  for (std::size_t i = 0; i < schedule.requests.size(); ++i) {
    const EnergyRequest& r = schedule.requests[i];
    const std::string where = " at t=" + std::to_string(r.time);
    if (r.harvested < 0.0 || r.residual_before < 0.0) {
      throw Error(ErrorCode::ConstraintViolation, "C1: negative energy" + where);
    }
    if (r.residual_before + r.harvested > em) {
      throw Error(ErrorCode::ConstraintViolation, "C2: residual exceeds Em" + where);
    }
    if (i + 1 < schedule.requests.size() &&
        schedule.requests[i + 1].time < r.time + r.charge_time) {
      throw Error(ErrorCode::ConstraintViolation, "C3: next request inside the charge time" + where);
    }
    const double expected = charge_time(circuit, r.residual_before, r.harvested);
    if (std::abs(expected - r.charge_time) > 1e-12 * std::max(expected, 1e-300) ||
        std::abs(r.es_cost - circuit.es_power() * r.charge_time) >
            1e-12 * std::max(r.es_cost, 1e-300)) {
      throw Error(ErrorCode::ConstraintViolation, "cost does not match the charging function" + where);
    }
    total += r.es_cost + circuit.request_overhead();
  }
  return total;
}

double schedule_cost(const RequestSchedule& schedule, const ChargingCircuit& circuit,
                     const EnergyTunnel& tunnel) {
  const double total = schedule_cost(schedule, circuit);
  double steepest = 0.0;
  for (const auto& p : tunnel.pieces) steepest = std::max(steepest, p.slope);
  // Absolute slack plus the rounding of long sums and of the request times.
  auto slack = [&](double t) {
    return 1e-12 * (tunnel.capacity + tunnel.consumption.value_at(t)) +
           4.0 * std::numeric_limits<double>::epsilon() * std::abs(t) * steepest;
  };
  double harvested = 0.0;
  for (const auto& r : schedule.requests) {
    const double tol = slack(r.time);
    const double residual = tunnel.residual(r.time, harvested);
    if (residual < tunnel.floor - tol && !(r.time <= 0.0 && residual == tunnel.initial_energy)) {
      throw Error(ErrorCode::ConstraintViolation,
                  "C1: residual below the floor at t=" + std::to_string(r.time));
    }
    if (std::abs(residual - r.residual_before) > tol) {
      throw Error(ErrorCode::ConstraintViolation,
                  "residual before request disagrees with the tunnel at t=" + std::to_string(r.time));
    }
    harvested += r.harvested;
  }
  if (tunnel.residual(tunnel.horizon, harvested) < tunnel.floor - slack(tunnel.horizon)) {
    throw Error(ErrorCode::ConstraintViolation, "C1: residual below the floor at the horizon");
  }
  return total;
}

DensityResult density_sweep(const EnergyTunnel& tunnel, const ChargingCircuit& circuit,
                            double beta0, double threshold, int max_iterations) {
  if (!(beta0 > 0.0) || !(threshold > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "beta0 and threshold must be positive");
  }
  DensityResult result;
  RequestSchedule previous;
  for (int i = 1; i <= max_iterations; ++i) {
    const double beta = beta0 * i;
    RequestSchedule schedule;
    try {
      schedule = schedule_offline(discretize(tunnel, beta), tunnel, circuit);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DensityTooLow || e.code() == ErrorCode::NoFeasiblePath) continue;
      throw;
    }
    const double cost = schedule.total_es_cost;
    if (!result.steps.empty()) {
      DensityStep& last = result.steps.back();
      const double improvement = last.cost > 0.0 ? (cost - last.cost) / last.cost : 0.0;
      last.improvement = improvement;
      if (std::abs(improvement) < threshold) {
        result.converged_density = last.density;
        result.schedule = std::move(previous);
        result.steps.push_back({beta, cost, 0.0});
        return result;
      }
    }
    result.steps.push_back({beta, cost, 0.0});
    previous = std::move(schedule);
  }
  throw Error(ErrorCode::NoConvergence,
              "grid cost did not settle within " + std::to_string(max_iterations) + " densities");
}

void write_schedule_csv(std::ostream& out, const RequestSchedule& schedule) {
  out << "t_r_s,E_r_J,T_es_s,E_es_J\n";
  for (const auto& r : schedule.requests) {
    out << csv_number(r.time) << ',' << csv_number(r.harvested) << ',' << csv_number(r.charge_time)
        << ',' << csv_number(r.es_cost) << '\n';
  }
}

void write_density_csv(std::ostream& out, const DensityResult& result) {
  out << "beta,total_cost_J,improvement\n";
  for (const auto& s : result.steps) {
    out << csv_number(s.density) << ',' << csv_number(s.cost) << ',' << csv_number(s.improvement)
        << '\n';
  }
}

}  // namespace dter
