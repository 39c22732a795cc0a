#include "dter/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "dter/csv.hpp"
#include "dter/error.hpp"

namespace dter {

double x_equation(double X, double c) {
  const double u = X - 1.0;
  return std::log1p(u) - u * (2.0 + u) / (2.0 * X) + c;
}

double solve_X(double c, RootMethod method) {
  if (!(c >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "request overhead must be >= 0");
  if (c == 0.0) return 1.0;
  double lo = 1.0;
  double hi = 2.0;
  while (x_equation(hi, c) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw Error(ErrorCode::BracketFailure, "no root of the X equation below 1e6");
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double h = x_equation(x, c);
    if (h > 0.0) {
      lo = x;
    } else if (h < 0.0) {
      hi = x;
    } else {
      return x;
    }
    if (hi - lo <= 1e-15 * hi) break;
    double next = 0.5 * (lo + hi);
    if (method == RootMethod::Newton) {
      const double d = -(x - 1.0) * (x - 1.0) / (2.0 * x * x);
      const double step = x - h / d;
      if (d < 0.0 && step > lo && step < hi) next = step;
    }
    if (next == x) break;
    x = next;
  }
  return 0.5 * (lo + hi);
}

double solve_X(const ChargingCircuit& circuit, RootMethod method) {
  return solve_X(circuit.request_overhead() / (circuit.time_constant() * circuit.es_power()), method);
}

double request_size_from_X(const ChargingCircuit& circuit, double X) {
  if (!(X >= 1.0)) throw Error(ErrorCode::ConfigInvalid, "X must be >= 1");
  if (std::isinf(X)) return circuit.energy_capacity();
  return (X - 1.0) / (X + 1.0) * circuit.energy_capacity();
}

double solve_charge_feasible_request(const ChargingCircuit& circuit, double power) {
  if (!(power > 0.0)) throw Error(ErrorCode::ConfigInvalid, "consumption power must be positive");
  if (power >= max_harvest_power(circuit)) {
    throw Error(ErrorCode::PowerAtOrAboveBound, "power " + std::to_string(power) +
                                                    " W is at or above the harvest bound");
  }
  const double em = circuit.energy_capacity();
  const double prc = power * circuit.time_constant();
  // z(E) < 0 just above 0 and z -> +inf at Em.
  auto z = [&](double e) { return prc * std::log1p(2.0 * e / (em - e)) - e; };
  double lo = 0.0;
  double hi = em;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (z(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double turning_power(const ChargingCircuit& circuit) {
  const double em = circuit.energy_capacity();
  const double er = request_size_from_X(circuit, solve_X(circuit));
  if (er <= 0.0) return 0.0;
  return er / (circuit.time_constant() * std::log1p(2.0 * er / (em - er)));
}

OnlineSolution plan_online(const ChargingCircuit& circuit, std::span<const TunnelPiece> pieces) {
  OnlineSolution s;
  const double em = circuit.energy_capacity();
  s.X = solve_X(circuit);
  s.er_x = request_size_from_X(circuit, s.X);
  s.er_y = em;
  const double turn = turning_power(circuit);
  for (const auto& p : pieces) {
    if (p.slope >= max_harvest_power(circuit)) {
      throw Error(ErrorCode::PowerAtOrAboveBound, "piece slope reaches the harvest bound");
    }
    if (p.slope > turn) s.er_y = std::min(s.er_y, solve_charge_feasible_request(circuit, p.slope));
  }
  s.er_hat = std::min(s.er_x, s.er_y);
  s.eb_hat = (em - s.er_hat) * (em - s.er_hat) / (4.0 * em);
  for (const auto& p : pieces) s.alpha.push_back(s.er_hat > 0.0 ? p.length() * p.slope / s.er_hat : 0.0);
  return s;
}

OnlineRun run_online_tunnel(const ChargingCircuit& circuit, std::span<const TunnelPiece> pieces,
                            double initial_energy) {
  return run_online_tunnel(circuit, pieces, initial_energy, plan_online(circuit, pieces));
}

OnlineRun run_online_tunnel(const ChargingCircuit& circuit, std::span<const TunnelPiece> pieces,
                            double initial_energy, const OnlineSolution& solution) {
  const double em = circuit.energy_capacity();
  if (!(initial_energy >= 0.0) || initial_energy > em) {
    throw Error(ErrorCode::ConfigInvalid, "initial energy must lie in [0, Em]");
  }
  OnlineRun run;
  run.solution = solution;
  run.final_residual = initial_energy;
  if (pieces.empty()) return run;
  const double start = pieces.front().start;
  const double horizon = pieces.back().end;
  const double last_request = horizon - 1e-12 * std::max(1.0, std::abs(horizon));
  const double eb = solution.eb_hat;
  const double er = solution.er_hat;

  std::size_t piece = 0;
  double t = start;
  double residual = initial_energy;
  double lockout = -std::numeric_limits<double>::infinity();

  // Advance to `until` (or the horizon), spending energy piece by piece.
  auto advance_to = [&](double until) {
    while (t < until) {
      while (piece < pieces.size() && pieces[piece].end <= t) ++piece;
      if (piece == pieces.size()) break;
      const double end = std::min(until, pieces[piece].end);
      residual -= pieces[piece].slope * (end - t);
      t = end;
    }
  };
  // Advance until the residual falls to eb; returns false at the horizon.
  auto advance_to_threshold = [&]() {
    while (t < horizon) {
      while (piece < pieces.size() && pieces[piece].end <= t) ++piece;
      if (piece == pieces.size()) return false;
      const TunnelPiece& p = pieces[piece];
      const double at_end = residual - p.slope * (p.end - t);
      if (at_end <= eb && p.slope > 0.0) {
        // Keep the residual tied to the rounded crossing time.
        double tc = std::min(p.end, t + (residual - eb) / p.slope);
        while (tc < p.end && residual - p.slope * (tc - t) > eb) tc = std::nextafter(tc, p.end);
        residual = tc < p.end ? residual - p.slope * (tc - t) : at_end;
        t = tc;
        return true;
      }
      residual = at_end;
      t = p.end;
    }
    return false;
  };

  for (;;) {
    if (residual <= eb && t >= lockout) {
      if (!(t < last_request)) break;
      // A start below the threshold is topped up to eb + er in one request.
      const double size = run.trace.empty() && residual < eb ? eb + er - residual : er;
      EnergyRequest r = make_request(circuit, t, residual, size);
      run.trace.push_back({t, residual, size});
      run.schedule.total_es_cost += r.es_cost + circuit.request_overhead();
      run.schedule.requests.push_back(r);
      residual += size;
      lockout = t + r.charge_time;
      continue;
    }
    if (residual > eb) {
      if (!advance_to_threshold()) break;
      continue;
    }
    // Below the threshold while the previous charge is still running.
    advance_to(std::min(lockout, horizon));
    if (residual < 0.0) {
      throw Error(ErrorCode::InfeasibleOnline,
                  "residual runs out during a charge lockout at t=" + std::to_string(t));
    }
    if (t >= horizon) break;
  }
  advance_to(horizon);
  if (residual < -1e-12 * em) {
    throw Error(ErrorCode::InfeasibleOnline, "residual negative at the horizon");
  }
  run.final_residual = residual;
  return run;
}

void write_policy_trace_csv(std::ostream& out, std::span<const PolicyTraceEntry> trace) {
  out << "t_s,residual_J,requested_J\n";
  for (const auto& e : trace) {
    out << csv_number(e.time) << ',' << csv_number(e.residual_before) << ','
        << csv_number(e.requested) << '\n';
  }
}

}  // namespace dter
