#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "dter/charging.hpp"
#include "dter/offline.hpp"

namespace dter {

enum class RootMethod { Bisection, Newton };

/// Root X >= 1 of ln X - (X^2 - 1)/(2X) + c = 0. The left side is
/// non-increasing in X and equals c at X = 1. Newton steps are kept only while
/// they stay inside the current bracket. Throws BracketFailure past X = 1e6.
double solve_X(double c, RootMethod method = RootMethod::Bisection);
/// c = e_r / (RC * p_es).
double solve_X(const ChargingCircuit& circuit, RootMethod method = RootMethod::Bisection);

/// Left side of the X equation, exposed for diagnostics.
double x_equation(double X, double c);

/// (X - 1)/(X + 1) * Em
double request_size_from_X(const ChargingCircuit& circuit, double X);

/// Largest request a piece of slope p can absorb before its own charge time
/// ends: the root in (0, Em) of p RC ln((Em + E)/(Em - E)) = E. Throws
/// PowerAtOrAboveBound when p >= max_harvest_power.
double solve_charge_feasible_request(const ChargingCircuit& circuit, double power);

/// Consumption power above which the charge-time cap binds.
double turning_power(const ChargingCircuit& circuit);

struct OnlineSolution {
  double X = 1.0;
  double er_x = 0.0;
  double er_y = 0.0;  // smallest cap over the pieces, Em when none binds
  double er_hat = 0.0;
  double eb_hat = 0.0;
  std::vector<double> alpha;  // requests per piece, real-valued
};

OnlineSolution plan_online(const ChargingCircuit& circuit, std::span<const TunnelPiece> pieces);

struct PolicyTraceEntry {
  double time;
  double residual_before;
  double requested;
};

struct OnlineRun {
  OnlineSolution solution;
  RequestSchedule schedule;
  std::vector<PolicyTraceEntry> trace;
  double final_residual = 0.0;
};

/// Threshold policy over contiguous pieces starting at pieces[0].start: request
/// er_hat whenever the residual is at or below eb_hat and the previous charge
/// has finished. Throws InfeasibleOnline if the residual would go negative.
OnlineRun run_online_tunnel(const ChargingCircuit& circuit, std::span<const TunnelPiece> pieces,
                            double initial_energy);
OnlineRun run_online_tunnel(const ChargingCircuit& circuit, std::span<const TunnelPiece> pieces,
                            double initial_energy, const OnlineSolution& solution);

void write_policy_trace_csv(std::ostream& out, std::span<const PolicyTraceEntry> trace);

}  // namespace dter
