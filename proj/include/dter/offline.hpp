#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "dter/charging.hpp"
#include "dter/curve.hpp"
#include "dter/rate_plan.hpp"

namespace dter {

/// Maximal span of constant consumption power.
struct TunnelPiece {
  double start;
  double end;
  double slope;  // watts

  double length() const { return end - start; }
};

/// Bounds on the cumulative harvested energy H(t) implied by a consumption
/// profile. The residual energy is E0 + H(t) - consumption(t); the lower
/// bound keeps it at or above `floor` and the upper bound at or below Em.
struct EnergyTunnel {
  CumulativeCurve consumption;
  std::vector<TunnelPiece> pieces;
  double horizon = 0.0;
  double capacity = 0.0;
  double initial_energy = 0.0;
  double floor = 0.0;

  double lower(double t) const;
  double upper(double t) const;
  double residual(double t, double harvested) const;
  /// Piece boundaries strictly inside (0, T).
  std::vector<double> breakpoints() const;
};

/// The residual must stay at or above `floor` (0 <= floor < Em). A floor
/// above E0 has to be reached by a request at t = 0.
EnergyTunnel build_energy_tunnel(const PowerProfile& profile, const ChargingCircuit& circuit,
                                 double initial_energy, double floor = 0.0);

struct Grid {
  std::vector<double> columns;
  std::vector<double> levels;
  double time_step = 0.0;
  double level_step = 0.0;
  double density = 0.0;  // cells per joule-second

  bool valid(const EnergyTunnel& tunnel, std::size_t j, std::size_t k) const;
};

/// Grid with roughly `density` cells per joule-second. Cells have the aspect of
/// the mean consumption slope, the level spacing divides lower(T) exactly and
/// tunnel breakpoints are added as extra columns. Columns over which more than
/// one level is consumed are split evenly.
Grid discretize(const EnergyTunnel& tunnel, double density);

/// Grid with explicit nominal steps; the same snapping rules as discretize.
Grid make_grid(const EnergyTunnel& tunnel, double time_step, double level_step);

struct RequestSchedule {
  std::vector<EnergyRequest> requests;
  double total_es_cost = 0.0;  // sum of es_cost + overhead
};

enum class DpMethod {
  Auto,        // prefix-minimum relaxation from columns no lockout can skip
  EdgeByEdge,  // evaluates every request edge with the charging function
};

/// Minimum-cost request staircase on the grid. Throws NoFeasiblePath.
RequestSchedule schedule_offline(const Grid& grid, const EnergyTunnel& tunnel,
                                 const ChargingCircuit& circuit, DpMethod method = DpMethod::Auto);

/// Sum of es_cost + overhead after checking capacity, lockout and the cost of
/// each request. Throws ConstraintViolation.
double schedule_cost(const RequestSchedule& schedule, const ChargingCircuit& circuit);
/// Also checks the residual floor of the tunnel before every request and at T.
double schedule_cost(const RequestSchedule& schedule, const ChargingCircuit& circuit,
                     const EnergyTunnel& tunnel);

struct DensityStep {
  double density;
  double cost;
  double improvement;  // relative change to the next step, 0 for the last
};

struct DensityResult {
  std::vector<DensityStep> steps;
  double converged_density = 0.0;
  RequestSchedule schedule;  // at the converged density
};

/// Refines density = i * beta0 until the relative cost change drops below
/// `threshold`. Densities too coarse for the tunnel are skipped. Throws
/// NoConvergence after `max_iterations` densities.
DensityResult density_sweep(const EnergyTunnel& tunnel, const ChargingCircuit& circuit,
                            double beta0, double threshold, int max_iterations = 64);

void write_schedule_csv(std::ostream& out, const RequestSchedule& schedule);
void write_density_csv(std::ostream& out, const DensityResult& result);

}  // namespace dter
