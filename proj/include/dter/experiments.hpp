#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dter/offline.hpp"
#include "dter/online.hpp"
#include "dter/simulator.hpp"

namespace dter {

// ---- strategy comparison ----

struct RunRow {
  std::size_t run_id;
  std::uint64_t seed;
  Strategy strategy;
  double es_energy;
  double eh_energy;
  double loss_ratio;
  std::size_t request_count;
};

struct StrategySummary {
  Strategy strategy;
  double es_mean = 0.0;
  double es_std = 0.0;
  double eh_mean = 0.0;
  double loss_mean = 0.0;
  double loss_std = 0.0;
  double requests_mean = 0.0;
};

struct StrategyComparison {
  std::vector<RunRow> runs;
  std::vector<StrategySummary> summary;
};

StrategyComparison compare_strategies(const SimConfig& base, std::span<const Strategy> strategies,
                                      std::span<const std::uint64_t> seeds);

void write_runs_csv(std::ostream& out, std::span<const RunRow> runs);
void write_summary_csv(std::ostream& out, std::span<const StrategySummary> summary);
void write_curve_csv(std::ostream& out, const CumulativeCurve& curve);

// ---- online versus offline ----

struct ComparisonResult {
  double online = 0.0;   // ES energy of the threshold policy
  double optimal = 0.0;  // ES energy of the grid optimum
  double delta_percent = 0.0;
  std::size_t online_requests = 0;
  std::size_t optimal_requests = 0;
};

/// Both policies face the same consumption pieces and initial energy. The
/// offline optimum must keep eb_hat in reserve, as the online policy does; its
/// grid uses `level_step` joules and one level of consumption per
/// column at the steepest slope.
ComparisonResult compare_online_offline(const ChargingCircuit& circuit,
                                        std::span<const TunnelPiece> pieces, double initial_energy,
                                        double level_step);

struct DeltaRow {
  double horizon;
  double mean_slope;
  double initial_energy;
  double alpha;  // total consumption over er_hat
  ComparisonResult result;
};

/// Single constant-slope tunnel evaluated at each horizon.
std::vector<DeltaRow> single_tunnel_sweep(const ChargingCircuit& circuit, double slope,
                                          std::span<const double> horizons, double initial_energy,
                                          double level_step);

/// Three-or-more-piece tunnels with Gaussian piece lengths and slopes whose
/// standard deviation equals the mean (negative draws are redrawn). The
/// standardized draws depend on the seed only, so cells share random numbers.
std::vector<TunnelPiece> random_pieces(std::size_t count, double mean_horizon, double mean_slope,
                                       std::uint64_t seed);

struct MultiTunnelCell {
  double mean_horizon;
  double mean_slope;
  std::vector<double> deltas;
  double mean_delta = 0.0;
};

/// E0 = eb_hat for every tunnel.
MultiTunnelCell multi_tunnel_cell(const ChargingCircuit& circuit, std::size_t pieces,
                                  double mean_horizon, double mean_slope,
                                  std::span<const std::uint64_t> seeds, double level_step);

void write_delta_csv(std::ostream& out, std::span<const DeltaRow> rows);

// ---- grid density ----

struct DensityCell {
  double lambda;
  double capacitance;
  double horizon;
  std::vector<double> converged;  // one per seed, seed order
};

/// Converged density of the DTER offline schedule for each seeded trace.
DensityCell density_cell(const SimConfig& base, std::span<const std::uint64_t> seeds, double beta0,
                         double threshold, int max_iterations);

/// Empirical quantile with linear interpolation, q in [0, 1].
double quantile(std::vector<double> values, double q);

void write_density_cells_csv(std::ostream& out, std::span<const DensityCell> cells);
void write_density_cdf_csv(std::ostream& out, std::span<const DensityCell> cells);

// ---- request table ----

struct RequestTableRow {
  double lambda;
  double capacitance;
  double er_hat;
  double requests_per_second;  // mean over seeds of online requests / T
};

RequestTableRow request_table_row(const SimConfig& base, std::span<const std::uint64_t> seeds);
void write_request_table_csv(std::ostream& out, std::span<const RequestTableRow> rows);

}  // namespace dter
