#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "dter/channel.hpp"
#include "dter/charging.hpp"
#include "dter/curve.hpp"
#include "dter/offline.hpp"
#include "dter/rate_plan.hpp"
#include "dter/traffic.hpp"

namespace dter {

enum class Strategy { DterOffline, DterOnline, Constant, OnDemand };

std::string_view to_string(Strategy s);
/// Accepts the names printed by to_string; throws ConfigInvalid otherwise.
Strategy parse_strategy(std::string_view name);

struct SimConfig {
  ChargingCircuit circuit = ChargingCircuit::reference();
  ChannelModel channel = ChannelModel::reference();
  TrafficModel traffic;
  double horizon = 100.0;
  double data_capacity = 64.0 * 1024.0;
  Strategy strategy = Strategy::DterOffline;
  double initial_energy = 0.0;
  double grid_density = 2.5e11;  // cells per joule-second for DterOffline
  AnchorMode anchor = AnchorMode::Lazy;  // rate plan of both DTER strategies

  void validate() const;
};

struct SimResult {
  double es_energy = 0.0;  // ES transmit energy including request overheads
  double eh_energy = 0.0;  // EHD transmit energy
  double loss_ratio = 0.0;
  std::size_t arrived = 0;
  std::size_t dropped = 0;
  std::size_t request_count = 0;
  double harvested = 0.0;
  double final_residual = 0.0;
  CumulativeCurve cumulative_sent;
  CumulativeCurve cumulative_harvested;
  std::vector<std::pair<double, double>> starvation;  // [start, end) with no energy
  bool deadline_relaxed = false;  // DTER plan fell back to leaving buffered data at T
};

struct DterPlan {
  RatePlan plan;
  EnergyTunnel tunnel;
  bool deadline_relaxed = false;
};

/// Rate plan with the configured anchor and its energy tunnel. A deadline plan
/// falls back to the lazy anchor when draining by T would need more than the
/// harvest bound.
DterPlan plan_dter(const SimConfig& config, const DataTunnel& data);

SimResult run_simulation(const SimConfig& config, std::uint64_t seed);

/// Independent seeded runs, returned in seed order.
std::vector<SimResult> run_simulations(const SimConfig& config, std::span<const std::uint64_t> seeds);

/// Occupancy fractions of the buffer and the matching multiples of the mean
/// traffic rate for the on-demand baseline.
inline constexpr double kOnDemandThresholds[] = {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2,
                                                 3.0 / 4,  7.0 / 8, 15.0 / 16};
inline constexpr double kOnDemandRates[] = {1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0, 2.0, 4.0, 8.0};

}  // namespace dter
