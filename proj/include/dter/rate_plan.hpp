#pragma once

#include <optional>
#include <vector>

#include "dter/channel.hpp"
#include "dter/curve.hpp"
#include "dter/traffic.hpp"

namespace dter {

/// Cumulative-data bounds for the sent curve. `upper` is the staircase of
/// arrivals, `lower` is the same staircase shifted down by the buffer capacity
/// and clipped at 0.
struct DataTunnel {
  CumulativeCurve upper;
  CumulativeCurve lower;
  double capacity = 0.0;
  double horizon = 0.0;
  std::vector<Arrival> arrivals;

  double total_bytes() const;
};

DataTunnel build_data_tunnel(const DataArrivalTrace& trace, double capacity);

enum class AnchorMode {
  Deadline,  // every byte is sent by T
  Lazy,      // only what cannot stay buffered at T is sent
};

struct RateSegment {
  double start;
  double end;
  double rate;  // bytes/second
};

struct RatePlan {
  std::vector<RateSegment> segments;
  AnchorMode anchor = AnchorMode::Deadline;

  /// Bytes sent by time t.
  double sent_at(double t) const;
  /// Rate on the segment containing t (right-continuous).
  double rate_at(double t) const;
  double horizon() const { return segments.empty() ? 0.0 : segments.back().end; }
};

/// Taut string through the data tunnel from (0, 0) to the anchor point.
RatePlan solve_optimal_rate(const DataTunnel& tunnel, AnchorMode anchor);

/// Earliest t at which buffered data plus all future arrivals fits the buffer.
double compute_t_p(const DataArrivalTrace& trace, double capacity, const RatePlan& plan);

struct PlanDiagnostics {
  double causality_violation = 0.0;  // max(sent - arrived), bytes
  double causality_time = 0.0;
  double overflow_violation = 0.0;  // max(arrived - sent - capacity), bytes
  double overflow_time = 0.0;
  double negative_rate = 0.0;  // most negative rate, 0 if none
  bool contiguous = true;
  bool constant_between_arrivals = true;
  bool changes_at_bounds = true;
  bool increases_only_when_empty = true;
  bool decreases_only_when_full = true;
  std::optional<bool> zero_after_t_p;  // set for Lazy plans

  bool feasible(double tolerance) const {
    return contiguous && causality_violation <= tolerance && overflow_violation <= tolerance &&
           negative_rate == 0.0;
  }
  bool lemmas_hold() const {
    return constant_between_arrivals && changes_at_bounds && increases_only_when_empty &&
           decreases_only_when_full && zero_after_t_p.value_or(true);
  }
};

/// Never throws; checks tunnel constraints and the structural properties of
/// an optimal plan. Occupancy comparisons use 1e-9 * capacity.
PlanDiagnostics validate_plan(const RatePlan& plan, const DataTunnel& tunnel);

struct PowerSegment {
  double start;
  double end;
  double power;  // watts
};

/// Transmit power profile of a plan and its cumulative energy curve.
struct PowerProfile {
  std::vector<PowerSegment> segments;
  CumulativeCurve energy;

  double horizon() const { return segments.empty() ? 0.0 : segments.back().end; }
};

PowerProfile plan_to_power(const RatePlan& plan, const ChannelModel& channel);

/// Piecewise-constant power profile from explicit segments (contiguous from 0).
PowerProfile make_power_profile(std::vector<PowerSegment> segments);

}  // namespace dter
