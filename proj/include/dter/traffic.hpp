#pragma once

#include <cstdint>
#include <vector>

namespace dter {

struct Arrival {
  double time;
  double bytes;
};

/// Packet arrivals over [0, horizon).
struct DataArrivalTrace {
  std::vector<Arrival> events;
  double horizon = 0.0;

  double total_bytes() const;
  /// Throws ConfigInvalid unless times are strictly increasing inside
  /// [0, horizon) and sizes are positive.
  void validate() const;
};

struct TrafficModel {
  double rate_lambda = 0.5;  // packets/second
  double packet_bytes = 15.0 * 1024.0;
};

/// Poisson arrivals with exponential inter-arrival times. The same seed always
/// yields the same trace.
DataArrivalTrace generate_traffic(const TrafficModel& traffic, double horizon, std::uint64_t seed);

}  // namespace dter
