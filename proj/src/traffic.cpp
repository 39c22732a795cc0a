#include "dter/traffic.hpp"

#include <cmath>
#include <random>

#include "dter/error.hpp"

namespace dter {

double DataArrivalTrace::total_bytes() const {
  double total = 0.0;
  for (const auto& e : events) total += e.bytes;
  return total;
}

void DataArrivalTrace::validate() const {
  if (!(horizon >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "trace horizon must be >= 0");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!(e.time >= 0.0) || !(e.time < horizon)) {
      throw Error(ErrorCode::ConfigInvalid, "arrival time outside [0, T)");
    }
    if (!(e.bytes > 0.0)) throw Error(ErrorCode::ConfigInvalid, "arrival size must be positive");
    if (i > 0 && !(e.time > events[i - 1].time)) {
      throw Error(ErrorCode::ConfigInvalid, "arrival times must be strictly increasing");
    }
  }
}

DataArrivalTrace generate_traffic(const TrafficModel& traffic, double horizon, std::uint64_t seed) {
  if (!(traffic.rate_lambda >= 0.0) || !(traffic.packet_bytes > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "traffic rate must be >= 0 and packet size > 0");
  }
  DataArrivalTrace trace;
  trace.horizon = horizon;
  if (traffic.rate_lambda == 0.0 || horizon <= 0.0) return trace;
  // Inverse-CDF sampling on the raw engine output keeps traces identical
  // across standard library implementations.
  std::mt19937_64 rng(seed);
  double t = 0.0;
  for (;;) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    t += -std::log1p(-u) / traffic.rate_lambda;
    if (t >= horizon) break;
    if (!trace.events.empty() && !(t > trace.events.back().time)) continue;
    trace.events.push_back({t, traffic.packet_bytes});
  }
  return trace;
}

}  // namespace dter
