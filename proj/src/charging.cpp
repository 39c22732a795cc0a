#include "dter/charging.hpp"

#include <cmath>
#include <string>

#include "dter/error.hpp"

namespace dter {

ChargingCircuit::ChargingCircuit(double resistance_ohm, double capacitance_farad,
                                 double max_voltage_volt, double es_power_watt,
                                 double request_overhead_joule)
    : resistance_(resistance_ohm),
      capacitance_(capacitance_farad),
      max_voltage_(max_voltage_volt),
      es_power_(es_power_watt),
      request_overhead_(request_overhead_joule) {
  if (!(resistance_ > 0.0) || !(capacitance_ > 0.0) || !(max_voltage_ > 0.0) ||
      !(es_power_ > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "circuit R, C, Vm and ES power must be positive");
  }
  if (!(request_overhead_ >= 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "request overhead must be non-negative");
  }
}

ChargingCircuit ChargingCircuit::reference() { return {1e3, 2e-9, 2.0, 10.0, 0.4e-9}; }

namespace {

void check_domain(const ChargingCircuit& circuit, double residual, double request) {
  const double em = circuit.energy_capacity();
  if (!(residual >= 0.0) || !(request >= 0.0)) {
    throw Error(ErrorCode::CapacityExceeded, "residual and request must be non-negative");
  }
  const double total = residual + request;
  if (total > em) {
    throw Error(ErrorCode::CapacityExceeded,
                "residual + request = " + std::to_string(total) + " J exceeds Em");
  }
  if (request > 0.0 && total > em * (1.0 - kCapacityGuard)) {
    throw Error(ErrorCode::InfiniteChargeTime, "charging up to Em takes infinite time");
  }
}

}  // namespace

double charge_time(const ChargingCircuit& circuit, double residual, double request) {
  check_domain(circuit, residual, request);
  if (request == 0.0) return 0.0;
  const double em = circuit.energy_capacity();
  const double total = residual + request;
  const double s_m = std::sqrt(2.0 * em);
  const double s_b = std::sqrt(2.0 * residual);
  const double s_t = std::sqrt(2.0 * total);
  // ratio - 1 = (s_t - s_b)/(s_m - s_t), both differences rewritten without
  // cancellation so small requests and near-full states keep full precision.
  const double rise = 2.0 * request / (s_t + s_b);
  const double headroom = 2.0 * (em - total) / (s_m + s_t);
  return circuit.time_constant() * std::log1p(rise / headroom);
}

double charging_cost(const ChargingCircuit& circuit, double residual, double request) {
  return circuit.es_power() * charge_time(circuit, residual, request);
}

double charge_potential(const ChargingCircuit& circuit, double energy) {
  const double em = circuit.energy_capacity();
  const double s_m = std::sqrt(2.0 * em);
  const double headroom = 2.0 * (em - energy) / (s_m + std::sqrt(2.0 * energy));
  return -circuit.es_power() * circuit.time_constant() * std::log(headroom);
}

double max_charge_time(const ChargingCircuit& circuit) {
  return charge_time(circuit, 0.0, circuit.energy_capacity() * (1.0 - kCapacityGuard));
}

EnergyRequest make_request(const ChargingCircuit& circuit, double time, double residual,
                           double request) {
  EnergyRequest r;
  r.time = time;
  r.residual_before = residual;
  r.harvested = request;
  r.charge_time = charge_time(circuit, residual, request);
  r.es_cost = circuit.es_power() * r.charge_time;
  return r;
}

Curvature charging_cost_curvature(const ChargingCircuit& circuit, double residual, double request,
                                  double step) {
  if (!(step > 0.0) || request < step) {
    throw Error(ErrorCode::CapacityExceeded, "second difference leaves the request domain");
  }
  check_domain(circuit, residual, request + step);
  const double quarter = 0.25 * circuit.energy_capacity();
  if (std::abs(residual + request - quarter) <= step) return Curvature::Boundary;
  // cost(b, r+h) - cost(b, r) == cost(b+r, h) because the charge time is a
  // difference of a potential; this keeps the second difference well above
  // rounding noise.
  const double upper = charging_cost(circuit, residual + request, step);
  const double lower = charging_cost(circuit, residual + request - step, step);
  const double second = upper - lower;
  if (second < 0.0) return Curvature::Concave;
  if (second > 0.0) return Curvature::Convex;
  return Curvature::Boundary;
}

double max_harvest_power(const ChargingCircuit& circuit) {
  const double vm = circuit.max_voltage();
  return vm * vm / (4.0 * circuit.resistance());
}

double residual_energy(std::span<const EnergyRequest> requests, const CumulativeCurve& consumption,
                       double t, double initial_energy) {
  double harvested = 0.0;
  for (const auto& r : requests) {
    if (r.time < t) harvested += r.harvested;
  }
  const double used = consumption.value_at(t);
  const double residual = initial_energy + harvested - used;
  const double scale = initial_energy + harvested + used;
  if (residual < -1e-12 * scale) {
    throw Error(ErrorCode::NegativeResidual,
                "residual energy " + std::to_string(residual) + " J at t=" + std::to_string(t));
  }
  return residual;
}

}  // namespace dter
