#pragma once

#include <span>

#include "dter/curve.hpp"

namespace dter {

/// Physical parameters of the ES -> EHD charging path (SI units throughout).
///
/// The capacitor energy capacity is always derived as C*Vm^2/2 so that the
/// charging cost and the harvest power bound stay mutually consistent.
class ChargingCircuit {
 public:
  ChargingCircuit(double resistance_ohm, double capacitance_farad, double max_voltage_volt,
                  double es_power_watt, double request_overhead_joule);

  double resistance() const { return resistance_; }
  double capacitance() const { return capacitance_; }
  double max_voltage() const { return max_voltage_; }
  double es_power() const { return es_power_; }
  double request_overhead() const { return request_overhead_; }

  double time_constant() const { return resistance_ * capacitance_; }
  double energy_capacity() const { return 0.5 * capacitance_ * max_voltage_ * max_voltage_; }

  /// Default circuit of the reference scenario: 1 kOhm, 2 nF, 2 V, 10 W, 0.4 nJ.
  static ChargingCircuit reference();

 private:
  double resistance_;
  double capacitance_;
  double max_voltage_;
  double es_power_;
  double request_overhead_;
};

/// Residual energy stored in the EHD capacitor.
struct CapacitorState {
  double residual = 0.0;

  bool valid_for(const ChargingCircuit& circuit) const {
    return residual >= 0.0 && residual <= circuit.energy_capacity();
  }
};

/// One energy request: the ES transmits for charge_time seconds at its constant
/// power, the EHD gains `harvested` joules.
struct EnergyRequest {
  double time = 0.0;
  double residual_before = 0.0;
  double harvested = 0.0;
  double charge_time = 0.0;
  double es_cost = 0.0;

  /// Average charging rate harvested/charge_time, 0 for an empty request.
  double avg_charge_rate() const { return charge_time > 0.0 ? harvested / charge_time : 0.0; }
};

/// Relative guard band below Em: charging into it is rejected as an infinite
/// charge time.
inline constexpr double kCapacityGuard = 1e-12;

/// Time to raise the capacitor from `residual` to `residual + request`:
///   RC * ln[(sqrt(2Em) - sqrt(2Eb)) / (sqrt(2Em) - sqrt(2(Eb + Er)))]
/// Throws CapacityExceeded above Em and InfiniteChargeTime inside the guard
/// band at Em.
double charge_time(const ChargingCircuit& circuit, double residual, double request);

/// ES energy spent on the request, es_power * charge_time.
double charging_cost(const ChargingCircuit& circuit, double residual, double request);

/// ES energy including the per-request overhead.
inline double request_cost(const ChargingCircuit& circuit, double residual, double request) {
  return charging_cost(circuit, residual, request) + circuit.request_overhead();
}

/// Charging potential: charging_cost(b, r) == charge_potential(b + r) - charge_potential(b).
double charge_potential(const ChargingCircuit& circuit, double energy);

/// Longest possible charge time, from empty to the edge of the guard band.
double max_charge_time(const ChargingCircuit& circuit);

EnergyRequest make_request(const ChargingCircuit& circuit, double time, double residual,
                           double request);

enum class Curvature { Concave, Convex, Boundary };

/// Classifies the curvature of charging_cost in the request size from a
/// central second difference with spacing `step`. Points within one step of
/// Em/4 (in residual + request) are reported as Boundary.
Curvature charging_cost_curvature(const ChargingCircuit& circuit, double residual, double request,
                                  double step);

/// Highest power a capacitor-based EHD can sustainably harvest, Em/(2RC) = Vm^2/(4R).
double max_harvest_power(const ChargingCircuit& circuit);

/// E0 + sum of requests strictly before t - consumption(t). Throws
/// NegativeResidual for an infeasible history.
double residual_energy(std::span<const EnergyRequest> requests, const CumulativeCurve& consumption,
                       double t, double initial_energy);

}  // namespace dter
