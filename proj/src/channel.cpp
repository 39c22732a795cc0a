#include "dter/channel.hpp"

#include <cmath>

#include "dter/error.hpp"

namespace dter {

double fspl_db(double distance_m, double carrier_hz) {
  return 20.0 * std::log10(distance_m) + 20.0 * std::log10(carrier_hz) - 147.55;
}

ChannelModel::ChannelModel(double carrier_hz, double bandwidth_hz, double noise_density_dbm_hz,
                           double distance_m)
    : carrier_(carrier_hz),
      bandwidth_(bandwidth_hz),
      noise_density_(noise_density_dbm_hz),
      distance_(distance_m) {
  if (!(carrier_ > 0.0) || !(bandwidth_ > 0.0) || !(distance_ > 0.0) ||
      !std::isfinite(noise_density_)) {
    throw Error(ErrorCode::ConfigInvalid, "channel carrier, bandwidth and distance must be positive");
  }
  const double dbm = fspl_db() + noise_floor_dbm();
  loss_watts_ = std::pow(10.0, dbm / 10.0) * 1e-3;
}

ChannelModel ChannelModel::reference() { return {2.4e9, 50e3, -174.0, 9.144}; }

double ChannelModel::noise_floor_dbm() const {
  return noise_density_ + 10.0 * std::log10(bandwidth_);
}

double ChannelModel::fspl_db() const { return dter::fspl_db(distance_, carrier_); }

double ChannelModel::power_for_rate(double rate_bps) const {
  if (rate_bps <= 0.0) return 0.0;
  return std::expm1(rate_bps / bandwidth_ * std::log(2.0)) * loss_watts_;
}

double ChannelModel::rate_for_power(double watts) const {
  if (watts <= 0.0) return 0.0;
  return bandwidth_ * std::log1p(watts / loss_watts_) / std::log(2.0);
}

}  // namespace dter
