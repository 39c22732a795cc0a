#pragma once

namespace dter {

/// Static AWGN link with free-space path loss. Rates are in bits/second.
class ChannelModel {
 public:
  ChannelModel(double carrier_hz, double bandwidth_hz, double noise_density_dbm_hz,
               double distance_m);

  /// 2.4 GHz carrier, 50 kHz bandwidth, -174 dBm/Hz noise, 30 ft (9.144 m) link.
  static ChannelModel reference();

  double carrier() const { return carrier_; }
  double bandwidth() const { return bandwidth_; }
  double noise_density() const { return noise_density_; }
  double distance() const { return distance_; }

  /// N0 + 10 log10(B), dBm.
  double noise_floor_dbm() const;
  double fspl_db() const;

  /// Transmit power (W) needed to sustain `rate_bps`.
  double power_for_rate(double rate_bps) const;
  /// Inverse of power_for_rate.
  double rate_for_power(double watts) const;

 private:
  double carrier_;
  double bandwidth_;
  double noise_density_;
  double distance_;
  double loss_watts_;  // power per unit of (2^(r/B) - 1)
};

/// 20 log10(d) + 20 log10(f) - 147.55
double fspl_db(double distance_m, double carrier_hz);

inline constexpr double kBitsPerByte = 8.0;

}  // namespace dter
