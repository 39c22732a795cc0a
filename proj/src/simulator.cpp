#include "dter/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dter/error.hpp"
#include "dter/offline.hpp"
#include "dter/online.hpp"
#include "dter/parallel.hpp"
#include "dter/rate_plan.hpp"

namespace dter {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::DterOffline: return "dter-offline";
    case Strategy::DterOnline: return "dter-online";
    case Strategy::Constant: return "constant";
    case Strategy::OnDemand: return "on-demand";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::DterOffline, Strategy::DterOnline, Strategy::Constant,
                     Strategy::OnDemand}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown strategy '" + std::string(name) + "'");
}

void SimConfig::validate() const {
  if (!(horizon >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "horizon must be >= 0");
  if (!(data_capacity > 0.0)) throw Error(ErrorCode::ConfigInvalid, "buffer capacity must be > 0");
  if (!(traffic.rate_lambda >= 0.0) || !(traffic.packet_bytes > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "traffic rate must be >= 0 and packet size > 0");
  }
  if (traffic.packet_bytes > data_capacity) {
    throw Error(ErrorCode::ConfigInvalid, "packet size exceeds the buffer capacity");
  }
  if (!(initial_energy >= 0.0) || initial_energy > circuit.energy_capacity()) {
    throw Error(ErrorCode::ConfigInvalid, "initial energy must lie in [0, Em]");
  }
  if (!(grid_density > 0.0)) throw Error(ErrorCode::ConfigInvalid, "grid density must be > 0");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void push_point(std::vector<CurvePoint>& pts, double t, double v) {
  if (!pts.empty() && pts.back().time == t) {
    pts.back().value = std::max(pts.back().value, v);
    return;
  }
  if (!pts.empty()) v = std::max(v, pts.back().value);
  pts.push_back({t, v});
}

}  // namespace

DterPlan plan_dter(const SimConfig& cfg, const DataTunnel& data) {
  DterPlan out;
  out.plan = solve_optimal_rate(data, cfg.anchor);
  try {
    out.tunnel = build_energy_tunnel(plan_to_power(out.plan, cfg.channel), cfg.circuit,
                                     cfg.initial_energy);
  } catch (const Error& e) {
    // A packet arriving just before T cannot be drained at any harvestable
    // power; leave what fits in the buffer unsent instead.
    if (e.code() != ErrorCode::SlopeExceedsChargeBound || cfg.anchor == AnchorMode::Lazy) throw;
    out.plan = solve_optimal_rate(data, AnchorMode::Lazy);
    out.tunnel = build_energy_tunnel(plan_to_power(out.plan, cfg.channel), cfg.circuit,
                                     cfg.initial_energy);
    out.deadline_relaxed = true;
  }
  return out;
}

namespace {

SimResult replay_dter(const SimConfig& cfg, const DataArrivalTrace& trace) {
  SimResult res;
  res.arrived = trace.events.size();
  const DataTunnel data = build_data_tunnel(trace, cfg.data_capacity);
  const DterPlan dter = plan_dter(cfg, data);
  const RatePlan& plan = dter.plan;
  const EnergyTunnel& tunnel = dter.tunnel;
  res.deadline_relaxed = dter.deadline_relaxed;
  const PlanDiagnostics diag = validate_plan(plan, data);
  if (!diag.feasible(1e-9 * cfg.data_capacity)) {
    throw Error(ErrorCode::ConstraintViolation, "rate plan leaves the data tunnel");
  }

  RequestSchedule schedule;
  if (cfg.strategy == Strategy::DterOffline) {
    double density = cfg.grid_density;
    for (int attempt = 0;; ++attempt) {
      try {
        schedule = schedule_offline(discretize(tunnel, density), tunnel, cfg.circuit);
        break;
      } catch (const Error& e) {
        const bool coarse =
            e.code() == ErrorCode::NoFeasiblePath || e.code() == ErrorCode::DensityTooLow;
        if (!coarse || attempt >= 2) throw;
        density *= 4.0;
      }
    }
  } else if (tunnel.consumption.value_at(cfg.horizon) > 0.0) {
    try {
      schedule = run_online_tunnel(cfg.circuit, tunnel.pieces, cfg.initial_energy).schedule;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleOnline) throw;
      res.starvation.push_back({0.0, cfg.horizon});
    }
  }
  res.es_energy = schedule_cost(schedule, cfg.circuit, tunnel);
  res.request_count = schedule.requests.size();

  CompensatedSum harvested;
  std::vector<CurvePoint> hpts;
  for (const auto& r : schedule.requests) {
    harvested.add(r.harvested);
    push_point(hpts, r.time, harvested.value());
  }
  res.harvested = harvested.value();
  res.eh_energy = tunnel.consumption.value_at(cfg.horizon);
  res.final_residual = cfg.initial_energy + res.harvested - res.eh_energy;
  res.cumulative_harvested = CumulativeCurve(std::move(hpts), Interpolation::Staircase);

  std::vector<CurvePoint> spts{{0.0, 0.0}};
  double sent = 0.0;
  for (const auto& s : plan.segments) {
    sent += s.rate * (s.end - s.start);
    push_point(spts, s.end, sent);
  }
  res.cumulative_sent = CumulativeCurve(std::move(spts), Interpolation::PiecewiseLinear);
  return res;
}

// Event-driven simulation of the two reactive baselines.
class BaselineSim {
 public:
  BaselineSim(const SimConfig& cfg, const DataArrivalTrace& trace) : cfg_(cfg), trace_(trace) {
    mean_rate_ = cfg.traffic.rate_lambda * cfg.traffic.packet_bytes;
    const double em = cfg.circuit.energy_capacity();
    if (cfg.strategy == Strategy::Constant) {
      // Energy to send one packet at the mean rate.
      trigger_ = cfg.channel.power_for_rate(mean_rate_ * kBitsPerByte) * cfg.traffic.packet_bytes /
                 std::max(mean_rate_, 1e-300);
      target_ = 0.75 * em;
    }
  }

  SimResult run() {
    SimResult res;
    res.arrived = trace_.events.size();
    const double horizon = cfg_.horizon;
    const double em = cfg_.circuit.energy_capacity();
    const double cap = cfg_.data_capacity;
    const double pkt = cfg_.traffic.packet_bytes;
    std::size_t next_arrival = 0;
    double lockout = -kInf;
    bool trigger_hit = false;
    bool exhausted = false;
    double starving_since = -1.0;
    CompensatedSum es;
    std::vector<CurvePoint> spts{{0.0, 0.0}};
    std::vector<CurvePoint> hpts;

    while (t_ < horizon) {
      double residual = std::max(0.0, this->residual());
      double trigger = trigger_level();
      const bool need = residual < trigger || trigger_hit || exhausted;
      if (need && buffer_ > 0.0 && t_ >= lockout) {
        const double amount = request_amount(residual, em);
        if (amount > 0.0 && residual + amount <= em * (1.0 - kCapacityGuard)) {
          const EnergyRequest r = make_request(cfg_.circuit, t_, residual, amount);
          es.add(r.es_cost + cfg_.circuit.request_overhead());
          harvested_.add(amount);
          push_point(hpts, t_, harvested_.value());
          ++res.request_count;
          lockout = t_ + r.charge_time;
          trigger_hit = false;
          exhausted = false;
          if (starving_since >= 0.0) {
            res.starvation.push_back({starving_since, t_});
            starving_since = -1.0;
          }
          continue;
        }
      }

      const double rate = exhausted ? 0.0 : current_rate();
      const double power = rate > 0.0 ? cfg_.channel.power_for_rate(rate * kBitsPerByte) : 0.0;
      if (exhausted && buffer_ > 0.0 && starving_since < 0.0) starving_since = t_;

      enum class Ev { Horizon, Arrival, Empty, Tier, Trigger, Exhaust, Lockout };
      Ev ev = Ev::Horizon;
      double next = horizon;
      auto consider = [&](double when, Ev kind) {
        if (when < next) {
          next = when;
          ev = kind;
        }
      };
      if (next_arrival < trace_.events.size()) {
        consider(trace_.events[next_arrival].time, Ev::Arrival);
      }
      if (rate > 0.0) {
        consider(t_ + buffer_ / rate, Ev::Empty);
        if (cfg_.strategy == Strategy::OnDemand && tier_ >= 0) {
          consider(t_ + (buffer_ - kOnDemandThresholds[tier_] * cap) / rate, Ev::Tier);
        }
      }
      if (power > 0.0) {
        if (!need) consider(t_ + (residual - trigger) / power, Ev::Trigger);
        consider(t_ + residual / power, Ev::Exhaust);
      }
      if (need && t_ < lockout) consider(lockout, Ev::Lockout);
      next = std::max(next, t_);

      const double dt = next - t_;
      const double bytes = rate * dt;
      sent_ += bytes;
      buffer_ = std::max(0.0, buffer_ - bytes);
      consumed_.add(power * dt);
      t_ = next;
      if (rate > 0.0) push_point(spts, t_, sent_);

      switch (ev) {
        case Ev::Horizon:
          break;
        case Ev::Arrival:
          ++next_arrival;
          if (buffer_ + pkt > cap * (1.0 + 1e-12)) {
            ++res.dropped;
          } else {
            buffer_ += pkt;
          }
          update_tier();
          break;
        case Ev::Empty:
          buffer_ = 0.0;
          tier_ = -1;
          break;
        case Ev::Tier:
          buffer_ = kOnDemandThresholds[tier_] * cap;
          --tier_;
          break;
        case Ev::Trigger:
          trigger_hit = true;
          break;
        case Ev::Exhaust:
          exhausted = true;
          break;
        case Ev::Lockout:
          break;
      }
    }
    if (starving_since >= 0.0) res.starvation.push_back({starving_since, horizon});

    res.es_energy = es.value();
    res.eh_energy = consumed_.value();
    res.harvested = harvested_.value();
    res.final_residual = residual();
    res.dropped = std::min(res.dropped, res.arrived);
    res.loss_ratio = res.arrived > 0 ? static_cast<double>(res.dropped) / res.arrived : 0.0;
    res.cumulative_sent = CumulativeCurve(std::move(spts), Interpolation::PiecewiseLinear);
    res.cumulative_harvested = CumulativeCurve(std::move(hpts), Interpolation::Staircase);
    return res;
  }

 private:
  double residual() const {
    return (cfg_.initial_energy + harvested_.value()) - consumed_.value();
  }

  double current_rate() const {
    if (buffer_ <= 0.0) return 0.0;
    if (cfg_.strategy == Strategy::Constant) return mean_rate_;
    return tier_rate(tier_);
  }

  double tier_rate(int tier) const {
    return mean_rate_ * (tier < 0 ? kOnDemandRates[0] : kOnDemandRates[tier]);
  }

  void update_tier() {
    tier_ = -1;
    for (int i = 0; i < 7; ++i) {
      if (kOnDemandThresholds[i] * cfg_.data_capacity <= buffer_) tier_ = i;
    }
  }

  // Energy needed for the next packet at the current tier rate.
  double packet_energy() const {
    const double rate = tier_rate(tier_);
    return cfg_.channel.power_for_rate(rate * kBitsPerByte) * cfg_.traffic.packet_bytes / rate;
  }

  double trigger_level() const {
    if (cfg_.strategy == Strategy::Constant) return trigger_;
    return std::min(packet_energy(), 0.5 * cfg_.circuit.energy_capacity());
  }

  double request_amount(double residual, double em) const {
    if (cfg_.strategy == Strategy::Constant) return target_ - residual;
    return std::min(packet_energy(), 0.95 * em - residual);
  }

  const SimConfig& cfg_;
  const DataArrivalTrace& trace_;
  double mean_rate_ = 0.0;
  double trigger_ = 0.0;
  double target_ = 0.0;
  double t_ = 0.0;
  double buffer_ = 0.0;
  double sent_ = 0.0;
  int tier_ = -1;
  CompensatedSum harvested_;
  CompensatedSum consumed_;
};

}  // namespace

SimResult run_simulation(const SimConfig& config, std::uint64_t seed) {
  config.validate();
  const DataArrivalTrace trace = generate_traffic(config.traffic, config.horizon, seed);
  if (config.strategy == Strategy::DterOffline || config.strategy == Strategy::DterOnline) {
    return replay_dter(config, trace);
  }
  return BaselineSim(config, trace).run();
}

std::vector<SimResult> run_simulations(const SimConfig& config, std::span<const std::uint64_t> seeds) {
  std::vector<SimResult> results(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) { results[i] = run_simulation(config, seeds[i]); });
  return results;
}

}  // namespace dter
