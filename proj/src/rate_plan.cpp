#include "dter/rate_plan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dter/error.hpp"

namespace dter {

double DataTunnel::total_bytes() const {
  double total = 0.0;
  for (const auto& a : arrivals) total += a.bytes;
  return total;
}

DataTunnel build_data_tunnel(const DataArrivalTrace& trace, double capacity) {
  if (!(capacity > 0.0)) throw Error(ErrorCode::ConfigInvalid, "buffer capacity must be positive");
  trace.validate();
  DataTunnel tunnel;
  tunnel.capacity = capacity;
  tunnel.horizon = trace.horizon;
  tunnel.arrivals = trace.events;
  std::vector<CurvePoint> up, lo;
  double cumulative = 0.0;
  for (const auto& e : trace.events) {
    if (e.bytes > capacity) {
      throw Error(ErrorCode::PacketExceedsBuffer,
                  "packet of " + std::to_string(e.bytes) + " bytes exceeds the buffer");
    }
    cumulative += e.bytes;
    up.push_back({e.time, cumulative});
    lo.push_back({e.time, std::max(0.0, cumulative - capacity)});
  }
  tunnel.upper = CumulativeCurve(std::move(up), Interpolation::Staircase);
  tunnel.lower = CumulativeCurve(std::move(lo), Interpolation::Staircase);
  return tunnel;
}

double RatePlan::sent_at(double t) const {
  double sent = 0.0;
  for (const auto& s : segments) {
    if (t <= s.start) break;
    sent += s.rate * (std::min(t, s.end) - s.start);
  }
  return sent;
}

double RatePlan::rate_at(double t) const {
  for (const auto& s : segments) {
    if (t < s.end) return s.rate;
  }
  return segments.empty() ? 0.0 : segments.back().rate;
}

namespace {

// sent(x) must lie in [lo, hi] at each gate.
struct Gate {
  double x;
  double lo;
  double hi;
};

struct Vertex {
  double x;
  double y;
};

std::vector<Gate> make_gates(const DataTunnel& tunnel, AnchorMode anchor) {
  std::vector<Gate> gates;
  double before = 0.0;
  for (const auto& a : tunnel.arrivals) {
    const double after = before + a.bytes;
    gates.push_back({a.time, std::max(0.0, after - tunnel.capacity), before});
    before = after;
  }
  const double end = anchor == AnchorMode::Deadline ? before : std::max(0.0, before - tunnel.capacity);
  gates.push_back({tunnel.horizon, end, end});
  return gates;
}

}  // namespace

RatePlan solve_optimal_rate(const DataTunnel& tunnel, AnchorMode anchor) {
  RatePlan plan;
  plan.anchor = anchor;
  if (!(tunnel.horizon > 0.0)) return plan;
  const std::vector<Gate> gates = make_gates(tunnel, anchor);

  std::vector<Vertex> path{{0.0, 0.0}};
  std::size_t next = 0;
  for (;;) {
    const Vertex apex = path.back();
    double smin = -std::numeric_limits<double>::infinity();
    double smax = std::numeric_limits<double>::infinity();
    std::size_t kmin = 0, kmax = 0;
    bool bent = false;
    for (std::size_t j = next; j < gates.size(); ++j) {
      const Gate& g = gates[j];
      const double dx = g.x - apex.x;
      if (dx <= 0.0) {
        if (apex.y < g.lo || apex.y > g.hi) {
          throw Error(ErrorCode::InfeasibleTunnel, "tunnel closes at t=" + std::to_string(g.x));
        }
        continue;
      }
      const double slo = (g.lo - apex.y) / dx;
      const double shi = (g.hi - apex.y) / dx;
      if (shi < smin) {
        path.push_back({gates[kmin].x, gates[kmin].lo});
        next = kmin + 1;
        bent = true;
        break;
      }
      if (slo > smax) {
        path.push_back({gates[kmax].x, gates[kmax].hi});
        next = kmax + 1;
        bent = true;
        break;
      }
      if (slo >= smin) {
        smin = slo;
        kmin = j;
      }
      if (shi <= smax) {
        smax = shi;
        kmax = j;
      }
    }
    if (!bent) break;
  }
  path.push_back({gates.back().x, gates.back().lo});

  for (std::size_t i = 1; i < path.size(); ++i) {
    const Vertex& a = path[i - 1];
    const Vertex& b = path[i];
    if (!(b.x > a.x)) continue;
    const double rate = (b.y - a.y) / (b.x - a.x);
    if (!plan.segments.empty() && plan.segments.back().rate == rate) {
      plan.segments.back().end = b.x;
    } else {
      plan.segments.push_back({a.x, b.x, rate});
    }
  }
  return plan;
}

double compute_t_p(const DataArrivalTrace& trace, double capacity, const RatePlan& plan) {
  const double total = trace.total_bytes();
  const double tol = 1e-9 * capacity;
  if (total < capacity - tol) return trace.horizon;
  const double target = total - capacity;
  if (target <= tol) return 0.0;
  double sent = 0.0;
  for (const auto& s : plan.segments) {
    const double end_sent = sent + s.rate * (s.end - s.start);
    if (end_sent >= target - tol && s.rate > 0.0) {
      return std::clamp(s.start + (target - sent) / s.rate, s.start, s.end);
    }
    sent = end_sent;
  }
  return trace.horizon;
}

PlanDiagnostics validate_plan(const RatePlan& plan, const DataTunnel& tunnel) {
  PlanDiagnostics d;
  const double horizon = tunnel.horizon;
  const double time_tol = 1e-12 * std::max(1.0, horizon);
  const double occ_tol = 1e-9 * tunnel.capacity;

  if (plan.segments.empty()) {
    d.contiguous = horizon <= 0.0;
  } else {
    if (std::abs(plan.segments.front().start) > time_tol) d.contiguous = false;
    if (std::abs(plan.segments.back().end - horizon) > time_tol) d.contiguous = false;
    for (std::size_t i = 0; i < plan.segments.size(); ++i) {
      const auto& s = plan.segments[i];
      if (!(s.end > s.start)) d.contiguous = false;
      if (i > 0 && std::abs(s.start - plan.segments[i - 1].end) > time_tol) d.contiguous = false;
      d.negative_rate = std::min(d.negative_rate, s.rate);
    }
  }

  auto note_causality = [&](double v, double t) {
    if (v > d.causality_violation) {
      d.causality_violation = v;
      d.causality_time = t;
    }
  };
  auto note_overflow = [&](double v, double t) {
    if (v > d.overflow_violation) {
      d.overflow_violation = v;
      d.overflow_time = t;
    }
  };

  double before = 0.0;
  for (const auto& a : tunnel.arrivals) {
    const double sent = plan.sent_at(a.time);
    const double after = before + a.bytes;
    note_causality(sent - before, a.time);
    note_overflow(after - sent - tunnel.capacity, a.time);
    before = after;
  }
  note_causality(plan.sent_at(horizon) - before, horizon);

  for (std::size_t i = 1; i < plan.segments.size(); ++i) {
    const double r0 = plan.segments[i - 1].rate;
    const double r1 = plan.segments[i].rate;
    if (r0 == r1) continue;
    const double tau = plan.segments[i].start;
    bool at_arrival = false;
    double arrived_before = 0.0, arrived_after = 0.0;
    for (const auto& a : tunnel.arrivals) {
      if (a.time < tau - time_tol) {
        arrived_before += a.bytes;
      } else if (std::abs(a.time - tau) <= time_tol) {
        at_arrival = true;
        arrived_after = arrived_before + a.bytes;
      }
    }
    if (!at_arrival) arrived_after = arrived_before;
    if (!at_arrival) d.constant_between_arrivals = false;
    const double sent = plan.sent_at(tau);
    const bool empty = arrived_before - sent <= occ_tol;
    const bool full = arrived_after - sent >= tunnel.capacity - occ_tol;
    if (!empty && !full) d.changes_at_bounds = false;
    if (r1 > r0 && !empty) d.increases_only_when_empty = false;
    if (r1 < r0 && !full) d.decreases_only_when_full = false;
  }

  if (plan.anchor == AnchorMode::Lazy) {
    DataArrivalTrace trace{tunnel.arrivals, horizon};
    const double tp = compute_t_p(trace, tunnel.capacity, plan);
    bool zero = true;
    for (const auto& s : plan.segments) {
      const double overlap = s.end - std::max(s.start, tp);
      if (overlap > time_tol && s.rate * overlap > occ_tol) zero = false;
    }
    d.zero_after_t_p = zero;
  }
  return d;
}

PowerProfile make_power_profile(std::vector<PowerSegment> segments) {
  PowerProfile profile;
  std::vector<CurvePoint> points;
  double energy = 0.0;
  for (const auto& s : segments) {
    if (!(s.power >= 0.0) || !(s.end > s.start)) {
      throw Error(ErrorCode::ConfigInvalid, "power segments need positive length and power >= 0");
    }
    if (points.empty()) {
      points.push_back({s.start, 0.0});
    } else if (s.start != points.back().time) {
      throw Error(ErrorCode::ConfigInvalid, "power segments must be contiguous");
    }
    energy += s.power * (s.end - s.start);
    points.push_back({s.end, energy});
  }
  profile.segments = std::move(segments);
  profile.energy = CumulativeCurve(std::move(points), Interpolation::PiecewiseLinear);
  return profile;
}

PowerProfile plan_to_power(const RatePlan& plan, const ChannelModel& channel) {
  std::vector<PowerSegment> segments;
  segments.reserve(plan.segments.size());
  for (const auto& s : plan.segments) {
    segments.push_back({s.start, s.end, channel.power_for_rate(s.rate * kBitsPerByte)});
  }
  return make_power_profile(std::move(segments));
}

}  // namespace dter
