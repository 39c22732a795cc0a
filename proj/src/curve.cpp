#include "dter/curve.hpp"

#include <algorithm>

#include "dter/error.hpp"

namespace dter {

CumulativeCurve::CumulativeCurve(std::vector<CurvePoint> points, Interpolation interpolation)
    : points_(std::move(points)), interpolation_(interpolation) {
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].time > points_[i - 1].time)) {
      throw Error(ErrorCode::ConfigInvalid, "curve breakpoint times must be strictly increasing");
    }
    if (points_[i].value < points_[i - 1].value) {
      throw Error(ErrorCode::ConfigInvalid, "cumulative curve values must be non-decreasing");
    }
  }
}

CumulativeCurve CumulativeCurve::zero(double horizon) {
  if (horizon <= 0.0) return CumulativeCurve({{0.0, 0.0}}, Interpolation::PiecewiseLinear);
  return CumulativeCurve({{0.0, 0.0}, {horizon, 0.0}}, Interpolation::PiecewiseLinear);
}

CumulativeCurve CumulativeCurve::linear(double slope, double horizon) {
  return CumulativeCurve({{0.0, 0.0}, {horizon, slope * horizon}}, Interpolation::PiecewiseLinear);
}

double CumulativeCurve::value_at(double t) const {
  if (points_.empty()) return 0.0;
  // First breakpoint strictly after t.
  auto it = std::upper_bound(points_.begin(), points_.end(), t,
                             [](double lhs, const CurvePoint& p) { return lhs < p.time; });
  if (interpolation_ == Interpolation::Staircase) {
    if (it == points_.begin()) return 0.0;
    return std::prev(it)->value;
  }
  if (it == points_.begin()) return points_.front().value;
  if (it == points_.end()) return points_.back().value;
  const CurvePoint& a = *std::prev(it);
  const CurvePoint& b = *it;
  const double w = (t - a.time) / (b.time - a.time);
  return a.value + w * (b.value - a.value);
}

double CumulativeCurve::value_before(double t) const {
  if (interpolation_ == Interpolation::PiecewiseLinear) return value_at(t);
  auto it = std::lower_bound(points_.begin(), points_.end(), t,
                             [](const CurvePoint& p, double rhs) { return p.time < rhs; });
  if (it == points_.begin()) return 0.0;
  return std::prev(it)->value;
}

}  // namespace dter
