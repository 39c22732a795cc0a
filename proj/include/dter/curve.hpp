#pragma once

#include <span>
#include <vector>

namespace dter {

enum class Interpolation { PiecewiseLinear, Staircase };

struct CurvePoint {
  double time;
  double value;
};

/// Non-decreasing cumulative quantity over time (energy in joules or data in
/// bytes).
///
/// PiecewiseLinear curves interpolate linearly between breakpoints and hold
/// the end values outside them. Staircase curves are right-continuous: the
/// value jumps to points[i].value at points[i].time and is 0 before the first
/// breakpoint. value_before() gives the left limit, which is what "sum over
/// events strictly earlier than t" means.
class CumulativeCurve {
 public:
  CumulativeCurve() = default;
  CumulativeCurve(std::vector<CurvePoint> points, Interpolation interpolation);

  static CumulativeCurve zero(double horizon);
  static CumulativeCurve linear(double slope, double horizon);

  double value_at(double t) const;
  double value_before(double t) const;

  std::span<const CurvePoint> points() const { return points_; }
  Interpolation interpolation() const { return interpolation_; }
  bool empty() const { return points_.empty(); }

 private:
  std::vector<CurvePoint> points_;
  Interpolation interpolation_ = Interpolation::PiecewiseLinear;
};

}  // namespace dter
