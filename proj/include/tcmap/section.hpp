#pragma once

#include <array>
#include <limits>
#include <string>

namespace tcmap {

enum class Chart { original, k1, k2, k3 };

const char* to_string(Chart c);

// Closed interval whose endpoints may depend affinely on the point's own
// step coordinate (the K2 exit windows scale with h2). Constant intervals
// have zero h-coefficients.
struct Interval {
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  double lo = -kInf;
  double hi = kInf;
  double lo_h = 0;
  double hi_h = 0;

  static Interval all() { return {}; }
  static Interval fixed(double v) { return {v, v, 0, 0}; }
  static Interval between(double a, double b) { return {a, b, 0, 0}; }
  static Interval at_least(double a) { return {a, kInf, 0, 0}; }

  double lo_at(double hstep) const { return lo + lo_h * hstep; }
  double hi_at(double hstep) const { return hi + hi_h * hstep; }
};

// Axis-aligned region in one chart (or in original coordinates): one
// interval per coordinate, some degenerate, some unbounded. Coordinate
// order matches the chart's natural tuple; index 3 is always the step
// coordinate used to evaluate h-affine interval bounds.
struct SectionSet {
  Chart chart = Chart::original;
  std::string name;
  std::array<Interval, 4> bounds{};
  double tol = 1e-14;

  bool contains(const std::array<double, 4>& q) const;
  // Euclidean distance of the coordinates to the box (free coordinates
  // contribute zero).
  double distance(const std::array<double, 4>& q) const;
};

}  // namespace tcmap
