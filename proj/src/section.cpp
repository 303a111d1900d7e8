#include "tcmap/section.hpp"

#include <algorithm>
#include <cmath>

namespace tcmap {

const char* to_string(Chart c) {
  switch (c) {
    case Chart::original: return "original";
    case Chart::k1: return "k1";
    case Chart::k2: return "k2";
    case Chart::k3: return "k3";
  }
  return "?";
}

namespace {

double coord_tol(const Interval& iv, double lo, double hi, double tol) {
  double scale = 1.0;
  if (std::isfinite(lo)) scale = std::max(scale, std::abs(lo));
  if (std::isfinite(hi)) scale = std::max(scale, std::abs(hi));
  (void)iv;
  return tol * scale;
}

}  // namespace

bool SectionSet::contains(const std::array<double, 4>& q) const {
  double hstep = q[3];
  for (int i = 0; i < 4; ++i) {
    double lo = bounds[i].lo_at(hstep);
    double hi = bounds[i].hi_at(hstep);
    double t = coord_tol(bounds[i], lo, hi, tol);
    if (q[i] < lo - t || q[i] > hi + t) return false;
  }
  return true;
}

double SectionSet::distance(const std::array<double, 4>& q) const {
  double hstep = q[3];
  double sum = 0;
  for (int i = 0; i < 4; ++i) {
    double lo = bounds[i].lo_at(hstep);
    double hi = bounds[i].hi_at(hstep);
    double d = 0;
    if (q[i] < lo) d = lo - q[i];
    else if (q[i] > hi) d = q[i] - hi;
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace tcmap
