#include "tcmap/charts.hpp"

#include <cmath>

namespace tcmap {

namespace {

void require(bool ok, const char* coord, const char* what) {
  if (!ok) throw chart_domain_error(coord, what);
}

}  // namespace

State blow_down(const K1Point& p) {
  require(p.r1 > 0, "r1", "blow-down needs a positive radius");
  return {-p.r1, p.r1 * p.y1, p.r1 * p.r1 * p.eps1, p.h1 / p.r1};
}

State blow_down(const K2Point& p) {
  require(p.r2 > 0, "r2", "blow-down needs a positive radius");
  return {p.r2 * p.x2, p.r2 * p.y2, p.r2 * p.r2, p.h2 / p.r2};
}

State blow_down(const K3Point& p) {
  require(p.r3 > 0, "r3", "blow-down needs a positive radius");
  return {p.r3, p.r3 * p.y3, p.r3 * p.r3 * p.eps3, p.h3 / p.r3};
}

State blow_down(const ChartPoint& p) {
  return std::visit([](const auto& q) { return blow_down(q); }, p);
}

K1Point lift_to_k1(const State& s) {
  require(s.x < 0, "x", "the entrance chart covers x < 0");
  require(s.h > 0, "h", "the lift needs h > 0");
  double r1 = -s.x;
  return {r1, s.y / r1, s.eps / (r1 * r1), s.h * r1};
}

K2Point lift_to_k2(const State& s) {
  require(s.eps > 0, "eps", "the scaling chart covers eps > 0");
  require(s.h > 0, "h", "the lift needs h > 0");
  double r2 = std::sqrt(s.eps);
  return {s.x / r2, s.y / r2, r2, s.h * r2};
}

K3Point lift_to_k3(const State& s) {
  require(s.x > 0, "x", "the exit chart covers x > 0");
  require(s.h > 0, "h", "the lift needs h > 0");
  double r3 = s.x;
  return {r3, s.y / r3, s.eps / (r3 * r3), s.h * r3};
}

// The chart changes run in extended precision with one rounding per
// component; the round trips then reproduce inputs to ~2 ulp.
K2Point k12(const K1Point& p) {
  require(p.eps1 > 0, "eps1", "k12 needs eps1 > 0");
  long double s = sqrtl(static_cast<long double>(p.eps1));
  return {static_cast<double>(-1.0L / s), static_cast<double>(p.y1 / s),
          static_cast<double>(s * p.r1), static_cast<double>(s * p.h1)};
}

K1Point k21(const K2Point& p) {
  require(p.x2 < 0, "x2", "k21 needs x2 < 0");
  long double x = p.x2;
  return {static_cast<double>(1.0L / (x * x)), static_cast<double>(-p.y2 / x),
          static_cast<double>(-x * p.r2), static_cast<double>(-x * p.h2)};
}

K2Point k32(const K3Point& p) {
  require(p.eps3 > 0, "eps3", "k32 needs eps3 > 0");
  long double s = sqrtl(static_cast<long double>(p.eps3));
  return {static_cast<double>(1.0L / s), static_cast<double>(p.y3 / s),
          static_cast<double>(s * p.r3), static_cast<double>(s * p.h3)};
}

K3Point k23(const K2Point& p) {
  require(p.x2 > 0, "x2", "k23 needs x2 > 0");
  long double x = p.x2;
  return {static_cast<double>(x * p.r2), static_cast<double>(p.y2 / x),
          static_cast<double>(1.0L / (x * x)), static_cast<double>(x * p.h2)};
}

double f1(double y1, double eps1, double lambda) {
  return 1 - y1 * y1 + lambda * eps1;
}

double f3(double y3, double eps3, double lambda) {
  return 1 - y3 * y3 + lambda * eps3;
}

K1Point step_k1(const K1Point& p, const Params& params) {
  double F = f1(p.y1, p.eps1, params.lambda);
  double d = 1 - p.h1 * F;
  require(d > 0, "h1",
          "1 - h1*F1 must stay positive inside the entrance-chart domain");
  return {p.r1 * d, (p.y1 + p.eps1 * p.h1) / d, p.eps1 / (d * d), p.h1 * d};
}

K2Point step_k2(const K2Point& p, const Params& params) {
  K2Point out{p.x2 + p.h2 * ((p.x2 * p.x2 - p.y2 * p.y2) + params.lambda),
              p.y2 + p.h2, p.r2, p.h2};
  if (!std::isfinite(out.x2) || !std::isfinite(out.y2) ||
      (p.r2 > 0 && std::abs(out.x2) > 1e3 * params.rho / p.r2))
    throw divergence_error(0);
  return out;
}

K3Point step_k3(const K3Point& p, const Params& params) {
  double F = f3(p.y3, p.eps3, params.lambda);
  double d = 1 + p.h3 * F;
  require(d > 0, "h3",
          "1 + h3*F3 must stay positive inside the exit-chart domain");
  return {p.r3 * d, (p.y3 + p.eps3 * p.h3) / d, p.eps3 / (d * d), p.h3 * d};
}

SectionSet domain_d1(const Params& p) {
  SectionSet s;
  s.chart = Chart::k1;
  s.name = "D1";
  s.bounds[0] = Interval::between(0, p.rho);
  s.bounds[1] = Interval::all();
  s.bounds[2] = Interval::between(0, 2 * p.delta);
  s.bounds[3] = Interval::between(0, p.nu());
  return s;
}

SectionSet domain_d1_hat(const Params& p) {
  SectionSet s;
  s.chart = Chart::k1;
  s.name = "D1_hat";
  s.bounds[0] = Interval::between(p.rho / 2, p.rho);
  s.bounds[1] = Interval::all();
  s.bounds[2] = Interval::between(p.delta / 4, p.delta);
  s.bounds[3] = Interval::between(p.nu() / 2, p.nu());
  return s;
}

SectionSet domain_d2(const Params& p) {
  SectionSet s;
  s.chart = Chart::k2;
  s.name = "D2";
  double sd = std::sqrt(p.delta);
  s.bounds[0] = Interval::all();
  s.bounds[1] = Interval::all();
  s.bounds[2] = Interval::between(sd * p.rho / 2, sd * p.rho);
  s.bounds[3] = Interval::between(sd * p.nu() / 2, sd * p.nu());
  return s;
}

SectionSet domain_d3(const Params& p) {
  SectionSet s;
  s.chart = Chart::k3;
  s.name = "D3";
  s.bounds[0] = Interval::between(0, p.rho);
  s.bounds[1] = Interval::all();
  s.bounds[2] = Interval::between(0, p.delta);
  s.bounds[3] = Interval::between(0, p.nu());
  return s;
}

SectionSet domain_d3_hat(const Params& p) {
  SectionSet s;
  s.chart = Chart::k3;
  s.name = "D3_hat";
  s.bounds[0] = Interval::between(p.rho / 2, p.rho);
  s.bounds[1] = Interval::all();
  s.bounds[2] = Interval::between(p.delta / 4, p.delta);
  s.bounds[3] = Interval::between(p.nu() / 2, p.nu());
  return s;
}

Chart classify_chart(const State& s, const Params& p) {
  if (s.eps > 0 && s.h > 0) {
    K2Point q = lift_to_k2(s);
    if (domain_d2(p).contains(q.coords())) return Chart::k2;
  }
  if (s.x < 0) return Chart::k1;
  if (s.x > 0) return Chart::k3;
  return Chart::k2;
}

}  // namespace tcmap
