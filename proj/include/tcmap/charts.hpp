#pragma once

#include <array>
#include <variant>

#include "tcmap/section.hpp"
#include "tcmap/state.hpp"

namespace tcmap {

// Entrance chart: x = -r1, y = r1*y1, eps = r1^2*eps1, h = h1/r1.
struct K1Point {
  double r1, y1, eps1, h1;
  std::array<double, 4> coords() const { return {r1, y1, eps1, h1}; }
};

// Scaling chart: x = r2*x2, y = r2*y2, eps = r2^2, h = h2/r2.
struct K2Point {
  double x2, y2, r2, h2;
  std::array<double, 4> coords() const { return {x2, y2, r2, h2}; }
};

// Exit chart: x = r3, y = r3*y3, eps = r3^2*eps3, h = h3/r3.
struct K3Point {
  double r3, y3, eps3, h3;
  std::array<double, 4> coords() const { return {r3, y3, eps3, h3}; }
};

using ChartPoint = std::variant<K1Point, K2Point, K3Point>;

State blow_down(const K1Point& p);
State blow_down(const K2Point& p);
State blow_down(const K3Point& p);
State blow_down(const ChartPoint& p);

K1Point lift_to_k1(const State& s);  // requires x < 0, h > 0
K2Point lift_to_k2(const State& s);  // requires eps > 0, h > 0
K3Point lift_to_k3(const State& s);  // requires x > 0, h > 0

// Chart changes, evaluated in extended precision so the round trips
// k21(k12(.)) and k23(k32(.)) reproduce their inputs to a couple of ulp.
K2Point k12(const K1Point& p);  // requires eps1 > 0
K1Point k21(const K2Point& p);  // requires x2 < 0
K2Point k32(const K3Point& p);  // requires eps3 > 0
K3Point k23(const K2Point& p);  // requires x2 > 0

double f1(double y1, double eps1, double lambda);  // 1 - y1^2 + lambda*eps1
double f3(double y3, double eps3, double lambda);

// Desingularized one-step maps. step_k1/step_k3 require the denominator
// 1 -+ h*F to stay positive and preserve eps*r*h exactly in real
// arithmetic; step_k2 keeps r2 and h2 bitwise unchanged.
K1Point step_k1(const K1Point& p, const Params& params);
K2Point step_k2(const K2Point& p, const Params& params);
K3Point step_k3(const K3Point& p, const Params& params);

// Working domains. The hatted boxes are the subdomains with the radial,
// eps and step coordinates bounded away from zero.
SectionSet domain_d1(const Params& p);
SectionSet domain_d1_hat(const Params& p);
SectionSet domain_d2(const Params& p);
SectionSet domain_d3(const Params& p);
SectionSet domain_d3_hat(const Params& p);

// Chart selection for a state: the scaling chart whenever eps > 0 and the
// point lies over D2, otherwise entrance for x < 0 and exit for x > 0.
Chart classify_chart(const State& s, const Params& p);

}  // namespace tcmap
