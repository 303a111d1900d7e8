#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace tcmap {

// Point in the original 4D phase space. eps and h ride along as state
// components because the map leaves them untouched.
struct State {
  double x = 0;
  double y = 0;
  double eps = 0;
  double h = 0;

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(eps) &&
           std::isfinite(h);
  }
};

enum class BranchId {
  S_a_minus,
  S_a_plus,
  S_r_minus,
  S_r_plus,
  off_manifold,
  origin,
};

const char* to_string(BranchId id);

struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct divergence_error : std::runtime_error {
  std::size_t step;
  explicit divergence_error(std::size_t at)
      : std::runtime_error("trajectory diverged at step " + std::to_string(at)),
        step(at) {}
};

struct chart_domain_error : std::domain_error {
  std::string coordinate;
  chart_domain_error(const std::string& coord, const std::string& what)
      : std::domain_error(what + " (offending coordinate: " + coord + ")"),
        coordinate(coord) {}
};

struct invariant_breach : std::runtime_error {
  std::size_t step;
  invariant_breach(const std::string& what, std::size_t at)
      : std::runtime_error(what + " at step " + std::to_string(at)), step(at) {}
};

struct cap_reached_error : std::runtime_error {
  cap_reached_error(std::size_t cap)
      : std::runtime_error("iteration cap reached (" + std::to_string(cap) +
                           " steps) without a bracketed hit") {}
};

struct step_underflow_error : std::runtime_error {
  step_underflow_error(double dt)
      : std::runtime_error("adaptive step size underflow (dt = " +
                           std::to_string(dt) + ")") {}
};

// Problem constants. nu and gamma are derived; eps and c get standard
// defaults (eps = rho^2*delta/4 so that chart entry happens at the quarter
// ceiling, c = nu/2) when left negative.
struct Params {
  double lambda = 0.5;
  double rho = 1.0;
  double delta = 0.1;
  double h = 0.01;
  double eps = -1;
  double c = -1;

  double nu() const { return rho * h; }
  double gamma() const {
    return 2 * std::abs(lambda - 1) + std::abs(lambda);
  }

  static Params make(double lambda, double rho, double delta, double h,
                     double eps = -1, double c = -1);

  // Throws validation_error on violation of the parameter hypotheses:
  //   0 < h*rho^3 < eps,  nu < delta,  nu < 1/8,  |lambda*delta| <= 1,
  //   0 < c < nu.  lambda == 1 is rejected unless allow_canard is set.
  void validate(bool allow_canard = false) const;
};

}  // namespace tcmap
