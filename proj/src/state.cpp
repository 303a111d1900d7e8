#include "tcmap/state.hpp"

#include <sstream>

namespace tcmap {

const char* to_string(BranchId id) {
  switch (id) {
    case BranchId::S_a_minus: return "S_a_minus";
    case BranchId::S_a_plus: return "S_a_plus";
    case BranchId::S_r_minus: return "S_r_minus";
    case BranchId::S_r_plus: return "S_r_plus";
    case BranchId::off_manifold: return "off_manifold";
    case BranchId::origin: return "origin";
  }
  return "?";
}

Params Params::make(double lambda, double rho, double delta, double h,
                    double eps, double c) {
  Params p;
  p.lambda = lambda;
  p.rho = rho;
  p.delta = delta;
  p.h = h;
  p.eps = eps >= 0 ? eps : rho * rho * delta / 4;
  p.c = c >= 0 ? c : rho * h / 2;
  return p;
}

void Params::validate(bool allow_canard) const {
  std::ostringstream err;
  if (!(rho > 0)) err << "rho must be positive (rho = " << rho << "); ";
  if (!(h > 0)) err << "h must be positive (h = " << h << "); ";
  if (!(delta > 0)) err << "delta must be positive (delta = " << delta << "); ";
  if (!(eps > 0) || !(h * rho * rho * rho < eps))
    err << "the step-size hypothesis 0 < h*rho^3 < eps fails (h*rho^3 = "
        << h * rho * rho * rho << ", eps = " << eps << "); ";
  if (!(nu() < delta))
    err << "nu = rho*h = " << nu() << " must stay below delta = " << delta
        << "; ";
  if (!(nu() < 0.125)) err << "nu = " << nu() << " must stay below 1/8; ";
  if (!(std::abs(lambda * delta) <= 1))
    err << "|lambda*delta| = " << std::abs(lambda * delta)
        << " exceeds 1; ";
  if (!(c > 0 && c < nu()))
    err << "c = " << c << " must satisfy 0 < c < rho*h = " << nu() << "; ";
  if (lambda == 1 && !allow_canard)
    err << "lambda = 1 is the canard configuration, outside the theorem "
           "regime; ";
  std::string s = err.str();
  if (!s.empty()) throw validation_error(s);
}

}  // namespace tcmap
