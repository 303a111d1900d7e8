#include "tcmap/euler_map.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>

#include "tcmap/calibration.hpp"

namespace tcmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |x| or |y| beyond 10^3 * rho is far outside the normal-form region.
bool escaped(const State& s, const Params& p) {
  return !s.finite() || std::abs(s.x) > 1e3 * p.rho ||
         std::abs(s.y) > 1e3 * p.rho;
}

std::array<double, 4> coords(const State& s) { return {s.x, s.y, s.eps, s.h}; }

}  // namespace

State euler_step(const State& s, const Params& p) {
  // Operation order matters: (x*x - y*y) cancels exactly on the diagonal,
  // which keeps the canard solution bitwise invariant.
  State out{s.x + s.h * ((s.x * s.x - s.y * s.y) + p.lambda * s.eps),
            s.y + s.eps * s.h, s.eps, s.h};
  if (!out.finite()) throw divergence_error(0);
  return out;
}

std::size_t Caps::default_original(const Params& p) {
  return static_cast<std::size_t>(
      std::ceil(16.0 * p.rho / (p.h * p.eps)));
}

std::size_t Caps::default_chart(const Params& p) {
  return static_cast<std::size_t>(std::ceil(32.0 / (p.nu() * p.delta)));
}

Trajectory iterate(const State& s0, const Params& p, std::size_t n,
                   const SectionSet* stop, Caps caps) {
  Trajectory traj;
  std::size_t cap = caps.original_cap(p);
  std::size_t limit = std::min(n, cap);
  traj.states.reserve(std::min<std::size_t>(limit + 1, 1 << 22));
  traj.states.push_back(s0);

  double best_d = kInf;
  std::size_t best_i = 0;
  bool have_best = false;

  auto consider = [&](std::size_t i, const State& s) {
    if (!stop) return false;
    double d = stop->distance(coords(s));
    if (d < best_d) {
      best_d = d;
      best_i = i;
      have_best = true;
    }
    return have_best && i >= best_i + caps.patience;
  };

  if (consider(0, s0)) {
    traj.hit = Hit{best_i, best_d};
    traj.stop = StopReason::section_hit;
    return traj;
  }

  for (std::size_t k = 0; k < limit; ++k) {
    State next;
    try {
      next = euler_step(traj.states.back(), p);
    } catch (const divergence_error&) {
      traj.stop = StopReason::diverged;
      traj.divergence_step = k + 1;
      return traj;
    }
    if (escaped(next, p)) {
      traj.stop = StopReason::diverged;
      traj.divergence_step = k + 1;
      return traj;
    }
    traj.states.push_back(next);
    if (consider(k + 1, next)) {
      traj.states.resize(best_i + 1);
      traj.hit = Hit{best_i, best_d};
      traj.stop = StopReason::section_hit;
      return traj;
    }
  }
  if (stop && have_best) traj.hit = Hit{best_i, best_d};  // global-min fallback
  traj.stop = (limit < n) ? StopReason::cap_reached : StopReason::count_reached;
  return traj;
}

BranchId classify_branch(const State& s, double tol) {
  double t = tol >= 0
                 ? tol
                 : 1e-12 * std::max({std::abs(s.x), std::abs(s.y), 1.0});
  if (std::abs(s.x) <= t && std::abs(s.y) <= t) return BranchId::origin;
  bool same = std::abs(s.x - s.y) <= t;
  bool opposite = std::abs(s.x + s.y) <= t;
  if (same) return s.y < 0 ? BranchId::S_a_minus : BranchId::S_r_plus;
  if (opposite) return s.y > 0 ? BranchId::S_a_plus : BranchId::S_r_minus;
  return BranchId::off_manifold;
}

SectionSet section_delta(DeltaKind kind, const Params& p, double half_width) {
  double w;
  if (half_width > 0) {
    w = half_width;
  } else if (kind == DeltaKind::e_out) {
    // the exit height grows like delta^(1/3); the default window must
    // contain it
    w = p.rho * calibration::kOmegaExit * std::cbrt(p.delta);
  } else {
    w = p.rho * p.delta / 4;
  }
  SectionSet set;
  set.chart = Chart::original;
  set.bounds[2] = Interval::fixed(p.eps);
  set.bounds[3] = Interval::fixed(p.h);
  switch (kind) {
    case DeltaKind::in:
      set.name = "delta_in";
      set.bounds[0] = Interval::fixed(-p.rho);
      set.bounds[1] = Interval::between(-p.rho - w, -p.rho + w);
      break;
    case DeltaKind::a_out:
      set.name = "delta_a_out";
      set.bounds[0] = Interval::fixed(-p.rho);
      set.bounds[1] = Interval::between(p.rho - w, p.rho + w);
      break;
    case DeltaKind::e_out:
      set.name = "delta_e_out";
      set.bounds[0] = Interval::fixed(p.rho);
      set.bounds[1] = Interval::between(-w, w);
      break;
  }
  return set;
}

namespace {

PiResult pi_walk(double y0, const Params& p, const SectionSet& target,
                 double abscissa, Caps caps, const SectionSet& entry) {
  State s0{-p.rho, y0, p.eps, p.h};
  if (!entry.contains(coords(s0)))
    throw validation_error("start (" + std::to_string(-p.rho) + ", " +
                           std::to_string(y0) + ") lies outside " +
                           entry.name);

  std::size_t cap = caps.original_cap(p);
  double best_d = kInf;
  std::size_t best_i = 0;
  State best_state = s0;
  // section crossings of the abscissa, for the interpolated exit height
  std::vector<std::pair<std::size_t, double>> crossings;

  State cur = s0;
  std::size_t k = 0;
  bool confirmed = false;
  for (; k <= cap; ++k) {
    double d = target.distance(coords(cur));
    if (d < best_d) {
      best_d = d;
      best_i = k;
      best_state = cur;
    } else if (k >= best_i + caps.patience) {
      confirmed = true;
      break;
    }
    if (k == cap) break;
    State next = euler_step(cur, p);
    if (escaped(next, p)) throw divergence_error(k + 1);
    if (k > 0 && (cur.x - abscissa) * (next.x - abscissa) <= 0 &&
        cur.x != next.x) {
      double t = (abscissa - cur.x) / (next.x - cur.x);
      crossings.emplace_back(k, cur.y + t * (next.y - cur.y));
    }
    cur = next;
  }
  if (!confirmed && best_i + 1 >= k)
    throw cap_reached_error(cap);  // still improving, no bracketed minimum

  PiResult r;
  r.exit = best_state;
  r.hit_index = best_i;
  r.distance = best_d;
  r.steps_total = k;
  r.y_at_section = best_state.y;
  std::size_t gap = std::numeric_limits<std::size_t>::max();
  for (auto& [idx, yv] : crossings) {
    std::size_t g = idx > best_i ? idx - best_i : best_i - idx;
    if (g < gap) {
      gap = g;
      r.y_at_section = yv;
    }
  }
  return r;
}

}  // namespace

PiResult pi_a(double y0, const Params& p, Caps caps, double half_width) {
  p.validate();
  if (!(p.lambda < 1))
    throw validation_error("the attracting transition requires lambda < 1");
  return pi_walk(y0, p, section_delta(DeltaKind::a_out, p, half_width), -p.rho,
                 caps, section_delta(DeltaKind::in, p, half_width));
}

PiResult pi_e(double y0, const Params& p, Caps caps, double half_width) {
  p.validate();
  if (!(p.lambda > 1))
    throw validation_error("the escaping transition requires lambda > 1");
  return pi_walk(y0, p, section_delta(DeltaKind::e_out, p, half_width), p.rho,
                 caps, section_delta(DeltaKind::in, p, half_width));
}

State reference_flow(const State& s0, const Params& p, double T, double tol) {
  namespace ode = boost::numeric::odeint;
  using Arr = std::array<double, 2>;
  const double lambda = p.lambda;
  const double eps = s0.eps;
  auto rhs = [lambda, eps](const Arr& q, Arr& dq, double) {
    dq[0] = (q[0] * q[0] - q[1] * q[1]) + lambda * eps;
    dq[1] = eps;
  };
  auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<Arr>());
  Arr q{s0.x, s0.y};
  double t = 0;
  double dt = T > 0 ? std::min(T / 16, 1e-2) : T;
  if (T == 0) return s0;
  const double dt_min = std::max(std::abs(T) * 1e-15, 1e-300);
  std::size_t guard = 0;
  while (t < T && T - t > std::abs(T) * 1e-15) {
    if (t + dt > T) dt = T - t;
    auto res = stepper.try_step(rhs, q, t, dt);
    if (res == ode::fail && dt < dt_min) throw step_underflow_error(dt);
    if (++guard > 100'000'000) throw step_underflow_error(dt);
  }
  return State{q[0], q[1], s0.eps, s0.h};
}

}  // namespace tcmap
