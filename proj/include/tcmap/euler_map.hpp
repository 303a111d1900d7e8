#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tcmap/section.hpp"
#include "tcmap/state.hpp"

namespace tcmap {

// One explicit Euler step of the planar fast-slow normal form:
//   x <- x + h*(x^2 - y^2 + lambda*eps),  y <- y + eps*h.
// eps and h are copied through unchanged. Throws divergence_error if the
// result is not finite.
State euler_step(const State& s, const Params& p);

enum class StopReason { count_reached, section_hit, diverged, cap_reached };

struct Hit {
  std::size_t index = 0;
  double distance = 0;
};

struct Trajectory {
  std::vector<State> states;
  long start_index = 0;
  std::optional<Hit> hit;
  StopReason stop = StopReason::count_reached;
  std::optional<std::size_t> divergence_step;
};

struct Caps {
  std::size_t max_steps = 0;  // 0 = derive a default from the params
  std::size_t patience = 8;   // non-improving steps before a hit is declared

  static std::size_t default_original(const Params& p);
  static std::size_t default_chart(const Params& p);
  std::size_t original_cap(const Params& p) const {
    return max_steps ? max_steps : default_original(p);
  }
  std::size_t chart_cap(const Params& p) const {
    return max_steps ? max_steps : default_chart(p);
  }
};

// Iterates the map from s0 for up to n steps, recording every state. With a
// stop section the trajectory ends at the distance-argmin hit (first strict
// local minimum that survives `patience` non-improving steps, global
// minimum as fallback at the cap; ties resolved to the smallest index).
Trajectory iterate(const State& s0, const Params& p, std::size_t n,
                   const SectionSet* stop = nullptr, Caps caps = {});

// Sign-pattern classification against the critical set |x| = |y|.
// Negative tol selects the default 1e-12 * max(|x|,|y|,1).
BranchId classify_branch(const State& s, double tol = -1);

enum class DeltaKind { in, a_out, e_out };

// Entry/exit segments in original coordinates. half_width < 0 selects the
// default: rho*delta/4 for `in` and `a_out`; for `e_out` the window is
// rho*omega_exit*delta^(1/3), wide enough to contain the exit height.
SectionSet section_delta(DeltaKind kind, const Params& p,
                         double half_width = -1);

struct PiResult {
  State exit;
  std::size_t hit_index = 0;
  double distance = 0;       // distance of the hit to the target section
  double y_at_section = 0;   // y interpolated onto the section abscissa
  std::size_t steps_total = 0;
};

// Global transition maps: iterate from (-rho, y0) to the distance-argmin
// against the target segment. pi_a requires lambda < 1, pi_e lambda > 1.
PiResult pi_a(double y0, const Params& p, Caps caps = {},
              double half_width = -1);
PiResult pi_e(double y0, const Params& p, Caps caps = {},
              double half_width = -1);

// High-accuracy solution of x' = x^2 - y^2 + lambda*eps, y' = eps at fast
// time T, for use as the h->0 oracle. Embedded adaptive Dormand-Prince 5(4)
// with absolute/relative tolerance `tol`; throws step_underflow_error if
// the controller collapses.
State reference_flow(const State& s0, const Params& p, double T,
                     double tol = 1e-12);

}  // namespace tcmap
