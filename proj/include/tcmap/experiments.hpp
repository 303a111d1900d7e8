#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tcmap/parallel.hpp"
#include "tcmap/passage.hpp"
#include "tcmap/state.hpp"

namespace tcmap {

struct FitResult {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  int n_points = 0;
};

// Plain least squares on the given coordinates.
FitResult linear_fit(std::span<const double> xs, std::span<const double> ys);
// Least squares on (log xs, log ys); inputs must be positive, >= 3 points.
FitResult scaling_fit(std::span<const double> xs, std::span<const double> ys);

struct SweepSpec {
  enum class Axis { eps, h, delta, nu, lambda };
  Axis axis = Axis::delta;
  std::vector<double> grid;
  Params fixed;
  int samples_per_point = 64;
};

const char* to_string(SweepSpec::Axis a);

struct ConvergencePoint {
  double h;
  double error;
};

struct ConvergenceResult {
  std::vector<ConvergencePoint> points;
  FitResult fit;  // log error vs log h
};

// Global error of the Euler iteration against the adaptive reference at the
// fast-time horizon T (per grid value, the horizon is rounded to a whole
// number of steps and the reference integrated to exactly that time).
ConvergenceResult convergence_study(const Params& base, const State& s0,
                                    std::span<const double> h_grid, double T,
                                    double ref_tol = 1e-12);

struct ComposeResult {
  double y_direct = 0;      // exit y of the original-coordinates map
  double y_chart = 0;       // exit y of the chart-composed route
  double rel_diff = 0;      // |y_direct - y_chart| / max(1, |y_direct|)
  std::size_t steps_direct = 0;
  std::size_t steps_chart = 0;
  bool handoff_entered = true;  // scaling-chart window entered exactly
  State exit_direct;
};

// Chart-composed realizations of the global maps (descent, scaling
// crossing, ascent/escape, glued by the chart changes), compared against
// the direct original-coordinates computation of the same orbit. Requires
// eps = rho^2*delta/4 so the chart entry matches the section data. When the
// scaling exit window is missed, the handoff falls back to the closest
// approach to its abscissa and the miss is recorded.
ComposeResult compose_pi_a(double y1_entry, const Params& p,
                           const SectionCatalog& cat, Caps caps = {});
ComposeResult compose_pi_e(double y1_entry, const Params& p,
                           const SectionCatalog& cat, Caps caps = {});

struct ClaimRow {
  std::string claim;
  std::string params;
  double measured = 0;
  double threshold = 0;
  std::string comparator;  // "<=", ">=", "in-band", "=="
  bool pass = false;
  std::string note;
};

struct ClaimReport {
  std::vector<ClaimRow> rows;
  bool all_pass() const;
  std::string render_csv() const;
  std::string render_text() const;
};

struct SuiteConfig {
  par::Mode mode = par::Mode::serial;
  std::uint64_t seed = 20250810;
  double omega = calibration::kOmegaExit;
  // reduced sizes for quick runs (tests); defaults meet the stated budgets
  std::size_t conjugacy_samples = 100'000;
  std::size_t roundtrip_samples = 100'000;
  std::size_t product_steps = 1'000;
  std::size_t k2_samples_per_cell = 256;  // x 4 (delta,nu) cells per lambda
  int contraction_samples = 64;
  bool skip_theorem_rows = false;  // set for the canard configuration
  double lambda_canard = 1.0;
};

// Every verification row: conjugacies, round trips, invariant products,
// residual orders, spectra, transition times, scaling-chart passages and
// lemma verdicts, exit-height scaling, contraction, closeness bounds,
// Euler order, canard exactness, section containments.
ClaimReport run_claim_suite(const SuiteConfig& cfg = {});

// One named group of the suite, for callers that need per-group timing.
// Groups: conjugacy, roundtrips, products, residual, eigen, transition, k2,
// exit_height, contraction, closeness, euler, containments.
ClaimReport run_check_group(const SuiteConfig& cfg, std::string_view group);

// FNV-1a, for report-determinism checks.
std::uint64_t hash64(std::string_view bytes);

// Distance in representable doubles; 0 iff bit-identical.
std::int64_t ulp_distance(double a, double b);

}  // namespace tcmap
