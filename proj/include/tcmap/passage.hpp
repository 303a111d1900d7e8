#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tcmap/calibration.hpp"
#include "tcmap/charts.hpp"
#include "tcmap/euler_map.hpp"
#include "tcmap/section.hpp"
#include "tcmap/state.hpp"

namespace tcmap {

// Window half-widths of the entry/exit boxes around the branch points.
struct BetaSet {
  double beta1, beta1_hat;
  double beta2, beta2_hat;
  double beta2_plus, beta2_plus_hat;
  double beta1_plus, beta1_plus_hat;

  static BetaSet from(const Params& p);
};

// The eleven named sections. sigma1p_in derives its windows from the
// interval image of sigma2a_out under the chart change, widened by 10%.
struct SectionCatalog {
  BetaSet betas;
  double omega = calibration::kOmegaExit;
  SectionSet sigma1m_in, sigma1m_out, r1;
  SectionSet sigma1p_in, sigma1p_out, r2;
  SectionSet sigma2_in, sigma2a_out, sigma2e_out;
  SectionSet sigma3_in, sigma3_out;
};

SectionCatalog build_sections(const Params& p,
                              double omega = calibration::kOmegaExit);

enum class PassageStatus { ok, missed_exit, cap_reached, invariant_breach, diverged };

const char* to_string(PassageStatus s);

struct PassageReport {
  ChartPoint entry;
  ChartPoint exit;
  std::size_t steps = 0;
  double bound = 0;  // transition-count lower bound, where one applies
  double width_in = 0, width_out = 0;
  PassageStatus status = PassageStatus::ok;
  bool f_positive = true;   // F kept its sign along the passage
  bool monotone = true;     // radial/eps/step monotonicity held pointwise
  double closest_distance = 0;
  std::size_t closest_index = 0;
  // y-coordinate interpolated onto the target section's abscissa; the raw
  // exit carries the step-quantization of the hit, this does not.
  double exit_y_section = 0;

  std::string csv_row() const;
  static std::string csv_header();
};

// Entrance-chart descent: first entry into sigma1m_out from a point of R1.
// eps1 must increase and r1, h1 decrease pointwise; the report carries the
// transition-count lower bound 1/(17*gamma*nu*delta).
PassageReport pi_1_minus(const K1Point& p0, const Params& params,
                         const SectionCatalog& cat, Caps caps = {});

// Entrance-chart ascent for the attracting return: distance argmin against
// sigma1p_out from a point of R2.
PassageReport pi_1_plus(const K1Point& p0, const Params& params,
                        const SectionCatalog& cat, Caps caps = {});

enum class K2Regime { attracting, exit };

// Scaling-chart crossing: first entry into the regime's exit window.
// Missing the window within the cap is a reportable outcome, not an error.
PassageReport pi_2(const K2Point& p0, const Params& params,
                   const SectionCatalog& cat, K2Regime regime, Caps caps = {});

// Exit-chart escape: distance argmin against sigma3_out; F3 must stay
// positive and eps3 strictly decrease along the way.
PassageReport pi_3(const K3Point& p0, const Params& params,
                   const SectionCatalog& cat, Caps caps = {});

// Pointwise diagonal-side bookkeeping for a scaling-chart trajectory.
struct LemmaVerdict {
  // which clause applied: 'a' (0<lambda<1), 'b' (lambda<=0), 'c' (lambda>1)
  char clause = '?';
  bool x_increasing_in_third_quadrant = true;
  bool side_absorbed = true;      // once on the stated side, stayed there
  bool crossing_witness_ok = true; // witness index satisfying the time bound
  std::size_t crossing_index = 0;
  std::size_t violation_index = 0;
  std::size_t steps_checked = 0;

  bool pass() const {
    return x_increasing_in_third_quadrant && side_absorbed &&
           crossing_witness_ok;
  }
};

LemmaVerdict measure_lemma_monotonicity(const K2Point& p0, const Params& params,
                                        const SectionCatalog& cat,
                                        Caps caps = {});

struct ContractionResult {
  double width_in = 0;
  double width_out = 0;      // section-interpolated image width
  double width_out_raw = 0;  // spread of the raw hit points
  double rate = 0;           // width_out / width_in (NaN when width_in = 0)
  int n_samples = 0;
  bool all_ok = true;
};

// Evenly samples the y1-interval of R1 (descent) or R2 (ascent) and pushes
// every sample through the corresponding passage map.
ContractionResult contraction_sweep(const SectionSet& section,
                                    const Params& params,
                                    const SectionCatalog& cat, int n_samples,
                                    Caps caps = {});

}  // namespace tcmap
