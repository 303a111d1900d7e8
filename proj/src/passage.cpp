#include "tcmap/passage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tcmap/csv.hpp"

namespace tcmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Interval widened(double lo, double hi, double factor) {
  double c = (lo + hi) / 2, r = (hi - lo) / 2;
  return Interval::between(c - factor * r, c + factor * r);
}

std::array<double, 4> coords_of(const ChartPoint& p) {
  return std::visit([](const auto& q) { return q.coords(); }, p);
}

}  // namespace

const char* to_string(PassageStatus s) {
  switch (s) {
    case PassageStatus::ok: return "ok";
    case PassageStatus::missed_exit: return "missed_exit";
    case PassageStatus::cap_reached: return "cap_reached";
    case PassageStatus::invariant_breach: return "invariant_breach";
    case PassageStatus::diverged: return "diverged";
  }
  return "?";
}

BetaSet BetaSet::from(const Params& p) {
  double l = p.lambda, d = p.delta;
  bool unit_interval = l > 0 && l < 1;
  BetaSet b;
  b.beta1_hat = std::abs(l - 1) * d;
  b.beta1 = unit_interval ? l * d / 16 : (2 * l - 1) * d / 16;
  b.beta2_hat = std::abs(l - 1) * d;
  b.beta2 = unit_interval ? l * d / 8 : (2 * l - 1) * d / 4;
  b.beta2_plus = std::abs(l + 1) * d / 2;
  b.beta2_plus_hat = (std::abs(l) + 1) * d / 2;
  b.beta1_plus = 3 * std::abs(l + 1) * d / 4;
  b.beta1_plus_hat = 3 * (std::abs(l) + 1) * d / 4;
  return b;
}

SectionCatalog build_sections(const Params& p, double omega) {
  SectionCatalog cat;
  cat.betas = BetaSet::from(p);
  cat.omega = omega;
  const double rho = p.rho, delta = p.delta, nu = p.nu();
  const double sqd = std::sqrt(delta);
  const double isd = 1 / sqd;

  cat.sigma1m_in.chart = Chart::k1;
  cat.sigma1m_in.name = "Sigma1m_in";
  cat.sigma1m_in.bounds = {Interval::fixed(rho), Interval::all(),
                           Interval::fixed(delta / 4), Interval::fixed(nu)};

  cat.sigma1m_out.chart = Chart::k1;
  cat.sigma1m_out.name = "Sigma1m_out";
  cat.sigma1m_out.bounds = {
      Interval::between(rho / 2, rho / 2 * (1 + nu)), Interval::all(),
      Interval::between(delta * (1 - 2 * nu), delta),
      Interval::between(nu / 2, nu / 2 * (1 + nu))};

  cat.r1 = cat.sigma1m_in;
  cat.r1.name = "R1";
  cat.r1.bounds[1] =
      Interval::between(-1 - cat.betas.beta1, -1 + cat.betas.beta1_hat);

  cat.sigma2_in.chart = Chart::k2;
  cat.sigma2_in.name = "Sigma2_in";
  cat.sigma2_in.bounds = {
      Interval::between(-std::pow(delta * (1 - 2 * nu), -0.5), -isd),
      Interval::between(isd * (-1 - cat.betas.beta2),
                        isd * (-1 + cat.betas.beta2_hat)),
      Interval::between(sqd * rho / 2, sqd * rho),
      Interval::between(sqd * nu / 2, sqd * nu)};

  cat.sigma2a_out = cat.sigma2_in;
  cat.sigma2a_out.name = "Sigma2a_out";
  cat.sigma2a_out.bounds[0] = Interval{-isd, -isd, -0.5, 0.5};  // -+ h2/2
  cat.sigma2a_out.bounds[1] =
      Interval::between(isd * (1 - cat.betas.beta2_plus_hat),
                        isd * (1 + cat.betas.beta2_plus));

  cat.sigma2e_out = cat.sigma2_in;
  cat.sigma2e_out.name = "Sigma2e_out";
  cat.sigma2e_out.bounds[0] =
      Interval{isd, isd, 0, p.lambda + 1 / delta};  // width one largest step
  cat.sigma2e_out.bounds[1] =
      Interval::between(0, omega * std::pow(delta, -1.0 / 6));

  cat.sigma3_in.chart = Chart::k3;
  cat.sigma3_in.name = "Sigma3_in";
  cat.sigma3_in.bounds = {
      Interval::between(0, rho), Interval::all(),
      Interval::between(1 / (1 / delta + 4 * nu / delta), delta),
      Interval::between(0, nu)};

  cat.sigma3_out.chart = Chart::k3;
  cat.sigma3_out.name = "Sigma3_out";
  cat.sigma3_out.bounds = {Interval::fixed(rho), Interval::at_least(0),
                           Interval::fixed(delta / 4), Interval::fixed(nu)};

  cat.sigma1p_out.chart = Chart::k1;
  cat.sigma1p_out.name = "Sigma1p_out";
  cat.sigma1p_out.bounds = {Interval::fixed(rho), Interval::at_least(0),
                            Interval::fixed(delta / 4), Interval::fixed(nu)};

  // Entry windows for the return to the entrance chart: the interval image
  // of Sigma2a_out under the chart change, widened by 10%.
  {
    double h2hi = sqd * nu, h2lo = sqd * nu / 2;
    double ax_lo = isd - h2hi / 2, ax_hi = isd + h2hi / 2;  // |x2| range
    double r2lo = sqd * rho / 2, r2hi = sqd * rho;
    cat.sigma1p_in.chart = Chart::k1;
    cat.sigma1p_in.name = "Sigma1p_in";
    cat.sigma1p_in.bounds = {
        widened(ax_lo * r2lo, ax_hi * r2hi, 1.1), Interval::all(),
        widened(1 / (ax_hi * ax_hi), 1 / (ax_lo * ax_lo), 1.1),
        widened(ax_lo * h2lo, ax_hi * h2hi, 1.1)};
  }

  cat.r2 = cat.sigma1p_in;
  cat.r2.name = "R2";
  cat.r2.bounds[1] = Interval::between(1 - cat.betas.beta1_plus_hat,
                                       1 + cat.betas.beta1_plus);
  return cat;
}

std::string PassageReport::csv_header() {
  return "chart,e0,e1,e2,e3,x0,x1,x2,x3,steps,bound,status,f_positive,"
         "monotone,closest_distance,exit_y_section";
}

std::string PassageReport::csv_row() const {
  Chart ch = std::visit(
      [](const auto& q) {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, K1Point>) return Chart::k1;
        else if constexpr (std::is_same_v<T, K2Point>) return Chart::k2;
        else return Chart::k3;
      },
      entry);
  auto e = coords_of(entry), x = coords_of(exit);
  std::vector<std::string> cells;
  cells.emplace_back(to_string(ch));
  for (double v : e) cells.push_back(csv::format_double(v));
  for (double v : x) cells.push_back(csv::format_double(v));
  cells.push_back(std::to_string(steps));
  cells.push_back(csv::format_double(bound));
  cells.emplace_back(to_string(status));
  cells.push_back(f_positive ? "1" : "0");
  cells.push_back(monotone ? "1" : "0");
  cells.push_back(csv::format_double(closest_distance));
  cells.push_back(csv::format_double(exit_y_section));
  return csv::join_row(cells);
}

PassageReport pi_1_minus(const K1Point& p0, const Params& params,
                         const SectionCatalog& cat, Caps caps) {
  if (!cat.r1.contains(p0.coords()))
    throw validation_error("descent passages start inside R1");
  PassageReport rep;
  rep.entry = p0;
  rep.exit = p0;
  rep.bound = 1 / (17 * params.gamma() * params.nu() * params.delta);
  rep.closest_distance = kInf;

  std::size_t cap = caps.chart_cap(params);
  const double eps_floor = params.delta * (1 - 2 * params.nu());
  K1Point cur = p0;
  for (std::size_t k = 1; k <= cap; ++k) {
    if (!(f1(cur.y1, cur.eps1, params.lambda) > 0)) {
      rep.f_positive = false;
      rep.status = PassageStatus::invariant_breach;
      rep.steps = k - 1;
      return rep;
    }
    K1Point next = step_k1(cur, params);
    if (!(next.eps1 > cur.eps1 && next.h1 < cur.h1 && next.r1 < cur.r1)) {
      rep.monotone = false;
      rep.status = PassageStatus::invariant_breach;
      rep.steps = k;
      return rep;
    }
    double d = cat.sigma1m_out.distance(next.coords());
    if (d < rep.closest_distance) {
      rep.closest_distance = d;
      rep.closest_index = k;
    }
    if (cat.sigma1m_out.contains(next.coords())) {
      rep.exit = next;
      rep.steps = k;
      rep.status = PassageStatus::ok;
      double t = (eps_floor - cur.eps1) / (next.eps1 - cur.eps1);
      rep.exit_y_section = cur.y1 + t * (next.y1 - cur.y1);
      return rep;
    }
    cur = next;
  }
  rep.status = PassageStatus::cap_reached;
  rep.steps = cap;
  return rep;
}

PassageReport pi_1_plus(const K1Point& p0, const Params& params,
                        const SectionCatalog& cat, Caps caps) {
  if (!cat.r2.contains(p0.coords()))
    throw validation_error("ascent passages start inside R2");
  PassageReport rep;
  rep.entry = p0;
  rep.exit = p0;
  rep.closest_distance = kInf;

  std::size_t cap = caps.chart_cap(params);
  K1Point cur = p0, best = p0;
  std::size_t best_i = 0;
  double cross_y = p0.y1;
  bool crossed = false;
  for (std::size_t k = 0; k <= cap; ++k) {
    double d = cat.sigma1p_out.distance(cur.coords());
    if (d < rep.closest_distance) {
      rep.closest_distance = d;
      best = cur;
      best_i = k;
    } else if (k >= best_i + caps.patience) {
      rep.status = PassageStatus::ok;
      break;
    }
    if (k == cap) {
      rep.status = PassageStatus::cap_reached;
      break;
    }
    K1Point next = step_k1(cur, params);
    if (!(next.eps1 < cur.eps1 && next.h1 > cur.h1 && next.r1 > cur.r1)) {
      rep.monotone = false;
      rep.status = PassageStatus::invariant_breach;
      rep.steps = k + 1;
      rep.exit = next;
      return rep;
    }
    if (!crossed && cur.r1 < params.rho && next.r1 >= params.rho) {
      double t = (params.rho - cur.r1) / (next.r1 - cur.r1);
      cross_y = cur.y1 + t * (next.y1 - cur.y1);
      crossed = true;
    }
    cur = next;
  }
  rep.exit = best;
  rep.steps = best_i;
  rep.closest_index = best_i;
  rep.exit_y_section = crossed ? cross_y : best.y1;
  return rep;
}

PassageReport pi_2(const K2Point& p0, const Params& params,
                   const SectionCatalog& cat, K2Regime regime, Caps caps) {
  if (params.lambda == 1)
    throw validation_error(
        "lambda = 1 is the canard configuration; the scaling-chart passage "
        "has no exit regime there");
  if (regime == K2Regime::attracting && !(params.lambda < 1))
    throw validation_error("the attracting regime requires lambda < 1");
  if (regime == K2Regime::exit && !(params.lambda > 1))
    throw validation_error("the escaping regime requires lambda > 1");
  if (!cat.sigma2_in.contains(p0.coords()))
    throw validation_error("scaling-chart passages start inside Sigma2_in");

  const SectionSet& target =
      regime == K2Regime::attracting ? cat.sigma2a_out : cat.sigma2e_out;
  PassageReport rep;
  rep.entry = p0;
  rep.exit = p0;
  rep.closest_distance = kInf;

  const double isd = 1 / std::sqrt(params.delta);
  const double abscissa = regime == K2Regime::attracting ? -isd : isd;
  std::size_t cap = caps.chart_cap(params);
  K2Point cur = p0;
  bool armed = false;  // entry shares the slab's x-range; arm past it first
  bool crossed = false;
  double cross_y = p0.y2;
  for (std::size_t k = 1; k <= cap; ++k) {
    K2Point next;
    try {
      next = step_k2(cur, params);
    } catch (const divergence_error&) {
      rep.status = PassageStatus::diverged;
      rep.steps = k;
      return rep;
    }
    double d = target.distance(next.coords());
    if (d < rep.closest_distance) {
      rep.closest_distance = d;
      rep.closest_index = k;
    }
    if (!crossed && (cur.x2 - abscissa) * (next.x2 - abscissa) <= 0 &&
        cur.x2 != next.x2 && (armed || regime == K2Regime::exit)) {
      double t = (abscissa - cur.x2) / (next.x2 - cur.x2);
      cross_y = cur.y2 + t * (next.y2 - cur.y2);
      crossed = true;
    }
    if (target.contains(next.coords())) {
      rep.exit = next;
      rep.steps = k;
      rep.status = PassageStatus::ok;
      rep.exit_y_section = crossed ? cross_y : next.y2;
      return rep;
    }
    if (regime == K2Regime::attracting) {
      if (next.x2 > isd) armed = true;  // far right of the slab
      double slab_lo = target.bounds[0].lo_at(next.h2);
      if (armed && next.x2 < slab_lo - 2 * next.h2) {
        rep.exit = next;
        rep.steps = k;
        rep.status = PassageStatus::missed_exit;
        rep.exit_y_section = crossed ? cross_y : next.y2;
        return rep;
      }
    } else {
      double slab_hi = target.bounds[0].hi_at(next.h2);
      if (next.x2 > slab_hi + 2 * next.h2 * (params.lambda + 1 / params.delta)) {
        rep.exit = next;
        rep.steps = k;
        rep.status = PassageStatus::missed_exit;
        rep.exit_y_section = crossed ? cross_y : next.y2;
        return rep;
      }
    }
    cur = next;
  }
  rep.status = PassageStatus::cap_reached;
  rep.steps = cap;
  return rep;
}

PassageReport pi_3(const K3Point& p0, const Params& params,
                   const SectionCatalog& cat, Caps caps) {
  if (!cat.sigma3_in.contains(p0.coords()))
    throw validation_error("exit-chart passages start inside Sigma3_in");
  PassageReport rep;
  rep.entry = p0;
  rep.exit = p0;
  rep.closest_distance = kInf;

  std::size_t cap = caps.chart_cap(params);
  K3Point cur = p0, best = p0;
  std::size_t best_i = 0;
  double cross_y = p0.y3;
  bool crossed = false;
  for (std::size_t k = 0; k <= cap; ++k) {
    double d = cat.sigma3_out.distance(cur.coords());
    if (d < rep.closest_distance) {
      rep.closest_distance = d;
      best = cur;
      best_i = k;
    } else if (k >= best_i + caps.patience) {
      rep.status = PassageStatus::ok;
      break;
    }
    if (k == cap) {
      rep.status = PassageStatus::cap_reached;
      break;
    }
    if (!(f3(cur.y3, cur.eps3, params.lambda) > 0)) {
      rep.f_positive = false;
      rep.status = PassageStatus::invariant_breach;
      rep.steps = k;
      return rep;
    }
    K3Point next = step_k3(cur, params);
    if (!(next.eps3 < cur.eps3)) {
      rep.monotone = false;
      rep.status = PassageStatus::invariant_breach;
      rep.steps = k + 1;
      return rep;
    }
    if (!crossed && cur.r3 < params.rho && next.r3 >= params.rho) {
      double t = (params.rho - cur.r3) / (next.r3 - cur.r3);
      cross_y = cur.y3 + t * (next.y3 - cur.y3);
      crossed = true;
    }
    cur = next;
  }
  rep.exit = best;
  rep.steps = best_i;
  rep.closest_index = best_i;
  rep.exit_y_section = crossed ? cross_y : best.y3;
  return rep;
}

LemmaVerdict measure_lemma_monotonicity(const K2Point& p0, const Params& params,
                                        const SectionCatalog& cat, Caps caps) {
  if (params.lambda == 1)
    throw validation_error("the diagonal-side lemmas assume lambda != 1");
  if (!cat.sigma2_in.contains(p0.coords()))
    throw validation_error("lemma checks start inside Sigma2_in");

  const double l = params.lambda;
  LemmaVerdict v;
  v.clause = l > 1 ? 'c' : (l > 0 ? 'a' : 'b');

  const double sqd = std::sqrt(params.delta);
  const double isd = 1 / sqd;
  const bool below_start = p0.y2 < p0.x2;   // beneath the diagonal
  const bool above_start = p0.x2 < p0.y2;
  bool on_side = false;  // reached the lemma's absorbing side of the diagonal
  std::size_t cap = caps.chart_cap(params);
  K2Point cur = p0;
  bool witness = false;
  for (std::size_t k = 0; k <= cap; ++k) {
    bool above = cur.x2 <= cur.y2;
    bool below = cur.y2 <= cur.x2;
    if (v.clause == 'c') {
      if (below && !on_side && k > 0) {
        on_side = true;
        v.crossing_index = k;
      }
      if (on_side && !below) {
        v.side_absorbed = false;
        v.violation_index = k;
      }
      if (!witness && below && cur.x2 < 0 && k * cur.h2 >= sqd) {
        witness = true;
        v.crossing_index = k;
      }
    } else {
      if (above && !on_side) {
        on_side = true;
        if (k > 0) v.crossing_index = k;
      }
      if (on_side && !above) {
        v.side_absorbed = false;
        v.violation_index = k;
      }
      if (v.clause == 'a' && !witness && above && cur.y2 < 0 &&
          k * cur.h2 * (1 - l) >= l * sqd / 8) {
        witness = true;
        v.crossing_index = k;
      }
    }
    v.steps_checked = k;
    if (k == cap) break;
    K2Point next = step_k2(cur, params);
    if (cur.x2 < 0 && cur.y2 < 0 && !(next.x2 > cur.x2) &&
        v.x_increasing_in_third_quadrant) {
      v.x_increasing_in_third_quadrant = false;
      v.violation_index = k + 1;
    }
    // stop once the trajectory is clearly past its exit zone
    if (l < 1 && next.x2 < -isd - 4 * next.h2 && cur.x2 > next.x2 && on_side &&
        next.y2 > 0)
      break;
    if (l > 1 && next.x2 > isd + 2 * next.h2 * (l + 1 / params.delta)) break;
    cur = next;
  }

  switch (v.clause) {
    case 'a':
      v.crossing_witness_ok = below_start ? witness : true;
      break;
    case 'b':
      // nothing to witness; the side condition must hold from the start
      v.crossing_witness_ok = true;
      break;
    case 'c':
      v.crossing_witness_ok = above_start ? witness : true;
      break;
  }
  return v;
}

ContractionResult contraction_sweep(const SectionSet& section,
                                    const Params& params,
                                    const SectionCatalog& cat, int n_samples,
                                    Caps caps) {
  if (n_samples < 2)
    throw validation_error("contraction sweeps need at least two samples");
  bool descent = section.name == "R1";
  if (!descent && section.name != "R2")
    throw validation_error("contraction sweeps run on R1 or R2");

  double lo = section.bounds[1].lo, hi = section.bounds[1].hi;
  ContractionResult res;
  res.n_samples = n_samples;
  res.width_in = hi - lo;

  std::vector<double> raw, interp;
  raw.reserve(n_samples);
  interp.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    double y1 = lo + (hi - lo) * i / (n_samples - 1);
    PassageReport rep;
    if (descent) {
      K1Point p0{params.rho, y1, params.delta / 4, params.nu()};
      rep = pi_1_minus(p0, params, cat, caps);
    } else {
      K1Point p0{params.rho / 2, y1, params.delta, params.nu() / 2};
      rep = pi_1_plus(p0, params, cat, caps);
    }
    res.all_ok &= rep.status == PassageStatus::ok;
    raw.push_back(std::get<K1Point>(rep.exit).y1);
    interp.push_back(rep.exit_y_section);
  }
  auto width = [](const std::vector<double>& v) {
    auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    return *mx - *mn;
  };
  res.width_out_raw = width(raw);
  res.width_out = width(interp);
  res.rate = res.width_out / res.width_in;  // NaN sentinel when width_in = 0
  return res;
}

}  // namespace tcmap
