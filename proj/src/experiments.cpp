#include "tcmap/experiments.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <random>
#include <sstream>

#include "tcmap/csv.hpp"
#include "tcmap/manifolds.hpp"

namespace tcmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

double state_diff(const State& a, const State& b) {
  return std::max({norm_diff(a.x, b.x), norm_diff(a.y, b.y),
                   norm_diff(a.eps, b.eps), norm_diff(a.h, b.h)});
}

}  // namespace

std::int64_t ulp_distance(double a, double b) {
  if (a == b) return 0;
  if (!std::isfinite(a) || !std::isfinite(b))
    return std::numeric_limits<std::int64_t>::max();
  auto key = [](double x) {
    std::int64_t i;
    std::memcpy(&i, &x, sizeof(i));
    return i < 0 ? static_cast<std::int64_t>(0x8000000000000000ull) - i : i;
  };
  std::int64_t d = key(a) - key(b);
  return d < 0 ? -d : d;
}

std::uint64_t hash64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

FitResult linear_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw validation_error("fits need matching coordinates, at least two");
  int n = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  FitResult f;
  f.n_points = n;
  double det = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double ssr = 0, sst = 0, mean = sy / n;
  for (int i = 0; i < n; ++i) {
    double p = f.slope * xs[i] + f.intercept;
    ssr += (ys[i] - p) * (ys[i] - p);
    sst += (ys[i] - mean) * (ys[i] - mean);
  }
  f.r_squared = sst > 0 ? 1 - ssr / sst : 1.0;
  return f;
}

FitResult scaling_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw validation_error("scaling fits need >= 3 matching points");
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0) || !(ys[i] > 0))
      throw validation_error("scaling fits need positive data");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  return linear_fit(lx, ly);
}

ConvergenceResult convergence_study(const Params& base, const State& s0,
                                    std::span<const double> h_grid, double T,
                                    double ref_tol) {
  ConvergenceResult res;
  for (double h : h_grid) {
    Params p = base;
    p.h = h;
    p.validate(p.lambda == 1);
    auto n = static_cast<std::size_t>(std::llround(T / h));
    double t_act = static_cast<double>(n) * h;
    State cur{s0.x, s0.y, base.eps, h};
    for (std::size_t k = 0; k < n; ++k) cur = euler_step(cur, p);
    State ref = reference_flow({s0.x, s0.y, base.eps, h}, p, t_act, ref_tol);
    res.points.push_back({h, std::max(std::abs(cur.x - ref.x),
                                      std::abs(cur.y - ref.y))});
  }
  bool fittable = res.points.size() >= 3;
  for (auto& pt : res.points) fittable &= pt.error > 0;
  if (fittable) {
    std::vector<double> hs, es;
    for (auto& pt : res.points) {
      hs.push_back(pt.h);
      es.push_back(pt.error);
    }
    res.fit = scaling_fit(hs, es);
  }
  return res;
}

namespace {

ComposeResult compose_impl(double y1_entry, const Params& p,
                           const SectionCatalog& cat, Caps caps,
                           bool attracting) {
  p.validate();
  double eps_entry = p.rho * p.rho * p.delta / 4;
  if (std::abs(p.eps - eps_entry) > 1e-12 * eps_entry)
    throw validation_error(
        "chart-composed maps need eps = rho^2*delta/4 so the descent enters "
        "at the quarter ceiling");
  if (attracting && !(p.lambda < 1))
    throw validation_error("the attracting composition requires lambda < 1");
  if (!attracting && !(p.lambda > 1))
    throw validation_error("the escaping composition requires lambda > 1");

  K1Point p0{p.rho, y1_entry, p.delta / 4, p.nu()};
  PassageReport leg1 = pi_1_minus(p0, p, cat, caps);
  if (leg1.status != PassageStatus::ok)
    throw std::runtime_error(std::string("descent leg failed: ") +
                             to_string(leg1.status));
  K2Point q2 = k12(std::get<K1Point>(leg1.exit));
  PassageReport leg2 =
      pi_2(q2, p, cat, attracting ? K2Regime::attracting : K2Regime::exit,
           caps);
  ComposeResult res;
  res.handoff_entered = leg2.status == PassageStatus::ok;
  if (leg2.status != PassageStatus::ok &&
      leg2.status != PassageStatus::missed_exit)
    throw std::runtime_error(std::string("scaling leg failed: ") +
                             to_string(leg2.status));
  K2Point handoff = std::get<K2Point>(leg2.exit);

  State chart_exit;
  std::size_t steps3 = 0;
  if (attracting) {
    PassageReport leg3 = pi_1_plus(k21(handoff), p, cat, caps);
    if (leg3.status != PassageStatus::ok)
      throw std::runtime_error(std::string("ascent leg failed: ") +
                               to_string(leg3.status));
    chart_exit = blow_down(std::get<K1Point>(leg3.exit));
    steps3 = leg3.steps;
  } else {
    PassageReport leg3 = pi_3(k23(handoff), p, cat, caps);
    if (leg3.status != PassageStatus::ok)
      throw std::runtime_error(std::string("escape leg failed: ") +
                               to_string(leg3.status));
    chart_exit = blow_down(std::get<K3Point>(leg3.exit));
    steps3 = leg3.steps;
  }
  res.y_chart = chart_exit.y;
  res.steps_chart = leg1.steps + leg2.steps + steps3;

  double y0 = blow_down(p0).y;
  PiResult direct = attracting ? pi_a(y0, p, caps) : pi_e(y0, p, caps);
  res.y_direct = direct.exit.y;
  res.exit_direct = direct.exit;
  res.steps_direct = direct.hit_index;
  res.rel_diff =
      std::abs(res.y_direct - res.y_chart) / std::max(1.0, std::abs(res.y_direct));
  return res;
}

}  // namespace

ComposeResult compose_pi_a(double y1_entry, const Params& p,
                           const SectionCatalog& cat, Caps caps) {
  return compose_impl(y1_entry, p, cat, caps, true);
}

ComposeResult compose_pi_e(double y1_entry, const Params& p,
                           const SectionCatalog& cat, Caps caps) {
  return compose_impl(y1_entry, p, cat, caps, false);
}

bool ClaimReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const ClaimRow& r) { return r.pass; });
}

std::string ClaimReport::render_csv() const {
  std::string out = csv::schema_row();
  out += "claim,params,measured,threshold,comparator,pass,note\n";
  for (const auto& r : rows) {
    std::vector<std::string> cells = {r.claim,
                                      r.params,
                                      csv::format_double(r.measured),
                                      csv::format_double(r.threshold),
                                      r.comparator,
                                      r.pass ? "1" : "0",
                                      r.note};
    out += csv::join_row(cells);
  }
  return out;
}

std::string ClaimReport::render_text() const {
  std::ostringstream s;
  int fails = 0;
  for (const auto& r : rows) {
    s << (r.pass ? "[PASS] " : "[FAIL] ") << r.claim;
    for (std::size_t k = r.claim.size(); k < 38; ++k) s << ' ';
    s << " measured " << csv::format_double(r.measured) << ' ' << r.comparator
      << ' ' << csv::format_double(r.threshold);
    if (!r.params.empty()) s << "  [" << r.params << "]";
    if (!r.note.empty()) s << "  -- " << r.note;
    s << '\n';
    if (!r.pass) ++fails;
  }
  s << rows.size() - fails << "/" << rows.size() << " claims pass\n";
  return s.str();
}

// ---------------------------------------------------------------------------
// claim suite
// ---------------------------------------------------------------------------

namespace {

struct Ctx {
  const SuiteConfig& cfg;
  ClaimReport& rep;

  void add(const std::string& claim, const std::string& params,
           double measured, double threshold, const std::string& cmp,
           bool pass, const std::string& note = "") {
    rep.rows.push_back({claim, params, measured, threshold, cmp, pass, note});
  }
  void add_le(const std::string& claim, const std::string& params,
              double measured, double threshold, const std::string& note = "") {
    add(claim, params, measured, threshold, "<=", measured <= threshold, note);
  }
  void add_ge(const std::string& claim, const std::string& params,
              double measured, double threshold, const std::string& note = "") {
    add(claim, params, measured, threshold, ">=", measured >= threshold, note);
  }
  void add_band(const std::string& claim, const std::string& params,
                double measured, double lo, double hi,
                const std::string& note = "") {
    add(claim, params, measured, (lo + hi) / 2, "in-band",
        measured >= lo && measured <= hi,
        note.empty() ? "band [" + csv::format_double(lo) + ", " +
                           csv::format_double(hi) + "]"
                     : note + "; band [" + csv::format_double(lo) + ", " +
                           csv::format_double(hi) + "]");
  }
};

std::string param_tag(const Params& p) {
  return "lambda=" + csv::format_double(p.lambda) +
         " delta=" + csv::format_double(p.delta) +
         " nu=" + csv::format_double(p.nu());
}

double uni(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * std::uniform_real_distribution<double>(0, 1)(g);
}

const double kLambdas[3] = {-0.5, 0.5, 2.0};

// --- conjugacy of the chart steps with the original map --------------------

void check_conjugacy(Ctx& c) {
  const std::size_t n = c.cfg.conjugacy_samples;
  for (Chart chart : {Chart::k1, Chart::k2, Chart::k3}) {
    std::vector<double> errs(n);
    par::for_index(n, c.cfg.mode, [&](std::size_t i) {
      std::mt19937_64 g(par::mix_seed(c.cfg.seed ^ 0x11, i));
      Params p = Params::make(kLambdas[i % 3], 1.0, 0.1, 0.01);
      State a, b;
      if (chart == Chart::k1) {
        K1Point q{uni(g, 0.5, 1.0), uni(g, -1.5, 1.5), uni(g, 1e-4, 0.2),
                  uni(g, 0.005, 0.01)};
        a = blow_down(step_k1(q, p));
        b = euler_step(blow_down(q), p);
      } else if (chart == Chart::k2) {
        K2Point q{uni(g, -4, 4), uni(g, -4, 4), uni(g, 0.16, 0.32),
                  uni(g, 0.0016, 0.0032)};
        a = blow_down(step_k2(q, p));
        b = euler_step(blow_down(q), p);
      } else {
        K3Point q{uni(g, 0.5, 1.0), uni(g, -1.5, 1.5), uni(g, 1e-4, 0.1),
                  uni(g, 0.005, 0.01)};
        a = blow_down(step_k3(q, p));
        b = euler_step(blow_down(q), p);
      }
      errs[i] = state_diff(a, b);
    });
    double worst = *std::max_element(errs.begin(), errs.end());
    c.add_le(std::string("conjugacy_") + to_string(chart),
             std::to_string(n) + " samples", worst, 1e-12);
  }
}

// --- chart-change round trips ----------------------------------------------

void check_roundtrips(Ctx& c) {
  const std::size_t n = c.cfg.roundtrip_samples;
  auto run = [&](const std::string& name, auto&& trip) {
    std::vector<std::int64_t> worst(n);
    par::for_index(n, c.cfg.mode, [&](std::size_t i) {
      std::mt19937_64 g(par::mix_seed(c.cfg.seed ^ 0x22, i));
      worst[i] = trip(g);
    });
    double w = static_cast<double>(*std::max_element(worst.begin(), worst.end()));
    c.add_le(name, std::to_string(n) + " samples", w, 2, "ulp per component");
  };
  run("roundtrip_k21_of_k12", [](std::mt19937_64& g) {
    K1Point p{uni(g, 1e-3, 1.0), uni(g, -2, 2),
              std::pow(10.0, uni(g, -6, -0.7)), uni(g, 1e-4, 1e-2)};
    K1Point q = k21(k12(p));
    return std::max({ulp_distance(p.r1, q.r1), ulp_distance(p.y1, q.y1),
                     ulp_distance(p.eps1, q.eps1), ulp_distance(p.h1, q.h1)});
  });
  run("roundtrip_k12_of_k21", [](std::mt19937_64& g) {
    K2Point p{-std::pow(10.0, uni(g, -0.5, 2)), uni(g, -10, 10),
              uni(g, 1e-3, 0.4), uni(g, 1e-4, 4e-3)};
    K2Point q = k12(k21(p));
    return std::max({ulp_distance(p.x2, q.x2), ulp_distance(p.y2, q.y2),
                     ulp_distance(p.r2, q.r2), ulp_distance(p.h2, q.h2)});
  });
  run("roundtrip_k23_of_k32", [](std::mt19937_64& g) {
    K3Point p{uni(g, 1e-3, 1.0), uni(g, -2, 2),
              std::pow(10.0, uni(g, -6, -0.7)), uni(g, 1e-4, 1e-2)};
    K3Point q = k23(k32(p));
    return std::max({ulp_distance(p.r3, q.r3), ulp_distance(p.y3, q.y3),
                     ulp_distance(p.eps3, q.eps3), ulp_distance(p.h3, q.h3)});
  });
  run("roundtrip_k32_of_k23", [](std::mt19937_64& g) {
    K2Point p{std::pow(10.0, uni(g, -0.5, 2)), uni(g, -10, 10),
              uni(g, 1e-3, 0.4), uni(g, 1e-4, 4e-3)};
    K2Point q = k32(k23(p));
    return std::max({ulp_distance(p.x2, q.x2), ulp_distance(p.y2, q.y2),
                     ulp_distance(p.r2, q.r2), ulp_distance(p.h2, q.h2)});
  });
}

// --- conserved products along chart trajectories ---------------------------

void check_products(Ctx& c) {
  Params p = Params::make(0.5, 1.0, 0.1, 0.01);
  {
    K1Point q{1.0, -0.9, 0.005, 0.005};
    double p0 = q.eps1 * q.r1 * q.h1, worst = 0;
    for (std::size_t k = 0; k < c.cfg.product_steps; ++k) {
      q = step_k1(q, p);
      worst = std::max(worst, std::abs(q.eps1 * q.r1 * q.h1 - p0) / p0);
    }
    c.add_le("invariant_product_k1",
             std::to_string(c.cfg.product_steps) + " steps", worst, 1e-12);
  }
  {
    K3Point q{0.3, -0.9, 0.02, 0.003};
    double p0 = q.eps3 * q.r3 * q.h3, worst = 0;
    for (std::size_t k = 0; k < c.cfg.product_steps; ++k) {
      q = step_k3(q, p);
      worst = std::max(worst, std::abs(q.eps3 * q.r3 * q.h3 - p0) / p0);
    }
    c.add_le("invariant_product_k3",
             std::to_string(c.cfg.product_steps) + " steps", worst, 1e-12);
  }
  {
    K2Point q{-3.0, -3.0, 0.15, 0.002};
    std::int64_t worst = 0;
    double r0 = q.r2, h0 = q.h2;
    for (std::size_t k = 0; k < c.cfg.product_steps; ++k) {
      q = step_k2(q, p);
      worst = std::max({worst, ulp_distance(q.r2, r0), ulp_distance(q.h2, h0)});
    }
    c.add_le("k2_constants_bitwise",
             std::to_string(c.cfg.product_steps) + " steps",
             static_cast<double>(worst), 0, "ulp drift of r2, h2");
  }
}

// --- invariance-residual order ---------------------------------------------

void check_residual_order(Ctx& c) {
  Params p = Params::make(0.5, 1.0, 0.1, 0.005);
  for (bool plus : {false, true}) {
    GraphCoeffs g = plus ? GraphCoeffs::plus_branch(p.lambda)
                         : GraphCoeffs::minus_branch(p.lambda);
    const char* tag = plus ? "plus" : "minus";
    {
      std::vector<double> es, rs;
      for (int i = 0; i < 9; ++i) {
        double e = 0.01 * std::pow(10.0, i / 8.0);
        es.push_back(e);
        rs.push_back(std::abs(invariance_residual_k1(g, e, 1e-3, p)));
      }
      FitResult f = scaling_fit(es, rs);
      c.add_band(std::string("residual_slope_eps_") + tag, param_tag(p),
                 f.slope, 2 - 0.15, 2 + 0.15);
    }
    {
      std::vector<double> hs, rs;
      for (int i = 0; i < 9; ++i) {
        double h = 1e-4 * std::pow(10.0, i / 8.0);
        hs.push_back(h);
        rs.push_back(std::abs(invariance_residual_k1(g, 0.03, h, p)));
      }
      FitResult f = scaling_fit(hs, rs);
      c.add_band(std::string("residual_slope_h_") + tag, param_tag(p), f.slope,
                 1 - 0.15, 1 + 0.15);
    }
  }
}

// --- closed-form spectra vs finite differences -----------------------------

void check_eigenvalues(Ctx& c) {
  Params p = Params::make(0.5, 1.0, 0.1, 0.01);
  auto fd_eigs = [&](const Map4& map, const std::array<double, 4>& at) {
    auto J = numeric_jacobian(map, at);
    Eigen::Matrix4d M;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) M(i, j) = J[i][j];
    Eigen::EigenSolver<Eigen::Matrix4d> es(M);
    std::vector<std::complex<double>> out(4);
    for (int i = 0; i < 4; ++i) out[i] = es.eigenvalues()[i];
    return out;
  };
  // repeated closed-form eigenvalues are matched through the mean of the
  // nearest finite-difference cluster (the neutral directions are defective,
  // so individual perturbed eigenvalues split like the square root of the
  // finite-difference noise)
  auto match = [&](const std::vector<std::pair<double, std::string>>& closed,
                   std::vector<std::complex<double>> fd) {
    double worst = 0;
    std::vector<double> values;
    for (auto& [v, axis] : closed) values.push_back(v);
    std::sort(values.begin(), values.end());
    std::size_t i = 0;
    while (i < values.size()) {
      std::size_t j = i;
      while (j < values.size() && values[j] == values[i]) ++j;
      std::size_t m = j - i;
      std::sort(fd.begin(), fd.end(),
                [&](const std::complex<double>& a,
                    const std::complex<double>& b) {
                  return std::abs(a - values[i]) < std::abs(b - values[i]);
                });
      std::complex<double> mean = 0;
      for (std::size_t k = 0; k < m; ++k) mean += fd[k];
      mean /= static_cast<double>(m);
      worst = std::max(worst, std::abs(mean - values[i]) /
                                  std::max(1.0, std::abs(values[i])));
      fd.erase(fd.begin(), fd.begin() + m);
      i = j;
    }
    return worst;
  };

  double worst1 = 0, worst3 = 0, res_closed = 0, res_fd = kInf;
  for (double h : {0.01, 0.05, 0.1}) {
    for (const EigenData& ed : fixed_points_k1(h)) {
      auto eig = fd_eigs(
          [&](const std::array<double, 4>& a) {
            K1Point q{a[0], a[1], a[2], a[3]};
            K1Point s = step_k1(q, p);
            return std::array<double, 4>{s.r1, s.y1, s.eps1, s.h1};
          },
          ed.location);
      worst1 = std::max(worst1, match(ed.eigenvalues, eig));
    }
    for (const EigenData& ed : fixed_points_k3(h)) {
      auto eig = fd_eigs(
          [&](const std::array<double, 4>& a) {
            K3Point q{a[0], a[1], a[2], a[3]};
            K3Point s = step_k3(q, p);
            return std::array<double, 4>{s.r3, s.y3, s.eps3, s.h3};
          },
          ed.location);
      worst3 = std::max(worst3, match(ed.eigenvalues, eig));
      if (ed.name == "w_out") {
        // the exit-line spectrum carries the product resonance
        double l1 = ed.eigenvalues[0].first, l2 = ed.eigenvalues[1].first,
               l3 = ed.eigenvalues[2].first;
        res_closed = std::max(res_closed, std::abs(l1 * l3 - l2) / l2);
        std::vector<std::complex<double>> s = eig;
        std::sort(s.begin(), s.end(), [](auto a, auto b) {
          return a.real() < b.real();
        });
        res_fd = std::min(res_fd,
                          std::abs(s[0] * s[2] - s[1]) / std::abs(s[1]));
      }
    }
  }
  c.add_le("eigen_entrance_chart", "h in {0.01,0.05,0.1}", worst1, 1e-6);
  c.add_le("eigen_exit_chart", "h in {0.01,0.05,0.1}", worst3, 1e-6);
  c.add_le("eigen_resonance_closed_form", "", res_closed, 1e-14,
           "lambda1*lambda3 = lambda2 on the exit line");
  c.add_le("eigen_resonance_fd", "", res_fd, 1e-6);
}

// --- transition-time lower bound --------------------------------------------

void check_transition_times(Ctx& c) {
  double min_margin = kInf;
  bool all_ok = true;
  std::string worst_tag;
  for (double lambda : kLambdas) {
    for (double delta : {0.05, 0.1}) {
      for (double nu_ : {0.005, 0.01}) {
        Params p = Params::make(lambda, 1.0, delta, nu_);
        SectionCatalog cat = build_sections(p, c.cfg.omega);
        double lo = cat.r1.bounds[1].lo, hi = cat.r1.bounds[1].hi;
        for (int s = 0; s < 5; ++s) {
          double y1 = lo + (hi - lo) * s / 4;
          PassageReport rep =
              pi_1_minus({p.rho, y1, p.delta / 4, p.nu()}, p, cat);
          all_ok &= rep.status == PassageStatus::ok && rep.f_positive &&
                    rep.monotone;
          double margin = static_cast<double>(rep.steps) / rep.bound;
          if (margin < min_margin) {
            min_margin = margin;
            worst_tag = param_tag(p);
          }
        }
      }
    }
  }
  c.add("transition_time_bound", worst_tag, min_margin, 1.0, ">=",
        all_ok && min_margin >= 1.0,
        "min over 60 descents of steps/(1/(17*gamma*nu*delta))");
}

// --- scaling-chart passages and diagonal-side lemmas ------------------------

struct K2Cell {
  double delta, nu;
};

K2Point sample_sigma2_in(std::mt19937_64& g, const Params& p,
                         const SectionCatalog& cat) {
  const auto& b = cat.sigma2_in.bounds;
  double r2 = uni(g, b[2].lo, b[2].hi);
  double h2 = uni(g, b[3].lo, b[3].hi);
  double x2 = uni(g, b[0].lo, b[0].hi);
  double y2 = uni(g, b[1].lo, b[1].hi);
  return {x2, y2, r2, h2};
}

void check_k2_passages(Ctx& c) {
  const K2Cell cells[4] = {{0.05, 0.005}, {0.05, 0.01}, {0.1, 0.005},
                           {0.1, 0.01}};
  const std::size_t m = c.cfg.k2_samples_per_cell;
  for (double lambda : kLambdas) {
    bool attracting = lambda < 1;
    std::size_t total = 4 * m;
    std::vector<int> entered(total, 0), lemma_ok(total, 0);
    std::vector<int> entered_wide(total, 0);
    std::vector<double> miss(total, 0);
    par::for_index(total, c.cfg.mode, [&](std::size_t i) {
      const K2Cell& cell = cells[i / m];
      Params p = Params::make(lambda, 1.0, cell.delta, cell.nu);
      SectionCatalog cat = build_sections(p, c.cfg.omega);
      // exit window with the top coefficient at 1.5x and the abscissa slab
      // widened by the tracking-lag factor; diagnostic only
      SectionCatalog wide = cat;
      {
        double isd = 1 / std::sqrt(p.delta);
        double cdelta = (1 + p.lambda) * p.delta;
        wide.sigma2a_out.bounds[0].lo_h = -(1 + cdelta) / 2;
        wide.sigma2a_out.bounds[0].hi_h = (1 + cdelta) / 2;
        wide.sigma2a_out.bounds[1].hi =
            isd * (1 + 1.5 * cat.betas.beta2_plus);
      }
      std::mt19937_64 g(par::mix_seed(c.cfg.seed ^ 0x33, i));
      K2Point q = sample_sigma2_in(g, p, cat);
      K2Regime regime = attracting ? K2Regime::attracting : K2Regime::exit;
      PassageReport rep = pi_2(q, p, cat, regime);
      entered[i] = rep.status == PassageStatus::ok ? 1 : 0;
      miss[i] = rep.closest_distance;
      if (attracting) {
        PassageReport wrep = pi_2(q, p, wide, regime);
        entered_wide[i] = wrep.status == PassageStatus::ok ? 1 : 0;
      }
      LemmaVerdict v = measure_lemma_monotonicity(q, p, cat);
      lemma_ok[i] = v.pass() ? 1 : 0;
    });
    auto frac = [&](const std::vector<int>& v) {
      long s = 0;
      for (int x : v) s += x;
      return static_cast<double>(s) / static_cast<double>(v.size());
    };
    std::string tag = "lambda=" + csv::format_double(lambda) + " " +
                      std::to_string(total) + " starts";
    if (attracting) {
      double worst_miss = *std::max_element(miss.begin(), miss.end());
      c.add_ge("k2_passage_attracting_exact", tag, frac(entered), 1.0,
               "paper-exact window; settled crossings overshoot its top by "
               "about (1+lambda)*delta^(3/2)/2 in y2 (closest approach " +
                   csv::format_double(worst_miss) + ")");
      c.add_ge("k2_passage_attracting_widened", tag, frac(entered_wide), 1.0,
               "diagnostic: same passages against the 1.5x top window");
      c.add_ge(lambda > 0 ? "k2_lemma_diagonal_unit_interval"
                          : "k2_lemma_diagonal_nonpositive",
               tag, frac(lemma_ok), 1.0);
    } else {
      c.add_ge("k2_passage_exit_exact", tag, frac(entered), 1.0);
      c.add_ge("k2_lemma_diagonal_exit", tag, frac(lemma_ok), 1.0);
    }
  }
}

// --- exit-height scaling -----------------------------------------------------

void check_exit_height(Ctx& c) {
  std::vector<double> eps_grid, heights;
  for (int i = 0; i < 8; ++i) {
    double eps = 0.01 * std::pow(10.0, i / 7.0);
    Params p = Params::make(2.0, 1.0, 4 * eps, eps / 2, eps);
    double y1 = l_minus(p.delta / 4, p.nu(), p.lambda);
    PiResult r = pi_e(p.rho * y1, p);
    eps_grid.push_back(eps);
    heights.push_back(r.y_at_section);
  }
  FitResult f = scaling_fit(eps_grid, heights);
  c.add_band("exit_height_exponent", "lambda=2, eps decade [0.01,0.1], h=eps/2",
             f.slope, calibration::kExitExponentLo,
             calibration::kExitExponentHi,
             "same exponent governs the exit-chart height in delta");
  c.add_ge("exit_height_fit_r2", "", f.r_squared, 0.98);
}

// --- contraction of the entrance-chart passages ------------------------------

void check_contraction(Ctx& c) {
  const double nu_ = 0.01;
  const double deltas[5] = {0.18, 0.22, 0.27, 0.33, 0.40};
  std::vector<double> inv_nd, lograte;
  double worst_desc = 0, worst_asc = 0;
  bool ok = true;
  for (double delta : deltas) {
    Params p = Params::make(0.5, 1.0, delta, nu_);
    SectionCatalog cat = build_sections(p, c.cfg.omega);
    ContractionResult d =
        contraction_sweep(cat.r1, p, cat, c.cfg.contraction_samples);
    ContractionResult a =
        contraction_sweep(cat.r2, p, cat, c.cfg.contraction_samples);
    ok &= d.all_ok && a.all_ok;
    worst_desc = std::max(worst_desc, d.width_out_raw / d.width_in);
    worst_asc = std::max(worst_asc, a.width_out_raw / a.width_in);
    inv_nd.push_back(1 / (nu_ * delta));
    lograte.push_back(std::log(d.rate));
  }
  c.add("contraction_descent_width", "lambda=0.5 nu=0.01 delta-sweep",
        worst_desc, 1.0, "<", ok && worst_desc < 1.0,
        "max image/input y-width over the grid");
  c.add("contraction_ascent_width", "lambda=0.5 nu=0.01 delta-sweep",
        worst_asc, 1.0, "<", ok && worst_asc < 1.0);
  FitResult f = linear_fit(inv_nd, lograte);
  c.add("contraction_affine_slope", "log rate vs 1/(nu*delta)", f.slope, 0,
        "<", f.slope < 0);
  c.add_ge("contraction_affine_r2", "", f.r_squared, 0.95);
}

// --- closeness of the global maps to their target segments -------------------

void check_closeness(Ctx& c) {
  auto run = [&](double lambda, const char* name) {
    std::vector<double> ratio;
    for (double delta : {0.05, 0.075, 0.1}) {
      for (double nu_ : {0.005, 0.0075, 0.01}) {
        Params p = Params::make(lambda, 1.0, delta, nu_);
        double denom = lambda < 1 ? p.h * p.eps
                                  : p.h * (p.eps + p.rho * p.rho);
        SectionSet din = section_delta(DeltaKind::in, p);
        double w = din.bounds[1].hi - din.bounds[1].lo;
        double worst = 0;
        for (int s = 0; s < 8; ++s) {
          double y0 = din.bounds[1].lo + w * (s + 0.5) / 8;
          PiResult r = lambda < 1 ? pi_a(y0, p) : pi_e(y0, p);
          worst = std::max(worst, r.distance / denom);
        }
        ratio.push_back(worst);
      }
    }
    double k_cal = 0, k_val = 0;
    for (std::size_t i = 0; i < ratio.size(); ++i)
      (i % 2 == 0 ? k_cal : k_val) = std::max(i % 2 == 0 ? k_cal : k_val,
                                              ratio[i]);
    double spread = std::abs(k_cal - k_val) / std::max(k_cal, k_val);
    c.add_le(name, "3x3 (delta,nu) grid split even/odd", spread, 0.25,
             "fitted K = " + csv::format_double(std::max(k_cal, k_val)));
  };
  run(0.5, "closeness_attracting_K_stable");
  run(2.0, "closeness_exit_K_stable");
}

// --- Euler order against the reference flow ---------------------------------

void check_euler_order(Ctx& c) {
  {
    Params base = Params::make(0.5, 1.0, 0.05, 1e-3);
    const double grid[5] = {1e-4, 1.78e-4, 3.16e-4, 5.62e-4, 1e-3};
    ConvergenceResult r =
        convergence_study(base, {-1.0, -1.05, base.eps, 0}, grid, 24.0);
    c.add_band("euler_order_slope", "lambda=0.5 h decade [1e-4,1e-3]",
               r.fit.slope, 0.9, 1.1);
    double ratio = r.points[0].error > 0
                       ? r.points.back().error / r.points[0].error /
                             (grid[4] / grid[0])
                       : 0;
    c.add_band("euler_order_decade_ratio", "error growth across the decade",
               ratio, 0.85, 1.15, "error ratio / h ratio");
  }
  {
    // canard configuration: the diagonal is a shared exact solution; staged
    // in powers of two so the Euler sums stay exact
    Params p = Params::make(1.0, 1.0, 0.25, 0.0009765625 /* 2^-10 */,
                            0.015625 /* 2^-6 */);
    State s0{0.25, 0.25, p.eps, p.h};
    std::size_t n = 256;  // T = 1/4
    State cur = s0;
    std::int64_t worst_ulp = 0;
    for (std::size_t k = 0; k < n; ++k) {
      cur = euler_step(cur, p);
      worst_ulp = std::max(worst_ulp, ulp_distance(cur.x, cur.y));
    }
    State ref = reference_flow(s0, p, 0.25, 1e-12);
    double err = std::max(std::abs(cur.x - ref.x), std::abs(cur.y - ref.y));
    c.add_le("canard_diagonal_error", "lambda=1, T=1/4, h=2^-10", err,
             4 * std::numeric_limits<double>::epsilon(),
             "Euler vs reference on the diagonal");
    c.add_le("canard_diagonal_bitwise", "", static_cast<double>(worst_ulp), 0,
             "x stays bitwise equal to y along the iteration");
  }
}

// --- section containments ----------------------------------------------------

void check_containments(Ctx& c) {
  std::size_t viol_a = 0, total_a = 0;
  for (double lambda : kLambdas) {
    for (double delta : {0.05, 0.1}) {
      for (double nu_ : {0.005, 0.01}) {
        Params p = Params::make(lambda, 1.0, delta, nu_);
        SectionCatalog cat = build_sections(p, c.cfg.omega);
        double lo = cat.r1.bounds[1].lo, hi = cat.r1.bounds[1].hi;
        const int m = 850;
        std::vector<int> bad(m, 0);
        par::for_index(m, c.cfg.mode, [&](std::size_t s) {
          double y1 = lo + (hi - lo) * static_cast<double>(s) / (m - 1);
          PassageReport rep =
              pi_1_minus({p.rho, y1, p.delta / 4, p.nu()}, p, cat);
          if (rep.status != PassageStatus::ok) {
            bad[s] = 1;
            return;
          }
          K2Point q = k12(std::get<K1Point>(rep.exit));
          bad[s] = cat.sigma2_in.contains(q.coords()) ? 0 : 1;
        });
        for (int b : bad) viol_a += b;
        total_a += m;
      }
    }
  }
  c.add_le("containment_descent_image_in_sigma2in",
           std::to_string(total_a) + " descents", static_cast<double>(viol_a),
           0, "k12 of the descent image lies in the scaling entry window");

  // set-level containments, sampled over the defining boxes
  std::size_t viol_b = 0, viol_c_eps = 0, viol_c_full = 0, total = 0;
  double max_r3_excess = 0;
  for (double lambda : kLambdas) {
    Params p = Params::make(lambda, 1.0, 0.1, 0.01);
    SectionCatalog cat = build_sections(p, c.cfg.omega);
    std::mt19937_64 g(c.cfg.seed ^ 0x44);
    for (int s = 0; s < 4000; ++s, ++total) {
      {
        const auto& b = cat.sigma2a_out.bounds;
        double h2 = uni(g, b[3].lo, b[3].hi);
        double r2 = uni(g, b[2].lo, b[2].hi);
        K2Point q{uni(g, b[0].lo_at(h2), b[0].hi_at(h2)),
                  uni(g, b[1].lo, b[1].hi), r2, h2};
        if (!cat.r2.contains(k21(q).coords())) ++viol_b;
      }
      {
        const auto& b = cat.sigma2e_out.bounds;
        double h2 = uni(g, b[3].lo, b[3].hi);
        double r2 = uni(g, b[2].lo, b[2].hi);
        K2Point q{uni(g, b[0].lo_at(h2), b[0].hi_at(h2)),
                  uni(g, b[1].lo, b[1].hi), r2, h2};
        K3Point t = k23(q);
        const auto& eb = cat.sigma3_in.bounds[2];
        if (!(t.eps3 >= eb.lo - 1e-14 && t.eps3 <= eb.hi + 1e-14))
          ++viol_c_eps;
        if (!cat.sigma3_in.contains(t.coords())) {
          ++viol_c_full;
          max_r3_excess = std::max(max_r3_excess, t.r3 - p.rho);
        }
      }
    }
  }
  c.add_le("containment_sigma2a_image_in_r2", std::to_string(total) + " samples",
           static_cast<double>(viol_b), 0);
  c.add_le("containment_sigma2e_eps3_window",
           std::to_string(total) + " samples",
           static_cast<double>(viol_c_eps), 0,
           "eps3 of the mapped exit window stays inside the entry slab");
  c.add_le("containment_sigma2e_full_membership",
           std::to_string(total) + " samples",
           static_cast<double>(viol_c_full), 0,
           "corner samples with r2 at the top of its box land at r3 up to " +
               csv::format_double(max_r3_excess) +
               " above rho, outside the exit-chart domain box");
}

}  // namespace

ClaimReport run_check_group(const SuiteConfig& cfg, std::string_view group) {
  ClaimReport rep;
  Ctx ctx{cfg, rep};
  if (group == "conjugacy") check_conjugacy(ctx);
  else if (group == "roundtrips") check_roundtrips(ctx);
  else if (group == "products") check_products(ctx);
  else if (group == "residual") check_residual_order(ctx);
  else if (group == "eigen") check_eigenvalues(ctx);
  else if (group == "transition") check_transition_times(ctx);
  else if (group == "k2") check_k2_passages(ctx);
  else if (group == "exit_height") check_exit_height(ctx);
  else if (group == "contraction") check_contraction(ctx);
  else if (group == "closeness") check_closeness(ctx);
  else if (group == "euler") check_euler_order(ctx);
  else if (group == "containments") check_containments(ctx);
  else throw validation_error("unknown check group: " + std::string(group));
  return rep;
}

ClaimReport run_claim_suite(const SuiteConfig& cfg) {
  ClaimReport rep;
  Ctx ctx{cfg, rep};
  if (cfg.skip_theorem_rows) {
    rep.rows.push_back({"theorem_suite", "lambda=" +
                            csv::format_double(cfg.lambda_canard),
                        0, 0, "skipped", true,
                        "skipped: canard configuration (lambda = 1) is "
                        "outside the theorem regime"});
    check_euler_order(ctx);
    // keep only the canard rows of the order check
    std::vector<ClaimRow> keep;
    for (auto& r : rep.rows)
      if (r.claim.rfind("euler_order", 0) != 0) keep.push_back(r);
    rep.rows = std::move(keep);
    return rep;
  }
  check_conjugacy(ctx);
  check_roundtrips(ctx);
  check_products(ctx);
  check_residual_order(ctx);
  check_eigenvalues(ctx);
  check_transition_times(ctx);
  check_k2_passages(ctx);
  check_exit_height(ctx);
  check_contraction(ctx);
  check_closeness(ctx);
  check_euler_order(ctx);
  check_containments(ctx);
  return rep;
}

const char* to_string(SweepSpec::Axis a) {
  switch (a) {
    case SweepSpec::Axis::eps: return "eps";
    case SweepSpec::Axis::h: return "h";
    case SweepSpec::Axis::delta: return "delta";
    case SweepSpec::Axis::nu: return "nu";
    case SweepSpec::Axis::lambda: return "lambda";
  }
  return "?";
}

}  // namespace tcmap
