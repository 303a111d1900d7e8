#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "tcmap/experiments.hpp"
#include "tcmap/manifolds.hpp"
#include "tcmap/passage.hpp"

using namespace tcmap;

TEST_CASE("window half-widths") {
  Params p = Params::make(0.5, 1.0, 0.1, 0.01);
  BetaSet b = BetaSet::from(p);
  CHECK(b.beta1 == doctest::Approx(0.003125));
  CHECK(b.beta1_hat == doctest::Approx(0.05));
  CHECK(b.beta2 == doctest::Approx(0.00625));
  CHECK(b.beta2_plus == doctest::Approx(0.075));
  CHECK(b.beta2_plus_hat == doctest::Approx(0.075));
  CHECK(b.beta1_plus == doctest::Approx(0.1125));

  Params p2 = Params::make(2.0, 1.0, 0.1, 0.01);
  BetaSet b2 = BetaSet::from(p2);
  CHECK(b2.beta2 == doctest::Approx(0.075));
  CHECK(b2.beta1 == doctest::Approx(3.0 * 0.1 / 16));
  CHECK(b2.beta2_hat == doctest::Approx(0.1));
}

TEST_CASE("catalog membership around the entry box") {
  Params p = Params::make(0.5, 1.0, 0.1, 0.01);
  SectionCatalog cat = build_sections(p);
  CHECK(cat.r1.contains(K1Point{1.0, -1.0, 0.025, 0.01}.coords()));
  CHECK(!cat.r1.contains(K1Point{1.0, -1.1, 0.025, 0.01}.coords()));
  CHECK(!cat.r1.contains(K1Point{0.9, -1.0, 0.025, 0.01}.coords()));
  CHECK(cat.sigma1m_in.contains(K1Point{1.0, 7.0, 0.025, 0.01}.coords()));

  // the scaling exit windows scale with the point's own step coordinate
  double isd = 1 / std::sqrt(p.delta);
  double h2 = 0.002;
  CHECK(cat.sigma2a_out.bounds[0].lo_at(h2) == doctest::Approx(-isd - 0.001));
  CHECK(cat.sigma2a_out.bounds[0].hi_at(h2) == doctest::Approx(-isd + 0.001));
  CHECK(cat.sigma2e_out.bounds[0].hi_at(h2) ==
        doctest::Approx(isd + h2 * (p.lambda + 10)));
}

TEST_CASE("descent satisfies the transition-count bound") {
  Params p = Params::make(0.5, 1.0, 0.1, 0.01);
  SectionCatalog cat = build_sections(p);
  PassageReport rep = pi_1_minus({1.0, -1.0, 0.025, 0.01}, p, cat);
  CHECK(rep.status == PassageStatus::ok);
  CHECK(rep.bound == doctest::Approx(1.0 / (17 * 1.5 * 0.01 * 0.1)));
  CHECK(rep.bound == doctest::Approx(39.2156862745));
  CHECK(rep.steps >= 40);
  CHECK(rep.f_positive);
  CHECK(rep.monotone);
  // exit landed in the slab
  CHECK(cat.sigma1m_out.contains(std::get<K1Point>(rep.exit).coords()));
}

TEST_CASE("descent stays within second order of the slow-manifold graph") {
  Params p = Params::make(0.5, 1.0, 0.1, 0.01);
  SectionCatalog cat = build_sections(p);
  double y1 = l_minus(p.delta / 4, p.nu(), p.lambda);
  PassageReport rep = pi_1_minus({1.0, y1, 0.025, 0.01}, p, cat);
  REQUIRE(rep.status == PassageStatus::ok);
  const K1Point& out = std::get<K1Point>(rep.exit);
  CHECK(std::abs(out.y1 - l_minus(out.eps1, out.h1, p.lambda)) <
        0.3 * p.delta * p.delta);
}

TEST_CASE("descent contracts the entry offsets") {
  Params p = Params::make(0.5, 1.0, 0.1, 0.01);
  SectionCatalog cat = build_sections(p);
  PassageReport a = pi_1_minus({1.0, -1.002, 0.025, 0.01}, p, cat);
  PassageReport b = pi_1_minus({1.0, -0.999, 0.025, 0.01}, p, cat);
  double in_gap = 0.003;
  double out_gap = std::abs(std::get<K1Point>(a.exit).y1 -
                            std::get<K1Point>(b.exit).y1);
  CHECK(out_gap < in_gap);
}

TEST_CASE("descent rejects starts outside the entry box") {
  Params p = Params::make(0.5, 1.0, 0.1, 0.01);
  SectionCatalog cat = build_sections(p);
  CHECK_THROWS_AS(pi_1_minus({1.0, -2.0, 0.025, 0.01}, p, cat),
                  validation_error);
}

TEST_CASE("ascent from the plus graph") {
  Params p = Params::make(0.5, 1.0, 0.1, 0.01);
  SectionCatalog cat = build_sections(p);
  double y1 = l_plus(p.delta, p.nu() / 2, p.lambda);
  PassageReport rep = pi_1_plus({0.5, y1, 0.1, 0.005}, p, cat);
  REQUIRE(rep.status == PassageStatus::ok);
  const K1Point& out = std::get<K1Point>(rep.exit);
  CHECK(std::abs(out.y1 - l_plus(out.eps1, out.h1, p.lambda)) <
        0.3 * p.delta * p.delta);
  // closest approach to the exit section is a fraction of one radial step
  CHECK(rep.closest_distance < 5e-4);
  CHECK(out.r1 == doctest::Approx(p.rho).epsilon(1e-3));
  CHECK(rep.monotone);
}

TEST_CASE("ascent from the lower entry corner crosses its transient") {
  // far below the plus graph the first steps move inward before the
  // attraction takes over; the passage must still complete
  Params p = Params::make(0.5, 1.0, 0.1, 0.01);
  SectionCatalog cat = build_sections(p);
  double y1 = 1 - cat.betas.beta1_plus_hat;
  PassageReport rep = pi_1_plus({0.5, y1, 0.1, 0.005}, p, cat);
  CHECK(rep.status == PassageStatus::ok);
  CHECK(rep.exit_y_section > 0);
}

TEST_CASE("contraction sweep over the entry boxes") {
  Params p = Params::make(0.5, 1.0, 0.2, 0.01);
  SectionCatalog cat = build_sections(p);
  ContractionResult dn = contraction_sweep(cat.r1, p, cat, 16);
  CHECK(dn.all_ok);
  CHECK(dn.width_in == doctest::Approx(cat.betas.beta1 + cat.betas.beta1_hat));
  CHECK(dn.width_out_raw < dn.width_in);
  CHECK(dn.width_out < 0.05 * dn.width_in);
  ContractionResult up = contraction_sweep(cat.r2, p, cat, 16);
  CHECK(up.all_ok);
  CHECK(up.width_out_raw < up.width_in);

  // two-endpoint sweep still contracts
  ContractionResult two = contraction_sweep(cat.r1, p, cat, 2);
  CHECK(two.width_out_raw < two.width_in);

  // degenerate input width reports the 0/0 sentinel
  SectionSet degenerate = cat.r1;
  degenerate.bounds[1] = Interval::fixed(-1.0);
  ContractionResult dg = contraction_sweep(degenerate, p, cat, 2);
  CHECK(dg.width_in == 0);
  CHECK(std::isnan(dg.rate));
}

TEST_CASE("scaling-chart passage, attracting regime: honest outcome") {
  // with the quoted window coefficients the settled crossings overshoot the
  // y2-top by about (1+lambda)*delta^(3/2)/2, so first entry never fires;
  // the counterexample report carries the closest approach
  Params p = Params::make(0.5, 1.0, 0.05, 0.01);
  SectionCatalog cat = build_sections(p);
  double isd = 1 / std::sqrt(p.delta);
  K2Point q{-isd - 0.01, -isd * (1 - p.delta / 2), std::sqrt(p.eps),
            std::sqrt(p.eps) * p.h};
  REQUIRE(cat.sigma2_in.contains(q.coords()));
  PassageReport rep = pi_2(q, p, cat, K2Regime::attracting);
  CHECK(rep.status == PassageStatus::missed_exit);
  CHECK(rep.closest_distance > 0);
  CHECK(rep.closest_distance < 6e-3);
  // at the closest approach the trajectory sits just above the window
  const K2Point& near_pt = std::get<K2Point>(rep.exit);
  CHECK(std::abs(near_pt.x2) <= near_pt.y2);

  // against a top widened by 1.5x (and the slab widened by the lag factor)
  // the same start is captured
  SectionCatalog wide = cat;
  double cdelta = (1 + p.lambda) * p.delta;
  wide.sigma2a_out.bounds[0].lo_h = -(1 + cdelta) / 2;
  wide.sigma2a_out.bounds[0].hi_h = (1 + cdelta) / 2;
  wide.sigma2a_out.bounds[1].hi = isd * (1 + 1.5 * cat.betas.beta2_plus);
  PassageReport wrep = pi_2(q, p, wide, K2Regime::attracting);
  CHECK(wrep.status == PassageStatus::ok);
  const K2Point& out = std::get<K2Point>(wrep.exit);
  CHECK(std::abs(out.x2) <= out.y2);  // final containment near the diagonal
  CHECK(wide.sigma2a_out.contains(out.coords()));
}

TEST_CASE("scaling-chart passage, escaping regime captures exactly") {
  Params p = Params::make(2.0, 1.0, 0.05, 0.01);
  SectionCatalog cat = build_sections(p);
  double isd = 1 / std::sqrt(p.delta);
  K2Point q{-isd - 0.005, -isd * (1 - 0.25 * p.delta), std::sqrt(p.eps),
            std::sqrt(p.eps) * p.h};
  REQUIRE(cat.sigma2_in.contains(q.coords()));
  PassageReport rep = pi_2(q, p, cat, K2Regime::exit);
  REQUIRE(rep.status == PassageStatus::ok);
  const K2Point& out = std::get<K2Point>(rep.exit);
  CHECK(out.y2 >= 0);
  CHECK(out.y2 < cat.omega * std::pow(p.delta, -1.0 / 6));
  CHECK(out.x2 >= isd);
}

TEST_CASE("the canard configuration is rejected and rides the diagonal") {
  Params p = Params::make(1.0, 1.0, 0.05, 0.01, -1, -1);
  SectionCatalog cat = build_sections(p);
  double isd = 1 / std::sqrt(p.delta);
  K2Point q{-isd - 0.005, -isd - 0.005, std::sqrt(p.eps),
            std::sqrt(p.eps) * p.h};
  CHECK_THROWS_AS(pi_2(q, p, cat, K2Regime::attracting), validation_error);
  // on the diagonal the orbit never meets either exit window
  K2Point c = q;
  for (int n = 0; n < 20000; ++n) {
    c = step_k2(c, p);
    REQUIRE(c.x2 == c.y2);
    REQUIRE(!cat.sigma2a_out.contains(c.coords()));
    REQUIRE(!cat.sigma2e_out.contains(c.coords()));
  }
}

TEST_CASE("diagonal-side verdicts") {
  std::mt19937_64 g(23);
  std::uniform_real_distribution<double> u(0, 1);
  auto sample = [&](const Params& p, const SectionCatalog& cat) {
    const auto& b = cat.sigma2_in.bounds;
    return K2Point{b[0].lo + (b[0].hi - b[0].lo) * u(g),
                   b[1].lo + (b[1].hi - b[1].lo) * u(g),
                   b[2].lo + (b[2].hi - b[2].lo) * u(g),
                   b[3].lo + (b[3].hi - b[3].lo) * u(g)};
  };
  {
    Params p = Params::make(-0.5, 1.0, 0.05, 0.01);
    SectionCatalog cat = build_sections(p);
    for (int i = 0; i < 50; ++i) {
      LemmaVerdict v = measure_lemma_monotonicity(sample(p, cat), p, cat);
      CHECK(v.clause == 'b');
      CHECK(v.pass());
    }
  }
  {
    Params p = Params::make(0.5, 1.0, 0.05, 0.01);
    SectionCatalog cat = build_sections(p);
    double isd = 1 / std::sqrt(p.delta);
    // strictly below the diagonal
    K2Point q{-isd - 0.001, -isd * (1 + cat.betas.beta2 * 0.9),
              std::sqrt(p.eps), std::sqrt(p.eps) * p.h};
    REQUIRE(q.y2 < q.x2);
    LemmaVerdict v = measure_lemma_monotonicity(q, p, cat);
    CHECK(v.clause == 'a');
    CHECK(v.pass());
    CHECK(v.crossing_index > 0);
  }
  {
    Params p = Params::make(2.0, 1.0, 0.05, 0.01);
    SectionCatalog cat = build_sections(p);
    double isd = 1 / std::sqrt(p.delta);
    // strictly above the diagonal
    K2Point q{-isd - 0.02, -isd * (1 - 0.5 * cat.betas.beta2_hat),
              std::sqrt(p.eps), std::sqrt(p.eps) * p.h};
    REQUIRE(q.x2 < q.y2);
    LemmaVerdict v = measure_lemma_monotonicity(q, p, cat);
    CHECK(v.clause == 'c');
    CHECK(v.pass());
    CHECK(v.crossing_index * q.h2 >= std::sqrt(p.delta));  // witness bound
  }
}

TEST_CASE("exit-chart passage bounds the height like delta^(1/3)") {
  std::vector<double> deltas = {0.05, 0.1, 0.2, 0.4}, heights;
  for (double delta : deltas) {
    Params p = Params::make(2.0, 1.0, delta, 0.01);
    SectionCatalog cat = build_sections(p);
    double isd = 1 / std::sqrt(delta);
    K2Point q{-isd - 0.001, -isd * (1 - 0.25 * delta), std::sqrt(p.eps),
              std::sqrt(p.eps) * p.h};
    PassageReport r2 = pi_2(q, p, cat, K2Regime::exit);
    REQUIRE(r2.status == PassageStatus::ok);
    K3Point entry = k23(std::get<K2Point>(r2.exit));
    CHECK(entry.y3 <= cat.omega * std::cbrt(delta));  // entry height bound
    PassageReport r3 = pi_3(entry, p, cat);
    REQUIRE(r3.status == PassageStatus::ok);
    CHECK(r3.f_positive);
    const K3Point& out = std::get<K3Point>(r3.exit);
    CHECK(out.y3 > 0);
    CHECK(out.r3 == doctest::Approx(p.rho).epsilon(2e-3));
    heights.push_back(r3.exit_y_section);
  }
  FitResult f = scaling_fit(deltas, heights);
  CHECK(f.slope > 0.25);
  CHECK(f.slope < 0.5);
}

TEST_CASE("exit-chart passage rejects entries outside its slab") {
  Params p = Params::make(2.0, 1.0, 0.05, 0.01);
  SectionCatalog cat = build_sections(p);
  CHECK_THROWS_AS(pi_3(K3Point{0.5, 0.1, 0.5, 0.005}, p, cat),
                  validation_error);
}

TEST_CASE("passage reports serialize to one csv row") {
  Params p = Params::make(0.5, 1.0, 0.1, 0.01);
  SectionCatalog cat = build_sections(p);
  PassageReport rep = pi_1_minus({1.0, -1.0, 0.025, 0.01}, p, cat);
  std::string header = PassageReport::csv_header();
  std::string row = rep.csv_row();
  CHECK(std::count(header.begin(), header.end(), ',') ==
        std::count(row.begin(), row.end(), ','));
  CHECK(row == rep.csv_row());  // deterministic
  CHECK(row.find("k1") == 0);
}
