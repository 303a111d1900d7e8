// Serial vs OpenMP timing for the sample-parallel kernels.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "tcmap/experiments.hpp"
#include "tcmap/parallel.hpp"

using namespace tcmap;
using hclock = std::chrono::steady_clock;

namespace {

double ms_since(hclock::time_point t0) {
  return std::chrono::duration<double, std::milli>(hclock::now() - t0).count();
}

double bench_conjugacy(std::size_t n, par::Mode mode) {
  Params p = Params::make(0.5, 1.0, 0.1, 0.01);
  std::vector<double> errs(n);
  auto t0 = hclock::now();
  par::for_index(n, mode, [&](std::size_t i) {
    std::mt19937_64 g(par::mix_seed(7, i));
    std::uniform_real_distribution<double> u(0, 1);
    K1Point q{0.5 + 0.5 * u(g), -1.5 + 3 * u(g), 0.2 * u(g),
              0.005 + 0.005 * u(g)};
    State a = blow_down(step_k1(q, p));
    State b = euler_step(blow_down(q), p);
    errs[i] = std::abs(a.x - b.x) + std::abs(a.y - b.y);
  });
  double dt = ms_since(t0);
  double acc = 0;
  for (double e : errs) acc += e;
  if (acc > 1) std::printf("unexpected\n");
  return dt;
}

double bench_passages(std::size_t n, par::Mode mode) {
  Params p = Params::make(2.0, 1.0, 0.05, 0.01);
  SectionCatalog cat = build_sections(p);
  std::vector<std::size_t> steps(n);
  auto t0 = hclock::now();
  par::for_index(n, mode, [&](std::size_t i) {
    std::mt19937_64 g(par::mix_seed(11, i));
    std::uniform_real_distribution<double> u(0, 1);
    const auto& b = cat.sigma2_in.bounds;
    K2Point q{b[0].lo + (b[0].hi - b[0].lo) * u(g),
              b[1].lo + (b[1].hi - b[1].lo) * u(g),
              b[2].lo + (b[2].hi - b[2].lo) * u(g),
              b[3].lo + (b[3].hi - b[3].lo) * u(g)};
    steps[i] = pi_2(q, p, cat, K2Regime::exit).steps;
  });
  double dt = ms_since(t0);
  std::size_t total = 0;
  for (auto s : steps) total += s;
  if (total == 0) std::printf("unexpected\n");
  return dt;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", par::max_threads());
  std::printf("%-28s %10s %10s %8s\n", "kernel", "serial ms", "openmp ms",
              "speedup");
  {
    double s = bench_conjugacy(2'000'000, par::Mode::serial);
    double o = bench_conjugacy(2'000'000, par::Mode::openmp);
    std::printf("%-28s %10.1f %10.1f %8.2f\n", "conjugacy sampling (2M)", s, o,
                s / o);
  }
  {
    double s = bench_passages(4096, par::Mode::serial);
    double o = bench_passages(4096, par::Mode::openmp);
    std::printf("%-28s %10.1f %10.1f %8.2f\n", "scaling-chart passages (4k)",
                s, o, s / o);
  }
  return 0;
}
