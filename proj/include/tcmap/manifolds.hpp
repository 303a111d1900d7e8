#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tcmap/charts.hpp"
#include "tcmap/state.hpp"

namespace tcmap {

// First-order slow-manifold graphs in the entrance chart.
double l_minus(double eps1, double h1, double lambda);  // -1 + (1-lambda)/2*eps1
double l_plus(double eps1, double h1, double lambda);   //  1 + (1+lambda)/2*eps1

struct GraphCoeffs {
  double order0;
  double order1;
  // declared truncation order: residual = O(eps1^residual_order_eps * h1)
  int residual_order_eps = 2;
  int residual_order_h = 1;

  static GraphCoeffs minus_branch(double lambda) {
    return {-1.0, (1.0 - lambda) / 2};
  }
  static GraphCoeffs plus_branch(double lambda) {
    return {1.0, (1.0 + lambda) / 2};
  }
  double eval(double eps1) const { return order0 + order1 * eps1; }
};

// Defect of the truncated graph in the one-step invariance equation of the
// entrance chart: l(eps1~, h1~) - (l(eps1,h1) + eps1*h1) / (1 - h1*F1).
double invariance_residual_k1(const GraphCoeffs& graph, double eps1, double h1,
                              const Params& params);

// Tightens the graph value at (eps1, h1) by shooting forward along the
// attracted direction from an upstream point seeded with the expansion,
// then interpolating back onto eps1.
double refine_graph_k1(const GraphCoeffs& graph, double eps1, double h1,
                       const Params& params, double upstream_factor = 4.0);

struct L3Node {
  double eps3;
  double h3;
  double y3;
  double residual;
};

// Tabulated invariant graph y3 = l3(eps3, h3) in the exit chart, built by
// forward iteration from y3 = 0 at the ceiling of the requested grid. Each
// requested eps3 is realized at the nearest orbit node (within one step),
// so the tabulated values satisfy the invariance equation by construction;
// the residual column re-evaluates it from the stored row. Throws if an
// orbit fails to reach its node within `budget` steps.
std::vector<L3Node> solve_l3(std::span<const double> eps3_grid, double h3,
                             const Params& params, double tol = 1e-10,
                             std::size_t budget = 2'000'000);

struct EigenData {
  std::string name;
  std::array<double, 4> location;  // chart coordinates
  // (eigenvalue, axis label) in the chart's coordinate order
  std::vector<std::pair<double, std::string>> eigenvalues;
};

// Fixed points of the entrance-chart map on {r1 = 0, eps1 = 0} with their
// closed-form spectra: the two attracting branch points and the entry line.
std::vector<EigenData> fixed_points_k1(double h1);
// Exit-chart counterparts: repelling branch points and the exit line, whose
// spectrum carries the resonance lambda1*lambda3 = lambda2.
std::vector<EigenData> fixed_points_k3(double h3);

using Map4 = std::function<std::array<double, 4>(const std::array<double, 4>&)>;

// Central-difference Jacobian, for checking the closed-form spectra against
// the actual one-step maps.
std::array<std::array<double, 4>, 4> numeric_jacobian(
    const Map4& map, const std::array<double, 4>& at, double fd_step = 1e-6);

}  // namespace tcmap
