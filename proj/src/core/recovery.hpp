// Distribution recovery: moment grid, l1 moment-matching linear program and
// plug-in functionals of the recovered discrete distribution.
#pragma once

#include <Eigen/Dense>

#include "core/residues.hpp"

namespace vesd {

struct VesdGrid {
  double a0 = 0, b0 = 0, h = 0;
  std::vector<double> points;  // d_i = a0 + (i-1) h, strictly increasing

  static VesdGrid make(double a0, double b0, double h);
};

// k x t matrix with M(j-1, i) = d_i^j.
Eigen::MatrixXd moment_matrix(const VesdGrid& grid, int k);

struct VesdEstimate {
  VesdGrid grid;
  Eigen::VectorXd q;       // nonnegative, sums to 1
  double residual = 0;     // l1 objective at the returned q
  bool weighted = false;
  int iterations = 0;
};

// min over probability vectors q on the grid of
//   naive    : || M q - raw ||_1
//   weighted : || (M q) / truncated - 1 ||_1   (requires truncated moments > 0)
// Primal revised simplex with Bland's rule; exceeding iter_cap raises a
// solver-stall error reporting the incumbent objective.
VesdEstimate solve_moment_lp(const VesdGrid& grid, const MomentVector& moments,
                             bool weighted, int iter_cap = tol::lp_iter_cap);

enum class Functional { inverse, identity, power };

// Integral of x^(-1), x, or x^j against the recovered distribution.
double plugin_functional(const VesdEstimate& est, Functional f, int power_j = 1);

struct DiscreteDistribution {
  std::vector<double> points;
  std::vector<double> weights;  // nonnegative, sums to 1 (within 1e-9)
};

DiscreteDistribution to_distribution(const VesdEstimate& est);

// Exact 1-Wasserstein distance between discrete distributions (area between
// the step CDFs, accumulated over merged breakpoints).
double wasserstein1(const DiscreteDistribution& a, const DiscreteDistribution& b);

}  // namespace vesd
