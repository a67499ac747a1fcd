#pragma once

#include <vector>

#include <Eigen/Dense>

#include "polarize/graph.hpp"

namespace polarize {

// Opinions of all individuals, indexed by node. Internal opinions and attack
// outputs live in [0, 1].
using Opinions = Eigen::VectorXd;

struct Trajectory {
  std::vector<Opinions> steps;  // z(0), z(1), ...
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // max-norm of the last step's change

  const Opinions& last() const { return steps.back(); }
};

// One synchronous Friedkin–Johnsen update:
//   z'_i = (s_i + sum_j W_ij z_j) / (1 + sum_j W_ij).
// Throws DimensionMismatch.
Opinions fj_step(const Graph& g, const Opinions& s, const Opinions& z);

// Repeats fj_step until the max-norm change drops below tol or max_iter steps
// have been taken. Throws DimensionMismatch, InvalidArgument (tol <= 0).
Trajectory fj_iterate(const Graph& g, const Opinions& s, const Opinions& z0, double tol,
                      int max_iter, bool keep_steps = true);

// Direct equilibrium z = (L + I)^{-1} s. Dense Cholesky below
// kDenseSolveLimit nodes, conjugate gradients above.
inline constexpr int kDenseSolveLimit = 500;
Opinions equilibrium(const Graph& g, const Opinions& s);

void check_dimension(const Graph& g, const Eigen::VectorXd& v, const char* what);

}  // namespace polarize
