#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace polarize::numkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using LinearOperator = std::function<Vector(const Vector&)>;
using Projection = std::function<Vector(const Vector&)>;

/// Conjugate gradients for a symmetric positive definite operator.
/// Returns x with ||A x - b||_2 <= tol * ||b||_2; throws MaxIterationsExceeded
/// otherwise. `max_iters <= 0` picks max(100, 10 n).
Vector solve_spd(const LinearOperator& apply, const Vector& b, double tol, int max_iters = 0);

// Elementwise clamp. Throws InvalidBounds if lo > hi anywhere.
Vector project_box(const Vector& x, const Vector& lo, const Vector& hi);
Vector project_box(const Vector& x, double lo, double hi);

enum class BudgetMode {
  AtMost,   // {y >= 0, sum y <= total}
  Exactly,  // {y >= 0, sum y == total}
};

// Euclidean projection onto the scaled simplex (Exactly) or the region under it
// (AtMost). Throws NegativeTotal.
Vector project_budget_simplex(const Vector& x, double total, BudgetMode mode = BudgetMode::AtMost);

// Projection onto {X : ||X - center||_F <= radius}.
Matrix project_frobenius_ball(const Matrix& x, const Matrix& center, double radius);

// Projection onto {y : ||y - center||_1 <= radius}.
Vector project_l1_ball(const Vector& x, const Vector& center, double radius);

// Exact projection onto {lo <= y <= hi} ∩ {||y - center||_1 <= radius}. Both
// sets are coordinate-separable, so the solution is a clamped soft-threshold
// with a single scalar threshold found by bisection.
Vector project_box_l1_ball(const Vector& x, const Vector& lo, const Vector& hi,
                           const Vector& center, double radius);

// Exact projection onto {lo <= y <= hi} ∩ {sum y <= total}.
Vector project_box_budget(const Vector& x, const Vector& lo, const Vector& hi, double total);

struct DykstraOptions {
  int max_iters = 20000;
  // Converged once a full sweep moves the iterate and the correction terms
  // less than this and every projection's displacement at the iterate is below it.
  double tol = 1e-9;
};

/// Dykstra's alternating projection: converges to the Euclidean projection of
/// x0 onto the intersection of the convex sets. Throws NoConvergence.
Vector dykstra_intersection(const Vector& x0, std::span<const Projection> projections,
                            const DykstraOptions& opts = {});

struct ProjectedGradientConfig {
  double step_size = 1.0;
  int max_iters = 5000;
  // Stop once ||P(x - step_size * grad) - x|| <= grad_tol.
  double grad_tol = 1e-10;
  // Stop once an accepted step improves the objective by less than
  // objective_tol * max(1, |f|).
  double objective_tol = 1e-16;
};

// Objective value; writes the gradient into `grad`.
using Objective = std::function<double(const Vector& x, Vector& grad)>;

enum class StopReason { Stationary, ObjectiveStalled, MaxIterations, StepUnderflow };

struct MinimizeResult {
  Vector x;
  double objective = 0.0;
  std::vector<double> trace;  // objective at the start and after every accepted step
  int iterations = 0;
  StopReason reason = StopReason::MaxIterations;
};

/// Projected gradient descent with Barzilai–Borwein trial steps and a
/// sufficient-decrease backtracking test, so the trace is non-increasing.
/// Throws NonFiniteObjective if f is not finite at the start point.
MinimizeResult projected_gradient_minimize(const Objective& f, const Projection& project,
                                           const Vector& x0, const ProjectedGradientConfig& cfg);

// ||P(x - eta * grad f(x)) - x||: zero exactly at constrained stationary points.
double stationarity_displacement(const Objective& f, const Projection& project, const Vector& x,
                                 double eta);

}  // namespace polarize::numkit
