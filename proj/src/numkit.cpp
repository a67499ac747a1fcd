#include "polarize/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "polarize/error.hpp"

namespace polarize::numkit {

Vector solve_spd(const LinearOperator& apply, const Vector& b, double tol, int max_iters) {
  const auto n = b.size();
  if (max_iters <= 0) max_iters = std::max<int>(100, 10 * static_cast<int>(n));
  const double b_norm = b.norm();
  Vector x = Vector::Zero(n);
  if (b_norm == 0.0) return x;
  const double target = tol * b_norm;

  Vector r = b;
  Vector p = r;
  double rr = r.squaredNorm();
  for (int it = 0; it < max_iters; ++it) {
    const Vector ap = apply(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) throw Error(ErrorCode::SolverFailure, "operator is not positive definite");
    const double alpha = rr / pap;
    x += alpha * p;
    r -= alpha * ap;
    const double rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= target) {
      // Recursive residuals drift; confirm against the true one.
      r = b - apply(x);
      if (r.norm() <= target) return x;
      p = r;
      rr = r.squaredNorm();
      continue;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  if ((b - apply(x)).norm() <= target) return x;
  throw Error(ErrorCode::MaxIterationsExceeded,
              "conjugate gradients did not reach tolerance in " + std::to_string(max_iters) +
                  " iterations");
}

Vector project_box(const Vector& x, const Vector& lo, const Vector& hi) {
  if (x.size() != lo.size() || x.size() != hi.size()) {
    throw Error(ErrorCode::DimensionMismatch, "box bounds");
  }
  if ((lo.array() > hi.array()).any()) throw Error(ErrorCode::InvalidBounds, "lo > hi");
  return x.cwiseMax(lo).cwiseMin(hi);
}

Vector project_box(const Vector& x, double lo, double hi) {
  if (lo > hi) throw Error(ErrorCode::InvalidBounds, "lo > hi");
  return x.cwiseMax(lo).cwiseMin(hi);
}

Vector project_budget_simplex(const Vector& x, double total, BudgetMode mode) {
  if (!(total >= 0.0)) throw Error(ErrorCode::NegativeTotal, "budget must be >= 0");
  if (mode == BudgetMode::AtMost) {
    Vector y = x.cwiseMax(0.0);
    if (y.sum() <= total) return y;
  }
  if (x.size() == 0) {
    if (total == 0.0) return x;
    throw Error(ErrorCode::InvalidBounds, "empty vector cannot sum to a positive total");
  }
  // Sort-and-threshold: y = max(x - theta, 0) with sum y = total.
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    prefix += sorted[k];
    const double candidate = (prefix - total) / static_cast<double>(k + 1);
    if (k + 1 == sorted.size() || sorted[k + 1] <= candidate) {
      theta = candidate;
      break;
    }
  }
  return (x.array() - theta).cwiseMax(0.0).matrix();
}

Matrix project_frobenius_ball(const Matrix& x, const Matrix& center, double radius) {
  if (x.rows() != center.rows() || x.cols() != center.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "matrix and center shapes differ");
  }
  if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be >= 0");
  const Matrix diff = x - center;
  const double dist = diff.norm();
  if (dist <= radius) return x;
  return center + (radius / dist) * diff;
}

namespace {

Vector soft_threshold(const Vector& v, double tau) {
  return v.array().sign() * (v.array().abs() - tau).cwiseMax(0.0);
}

// Smallest tau in [0, hi] (to bisection precision) with g(tau) <= target, where
// g is continuous and non-increasing and g(hi) <= target.
template <typename F>
double bisect_threshold(F&& g, double hi, double target) {
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (g(mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

Vector project_l1_ball(const Vector& x, const Vector& center, double radius) {
  if (x.size() != center.size()) throw Error(ErrorCode::DimensionMismatch, "l1 ball center");
  if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be >= 0");
  const Vector v = x - center;
  if (v.lpNorm<1>() <= radius) return x;
  if (radius == 0.0) return center;
  // Sorted-magnitude water filling for the threshold.
  std::vector<double> mags(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double prefix = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    prefix += mags[k];
    const double candidate = (prefix - radius) / static_cast<double>(k + 1);
    if (k + 1 == mags.size() || mags[k + 1] <= candidate) {
      tau = candidate;
      break;
    }
  }
  return center + soft_threshold(v, tau);
}

Vector project_box_l1_ball(const Vector& x, const Vector& lo, const Vector& hi,
                           const Vector& center, double radius) {
  const auto n = x.size();
  if (lo.size() != n || hi.size() != n || center.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "box/l1 projection operands");
  }
  if ((lo.array() > hi.array()).any()) throw Error(ErrorCode::InvalidBounds, "lo > hi");
  if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be >= 0");
  const Vector v = x - center;
  const Vector ulo = lo - center;
  const Vector uhi = hi - center;
  auto at = [&](double tau) -> Vector { return soft_threshold(v, tau).cwiseMax(ulo).cwiseMin(uhi); };
  auto l1 = [&](double tau) { return at(tau).lpNorm<1>(); };

  const double min_l1 = Vector::Zero(n).cwiseMax(ulo).cwiseMin(uhi).lpNorm<1>();
  if (min_l1 > radius * (1.0 + 1e-12) + 1e-15) {
    throw Error(ErrorCode::InvalidBounds, "l1 ball does not reach the box");
  }
  if (l1(0.0) <= radius) return center + at(0.0);
  const double tau = bisect_threshold(l1, v.cwiseAbs().maxCoeff(), radius);
  return center + at(tau);
}

Vector project_box_budget(const Vector& x, const Vector& lo, const Vector& hi, double total) {
  const auto n = x.size();
  if (lo.size() != n || hi.size() != n) throw Error(ErrorCode::DimensionMismatch, "box bounds");
  if ((lo.array() > hi.array()).any()) throw Error(ErrorCode::InvalidBounds, "lo > hi");
  if (lo.sum() > total) throw Error(ErrorCode::InvalidBounds, "budget below the box minimum");
  auto at = [&](double tau) -> Vector { return (x.array() - tau).matrix().cwiseMax(lo).cwiseMin(hi); };
  auto sum = [&](double tau) { return at(tau).sum(); };
  if (sum(0.0) <= total) return at(0.0);
  const double tau = bisect_threshold(sum, (x - lo).maxCoeff(), total);
  return at(tau);
}

Vector dykstra_intersection(const Vector& x0, std::span<const Projection> projections,
                            const DykstraOptions& opts) {
  if (projections.empty()) return x0;
  Vector x = x0;
  std::vector<Vector> increments(projections.size(), Vector::Zero(x0.size()));
  for (int it = 0; it < opts.max_iters; ++it) {
    const Vector before = x;
    double moved = 0.0;
    for (std::size_t k = 0; k < projections.size(); ++k) {
      const Vector shifted = x + increments[k];
      Vector y = projections[k](shifted);
      Vector next = shifted - y;
      moved += (next - increments[k]).squaredNorm();
      increments[k] = std::move(next);
      x = std::move(y);
    }
    if ((x - before).norm() <= opts.tol && std::sqrt(moved) <= opts.tol) {
      double worst = 0.0;
      for (const auto& project : projections) worst = std::max(worst, (project(x) - x).norm());
      if (worst <= opts.tol) return x;
    }
  }
  throw Error(ErrorCode::NoConvergence,
              "Dykstra projection did not converge in " + std::to_string(opts.max_iters) +
                  " sweeps (sets may be disjoint)");
}

MinimizeResult projected_gradient_minimize(const Objective& f, const Projection& project,
                                           const Vector& x0, const ProjectedGradientConfig& cfg) {
  if (!(cfg.step_size > 0.0) || cfg.max_iters < 1 || !(cfg.grad_tol > 0.0) ||
      !(cfg.objective_tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "projected gradient config must be positive");
  }
  MinimizeResult result;
  Vector x = project(x0);
  Vector grad(x.size());
  double fx = f(x, grad);
  if (!std::isfinite(fx)) throw Error(ErrorCode::NonFiniteObjective, "at the start point");
  result.trace.push_back(fx);

  double step = cfg.step_size;
  Vector grad_next(x.size());
  for (int it = 0; it < cfg.max_iters; ++it) {
    if ((project(x - cfg.step_size * grad) - x).norm() <= cfg.grad_tol) {
      result.reason = StopReason::Stationary;
      break;
    }
    Vector x_next;
    double f_next = 0.0;
    bool accepted = false;
    while (step >= 1e-20) {
      x_next = project(x - step * grad);
      const Vector d = x_next - x;
      f_next = f(x_next, grad_next);
      if (std::isfinite(f_next) && f_next <= fx &&
          f_next <= fx + grad.dot(d) + d.squaredNorm() / (2.0 * step)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.reason = StopReason::StepUnderflow;
      break;
    }
    const Vector s = x_next - x;
    const Vector y = grad_next - grad;
    const double improvement = fx - f_next;
    x = std::move(x_next);
    grad = grad_next;
    fx = f_next;
    result.trace.push_back(fx);
    result.iterations = it + 1;

    if (improvement <= cfg.objective_tol * std::max(1.0, std::abs(fx))) {
      result.reason = StopReason::ObjectiveStalled;
      break;
    }
    const double sy = s.dot(y);
    step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-12, 1e12) : std::min(2.0 * step, 1e12);
    if (it + 1 == cfg.max_iters) result.reason = StopReason::MaxIterations;
  }
  result.x = std::move(x);
  result.objective = fx;
  return result;
}

double stationarity_displacement(const Objective& f, const Projection& project, const Vector& x,
                                 double eta) {
  Vector grad(x.size());
  f(x, grad);
  return (project(x - eta * grad) - x).norm();
}

}  // namespace polarize::numkit
