#include "polarize/control_network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polarize/error.hpp"

namespace polarize {

RowSumPolytope::RowSumPolytope(int n, Eigen::VectorXd row_sums, int max_newton, double tol)
    : n_(n), b_(std::move(row_sums)), y_(Eigen::VectorXd::Zero(n)), max_newton_(max_newton),
      tol_(tol) {
  if (b_.size() != n) throw Error(ErrorCode::DimensionMismatch, "row sums");
  if ((b_.array() < 0.0).any()) throw Error(ErrorCode::InvalidBounds, "negative row sum");
}

Eigen::VectorXd RowSumPolytope::project(const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != pair_count(n_)) {
    throw Error(ErrorCode::DimensionMismatch, "pair vector");
  }
  // Entries of w carry rounding from v + y_i + y_j, so the reachable residual
  // grows with |v|.
  const double scale = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  const double tol = tol_ * (1.0 + (b_.size() ? b_.maxCoeff() : 0.0)) +
                     64.0 * std::numeric_limits<double>::epsilon() * n_ * scale;

  // Dual: phi(y) = 1/2 ||max(v + Aᵀy, 0)||^2 - bᵀy, with (Aᵀy)_ij = y_i + y_j.
  // Its minimizer gives the projection w = max(v + Aᵀy, 0).
  Eigen::VectorXd w(v.size());
  auto evaluate = [&](const Eigen::VectorXd& y, Eigen::VectorXd& out) {
    Eigen::Index k = 0;
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j, ++k) out[k] = std::max(0.0, v[k] + y[i] + y[j]);
    }
    return 0.5 * out.squaredNorm() - b_.dot(y);
  };

  Eigen::VectorXd y = y_;
  if (!warm_) {
    // Dual of the equality-only projection; (A Aᵀ) = (n-2) I + J.
    const Eigen::VectorXd r = b_ - pair_row_sums(n_, v);
    if (n_ == 2) {
      y.setConstant(0.5 * r[0]);
    } else if (n_ > 2) {
      y = (r.array() - r.sum() / (2.0 * n_ - 2.0)).matrix() / (n_ - 2.0);
    }
  }
  Eigen::VectorXd trial_w(v.size());
  double phi = evaluate(y, w);
  Eigen::VectorXd grad = pair_row_sums(n_, w) - b_;
  for (int it = 0; it <= max_newton_; ++it) {
    const double gnorm = grad.lpNorm<Eigen::Infinity>();
    if (gnorm <= tol) {
      y_ = y;
      warm_ = true;
      return w;
    }
    if (it == max_newton_) break;

    // Generalized Hessian A D Aᵀ over the active pairs.
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_, n_);
    Eigen::Index k = 0;
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j, ++k) {
        if (w[k] > 0.0) {
          h(i, i) += 1.0;
          h(j, j) += 1.0;
          h(i, j) += 1.0;
          h(j, i) += 1.0;
        }
      }
    }
    h.diagonal().array() += 1e-10 + 1e-6 * std::min(1.0, gnorm);
    const Eigen::VectorXd step = -h.ldlt().solve(grad);
    const double slope = grad.dot(step);

    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 80; ++ls, t *= 0.5) {
      const Eigen::VectorXd y_trial = y + t * step;
      const double phi_trial = evaluate(y_trial, trial_w);
      bool accept = phi_trial <= phi + 1e-4 * t * slope;
      Eigen::VectorXd grad_trial;
      if (!accept && -t * slope <= 1e-12 * (1.0 + std::abs(phi))) {
        // Decrease is below rounding in phi; fall back to the residual.
        grad_trial = pair_row_sums(n_, trial_w) - b_;
        accept = grad_trial.lpNorm<Eigen::Infinity>() < gnorm;
      }
      if (accept) {
        y = y_trial;
        w.swap(trial_w);
        phi = phi_trial;
        grad = grad_trial.size() ? grad_trial : Eigen::VectorXd(pair_row_sums(n_, w) - b_);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  throw Error(ErrorCode::SolverFailure, "row-sum projection did not converge");
}

namespace {

Eigen::VectorXd disagreement_costs(int n, const Opinions& z) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(pair_count(n)));
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) c[k] = (z[i] - z[j]) * (z[i] - z[j]);
  }
  return c;
}

void check_admin_config(const AdminConfig& cfg) {
  if (!(cfg.epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be >= 0");
  if (cfg.rounds < 1) throw Error(ErrorCode::InvalidArgument, "rounds must be >= 1");
}

// The objective cᵀw is linear, so the optimum over {polytope} ∩ {ball} is
// P_polytope(w_hat - t c) for the largest t that keeps the point in the ball
// (the ball's KKT multiplier is 1/(2t)). Distance to w_hat grows with t, so
// t is found by bracketing and bisection.
Graph admin_adjust_with(const Graph& w_hat, const Opinions& z, const AdminConfig& cfg,
                        RowSumPolytope& polytope) {
  const int n = w_hat.n();
  const Eigen::VectorXd center = pair_weights(w_hat);
  const Eigen::VectorXd c = disagreement_costs(n, z);
  const double radius = cfg.epsilon * center.norm();
  if (n < 2 || radius == 0.0 || c.maxCoeff() == 0.0) return w_hat;

  auto at = [&](double t) { return polytope.project(center - t * c); };
  auto inside = [&](const Eigen::VectorXd& w) { return (w - center).norm() <= radius; };

  // Beyond t_cap the proximal step already sits on a vertex of the LP.
  const double t_cap = 1e6 * (1.0 + center.cwiseAbs().maxCoeff()) / c.maxCoeff();
  double t_lo = 0.0;
  Eigen::VectorXd w_lo = center;
  double t_hi = std::min(t_cap, radius / c.norm());
  while (true) {
    Eigen::VectorXd w = at(t_hi);
    if (!inside(w)) break;
    t_lo = t_hi;
    w_lo = std::move(w);
    if (t_hi >= t_cap) return graph_from_pair_weights(n, w_lo);
    t_hi = std::min(t_cap, 2.0 * t_hi);
  }
  for (int it = 0; it < 200 && t_hi - t_lo > 1e-13 * t_hi; ++it) {
    const double mid = 0.5 * (t_lo + t_hi);
    Eigen::VectorXd w = at(mid);
    if (inside(w)) {
      t_lo = mid;
      w_lo = std::move(w);
    } else {
      t_hi = mid;
    }
  }
  return graph_from_pair_weights(n, w_lo);
}

}  // namespace

Graph admin_adjust(const Graph& w_hat, const Opinions& z, const AdminConfig& cfg) {
  check_admin_config(cfg);
  check_dimension(w_hat, z, "opinions");
  RowSumPolytope polytope(w_hat.n(), w_hat.degrees(), cfg.inner.max_iters, cfg.inner.grad_tol);
  return admin_adjust_with(w_hat, z, cfg, polytope);
}

AdminTrace admin_loop(const Graph& g0, const Opinions& s, const AdminConfig& cfg) {
  check_admin_config(cfg);
  check_dimension(g0, s, "internal opinions");
  RowSumPolytope polytope(g0.n(), g0.degrees(), cfg.inner.max_iters, cfg.inner.grad_tol);

  AdminTrace trace;
  trace.epsilon = cfg.epsilon;
  Graph g = g0;
  for (int r = 0; r < cfg.rounds; ++r) {
    AdminRound round;
    round.z = equilibrium(g, s);
    round.polarization = polarization(round.z);
    round.disagreement = disagreement(g, round.z);
    round.adjusted = admin_adjust_with(g0, round.z, cfg, polytope);
    round.adjusted_disagreement = disagreement(round.adjusted, round.z);
    // Frobenius norm of the full symmetric difference.
    const double change =
        std::sqrt(2.0) * (pair_weights(round.adjusted) - pair_weights(g)).norm();
    g = round.adjusted;
    trace.rounds.push_back(std::move(round));
    if (change < cfg.convergence_tol) {
      trace.converged = true;
      break;
    }
  }
  trace.final_graph = g;
  trace.final_z = equilibrium(g, s);
  trace.final_polarization = polarization(trace.final_z);
  trace.final_disagreement = disagreement(g, trace.final_z);
  return trace;
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_pairs(int n, const Eigen::VectorXd& w) {
  Eigen::MatrixXd a = -adjacency_from_pair_weights(n, w);
  a.diagonal() = -a.rowwise().sum();
  a.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "Cholesky of L + I");
  return llt;
}

// grad_ij = -(e_i - e_j)ᵀ M (e_i - e_j) for symmetric M.
void pair_quadratic_gradient(int n, const Eigen::MatrixXd& m, double scale, Eigen::VectorXd& grad) {
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) grad[k] = -scale * (m(i, i) + m(j, j) - 2.0 * m(i, j));
  }
}

numkit::MinimizeResult run_solver(const numkit::Objective& f, const numkit::Projection& project,
                                  const Eigen::VectorXd& x0,
                                  const numkit::ProjectedGradientConfig& cfg) {
  try {
    return numkit::projected_gradient_minimize(f, project, x0, cfg);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::InvalidBounds) throw;
    throw Error(ErrorCode::SolverFailure, e.what());
  }
}

}  // namespace

double edge_density(const Eigen::VectorXd& w) {
  if (w.size() == 0) return 0.0;
  const double top = w.maxCoeff();
  if (top <= 0.0) return 0.0;
  const auto present = (w.array() > kDensityThreshold * top).count();
  return static_cast<double>(present) / static_cast<double>(w.size());
}

double laplacian_pdi_objective(const Opinions& s, const Eigen::VectorXd& w,
                               Eigen::VectorXd& grad) {
  const int n = static_cast<int>(s.size());
  const Eigen::VectorXd sbar = mean_center(s).centered;
  const Eigen::VectorXd x = factor_pairs(n, w).solve(sbar);
  grad.resize(w.size());
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) grad[k] = -(x[i] - x[j]) * (x[i] - x[j]);
  }
  return sbar.dot(x);
}

StructureResult minimize_pdi_over_laplacian(const Opinions& s, double m,
                                            const numkit::ProjectedGradientConfig& cfg) {
  const int n = static_cast<int>(s.size());
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "need at least two individuals");
  if (!(m > 0.0)) throw Error(ErrorCode::InvalidArgument, "trace budget m must be > 0");

  const auto pairs = static_cast<Eigen::Index>(pair_count(n));
  // Tr(L) = 2 * sum of pair weights.
  const double total = 0.5 * m;
  auto f = [&](const Eigen::VectorXd& w, Eigen::VectorXd& grad) {
    return laplacian_pdi_objective(s, w, grad);
  };
  auto project = [&](const Eigen::VectorXd& w) {
    return numkit::project_budget_simplex(w, total, numkit::BudgetMode::Exactly);
  };
  const Eigen::VectorXd w0 = Eigen::VectorXd::Constant(pairs, total / static_cast<double>(pairs));

  StructureResult result;
  result.solve = run_solver(f, project, w0, cfg);
  result.objective = result.solve.objective;
  result.initial_objective = result.solve.trace.front();
  result.edge_density = edge_density(result.solve.x);
  result.graph = graph_from_pair_weights(n, result.solve.x);
  return result;
}

double acr_objective(int n, MetricKind kind, const Eigen::VectorXd& w, Eigen::VectorXd& grad) {
  const Eigen::MatrixXd k = factor_pairs(n, w).solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd k2 = k * k;
  grad.resize(w.size());
  switch (kind) {
    case MetricKind::Pdi:
      pair_quadratic_gradient(n, k2, 1.0, grad);
      return k.trace();
    case MetricKind::Polarization:
      pair_quadratic_gradient(n, k2 * k, 2.0, grad);
      return k2.trace();
    case MetricKind::Disagreement: {
      // M_D = K L K = K - K^2.
      Eigen::VectorXd grad_p(w.size());
      pair_quadratic_gradient(n, k2, 1.0, grad);
      pair_quadratic_gradient(n, k2 * k, 2.0, grad_p);
      grad -= grad_p;
      return k.trace() - k2.trace();
    }
  }
  return 0.0;
}

StructureResult minimize_acr(const Graph& w_hat, MetricKind kind, double k,
                             const numkit::ProjectedGradientConfig& cfg) {
  if (!(k >= 0.0)) throw Error(ErrorCode::InvalidArgument, "budget k must be >= 0");
  const int n = w_hat.n();
  const Eigen::VectorXd center = pair_weights(w_hat);

  StructureResult result;
  result.initial_objective = acr(w_hat, kind);
  if (k == 0.0 || n < 2) {
    result.graph = w_hat;
    result.objective = result.initial_objective;
    result.edge_density = edge_density(center);
    result.solve.x = center;
    result.solve.objective = result.objective;
    result.solve.trace = {result.objective};
    result.solve.reason = numkit::StopReason::Stationary;
    return result;
  }

  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(center.size());
  const Eigen::VectorXd hi = Eigen::VectorXd::Ones(center.size());
  // The entrywise norm of the symmetric matrix counts every pair twice.
  const double radius = 0.5 * k;
  if ((center - center.cwiseMax(lo).cwiseMin(hi)).lpNorm<1>() > radius * (1.0 + 1e-12)) {
    throw Error(ErrorCode::InvalidBounds, "budget k cannot bring W_hat into [0, 1]");
  }
  auto f = [&](const Eigen::VectorXd& w, Eigen::VectorXd& grad) {
    return acr_objective(n, kind, w, grad);
  };
  auto project = [&](const Eigen::VectorXd& w) {
    return numkit::project_box_l1_ball(w, lo, hi, center, radius);
  };

  result.solve = run_solver(f, project, center, cfg);
  result.objective = result.solve.objective;
  result.edge_density = edge_density(result.solve.x);
  result.graph = graph_from_pair_weights(n, result.solve.x);
  return result;
}

}  // namespace polarize
