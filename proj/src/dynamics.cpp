#include "polarize/dynamics.hpp"

#include <string>

#include "polarize/error.hpp"
#include "polarize/numkit.hpp"

namespace polarize {

void check_dimension(const Graph& g, const Eigen::VectorXd& v, const char* what) {
  if (v.size() != g.n()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has length " +
                                                  std::to_string(v.size()) + ", graph has n=" +
                                                  std::to_string(g.n()));
  }
}

Opinions fj_step(const Graph& g, const Opinions& s, const Opinions& z) {
  check_dimension(g, s, "internal opinions");
  check_dimension(g, z, "expressed opinions");
  Opinions next(g.n());
  for (int i = 0; i < g.n(); ++i) {
    double num = s[i];
    double den = 1.0;
    for (const auto& nb : g.neighbors(i)) {
      num += nb.w * z[nb.node];
      den += nb.w;
    }
    next[i] = num / den;
  }
  return next;
}

Trajectory fj_iterate(const Graph& g, const Opinions& s, const Opinions& z0, double tol,
                      int max_iter, bool keep_steps) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  check_dimension(g, s, "internal opinions");
  check_dimension(g, z0, "initial opinions");
  Trajectory traj;
  traj.steps.push_back(z0);
  Opinions z = z0;
  for (int it = 0; it < max_iter; ++it) {
    Opinions next = fj_step(g, s, z);
    traj.residual = g.n() == 0 ? 0.0 : (next - z).cwiseAbs().maxCoeff();
    traj.iterations = it + 1;
    z = std::move(next);
    if (keep_steps) traj.steps.push_back(z);
    if (traj.residual < tol) {
      traj.converged = true;
      break;
    }
  }
  if (!keep_steps && traj.iterations > 0) traj.steps.push_back(z);
  return traj;
}

Opinions equilibrium(const Graph& g, const Opinions& s) {
  check_dimension(g, s, "internal opinions");
  if (g.n() == 0) return s;
  if (g.n() < kDenseSolveLimit) {
    Eigen::MatrixXd a = g.laplacian();
    a.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "Cholesky of L + I");
    return llt.solve(s);
  }
  auto apply = [&g](const Eigen::VectorXd& x) -> Eigen::VectorXd { return g.apply_laplacian(x) + x; };
  try {
    return numkit::solve_spd(apply, s, 1e-12);
  } catch (const Error& e) {
    throw Error(ErrorCode::SolverFailure, e.what());
  }
}

}  // namespace polarize
