#pragma once

#include <vector>

#include <Eigen/Dense>

#include "polarize/dynamics.hpp"
#include "polarize/graph.hpp"
#include "polarize/metrics.hpp"
#include "polarize/numkit.hpp"

namespace polarize {

// ---------------------------------------------------------------------------
// Network administrator: re-weights edges to cut disagreement at fixed
// expressed opinions, within a relative Frobenius budget around the initial
// adjacency and preserving every node's total weight.

struct AdminConfig {
  double epsilon = 0.1;  // ||W - W_hat||_F <= epsilon * ||W_hat||_F
  int rounds = 10;
  // Inner solve: max_iters caps Newton steps per polytope projection and
  // grad_tol is the row-sum tolerance (relative to 1 + max degree).
  numkit::ProjectedGradientConfig inner{1.0, 200, 1e-12, 1e-16};
  // The loop stops early once W moves less than this (Frobenius).
  double convergence_tol = 1e-9;
};

struct AdminRound {
  Opinions z;            // equilibrium under the previous weights
  Graph adjusted;        // weights chosen by the administrator for this z
  double polarization;   // of z
  double disagreement;   // of z under the previous weights
  double adjusted_disagreement;  // of z under the adjusted weights
};

struct AdminTrace {
  double epsilon = 0.0;
  std::vector<AdminRound> rounds;
  Graph final_graph;
  Opinions final_z;  // equilibrium under final_graph
  double final_polarization = 0.0;
  double final_disagreement = 0.0;
  bool converged = false;
};

/// Euclidean projection onto {w >= 0, row sums of w == b} over all node pairs,
/// by semismooth Newton on the dual. Keeps its dual iterate as a warm start.
class RowSumPolytope {
 public:
  RowSumPolytope(int n, Eigen::VectorXd row_sums, int max_newton = 200, double tol = 1e-12);

  Eigen::VectorXd project(const Eigen::VectorXd& v);

 private:
  int n_;
  Eigen::VectorXd b_;
  Eigen::VectorXd y_;
  bool warm_ = false;
  int max_newton_;
  double tol_;
};

// Minimizes z̄ᵀ L(W) z̄ over symmetric W >= 0 with W's row sums equal to those
// of w_hat and ||W - W_hat||_F <= epsilon ||W_hat||_F. Every node pair is a
// candidate edge. Throws SolverFailure.
Graph admin_adjust(const Graph& w_hat, const Opinions& z, const AdminConfig& cfg);

// Alternates equilibrium and admin_adjust for cfg.rounds rounds.
AdminTrace admin_loop(const Graph& g0, const Opinions& s, const AdminConfig& cfg);

// ---------------------------------------------------------------------------
// Structure optimization.

struct StructureResult {
  Graph graph;
  double objective = 0.0;
  double initial_objective = 0.0;
  double edge_density = 0.0;  // fraction of node pairs carrying weight
  numkit::MinimizeResult solve;
};

// Pair weights below this fraction of the largest count as absent for density.
inline constexpr double kDensityThreshold = 1e-8;

/// Minimizes PDI = s̄ᵀ(L+I)^{-1}s̄ over weighted graphs with Tr(L) = m.
/// Starts from the uniform complete graph. Throws InvalidArgument (m <= 0, n < 2).
StructureResult minimize_pdi_over_laplacian(const Opinions& s, double m,
                                            const numkit::ProjectedGradientConfig& cfg = {});

// PDI objective over pair weights (for stationarity checks and oracles).
double laplacian_pdi_objective(const Opinions& s, const Eigen::VectorXd& w,
                               Eigen::VectorXd& grad);

/// Minimizes Tr(M_kind) over symmetric W with 0 <= W_ij <= 1, zero diagonal
/// and entrywise ||W - W_hat||_1 <= k. Only the PDI kind is convex; for the
/// others the result is a stationary point. Throws InvalidBounds when W_hat
/// lies too far outside the unit box for the budget.
StructureResult minimize_acr(const Graph& w_hat, MetricKind kind, double k,
                             const numkit::ProjectedGradientConfig& cfg = {});

// ACR objective over pair weights.
double acr_objective(int n, MetricKind kind, const Eigen::VectorXd& w, Eigen::VectorXd& grad);

double edge_density(const Eigen::VectorXd& w);

}  // namespace polarize
