#pragma once

#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "polarize/dynamics.hpp"
#include "polarize/graph.hpp"

namespace polarize {

// Which algebraic route produced a metric:
//   FromZ    - solve the equilibrium, then the definitional sums;
//   FromSbar - quadratic forms in the mean-centered internal opinions;
//   FromS    - projector-wrapped quadratic forms in the raw internal opinions.
enum class MetricRoute { FromZ, FromSbar, FromS };

enum class MetricKind { Polarization, Disagreement, Pdi };

std::string_view to_string(MetricRoute route);
std::string_view to_string(MetricKind kind);
MetricRoute parse_route(std::string_view text);
MetricKind parse_metric_kind(std::string_view text);

struct MetricReport {
  double polarization = 0.0;
  double disagreement = 0.0;
  double pdi = 0.0;  // polarization + mu * disagreement
  double mu = 1.0;
  MetricRoute route = MetricRoute::FromZ;
};

struct Centered {
  Eigen::VectorXd centered;
  double mean = 0.0;
};

// Throws EmptyVector.
Centered mean_center(const Eigen::VectorXd& v);

// Sum of squared deviations from the mean.
double polarization(const Opinions& z);
// Sum over edges of W_ij (z_i - z_j)^2 (each undirected edge once).
double disagreement(const Graph& g, const Opinions& z);
// Throws NoSuchEdge.
double local_disagreement(const Graph& g, const Opinions& z, int i, int j);

MetricReport metrics_from_internal(const Graph& g, const Opinions& s, double mu,
                                   MetricRoute route);

// (L + I)^{-1}, dense, via Cholesky.
Eigen::MatrixXd fj_inverse(const Graph& g);

// M_P = (L+I)^{-2}, M_D = (L+I)^{-1} L (L+I)^{-1}, M_PDI = (L+I)^{-1}.
Eigen::MatrixXd metric_matrix(const Graph& g, MetricKind kind);

// Average-case conflict risk: Tr(M_kind).
double acr(const Graph& g, MetricKind kind);

/// Polarization, disagreement and PDI as functions of the internal opinions,
/// with a cached (L + I)^{-1}. Gradients are 2 M s̄; they are already
/// mean-free, so they equal the gradient composed with centering.
class InternalOpinionMetrics {
 public:
  explicit InternalOpinionMetrics(const Graph& g);

  const Graph& graph() const { return graph_; }
  const Eigen::MatrixXd& inverse() const { return inverse_; }

  double value(MetricKind kind, const Opinions& s) const;
  double value_and_gradient(MetricKind kind, const Opinions& s, Eigen::VectorXd& grad) const;

 private:
  Graph graph_;
  Eigen::MatrixXd inverse_;
};

}  // namespace polarize
