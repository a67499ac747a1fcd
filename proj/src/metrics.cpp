#include "polarize/metrics.hpp"

#include <algorithm>
#include <string>

#include "polarize/error.hpp"

namespace polarize {

std::string_view to_string(MetricRoute route) {
  switch (route) {
    case MetricRoute::FromZ: return "from_z";
    case MetricRoute::FromSbar: return "from_sbar";
    case MetricRoute::FromS: return "from_s";
  }
  return "unknown";
}

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Polarization: return "polarization";
    case MetricKind::Disagreement: return "disagreement";
    case MetricKind::Pdi: return "pdi";
  }
  return "unknown";
}

MetricRoute parse_route(std::string_view text) {
  if (text == "from_z") return MetricRoute::FromZ;
  if (text == "from_sbar") return MetricRoute::FromSbar;
  if (text == "from_s") return MetricRoute::FromS;
  throw Error(ErrorCode::InvalidArgument, "unknown route '" + std::string(text) + "'");
}

MetricKind parse_metric_kind(std::string_view text) {
  if (text == "polarization" || text == "P" || text == "M_P") return MetricKind::Polarization;
  if (text == "disagreement" || text == "D" || text == "M_D") return MetricKind::Disagreement;
  if (text == "pdi" || text == "PDI" || text == "M_PDI") return MetricKind::Pdi;
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(text) + "'");
}

Centered mean_center(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw Error(ErrorCode::EmptyVector, "cannot center an empty vector");
  const double mean = v.mean();
  return {(v.array() - mean).matrix(), mean};
}

double polarization(const Opinions& z) { return mean_center(z).centered.squaredNorm(); }

double disagreement(const Graph& g, const Opinions& z) {
  check_dimension(g, z, "opinions");
  double total = 0.0;
  for (const auto& e : g.edges()) {
    const double gap = z[e.u] - z[e.v];
    total += e.w * gap * gap;
  }
  return total;
}

double local_disagreement(const Graph& g, const Opinions& z, int i, int j) {
  check_dimension(g, z, "opinions");
  const auto w = (i >= 0 && j >= 0 && i < g.n() && j < g.n() && i != j) ? g.weight(i, j) : std::nullopt;
  if (!w) {
    throw Error(ErrorCode::NoSuchEdge, "(" + std::to_string(i) + "," + std::to_string(j) + ")");
  }
  const double gap = z[i] - z[j];
  return *w * gap * gap;
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_fj(const Graph& g) {
  Eigen::MatrixXd a = g.laplacian();
  a.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "Cholesky of L + I");
  return llt;
}

// Quadratic forms of PSD matrices; clip the rounding noise below zero.
double nonneg(double x) { return std::max(0.0, x); }

}  // namespace

Eigen::MatrixXd fj_inverse(const Graph& g) {
  return factor_fj(g).solve(Eigen::MatrixXd::Identity(g.n(), g.n()));
}

MetricReport metrics_from_internal(const Graph& g, const Opinions& s, double mu,
                                   MetricRoute route) {
  check_dimension(g, s, "internal opinions");
  if (s.size() == 0) throw Error(ErrorCode::EmptyVector, "no individuals");
  MetricReport report;
  report.mu = mu;
  report.route = route;
  bool closed_form_pdi = false;

  switch (route) {
    case MetricRoute::FromZ: {
      const Opinions z = equilibrium(g, s);
      report.polarization = polarization(z);
      report.disagreement = disagreement(g, z);
      break;
    }
    case MetricRoute::FromSbar: {
      const Eigen::VectorXd sbar = mean_center(s).centered;
      const Eigen::VectorXd x = factor_fj(g).solve(sbar);  // x = (L+I)^{-1} s̄ = z̄
      report.polarization = nonneg(x.squaredNorm());
      report.disagreement = nonneg(x.dot(g.apply_laplacian(x)));
      if (mu == 1.0) {
        report.pdi = nonneg(sbar.dot(x));
        closed_form_pdi = true;
      }
      break;
    }
    case MetricRoute::FromS: {
      const auto n = g.n();
      const Eigen::MatrixXd k = fj_inverse(g);
      const Eigen::MatrixXd center =
          Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
      const Eigen::MatrixXd m_p = k * center * k;
      const Eigen::MatrixXd m_d = k * g.laplacian() * k;
      report.polarization = nonneg(s.dot(m_p * s));
      report.disagreement = nonneg(s.dot(m_d * s));
      if (mu == 1.0) {
        const Eigen::MatrixXd m_pdi = center * k * center;
        report.pdi = nonneg(s.dot(m_pdi * s));
        closed_form_pdi = true;
      }
      break;
    }
  }
  if (!closed_form_pdi) report.pdi = report.polarization + mu * report.disagreement;
  return report;
}

Eigen::MatrixXd metric_matrix(const Graph& g, MetricKind kind) {
  const Eigen::MatrixXd k = fj_inverse(g);
  switch (kind) {
    case MetricKind::Polarization: return k * k;
    case MetricKind::Disagreement: return k * g.laplacian() * k;
    case MetricKind::Pdi: return k;
  }
  return k;
}

double acr(const Graph& g, MetricKind kind) {
  if (g.n() == 0) return 0.0;
  return metric_matrix(g, kind).trace();
}

InternalOpinionMetrics::InternalOpinionMetrics(const Graph& g)
    : graph_(g), inverse_(fj_inverse(g)) {}

double InternalOpinionMetrics::value(MetricKind kind, const Opinions& s) const {
  Eigen::VectorXd unused;
  return value_and_gradient(kind, s, unused);
}

double InternalOpinionMetrics::value_and_gradient(MetricKind kind, const Opinions& s,
                                                  Eigen::VectorXd& grad) const {
  check_dimension(graph_, s, "internal opinions");
  const Eigen::VectorXd sbar = mean_center(s).centered;
  const Eigen::VectorXd x = inverse_ * sbar;
  switch (kind) {
    case MetricKind::Polarization:
      grad = 2.0 * (inverse_ * x);
      return x.squaredNorm();
    case MetricKind::Disagreement: {
      const Eigen::VectorXd lx = graph_.apply_laplacian(x);
      grad = 2.0 * (inverse_ * lx);
      return x.dot(lx);
    }
    case MetricKind::Pdi:
      grad = 2.0 * x;
      return sbar.dot(x);
  }
  return 0.0;
}

}  // namespace polarize
