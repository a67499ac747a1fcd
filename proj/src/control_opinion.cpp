#include "polarize/control_opinion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "polarize/error.hpp"

namespace polarize {

namespace {

void check_unit_interval(const Opinions& s, const char* what) {
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (!(s[i] >= 0.0 && s[i] <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(what) + "[" + std::to_string(i) + "] is outside [0,1]");
    }
  }
}

}  // namespace

ShiftResult minimize_pdi_shift(const Graph& g, const Opinions& s, double alpha,
                               const numkit::ProjectedGradientConfig& cfg) {
  check_dimension(g, s, "internal opinions");
  check_unit_interval(s, "internal opinions");
  if (!(alpha >= 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be >= 0");

  const InternalOpinionMetrics metrics(g);
  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(s.size());
  auto objective = [&](const Eigen::VectorXd& d, Eigen::VectorXd& grad) {
    const double value = metrics.value_and_gradient(MetricKind::Pdi, s - d, grad);
    grad = -grad;
    return value;
  };
  auto project = [&](const Eigen::VectorXd& d) {
    return numkit::project_box_budget(d, lo, s, alpha);
  };

  ShiftResult result;
  result.initial_pdi = metrics.value(MetricKind::Pdi, s);
  try {
    result.solve = numkit::projected_gradient_minimize(objective, project, lo, cfg);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NonFiniteObjective) throw;
    throw Error(ErrorCode::SolverFailure, e.what());
  }
  result.shift = result.solve.x;
  result.shifted = s - result.shift;
  result.report = metrics_from_internal(g, result.shifted, 1.0, MetricRoute::FromS);
  return result;
}

std::string_view to_string(AttackObjective objective) {
  return objective == AttackObjective::Polarization ? "polarization" : "disagreement";
}

std::string_view to_string(HeuristicRule rule) {
  switch (rule) {
    case HeuristicRule::MeanOpinion: return "mean_opinion";
    case HeuristicRule::MaxConnection: return "max_connection";
    case HeuristicRule::MaxDegree: return "max_degree";
  }
  return "unknown";
}

AttackObjective parse_attack_objective(std::string_view text) {
  if (text == "polarization" || text == "P") return AttackObjective::Polarization;
  if (text == "disagreement" || text == "D") return AttackObjective::Disagreement;
  throw Error(ErrorCode::InvalidArgument, "unknown objective '" + std::string(text) + "'");
}

HeuristicRule parse_heuristic_rule(std::string_view text) {
  if (text == "mean_opinion") return HeuristicRule::MeanOpinion;
  if (text == "max_connection") return HeuristicRule::MaxConnection;
  if (text == "max_degree") return HeuristicRule::MaxDegree;
  throw Error(ErrorCode::InvalidArgument, "unknown heuristic '" + std::string(text) + "'");
}

Opinions AttackPlan::apply(const Opinions& s_hat) const {
  Opinions s = s_hat;
  for (std::size_t t = 0; t < omega.size(); ++t) s[omega[t]] = values[t];
  return s;
}

AttackEvaluator::AttackEvaluator(const Graph& g, AttackObjective kind)
    : graph_(g), kind_(kind), inverse_(fj_inverse(g)) {}

double AttackEvaluator::operator()(const Opinions& s) {
  ++evaluations_;
  const Eigen::VectorXd z = inverse_ * s;
  return kind_ == AttackObjective::Polarization ? polarization(z) : disagreement(graph_, z);
}

namespace {

void check_attack_inputs(const Graph& g, const Opinions& s_hat, int k) {
  check_dimension(g, s_hat, "internal opinions");
  check_unit_interval(s_hat, "internal opinions");
  if (k < 0 || k > g.n()) {
    throw Error(ErrorCode::KTooLarge,
                "k=" + std::to_string(k) + " with n=" + std::to_string(g.n()));
  }
}

void finish_plan(AttackPlan& plan, const Opinions& s_hat, const AttackEvaluator& eval) {
  plan.evaluations = eval.evaluations();
  plan.hamming = 0;
  for (std::size_t t = 0; t < plan.omega.size(); ++t) {
    if (s_hat[plan.omega[t]] != plan.values[t]) ++plan.hamming;
  }
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace

AttackPlan brute_force_attack(const Graph& g, const Opinions& s_hat, int k,
                              AttackObjective kind) {
  check_attack_inputs(g, s_hat, k);
  const double cases = binomial(g.n(), k) * std::ldexp(1.0, k);
  if (cases > kBruteForceLimit) {
    throw Error(ErrorCode::TooLarge, "C(n,k)*2^k = " + std::to_string(cases) + " exceeds limit");
  }
  AttackEvaluator eval(g, kind);
  AttackPlan plan;
  plan.algorithm = "brute_force";
  plan.objective_kind = kind;
  plan.baseline = eval(s_hat);
  plan.objective = plan.baseline;
  if (k == 0) {
    finish_plan(plan, s_hat, eval);
    return plan;
  }

  std::vector<int> subset(k);
  std::iota(subset.begin(), subset.end(), 0);
  bool have_best = false;
  Opinions s = s_hat;
  while (true) {
    // Assignments in lexicographic order: values[0] is the most significant bit.
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
      for (int t = 0; t < k; ++t) s[subset[t]] = static_cast<double>((mask >> (k - 1 - t)) & 1U);
      const double value = eval(s);
      if (!have_best || value > plan.objective) {
        have_best = true;
        plan.objective = value;
        plan.omega = subset;
        plan.values.resize(k);
        for (int t = 0; t < k; ++t) plan.values[t] = static_cast<int>((mask >> (k - 1 - t)) & 1U);
      }
    }
    for (int t : subset) s[t] = s_hat[t];

    // Next k-subset in lexicographic order.
    int pos = k - 1;
    while (pos >= 0 && subset[pos] == g.n() - k + pos) --pos;
    if (pos < 0) break;
    ++subset[pos];
    for (int t = pos + 1; t < k; ++t) subset[t] = subset[t - 1] + 1;
  }
  plan.objective_trace = {plan.objective};
  finish_plan(plan, s_hat, eval);
  return plan;
}

AttackPlan greedy_attack(const Graph& g, const Opinions& s_hat, int k, AttackObjective kind) {
  check_attack_inputs(g, s_hat, k);
  AttackEvaluator eval(g, kind);
  AttackPlan plan;
  plan.algorithm = "greedy";
  plan.objective_kind = kind;
  plan.baseline = eval(s_hat);
  plan.objective = plan.baseline;

  Opinions s = s_hat;
  std::vector<bool> targeted(g.n(), false);
  for (int round = 0; round < k; ++round) {
    double best = 0.0;
    int index = 0;
    int set_value = 0;
    for (int j = 0; j < g.n(); ++j) {
      if (targeted[j]) continue;
      const double saved = s[j];
      for (int value : {0, 1}) {
        s[j] = value;
        const double candidate = eval(s);
        if (candidate >= best) {
          best = candidate;
          index = j;
          set_value = value;
        }
      }
      s[j] = saved;
    }
    s[index] = set_value;
    targeted[index] = true;
    plan.omega.push_back(index);
    plan.values.push_back(set_value);
    plan.objective_trace.push_back(best);
    plan.objective = best;
  }
  finish_plan(plan, s_hat, eval);
  // The baseline evaluation is bookkeeping, not part of the search cost.
  plan.evaluations -= 1;
  return plan;
}

std::vector<int> heuristic_ranking(const Graph& g, const Opinions& s_hat, HeuristicRule rule) {
  check_dimension(g, s_hat, "internal opinions");
  std::vector<int> order(g.n());
  std::iota(order.begin(), order.end(), 0);
  switch (rule) {
    case HeuristicRule::MeanOpinion: {
      const double mean = g.n() > 0 ? s_hat.mean() : 0.0;
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(s_hat[a] - mean) < std::abs(s_hat[b] - mean);
      });
      break;
    }
    case HeuristicRule::MaxConnection:
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return g.connection_count(a) > g.connection_count(b);
      });
      break;
    case HeuristicRule::MaxDegree: {
      const Eigen::VectorXd d = g.degrees();
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] > d[b]; });
      break;
    }
  }
  return order;
}

AttackPlan heuristic_attack(const Graph& g, const Opinions& s_hat, int k, AttackObjective kind,
                            HeuristicRule rule) {
  check_attack_inputs(g, s_hat, k);
  AttackEvaluator eval(g, kind);
  AttackPlan plan;
  plan.algorithm = std::string(to_string(rule));
  plan.objective_kind = kind;
  plan.baseline = eval(s_hat);
  plan.objective = plan.baseline;

  const auto order = heuristic_ranking(g, s_hat, rule);
  Opinions s = s_hat;
  for (int t = 0; t < k; ++t) {
    const int j = order[t];
    s[j] = 0.0;
    const double at_zero = eval(s);
    s[j] = 1.0;
    const double at_one = eval(s);
    const int value = at_one >= at_zero ? 1 : 0;
    s[j] = value;
    plan.omega.push_back(j);
    plan.values.push_back(value);
    plan.objective = std::max(at_zero, at_one);
    plan.objective_trace.push_back(plan.objective);
  }
  finish_plan(plan, s_hat, eval);
  plan.evaluations -= 1;
  return plan;
}

BoundReport check_bounds(const AttackPlan& plan, const Graph& g, const Opinions& s_hat) {
  check_dimension(g, s_hat, "internal opinions");
  if (plan.omega.size() != plan.values.size()) {
    throw Error(ErrorCode::InvalidArgument, "plan has mismatched omega/values");
  }
  std::set<int> seen;
  for (std::size_t t = 0; t < plan.omega.size(); ++t) {
    const int j = plan.omega[t];
    if (j < 0 || j >= g.n() || !seen.insert(j).second) {
      throw Error(ErrorCode::InvalidArgument, "plan targets are not distinct valid nodes");
    }
    if (plan.values[t] != 0 && plan.values[t] != 1) {
      throw Error(ErrorCode::InvalidArgument, "plan values must be 0 or 1");
    }
  }
  AttackEvaluator pol(g, AttackObjective::Polarization);
  AttackEvaluator dis(g, AttackObjective::Disagreement);
  const Opinions s = plan.apply(s_hat);

  BoundReport report;
  report.k = plan.k();
  report.max_degree = g.max_degree();
  report.polarization = pol(s);
  report.polarization_bound = pol(s_hat) + 3.0 * report.k;
  report.disagreement = dis(s);
  report.disagreement_bound = dis(s_hat) + 8.0 * report.max_degree * report.k;

  const auto violated = [](double value, double bound) {
    return value > bound + 1e-12 * (1.0 + std::abs(bound));
  };
  if (violated(report.polarization, report.polarization_bound)) {
    throw Error(ErrorCode::BoundViolated, "polarization " + format_double(report.polarization) +
                                              " > " + format_double(report.polarization_bound));
  }
  if (violated(report.disagreement, report.disagreement_bound)) {
    throw Error(ErrorCode::BoundViolated, "disagreement " + format_double(report.disagreement) +
                                              " > " + format_double(report.disagreement_bound));
  }
  return report;
}

}  // namespace polarize
