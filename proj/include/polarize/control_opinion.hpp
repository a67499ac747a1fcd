#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "polarize/dynamics.hpp"
#include "polarize/graph.hpp"
#include "polarize/metrics.hpp"
#include "polarize/numkit.hpp"

namespace polarize {

// ---------------------------------------------------------------------------
// Budgeted opinion shifts that minimize PDI.

struct ShiftResult {
  Opinions shift;      // d, with 0 <= d <= s and sum(d) <= alpha
  Opinions shifted;    // s - d
  MetricReport report;  // metrics of the shifted opinions (from_s route)
  double initial_pdi = 0.0;
  numkit::MinimizeResult solve;
};

// Minimizes PDI(s - d) over {0 <= d <= s, 1ᵀd <= alpha}.
// Throws InvalidArgument for s outside [0,1] or alpha < 0.
ShiftResult minimize_pdi_shift(const Graph& g, const Opinions& s, double alpha,
                               const numkit::ProjectedGradientConfig& cfg = {});

// ---------------------------------------------------------------------------
// Adversarial targeting: set k individuals' internal opinions to 0 or 1 so as
// to maximize polarization or disagreement.

enum class AttackObjective { Polarization, Disagreement };
enum class HeuristicRule { MeanOpinion, MaxConnection, MaxDegree };

std::string_view to_string(AttackObjective objective);
std::string_view to_string(HeuristicRule rule);
AttackObjective parse_attack_objective(std::string_view text);
HeuristicRule parse_heuristic_rule(std::string_view text);

struct AttackPlan {
  std::vector<int> omega;   // targets, in the order they were chosen
  std::vector<int> values;  // assigned opinion per target, 0 or 1
  // Objective after each chosen target (greedy, heuristics). Brute force
  // records only the final optimum.
  std::vector<double> objective_trace;
  AttackObjective objective_kind = AttackObjective::Polarization;
  std::string algorithm;
  double baseline = 0.0;   // objective at the untouched opinions
  double objective = 0.0;  // objective at the attacked opinions
  std::int64_t evaluations = 0;
  int hamming = 0;  // entries that actually differ from the original opinions

  int k() const { return static_cast<int>(omega.size()); }
  Opinions apply(const Opinions& s_hat) const;
};

/// Objective oracle shared by every attack algorithm. Each evaluation
/// recomputes z = (L+I)^{-1} s from scratch, so two algorithms that reach the
/// same opinion vector see bit-identical objective values.
class AttackEvaluator {
 public:
  AttackEvaluator(const Graph& g, AttackObjective kind);

  double operator()(const Opinions& s);
  std::int64_t evaluations() const { return evaluations_; }
  const Graph& graph() const { return graph_; }

 private:
  Graph graph_;
  AttackObjective kind_;
  Eigen::MatrixXd inverse_;
  std::int64_t evaluations_ = 0;
};

// Upper bound on C(n,k) * 2^k for brute_force_attack.
inline constexpr double kBruteForceLimit = 1e6;

// Exact optimum over all k-subsets and all extreme assignments. Ties resolve
// to the lexicographically smallest (omega, values). Throws TooLarge.
AttackPlan brute_force_attack(const Graph& g, const Opinions& s_hat, int k,
                              AttackObjective kind);

// Hill-climbing greedy: k rounds, each trying both extremes for every
// untargeted node. Comparisons are >=, so a later candidate wins ties.
// Throws KTooLarge.
AttackPlan greedy_attack(const Graph& g, const Opinions& s_hat, int k, AttackObjective kind);

// Ranks nodes by the rule (ties to the smaller index), then assigns each chosen
// node the extreme that maximizes the objective given earlier assignments.
std::vector<int> heuristic_ranking(const Graph& g, const Opinions& s_hat, HeuristicRule rule);
AttackPlan heuristic_attack(const Graph& g, const Opinions& s_hat, int k, AttackObjective kind,
                            HeuristicRule rule);

struct BoundReport {
  int k = 0;
  double max_degree = 0.0;
  double polarization = 0.0;
  double polarization_bound = 0.0;  // P(s_hat) + 3k
  double disagreement = 0.0;
  double disagreement_bound = 0.0;  // D(s_hat) + 8 d_max k
  double polarization_slack() const { return polarization_bound - polarization; }
  double disagreement_slack() const { return disagreement_bound - disagreement; }
};

// Checks that the attacked opinions respect both linear-in-k growth bounds.
// Throws BoundViolated, or InvalidArgument for a malformed plan.
BoundReport check_bounds(const AttackPlan& plan, const Graph& g, const Opinions& s_hat);

}  // namespace polarize
