#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "polarize/control_opinion.hpp"
#include "polarize/error.hpp"

using namespace polarize;
using Vec = Eigen::VectorXd;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

double pdi_oracle(const Graph& g, const Vec& s) {
  const Vec sbar = (s.array() - s.mean()).matrix();
  return sbar.dot(oracle::fj_inverse(g) * sbar);
}

double pearson(const Vec& a, const Vec& b) {
  const Vec x = (a.array() - a.mean()).matrix();
  const Vec y = (b.array() - b.mean()).matrix();
  return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

void check_plan_shape(const AttackPlan& plan, const Vec& s_hat, int k) {
  REQUIRE(plan.k() == k);
  REQUIRE(plan.values.size() == static_cast<std::size_t>(k));
  const Vec s = plan.apply(s_hat);
  CHECK(s.minCoeff() >= 0.0);
  CHECK(s.maxCoeff() <= 1.0);
  int changed = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) changed += s[i] != s_hat[i];
  CHECK(changed <= k);
  CHECK(changed == plan.hamming);
  for (int v : plan.values) CHECK((v == 0 || v == 1));
}

const std::vector<HeuristicRule> kRules{HeuristicRule::MeanOpinion, HeuristicRule::MaxConnection,
                                        HeuristicRule::MaxDegree};
const std::vector<AttackObjective> kObjectives{AttackObjective::Polarization,
                                               AttackObjective::Disagreement};

}  // namespace

TEST_CASE("minimize_pdi_shift examples") {
  const auto inst = oracle::random_instance(3, 10, 0.4);

  SUBCASE("zero budget") {
    const auto r = minimize_pdi_shift(inst.g, inst.s, 0.0);
    CHECK(r.shift == Vec::Zero(10));
    CHECK(std::abs(r.report.pdi - pdi_oracle(inst.g, inst.s)) <= 1e-12);
  }
  SUBCASE("budget covering every opinion reaches zero") {
    const auto r = minimize_pdi_shift(inst.g, inst.s, inst.s.sum() + 0.1);
    CHECK(r.report.pdi <= 1e-9);
  }
  SUBCASE("K3 grid oracle") {
    const Graph k3 = complete_graph(3, 1.0);
    const Vec s = Eigen::Vector3d(0.2, 0.5, 0.9);
    const double alpha = 0.4;
    const auto r = minimize_pdi_shift(k3, s, alpha);
    double best = 1e300;
    for (int a = 0; a <= 20; ++a) {
      for (int b = 0; b <= 50; ++b) {
        for (int c = 0; c <= 90; ++c) {
          if (a + b + c > 40) break;
          const Vec d = Eigen::Vector3d(0.01 * a, 0.01 * b, 0.01 * c);
          best = std::min(best, pdi_oracle(k3, s - d));
        }
      }
    }
    CHECK(r.report.pdi <= best + 1e-4);
    CHECK(std::abs(r.report.pdi - pdi_oracle(k3, r.shifted)) <= 1e-12);
  }
  CHECK(code_of([&] { minimize_pdi_shift(inst.g, inst.s, -1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { minimize_pdi_shift(inst.g, Vec::Constant(10, 1.5), 1.0); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([&] { minimize_pdi_shift(inst.g, Vec::Zero(4), 1.0); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("minimize_pdi_shift is feasible, improving and stationary") {
  Rng rng(61);
  for (int t = 0; t < 20; ++t) {
    const int n = 3 + static_cast<int>(rng.below(30));
    const auto g = random_graph(n, rng.uniform(0.1, 0.8), 0.1, 2.0, rng);
    const Vec s = oracle::random_opinions(n, rng);
    const double alpha = rng.uniform(0.0, s.sum());
    const auto r = minimize_pdi_shift(g, s, alpha);
    CHECK(r.shift.minCoeff() >= -1e-7);
    CHECK((s - r.shift).minCoeff() >= -1e-7);
    CHECK(r.shift.sum() <= alpha + 1e-7);
    CHECK(r.report.pdi <= r.initial_pdi + 1e-12);
    CHECK(std::abs(r.initial_pdi - pdi_oracle(g, s)) <= 1e-10 * (1.0 + r.initial_pdi));

    const InternalOpinionMetrics metrics(g);
    const numkit::Objective f = [&](const Vec& d, Vec& grad) {
      const double value = metrics.value_and_gradient(MetricKind::Pdi, s - d, grad);
      grad = -grad;
      return value;
    };
    const numkit::Projection project = [&](const Vec& d) {
      return numkit::project_box_budget(d, Vec::Zero(n), s, alpha);
    };
    CHECK(numkit::stationarity_displacement(f, project, r.shift, 1.0) <= 1e-6);
  }
}

TEST_CASE("power-law opinions: larger opinions are shifted more") {
  Rng rng(99);
  const int n = 120;
  const auto g = preferential_attachment_graph(n, 2, rng);
  Vec s(n);
  for (int i = 0; i < n; ++i) s[i] = std::pow(1.0 - rng.uniform(), -1.0 / 1.5);  // Pareto
  s /= s.maxCoeff();
  const auto r = minimize_pdi_shift(g, s, 0.2 * s.sum());
  const double rho = pearson(s, r.shift);
  MESSAGE("corr(s, d) = " << rho);
  CHECK(rho > 0.0);
}

TEST_CASE("extreme-opinion property") {
  Rng rng(27);
  for (int t = 0; t < 20; ++t) {
    const int n = 3 + static_cast<int>(rng.below(12));
    const auto g = random_graph(n, 0.5, 0.1, 2.0, rng);
    Vec s = oracle::random_opinions(n, rng);
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    for (auto kind : kObjectives) {
      AttackEvaluator eval(g, kind);
      s[j] = 0.0;
      const double at_zero = eval(s);
      s[j] = 1.0;
      const double at_one = eval(s);
      double grid_max = -1.0;
      for (int q = 0; q <= 100; ++q) {
        s[j] = q / 100.0;
        grid_max = std::max(grid_max, eval(s));
      }
      CHECK(grid_max <= std::max(at_zero, at_one) + 1e-12);
    }
  }
}

TEST_CASE("brute_force_attack examples") {
  const Graph k2(2, {{0, 1, 1.0}});
  const Vec half = Eigen::Vector2d(0.5, 0.5);

  const auto none = brute_force_attack(k2, half, 0, AttackObjective::Polarization);
  CHECK(none.omega.empty());
  CHECK(none.objective_trace.empty());
  CHECK(none.objective == none.baseline);
  CHECK(none.objective <= 1e-30);

  const auto full = brute_force_attack(k2, half, 2, AttackObjective::Polarization);
  CHECK(full.omega == std::vector<int>{0, 1});
  CHECK(full.values[0] + full.values[1] == 1);
  CHECK(full.objective == doctest::Approx(oracle::exhaustive_attack(k2, half, 2, true)).epsilon(1e-12));
  CHECK(full.objective == doctest::Approx(1.0 / 18.0).epsilon(1e-12));
  CHECK(full.evaluations == 1 + 4);

  CHECK(code_of([] {
          brute_force_attack(Graph(40, {}), Vec::Zero(40), 10, AttackObjective::Polarization);
        }) == ErrorCode::TooLarge);
}

TEST_CASE("brute_force_attack matches the exhaustive oracle") {
  Rng rng(14);
  for (int t = 0; t < 15; ++t) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const auto g = random_graph(n, 0.5, 0.1, 2.0, rng);
    const Vec s = oracle::random_opinions(n, rng);
    for (int k = 0; k <= std::min(n, 3); ++k) {
      for (auto kind : kObjectives) {
        const auto plan = brute_force_attack(g, s, k, kind);
        const double expected =
            oracle::exhaustive_attack(g, s, k, kind == AttackObjective::Polarization);
        CHECK(oracle::rel_diff(plan.objective, expected) <= 1e-10);
        check_plan_shape(plan, s, k);
      }
    }
  }
}

TEST_CASE("greedy_attack") {
  SUBCASE("ties go to the last candidate") {
    const Graph empty(4, {});
    const auto plan = greedy_attack(empty, Vec::Constant(4, 0.5), 1, AttackObjective::Polarization);
    CHECK(plan.omega == std::vector<int>{3});
    CHECK(plan.values == std::vector<int>{1});
  }
  SUBCASE("k = 1 equals brute force") {
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
      const int n = 2 + static_cast<int>(rng.below(10));
      const auto g = random_graph(n, 0.5, 0.1, 2.0, rng);
      const Vec s = oracle::random_opinions(n, rng);
      for (auto kind : kObjectives) {
        CHECK(greedy_attack(g, s, 1, kind).objective == brute_force_attack(g, s, 1, kind).objective);
      }
    }
  }
  SUBCASE("evaluation count, monotone trace and shape") {
    Rng rng(8);
    for (int t = 0; t < 10; ++t) {
      const int n = 5 + static_cast<int>(rng.below(30));
      const auto g = random_graph(n, 0.3, 0.1, 2.0, rng);
      const Vec s = oracle::random_opinions(n, rng);
      const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(n) + 1));
      for (auto kind : kObjectives) {
        const auto plan = greedy_attack(g, s, k, kind);
        std::int64_t expected = 0;
        for (int i = 0; i < k; ++i) expected += 2 * (n - i);
        CHECK(plan.evaluations == expected);
        CHECK(plan.evaluations <= 2LL * k * n);
        check_plan_shape(plan, s, k);
        for (std::size_t i = 1; i < plan.objective_trace.size(); ++i) {
          CHECK(plan.objective_trace[i] >= plan.objective_trace[i - 1]);
        }
        if (k > 0) CHECK(plan.objective_trace.front() >= plan.baseline);
        CHECK(plan.objective ==
              doctest::Approx(AttackEvaluator(g, kind)(plan.apply(s))).epsilon(1e-14));
      }
    }
  }
  CHECK(code_of([] { greedy_attack(Graph(3, {}), Vec::Zero(3), 4, AttackObjective::Polarization); }) ==
        ErrorCode::KTooLarge);
}

TEST_CASE("heuristic rankings") {
  SUBCASE("equal opinions: mean_opinion picks node 0") {
    const auto g = oracle::random_instance(1, 6, 0.5).g;
    const auto plan = heuristic_attack(g, Vec::Constant(6, 0.3), 1, AttackObjective::Polarization,
                                       HeuristicRule::MeanOpinion);
    CHECK(plan.omega == std::vector<int>{0});
  }
  SUBCASE("star: max_degree and max_connection pick the hub first") {
    const Graph star(5, {{3, 0, 1.0}, {3, 1, 1.0}, {3, 2, 1.0}, {3, 4, 1.0}});
    const Vec s = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
    CHECK(heuristic_ranking(star, s, HeuristicRule::MaxDegree).front() == 3);
    CHECK(heuristic_ranking(star, s, HeuristicRule::MaxConnection).front() == 3);
  }
  SUBCASE("max_connection counts edges, max_degree sums weights") {
    const Graph g(4, {{0, 1, 5.0}, {2, 1, 0.1}, {2, 3, 0.1}, {2, 0, 0.1}});
    const Vec s = Vec::Constant(4, 0.5);
    CHECK(heuristic_ranking(g, s, HeuristicRule::MaxConnection) == std::vector<int>{2, 0, 1, 3});
    CHECK(heuristic_ranking(g, s, HeuristicRule::MaxDegree) == std::vector<int>{0, 1, 2, 3});
    CHECK(heuristic_ranking(g, Eigen::Vector4d(0.9, 0.45, 0.0, 0.6), HeuristicRule::MeanOpinion) ==
          std::vector<int>{1, 3, 0, 2});
  }
  CHECK(code_of([] {
          heuristic_attack(Graph(2, {}), Vec::Zero(2), 3, AttackObjective::Polarization,
                           HeuristicRule::MaxDegree);
        }) == ErrorCode::KTooLarge);
}

TEST_CASE("brute force dominates greedy and heuristics on small instances") {
  Rng rng(33);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + static_cast<int>(rng.below(7));
    const auto g = random_graph(n, 0.5, 0.1, 2.0, rng);
    const Vec s = oracle::random_opinions(n, rng);
    for (int k = 0; k <= std::min(n, 2); ++k) {
      for (auto kind : kObjectives) {
        const auto brute = brute_force_attack(g, s, k, kind);
        const auto greedy = greedy_attack(g, s, k, kind);
        CHECK(brute.objective >= greedy.objective);
        for (auto rule : kRules) {
          const auto plan = heuristic_attack(g, s, k, kind, rule);
          CHECK(brute.objective >= plan.objective);
          check_plan_shape(plan, s, k);
        }
      }
    }
  }
}

TEST_CASE("check_bounds") {
  SUBCASE("k = 0 has zero slack") {
    const auto inst = oracle::random_instance(4, 12, 0.3);
    const auto plan = greedy_attack(inst.g, inst.s, 0, AttackObjective::Polarization);
    const auto report = check_bounds(plan, inst.g, inst.s);
    CHECK(report.polarization_slack() == 0.0);
    CHECK(report.disagreement_slack() == 0.0);
  }
  SUBCASE("empty graph has zero disagreement") {
    const Graph empty(6, {});
    Rng rng(2);
    const Vec s = oracle::random_opinions(6, rng);
    const auto plan = greedy_attack(empty, s, 3, AttackObjective::Disagreement);
    const auto report = check_bounds(plan, empty, s);
    CHECK(report.max_degree == 0.0);
    CHECK(report.disagreement == 0.0);
    CHECK(report.disagreement_bound == 0.0);
  }
  SUBCASE("every algorithm's plans satisfy both bounds") {
    Rng rng(19);
    for (int t = 0; t < 12; ++t) {
      const int n = 2 + static_cast<int>(rng.below(49));
      const auto g = random_graph(n, rng.uniform(0.05, 0.6), 0.1, 2.0, rng);
      const Vec s = oracle::random_opinions(n, rng);
      const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(n, 5)) + 1));
      for (auto kind : kObjectives) {
        std::vector<AttackPlan> plans{greedy_attack(g, s, k, kind)};
        if (n <= 12) plans.push_back(brute_force_attack(g, s, std::min(k, 2), kind));
        for (auto rule : kRules) plans.push_back(heuristic_attack(g, s, k, kind, rule));
        for (const auto& plan : plans) {
          const auto report = check_bounds(plan, g, s);
          CHECK(report.polarization_slack() >= 0.0);
          CHECK(report.disagreement_slack() >= 0.0);
        }
      }
    }
  }
  SUBCASE("malformed plans are rejected") {
    const Graph g(3, {{0, 1, 1.0}});
    AttackPlan plan;
    plan.omega = {0, 0};
    plan.values = {1, 1};
    CHECK(code_of([&] { check_bounds(plan, g, Vec::Zero(3)); }) == ErrorCode::InvalidArgument);
    plan.omega = {0};
    plan.values = {2};
    CHECK(code_of([&] { check_bounds(plan, g, Vec::Zero(3)); }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("greedy beats every heuristic on most seeded instances" * doctest::test_suite("trend")) {
  Rng rng(4242);
  for (auto rule : kRules) {
    int wins = 0;
    int total = 0;
    Rng local = rng.split();
    for (int t = 0; t < 30; ++t) {
      const int n = 10 + static_cast<int>(local.below(31));
      const auto g = random_graph(n, 0.2, 0.1, 2.0, local);
      const Vec s = oracle::random_opinions(n, local);
      for (auto kind : kObjectives) {
        const int k = 1 + static_cast<int>(local.below(5));
        wins += greedy_attack(g, s, k, kind).objective >= heuristic_attack(g, s, k, kind, rule).objective;
        ++total;
      }
    }
    MESSAGE(to_string(rule) << ": greedy >= heuristic on " << wins << "/" << total);
    CHECK(2 * wins > total);
  }
}

TEST_CASE("names round trip") {
  for (auto kind : kObjectives) CHECK(parse_attack_objective(to_string(kind)) == kind);
  for (auto rule : kRules) CHECK(parse_heuristic_rule(to_string(rule)) == rule);
  CHECK(code_of([] { parse_heuristic_rule("bogus"); }) == ErrorCode::InvalidArgument);
}
