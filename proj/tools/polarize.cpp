// polarize: command-line front end for FJ opinion dynamics experiments.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "polarize/control_network.hpp"
#include "polarize/control_opinion.hpp"
#include "polarize/dynamics.hpp"
#include "polarize/error.hpp"
#include "polarize/graph.hpp"
#include "polarize/io.hpp"
#include "polarize/metrics.hpp"
#include "polarize/rng.hpp"

namespace {

using polarize::Error;
using polarize::ErrorCode;
using polarize::Graph;
using polarize::Opinions;
using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

// Everything a command wrote, recorded in the manifest.
struct Run {
  std::string command;
  json inputs = json::object();
  json params = json::object();
  std::vector<std::pair<std::string, std::string>> files;  // path, contents
  std::string primary;                                     // goes to --out or stdout
  int status = 0;
};

struct Globals {
  std::optional<std::uint64_t> seed_flag;
  std::string out;
  int jobs = 1;
};

std::uint64_t resolve_seed(const Globals& g) {
  if (g.seed_flag) return *g.seed_flag;
  if (const char* env = std::getenv("POLARIZE_SEED"); env && *env) {
    std::uint64_t value = 0;
    const std::string text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw Error(ErrorCode::InvalidArgument, "POLARIZE_SEED is not an unsigned integer");
    }
    return value;
  }
  return 0;
}

Graph load_graph(Run& run, const std::string& path) {
  run.inputs["graph"] = path;
  return polarize::parse_edge_list(polarize::io::read_file(path));
}

Opinions load_opinions(Run& run, const std::string& path, int n) {
  run.inputs["opinions"] = path;
  return polarize::io::parse_opinions_csv(polarize::io::read_file(path), n);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorCode::InvalidArgument, "bad number '" + item + "' in list");
    }
    values.push_back(v);
  }
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "empty list");
  return values;
}

// Runs task(i) for i in [0, count) on up to `jobs` threads. Each task writes
// only its own slot, so output order never depends on scheduling.
void parallel_for(int count, int jobs, const std::function<void(int)>& task) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// Commands

struct SimulateArgs {
  std::string graph, opinions, trajectory;
  double tol = 1e-12;
  int max_iter = 100000;
};

void cmd_simulate(Run& run, const SimulateArgs& a) {
  const Graph g = load_graph(run, a.graph);
  const Opinions s = load_opinions(run, a.opinions, g.n());
  run.params["tol"] = a.tol;
  run.params["max_iter"] = a.max_iter;
  const Opinions z = polarize::equilibrium(g, s);
  run.primary = polarize::io::serialize_opinions_csv(z);
  if (!a.trajectory.empty()) {
    const auto traj = polarize::fj_iterate(g, s, s, a.tol, a.max_iter);
    if (!traj.converged) {
      throw Error(ErrorCode::MaxIterationsExceeded,
                  "FJ iteration did not reach tol within " + std::to_string(a.max_iter) + " steps");
    }
    run.files.emplace_back(a.trajectory, polarize::io::serialize_trajectory_csv(traj));
  }
}

struct MetricsArgs {
  std::string graph, opinions, route = "from_z";
  double mu = 1.0;
};

void cmd_metrics(Run& run, const MetricsArgs& a) {
  const Graph g = load_graph(run, a.graph);
  const Opinions s = load_opinions(run, a.opinions, g.n());
  run.params["mu"] = a.mu;
  run.params["route"] = a.route;
  const auto report = polarize::metrics_from_internal(g, s, a.mu, polarize::parse_route(a.route));
  run.primary = dump(polarize::io::to_json(report));
}

void cmd_demo_echo(Run& run) {
  const Opinions s = (Eigen::VectorXd(6) << 0, 0, 0, 1, 1, 1).finished();
  const std::vector<std::pair<std::string, Graph>> scenarios{
      {"echo_chamber", Graph(6, {{0, 1, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}})},
      {"cross_cutting", Graph(6, {{0, 3, 1.0}, {1, 4, 1.0}, {2, 5, 1.0}, {0, 4, 1.0}})}};
  json out;
  out["schema_version"] = polarize::io::kSchemaVersion;
  out["opinions"] = polarize::io::to_json(s);
  std::vector<polarize::MetricReport> reports;
  for (const auto& [name, g] : scenarios) {
    reports.push_back(polarize::metrics_from_internal(g, s, 1.0, polarize::MetricRoute::FromZ));
    json entry;
    entry["name"] = name;
    entry["graph"] = polarize::io::to_json(g);
    entry["equilibrium"] = polarize::io::to_json(polarize::equilibrium(g, s));
    entry["report"] = polarize::io::to_json(reports.back());
    out["scenarios"].push_back(entry);
  }
  const bool p_order = reports[0].polarization > reports[1].polarization;
  const bool d_order = reports[0].disagreement < reports[1].disagreement;
  out["echo_has_higher_polarization"] = p_order;
  out["echo_has_lower_disagreement"] = d_order;
  run.primary = dump(out);
  if (!p_order || !d_order) run.status = 5;
}

struct AdminArgs {
  std::string graph, opinions, epsilons = "0.1", jsonl;
  int rounds = 10;
};

void cmd_admin(Run& run, const AdminArgs& a, int jobs) {
  const Graph g = load_graph(run, a.graph);
  const Opinions s = load_opinions(run, a.opinions, g.n());
  const auto eps = parse_list(a.epsilons);
  run.params["epsilon"] = eps;
  run.params["rounds"] = a.rounds;
  std::vector<polarize::AdminTrace> traces(eps.size());
  parallel_for(static_cast<int>(eps.size()), jobs, [&](int i) {
    polarize::AdminConfig cfg;
    cfg.epsilon = eps[i];
    cfg.rounds = a.rounds;
    traces[i] = polarize::admin_loop(g, s, cfg);
  });
  run.primary = polarize::io::admin_trace_csv(traces);
  if (!a.jsonl.empty()) {
    std::string lines;
    for (const auto& t : traces) lines += polarize::io::admin_trace_jsonl(t);
    run.files.emplace_back(a.jsonl, lines);
  }
}

struct AttackArgs {
  std::string graph, opinions, objective = "polarization", algorithm = "greedy", curve;
  int k = 1;
};

polarize::AttackPlan run_algorithm(const std::string& name, const Graph& g, const Opinions& s,
                                   int k, polarize::AttackObjective kind) {
  if (name == "greedy") return polarize::greedy_attack(g, s, k, kind);
  if (name == "brute_force") return polarize::brute_force_attack(g, s, k, kind);
  return polarize::heuristic_attack(g, s, k, kind, polarize::parse_heuristic_rule(name));
}

void cmd_attack(Run& run, const AttackArgs& a, int jobs) {
  const Graph g = load_graph(run, a.graph);
  const Opinions s = load_opinions(run, a.opinions, g.n());
  const auto kind = polarize::parse_attack_objective(a.objective);
  run.params["k"] = a.k;
  run.params["objective"] = std::string(polarize::to_string(kind));
  run.params["algorithm"] = a.algorithm;

  std::vector<std::string> names;
  if (a.algorithm == "all") {
    names = {"brute_force", "greedy", "mean_opinion", "max_connection", "max_degree"};
  } else {
    names = {a.algorithm};
  }
  std::vector<polarize::AttackPlan> plans(names.size());
  parallel_for(static_cast<int>(names.size()), jobs,
               [&](int i) { plans[i] = run_algorithm(names[i], g, s, a.k, kind); });

  json out;
  out["schema_version"] = polarize::io::kSchemaVersion;
  out["k"] = a.k;
  out["objective"] = std::string(polarize::to_string(kind));
  out["plans"] = json::array();
  for (const auto& plan : plans) {
    json entry = polarize::io::to_json(plan);
    entry["bounds"] = polarize::io::to_json(polarize::check_bounds(plan, g, s));
    out["plans"].push_back(entry);
  }
  run.primary = dump(out);

  if (!a.curve.empty()) {
    // Brute force solves a single k, so the curve re-solves it for each k.
    std::vector<polarize::AttackPlan> curves = plans;
    for (auto& plan : curves) {
      if (plan.algorithm != "brute_force") continue;
      plan.objective_trace.clear();
      for (int k = 1; k <= a.k; ++k) {
        plan.objective_trace.push_back(polarize::brute_force_attack(g, s, k, kind).objective);
      }
    }
    run.files.emplace_back(a.curve, polarize::io::attack_curve_csv(curves));
  }
}

struct OptimizeArgs {
  std::string graph, opinions, kind = "M_PDI", graph_out;
  double m = 1.0, k = 1.0, alpha = 0.0;
  int max_iters = 5000;
};

void cmd_optimize(Run& run, const std::string& problem, const OptimizeArgs& a) {
  polarize::numkit::ProjectedGradientConfig cfg;
  cfg.max_iters = a.max_iters;
  run.params["problem"] = problem;
  run.params["max_iters"] = a.max_iters;
  if (problem == "pdi-laplacian") {
    run.inputs["opinions"] = a.opinions;
    const Opinions s = polarize::io::parse_opinions_csv(polarize::io::read_file(a.opinions));
    run.params["m"] = a.m;
    const auto result = polarize::minimize_pdi_over_laplacian(s, a.m, cfg);
    run.primary = dump(polarize::io::to_json(result, problem));
    if (!a.graph_out.empty()) run.files.emplace_back(a.graph_out, polarize::serialize_edge_list(result.graph));
  } else if (problem == "acr") {
    const Graph g = load_graph(run, a.graph);
    const auto kind = polarize::parse_metric_kind(a.kind);
    run.params["kind"] = std::string(polarize::to_string(kind));
    run.params["k"] = a.k;
    const auto result = polarize::minimize_acr(g, kind, a.k, cfg);
    run.primary = dump(polarize::io::to_json(result, problem));
    if (!a.graph_out.empty()) run.files.emplace_back(a.graph_out, polarize::serialize_edge_list(result.graph));
  } else {
    const Graph g = load_graph(run, a.graph);
    const Opinions s = load_opinions(run, a.opinions, g.n());
    run.params["alpha"] = a.alpha;
    run.primary = dump(polarize::io::to_json(polarize::minimize_pdi_shift(g, s, a.alpha, cfg)));
  }
}

struct GenerateArgs {
  std::string model = "random", opinions_dist = "uniform", opinions_out;
  int n = 20, links = 2;
  double p = 0.2, p_in = 0.3, p_out = 0.02, wlo = 1.0, whi = 1.0;
};

void cmd_generate(Run& run, const GenerateArgs& a, std::uint64_t seed) {
  polarize::Rng root(seed);
  polarize::Rng graph_rng = root.split();
  polarize::Rng opinion_rng = root.split();
  run.params["model"] = a.model;
  run.params["n"] = a.n;
  Graph g;
  if (a.model == "random") {
    run.params["p"] = a.p;
    run.params["wlo"] = a.wlo;
    run.params["whi"] = a.whi;
    g = polarize::random_graph(a.n, a.p, a.wlo, a.whi, graph_rng);
  } else if (a.model == "two-community") {
    run.params["p_in"] = a.p_in;
    run.params["p_out"] = a.p_out;
    run.params["wlo"] = a.wlo;
    run.params["whi"] = a.whi;
    g = polarize::two_community_graph(a.n, a.p_in, a.p_out, a.wlo, a.whi, graph_rng);
  } else if (a.model == "power-law") {
    run.params["links"] = a.links;
    g = polarize::preferential_attachment_graph(a.n, a.links, graph_rng);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown model '" + a.model + "'");
  }
  run.primary = polarize::serialize_edge_list(g);

  if (!a.opinions_out.empty()) {
    run.params["opinions"] = a.opinions_dist;
    Opinions s(a.n);
    for (int i = 0; i < a.n; ++i) {
      if (a.opinions_dist == "uniform") {
        s[i] = opinion_rng.uniform();
      } else if (a.opinions_dist == "split") {
        // First half leans to 0, second half to 1 (matches two-community labels).
        s[i] = i < a.n / 2 ? opinion_rng.uniform(0.0, 0.5) : opinion_rng.uniform(0.5, 1.0);
      } else if (a.opinions_dist == "power-law") {
        s[i] = std::pow(1.0 - opinion_rng.uniform(), -1.0 / 1.5);
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown opinion distribution '" + a.opinions_dist + "'");
      }
    }
    if (a.opinions_dist == "power-law" && a.n > 0) s /= s.maxCoeff();
    run.files.emplace_back(a.opinions_out, polarize::io::serialize_opinions_csv(s));
  }
}

void emit(const Run& run, const Globals& globals, std::uint64_t seed) {
  json outputs = json::array();
  for (const auto& [path, contents] : run.files) {
    polarize::io::write_file(path, contents);
    outputs.push_back(path);
  }
  if (globals.out.empty()) {
    std::cout << run.primary;
    return;
  }
  polarize::io::write_file(globals.out, run.primary);
  outputs.insert(outputs.begin(), globals.out);
  json manifest;
  manifest["schema_version"] = polarize::io::kSchemaVersion;
  manifest["command"] = run.command;
  manifest["inputs"] = run.inputs;
  manifest["seed"] = seed;
  manifest["params"] = run.params;
  manifest["version"] = kVersion;
  manifest["outputs"] = outputs;
  polarize::io::write_file(globals.out + ".manifest.json", dump(manifest));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FJ opinion dynamics: simulation, metrics and control experiments"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Globals globals;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "RNG seed (falls back to POLARIZE_SEED, then 0)");
  app.add_option("--out", globals.out, "Write the primary output here plus <out>.manifest.json");
  app.add_option("--jobs", globals.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Equilibrium opinions (and optional trajectory)");
  simulate->add_option("--graph", sim.graph, "Edge-list file")->required();
  simulate->add_option("--opinions", sim.opinions, "Internal opinions CSV")->required();
  simulate->add_option("--tol", sim.tol, "Iteration tolerance for --trajectory");
  simulate->add_option("--max-iter", sim.max_iter, "Iteration cap for --trajectory");
  simulate->add_option("--trajectory", sim.trajectory, "Write per-step FJ iterates to this CSV");

  MetricsArgs met;
  auto* metrics = app.add_subcommand("metrics", "Polarization, disagreement and PDI");
  metrics->add_option("--graph", met.graph, "Edge-list file")->required();
  metrics->add_option("--opinions", met.opinions, "Internal opinions CSV")->required();
  metrics->add_option("--mu", met.mu, "Weight of disagreement in PDI");
  metrics->add_option("--route", met.route, "from_z | from_sbar | from_s");

  auto* demo = app.add_subcommand("demo-echo", "Echo chamber vs cross-cutting 6-node example");

  AdminArgs adm;
  auto* admin = app.add_subcommand("admin", "Network administrator loop over an epsilon sweep");
  admin->add_option("--graph", adm.graph, "Edge-list file")->required();
  admin->add_option("--opinions", adm.opinions, "Internal opinions CSV")->required();
  admin->add_option("--epsilon", adm.epsilons, "Comma-separated budgets");
  admin->add_option("--rounds", adm.rounds, "Rounds per budget")->check(CLI::PositiveNumber);
  admin->add_option("--jsonl", adm.jsonl, "Write per-round JSON lines here");

  AttackArgs att;
  auto* attack = app.add_subcommand("attack", "Adversarial targeting of k internal opinions");
  attack->add_option("--graph", att.graph, "Edge-list file")->required();
  attack->add_option("--opinions", att.opinions, "Internal opinions CSV")->required();
  attack->add_option("--k", att.k, "Number of targets");
  attack->add_option("--objective", att.objective, "polarization | disagreement");
  attack->add_option("--algorithm", att.algorithm)
      ->check(CLI::IsMember({"greedy", "brute_force", "mean_opinion", "max_connection", "max_degree", "all"}));
  attack->add_option("--curve", att.curve, "Write the k-vs-objective CSV here");

  OptimizeArgs opt;
  std::string problem;
  auto* optimize = app.add_subcommand("optimize", "Structure or opinion optimization");
  optimize->add_option("problem", problem, "pdi-laplacian | acr | shift")
      ->required()
      ->check(CLI::IsMember({"pdi-laplacian", "acr", "shift"}));
  optimize->add_option("--graph", opt.graph, "Edge-list file (acr, shift)");
  optimize->add_option("--opinions", opt.opinions, "Internal opinions CSV (pdi-laplacian, shift)");
  optimize->add_option("--m", opt.m, "Laplacian trace budget (pdi-laplacian)");
  optimize->add_option("--k", opt.k, "Entrywise 1-norm budget (acr)");
  optimize->add_option("--kind", opt.kind, "M_P | M_D | M_PDI (acr)");
  optimize->add_option("--alpha", opt.alpha, "Total shift budget (shift)");
  optimize->add_option("--max-iters", opt.max_iters, "Projected-gradient iteration cap");
  optimize->add_option("--graph-out", opt.graph_out, "Write the optimized graph here");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Seeded synthetic graph and opinions");
  generate->add_option("--model", gen.model)->check(CLI::IsMember({"random", "two-community", "power-law"}));
  generate->add_option("--n", gen.n, "Node count")->check(CLI::NonNegativeNumber);
  generate->add_option("--p", gen.p, "Edge probability (random)");
  generate->add_option("--p-in", gen.p_in, "Within-community probability");
  generate->add_option("--p-out", gen.p_out, "Cross-community probability");
  generate->add_option("--wlo", gen.wlo, "Lowest edge weight");
  generate->add_option("--whi", gen.whi, "Highest edge weight");
  generate->add_option("--links", gen.links, "Edges per new node (power-law)");
  generate->add_option("--opinions", gen.opinions_dist, "uniform | split | power-law");
  generate->add_option("--opinions-out", gen.opinions_out, "Write generated opinions here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*seed_opt) globals.seed_flag = seed_value;
    const std::uint64_t seed = resolve_seed(globals);
    Run run;
    if (simulate->parsed()) {
      run.command = "simulate";
      cmd_simulate(run, sim);
    } else if (metrics->parsed()) {
      run.command = "metrics";
      cmd_metrics(run, met);
    } else if (demo->parsed()) {
      run.command = "demo-echo";
      cmd_demo_echo(run);
    } else if (admin->parsed()) {
      run.command = "admin";
      cmd_admin(run, adm, globals.jobs);
    } else if (attack->parsed()) {
      run.command = "attack";
      cmd_attack(run, att, globals.jobs);
    } else if (optimize->parsed()) {
      run.command = "optimize";
      cmd_optimize(run, problem, opt);
    } else if (generate->parsed()) {
      run.command = "generate";
      cmd_generate(run, gen, seed);
    }
    emit(run, globals, seed);
    if (run.status != 0) std::cerr << "polarize: " << run.command << " check failed\n";
    return run.status;
  } catch (const Error& e) {
    std::cerr << "polarize: " << e.what() << "\n";
    return polarize::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "polarize: internal error: " << e.what() << "\n";
    return 5;
  }
}
