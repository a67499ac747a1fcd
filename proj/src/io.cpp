#include "polarize/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "polarize/error.hpp"

namespace polarize::io {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Opinions parse_opinions_csv(std::string_view text, int expected_n) {
  std::vector<std::pair<int, double>> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (rows.empty() && line == "index,value") continue;
    const auto comma = line.find(',');
    int index = 0;
    double value = 0.0;
    if (comma == std::string_view::npos || !parse_number(line.substr(0, comma), index) ||
        !parse_number(line.substr(comma + 1), value) || !std::isfinite(value)) {
      throw Error(ErrorCode::MalformedLine,
                  "line " + std::to_string(line_no) + ": '" + std::string(line) + "'");
    }
    rows.emplace_back(index, value);
  }
  const int n = expected_n >= 0 ? expected_n : static_cast<int>(rows.size());
  if (static_cast<int>(rows.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, "opinion file has " + std::to_string(rows.size()) +
                                                  " rows, expected " + std::to_string(n));
  }
  Opinions v(n);
  std::vector<bool> seen(n, false);
  for (const auto& [index, value] : rows) {
    if (index < 0 || index >= n) {
      throw Error(ErrorCode::IndexOutOfRange, "opinion index " + std::to_string(index));
    }
    if (seen[index]) throw Error(ErrorCode::MalformedLine, "duplicate index " + std::to_string(index));
    seen[index] = true;
    v[index] = value;
  }
  return v;
}

std::string serialize_opinions_csv(const Opinions& v) {
  std::string out = "index,value\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out += std::to_string(i) + "," + format_double(v[i]) + "\n";
  }
  return out;
}

std::string serialize_trajectory_csv(const Trajectory& traj) {
  std::string out = "step";
  const auto n = traj.steps.empty() ? 0 : traj.steps.front().size();
  for (Eigen::Index i = 0; i < n; ++i) out += ",z_" + std::to_string(i);
  out += "\n";
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    out += std::to_string(t);
    for (Eigen::Index i = 0; i < n; ++i) out += "," + format_double(traj.steps[t][i]);
    out += "\n";
  }
  return out;
}

nlohmann::ordered_json to_json(const Eigen::VectorXd& v) {
  auto arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

nlohmann::ordered_json to_json(const MetricReport& report) {
  return {
      {"schema_version", kSchemaVersion},
      {"polarization", report.polarization},
      {"disagreement", report.disagreement},
      {"pdi", report.pdi},
      {"mu", report.mu},
      {"route", std::string(to_string(report.route))},
  };
}

nlohmann::ordered_json to_json(const AttackPlan& plan) {
  return {
      {"schema_version", kSchemaVersion},
      {"algorithm", plan.algorithm},
      {"kind", std::string(to_string(plan.objective_kind))},
      {"omega", plan.omega},
      {"values", plan.values},
      {"objective_trace", plan.objective_trace},
      {"baseline", plan.baseline},
      {"objective", plan.objective},
      {"evaluations", plan.evaluations},
      {"hamming", plan.hamming},
  };
}

nlohmann::ordered_json to_json(const BoundReport& report) {
  return {
      {"k", report.k},
      {"max_degree", report.max_degree},
      {"polarization", report.polarization},
      {"polarization_bound", report.polarization_bound},
      {"polarization_slack", report.polarization_slack()},
      {"disagreement", report.disagreement},
      {"disagreement_bound", report.disagreement_bound},
      {"disagreement_slack", report.disagreement_slack()},
  };
}

nlohmann::ordered_json to_json(const Graph& g) {
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v, e.w});
  return {{"n", g.n()}, {"edges", edges}};
}

namespace {

nlohmann::ordered_json solve_json(const numkit::MinimizeResult& solve) {
  static constexpr const char* kReasons[] = {"stationary", "objective_stalled", "max_iterations",
                                             "step_underflow"};
  nlohmann::ordered_json j;
  j["iterations"] = solve.iterations;
  j["stop_reason"] = kReasons[static_cast<int>(solve.reason)];
  j["objective_trace"] = solve.trace;
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const StructureResult& result, std::string_view problem) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["problem"] = problem;
  j["objective"] = result.objective;
  j["initial_objective"] = result.initial_objective;
  j["edge_density"] = result.edge_density;
  j["solve"] = solve_json(result.solve);
  j["graph"] = to_json(result.graph);
  return j;
}

nlohmann::ordered_json to_json(const ShiftResult& result) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["problem"] = "shift";
  j["objective"] = result.report.pdi;
  j["initial_objective"] = result.initial_pdi;
  j["shift"] = to_json(result.shift);
  j["shifted"] = to_json(result.shifted);
  j["report"] = to_json(result.report);
  j["solve"] = solve_json(result.solve);
  return j;
}

std::string admin_trace_jsonl(const AdminTrace& trace) {
  std::string out;
  for (std::size_t r = 0; r < trace.rounds.size(); ++r) {
    const auto& round = trace.rounds[r];
    nlohmann::ordered_json record = {
        {"schema_version", kSchemaVersion},
        {"epsilon", trace.epsilon},
        {"round", r + 1},
        {"polarization", round.polarization},
        {"disagreement", round.disagreement},
        {"adjusted_disagreement", round.adjusted_disagreement},
        {"z", to_json(round.z)},
        {"graph", to_json(round.adjusted)},
    };
    out += record.dump() + "\n";
  }
  return out;
}

std::string admin_trace_csv(const std::vector<AdminTrace>& traces, bool header) {
  std::string out = header ? "round,epsilon,polarization,disagreement\n" : "";
  for (const auto& trace : traces) {
    const auto eps = format_double(trace.epsilon);
    for (std::size_t r = 0; r < trace.rounds.size(); ++r) {
      out += std::to_string(r) + "," + eps + "," + format_double(trace.rounds[r].polarization) +
             "," + format_double(trace.rounds[r].disagreement) + "\n";
    }
    out += std::to_string(trace.rounds.size()) + "," + eps + "," +
           format_double(trace.final_polarization) + "," +
           format_double(trace.final_disagreement) + "\n";
  }
  return out;
}

std::string attack_curve_csv(const std::vector<AttackPlan>& plans) {
  std::string out = "algorithm,objective,k,value\n";
  for (const auto& plan : plans) {
    const std::string prefix = plan.algorithm + "," + std::string(to_string(plan.objective_kind)) + ",";
    out += prefix + "0," + format_double(plan.baseline) + "\n";
    // The trace covers the last trace.size() values of k, ending at plan.k().
    const auto first = static_cast<std::size_t>(plan.k()) + 1 - plan.objective_trace.size();
    for (std::size_t i = 0; i < plan.objective_trace.size(); ++i) {
      out += prefix + std::to_string(first + i) + "," + format_double(plan.objective_trace[i]) + "\n";
    }
  }
  return out;
}

}  // namespace polarize::io
