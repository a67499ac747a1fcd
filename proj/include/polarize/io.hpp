#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "polarize/control_network.hpp"
#include "polarize/control_opinion.hpp"
#include "polarize/dynamics.hpp"
#include "polarize/metrics.hpp"

namespace polarize::io {

inline constexpr int kSchemaVersion = 1;

// Throws Error{Io}.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

// `index,value` rows (an `index,value` header line is optional); every index in
// [0, n) must appear exactly once. Pass expected_n < 0 to infer n.
Opinions parse_opinions_csv(std::string_view text, int expected_n = -1);
std::string serialize_opinions_csv(const Opinions& v);

// Header `step,z_0,...,z_{n-1}`, one row per step.
std::string serialize_trajectory_csv(const Trajectory& traj);

nlohmann::ordered_json to_json(const MetricReport& report);
nlohmann::ordered_json to_json(const AttackPlan& plan);
nlohmann::ordered_json to_json(const BoundReport& report);
nlohmann::ordered_json to_json(const Graph& g);
nlohmann::ordered_json to_json(const Eigen::VectorXd& v);
nlohmann::ordered_json to_json(const StructureResult& result, std::string_view problem);
nlohmann::ordered_json to_json(const ShiftResult& result);

// One JSON object per line, one line per administrator round.
std::string admin_trace_jsonl(const AdminTrace& trace);
// Header `round,epsilon,polarization,disagreement`. Rows for each round's
// equilibrium, then a final row (round = number of rounds) for the
// equilibrium under the final weights.
std::string admin_trace_csv(const std::vector<AdminTrace>& traces, bool header = true);

// Header `algorithm,objective,k,value`. Each plan gives a k = 0 baseline row
// and one row per trace entry; the trace ends at k = plan.k().
std::string attack_curve_csv(const std::vector<AttackPlan>& plans);

}  // namespace polarize::io
