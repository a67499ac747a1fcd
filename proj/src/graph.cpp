#include "polarize/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "polarize/error.hpp"
#include "polarize/rng.hpp"

namespace polarize {

Graph::Graph(int n, std::vector<Edge> edges) : n_(n) {
  if (n < 0) throw Error(ErrorCode::IndexOutOfRange, "negative node count");
  for (auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") with n=" +
                      std::to_string(n));
    }
    if (e.u == e.v) throw Error(ErrorCode::SelfLoop, "node " + std::to_string(e.u));
    if (!std::isfinite(e.w) || e.w < 0.0) {
      throw Error(ErrorCode::NegativeWeight,
                  "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (edges[k].u == edges[k - 1].u && edges[k].v == edges[k - 1].v) {
      throw Error(ErrorCode::DuplicateEdge, "pair (" + std::to_string(edges[k].u) + "," +
                                                std::to_string(edges[k].v) + ")");
    }
  }
  std::erase_if(edges, [](const Edge& e) { return e.w == 0.0; });
  edges_ = std::move(edges);

  adj_.assign(n_, {});
  for (const auto& e : edges_) {
    adj_[e.u].push_back({e.v, e.w});
    adj_[e.v].push_back({e.u, e.w});
  }
}

std::optional<double> Graph::weight(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair{i, j},
                             [](const Edge& e, const std::pair<int, int>& key) {
                               return e.u != key.first ? e.u < key.first : e.v < key.second;
                             });
  if (it == edges_.end() || it->u != i || it->v != j) return std::nullopt;
  return it->w;
}

Eigen::VectorXd Graph::degrees() const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
  for (const auto& e : edges_) {
    d[e.u] += e.w;
    d[e.v] += e.w;
  }
  return d;
}

double Graph::max_degree() const {
  if (n_ == 0) return 0.0;
  return degrees().maxCoeff();
}

double Graph::total_weight() const {
  double total = 0.0;
  for (const auto& e : edges_) total += e.w;
  return total;
}

Eigen::MatrixXd Graph::adjacency() const {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& e : edges_) {
    w(e.u, e.v) = e.w;
    w(e.v, e.u) = e.w;
  }
  return w;
}

Eigen::MatrixXd Graph::laplacian() const {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& e : edges_) {
    l(e.u, e.u) += e.w;
    l(e.v, e.v) += e.w;
    l(e.u, e.v) -= e.w;
    l(e.v, e.u) -= e.w;
  }
  return l;
}

Eigen::VectorXd Graph::apply_laplacian(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
  for (const auto& e : edges_) {
    const double flow = e.w * (x[e.u] - x[e.v]);
    y[e.u] += flow;
    y[e.v] -= flow;
  }
  return y;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= line.size(); ++k) {
    if (k == line.size() || line[k] == ',' || line[k] == '\t') {
      fields.push_back(line.substr(start, k - start));
      start = k + 1;
    }
  }
  return fields;
}

}  // namespace

Graph parse_edge_list(std::string_view text) {
  std::optional<int> n;
  std::vector<Edge> edges;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const auto where = "line " + std::to_string(line_no) + ": '" + std::string(line) + "'";
    if (!n) {
      int count = 0;
      if (!line.starts_with("n=") || !parse_number(line.substr(2), count) || count < 0) {
        throw Error(ErrorCode::MalformedLine, where + " (expected header n=<count>)");
      }
      n = count;
      continue;
    }
    const auto fields = split_fields(line);
    Edge e{};
    if (fields.size() != 3 || !parse_number(fields[0], e.u) || !parse_number(fields[1], e.v) ||
        !parse_number(fields[2], e.w) || !std::isfinite(e.w)) {
      throw Error(ErrorCode::MalformedLine, where);
    }
    if (e.w < 0.0) throw Error(ErrorCode::NegativeWeight, where);
    if (e.u < 0 || e.u >= *n || e.v < 0 || e.v >= *n) {
      throw Error(ErrorCode::IndexOutOfRange, where);
    }
    if (e.u == e.v) throw Error(ErrorCode::SelfLoop, where);
    edges.push_back(e);
  }
  if (!n) throw Error(ErrorCode::MalformedLine, "missing header n=<count>");
  return Graph(*n, std::move(edges));
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string serialize_edge_list(const Graph& g) {
  std::string out = "n=" + std::to_string(g.n()) + "\n";
  for (const auto& e : g.edges()) {
    out += std::to_string(e.u) + "," + std::to_string(e.v) + "," + format_double(e.w) + "\n";
  }
  return out;
}

std::size_t pair_count(int n) {
  return n < 2 ? 0 : static_cast<std::size_t>(n) * (n - 1) / 2;
}

std::size_t pair_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  // Pairs of rows 0..i-1 precede row i.
  const auto row_start = static_cast<std::size_t>(i) * (2 * static_cast<std::size_t>(n) - i - 1) / 2;
  return row_start + static_cast<std::size_t>(j - i - 1);
}

Eigen::VectorXd pair_weights(const Graph& g) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pair_count(g.n())));
  for (const auto& e : g.edges()) w[static_cast<Eigen::Index>(pair_index(g.n(), e.u, e.v))] = e.w;
  return w;
}

Graph graph_from_pair_weights(int n, const Eigen::VectorXd& w) {
  if (static_cast<std::size_t>(w.size()) != pair_count(n)) {
    throw Error(ErrorCode::DimensionMismatch, "pair weight vector length");
  }
  std::vector<Edge> edges;
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) {
      if (w[k] != 0.0) edges.push_back({i, j, w[k]});
    }
  }
  return Graph(n, std::move(edges));
}

Eigen::MatrixXd adjacency_from_pair_weights(int n, const Eigen::VectorXd& w) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) {
      a(i, j) = w[k];
      a(j, i) = w[k];
    }
  }
  return a;
}

Eigen::VectorXd pair_row_sums(int n, const Eigen::VectorXd& w) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) {
      r[i] += w[k];
      r[j] += w[k];
    }
  }
  return r;
}

namespace {

void check_generator_args(double p, double wlo, double whi) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidProbability, format_double(p));
  if (!(wlo >= 0.0 && wlo <= whi) || !std::isfinite(whi)) {
    throw Error(ErrorCode::InvalidRange, "[" + format_double(wlo) + ", " + format_double(whi) + "]");
  }
}

}  // namespace

Graph random_graph(int n, double p, double wlo, double whi, std::uint64_t seed) {
  Rng rng(seed);
  return random_graph(n, p, wlo, whi, rng);
}

Graph random_graph(int n, double p, double wlo, double whi, Rng& rng) {
  check_generator_args(p, wlo, whi);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // Both draws happen for every pair so the stream layout is independent of p.
      const bool keep = rng.bernoulli(p);
      const double w = rng.uniform(wlo, whi);
      if (keep) edges.push_back({i, j, w});
    }
  }
  return Graph(n, std::move(edges));
}

Graph two_community_graph(int n, double p_in, double p_out, double wlo, double whi, Rng& rng) {
  check_generator_args(p_in, wlo, whi);
  check_generator_args(p_out, wlo, whi);
  const int half = n / 2;
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool same = (i < half) == (j < half);
      const bool keep = rng.bernoulli(same ? p_in : p_out);
      const double w = rng.uniform(wlo, whi);
      if (keep) edges.push_back({i, j, w});
    }
  }
  return Graph(n, std::move(edges));
}

Graph preferential_attachment_graph(int n, int links, Rng& rng) {
  if (links < 1) throw Error(ErrorCode::InvalidArgument, "links must be >= 1");
  std::vector<Edge> edges;
  // Each endpoint occurrence is one ticket; sampling a ticket is degree-proportional.
  std::vector<int> tickets;
  const int seed_nodes = std::min(n, links + 1);
  for (int i = 0; i < seed_nodes; ++i) {
    for (int j = i + 1; j < seed_nodes; ++j) {
      edges.push_back({i, j, 1.0});
      tickets.push_back(i);
      tickets.push_back(j);
    }
  }
  for (int v = seed_nodes; v < n; ++v) {
    std::vector<int> targets;
    while (static_cast<int>(targets.size()) < links) {
      const int t = tickets[rng.below(tickets.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    std::sort(targets.begin(), targets.end());
    for (int t : targets) {
      edges.push_back({t, v, 1.0});
      tickets.push_back(t);
      tickets.push_back(v);
    }
  }
  return Graph(n, std::move(edges));
}

Graph complete_graph(int n, double w) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, w});
  }
  return Graph(n, std::move(edges));
}

}  // namespace polarize
