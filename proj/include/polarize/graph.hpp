#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace polarize {

class Rng;

struct Edge {
  int u;
  int v;
  double w;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  int node;
  double w;
};

/// Weighted undirected simple graph.
///
/// Each undirected pair is stored once with u < v, edges sorted by (u, v).
/// Zero-weight edges are dropped on construction, so every stored edge has
/// w > 0. Immutable after construction.
class Graph {
 public:
  Graph() = default;
  // Throws Error{SelfLoop, DuplicateEdge, NegativeWeight, IndexOutOfRange}.
  // Endpoint order within an edge does not matter.
  Graph(int n, std::vector<Edge> edges);

  int n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Neighbor> neighbors(int i) const { return adj_[i]; }

  std::optional<double> weight(int i, int j) const;

  Eigen::VectorXd degrees() const;
  double max_degree() const;
  // Number of nonzero off-diagonal entries in row i of W.
  int connection_count(int i) const { return static_cast<int>(adj_[i].size()); }
  double total_weight() const;

  Eigen::MatrixXd adjacency() const;
  // L = D - W, dense.
  Eigen::MatrixXd laplacian() const;
  // y = L x without forming L.
  Eigen::VectorXd apply_laplacian(const Eigen::VectorXd& x) const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adj_;
};

// Edge-list text format: header `n=<count>`, then one `i,j,w` line per edge
// (comma or tab separated). Blank lines and lines starting with '#' are skipped.
Graph parse_edge_list(std::string_view text);
std::string serialize_edge_list(const Graph& g);

// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

// Weight vector over all n(n-1)/2 unordered pairs, ordered (0,1),(0,2),...,(n-2,n-1).
std::size_t pair_count(int n);
std::size_t pair_index(int n, int i, int j);
Eigen::VectorXd pair_weights(const Graph& g);
Graph graph_from_pair_weights(int n, const Eigen::VectorXd& w);
// Fills both triangles of a symmetric matrix from pair weights.
Eigen::MatrixXd adjacency_from_pair_weights(int n, const Eigen::VectorXd& w);
// Row sums of the symmetric matrix encoded by w: (A w)_i = sum_j w_ij.
Eigen::VectorXd pair_row_sums(int n, const Eigen::VectorXd& w);

// Erdős–Rényi G(n, p) with weights uniform in [wlo, whi].
Graph random_graph(int n, double p, double wlo, double whi, std::uint64_t seed);
Graph random_graph(int n, double p, double wlo, double whi, Rng& rng);

// Two equal blocks {0..n/2-1}, {n/2..n-1}; pairs within a block connect with
// p_in, across with p_out.
Graph two_community_graph(int n, double p_in, double p_out, double wlo, double whi, Rng& rng);

// Preferential attachment: each new node links to `links` distinct existing
// nodes chosen proportionally to degree. Unit weights; heavy-tailed degrees.
Graph preferential_attachment_graph(int n, int links, Rng& rng);

Graph complete_graph(int n, double w);

}  // namespace polarize
