#pragma once

// Test-only reference computations. Everything here is written independently
// of the library's solver paths: plain loops, Gauss–Jordan elimination, and
// exhaustive enumeration.

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "polarize/graph.hpp"
#include "polarize/rng.hpp"

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Instance {
  polarize::Graph g;
  Vec s;
};

inline Vec random_opinions(int n, polarize::Rng& rng) {
  Vec s(n);
  for (int i = 0; i < n; ++i) s[i] = rng.uniform();
  return s;
}

inline Instance random_instance(std::uint64_t seed, int n, double p, double wlo = 0.1,
                                double whi = 2.0) {
  polarize::Rng rng(seed);
  auto g = polarize::random_graph(n, p, wlo, whi, rng);
  return {std::move(g), random_opinions(n, rng)};
}

// Gauss–Jordan inverse with partial pivoting.
inline Mat gauss_inverse(Mat a) {
  const auto n = a.rows();
  Mat inv = Mat::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    a.row(col).swap(a.row(pivot));
    inv.row(col).swap(inv.row(pivot));
    const double d = a(col, col);
    a.row(col) /= d;
    inv.row(col) /= d;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = a(r, col);
      if (factor == 0.0) continue;
      a.row(r) -= factor * a.row(col);
      inv.row(r) -= factor * inv.row(col);
    }
  }
  return inv;
}

// W from the edge list, L = diag(rowsum) - W, both by loops.
inline Mat dense_adjacency(const polarize::Graph& g) {
  Mat w = Mat::Zero(g.n(), g.n());
  for (const auto& e : g.edges()) {
    w(e.u, e.v) += e.w;
    w(e.v, e.u) += e.w;
  }
  return w;
}

inline Mat fj_inverse(const polarize::Graph& g) {
  Mat w = dense_adjacency(g);
  Mat a = -w;
  for (int i = 0; i < g.n(); ++i) a(i, i) = 1.0 + w.row(i).sum();
  return gauss_inverse(a);
}

inline Vec equilibrium(const polarize::Graph& g, const Vec& s) { return fj_inverse(g) * s; }

inline double variance_sum(const Vec& z) {
  double mean = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) mean += z[i];
  mean /= static_cast<double>(z.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) total += (z[i] - mean) * (z[i] - mean);
  return total;
}

// Half the sum over ordered pairs of the dense matrix.
inline double pairwise_disagreement(const polarize::Graph& g, const Vec& z) {
  const Mat w = dense_adjacency(g);
  double total = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < g.n(); ++j) total += w(i, j) * (z[i] - z[j]) * (z[i] - z[j]);
  }
  return 0.5 * total;
}

inline Vec central_difference(const std::function<double(const Vec&)>& f, const Vec& x,
                              double h) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1e-12, std::abs(a), std::abs(b)});
}

inline double min_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

// Largest objective over every subset of exactly k nodes and every 0/1
// assignment to it, by bitmask enumeration over all 2^n subsets.
inline double exhaustive_attack(const polarize::Graph& g, const Vec& s_hat, int k,
                                bool polarization_objective) {
  const int n = g.n();
  const Mat inv = fj_inverse(g);
  auto value = [&](const Vec& s) {
    const Vec z = inv * s;
    return polarization_objective ? variance_sum(z) : pairwise_disagreement(g, z);
  };
  double best = value(s_hat);
  if (k == 0) return best;
  best = -1.0;
  for (std::uint32_t subset = 0; subset < (1U << n); ++subset) {
    if (__builtin_popcount(subset) != k) continue;
    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (subset & (1U << i)) members.push_back(i);
    }
    for (std::uint32_t bits = 0; bits < (1U << k); ++bits) {
      Vec s = s_hat;
      for (int t = 0; t < k; ++t) s[members[t]] = (bits >> t) & 1U;
      best = std::max(best, value(s));
    }
  }
  return best;
}

}  // namespace oracle
