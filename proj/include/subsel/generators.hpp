#pragma once

// Seeded instance generators. All randomness comes from std::mt19937_64,
// whose output sequence is fixed by the standard, and is turned into
// uniforms and Gaussians here rather than through <random> distributions
// (whose algorithms vary between standard libraries).

#include "subsel/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace subsel {

struct RngSeed {
  std::uint64_t seed = 0;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// SplitMix64 finalizer, used to derive independent seed streams.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), bound > 0, by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

  /// Standard normal by the Box-Muller transform, both outputs used.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Column-major fill with standard normals.
inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix G(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) G(i, j) = rng.gaussian();
  return G;
}

/// Rows of G orthonormalized in order, with the sign fixed so the triangular
/// factor has a positive diagonal.
inline Matrix orthonormalize_rows(const Matrix& G) {
  const Index m = G.rows(), n = G.cols();
  Eigen::HouseholderQR<Matrix> qr(G.transpose());
  Matrix thin_q = qr.householderQ() * Matrix::Identity(n, m);
  for (Index j = 0; j < m; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) thin_q.col(j) *= -1.0;
  }
  return thin_q.transpose();
}

/// First m rows of a Haar-distributed n x n orthogonal matrix.
inline Matrix orthonormal_rows(Index m, Index n, RngSeed seed) {
  if (m < 1 || m > n) throw std::invalid_argument("orthonormal_rows: need 1 <= m <= n");
  Rng rng(seed);
  return orthonormalize_rows(gaussian_matrix(m, n, rng));
}

/// U diag(sigma) V with sigma log-spaced from 1 down to 1/condition_target.
inline Matrix full_rank_matrix(Index m, Index n, double condition_target, RngSeed seed) {
  if (m < 1 || m > n) throw std::invalid_argument("full_rank_matrix: need 1 <= m <= n");
  if (!(condition_target >= 1.0)) {
    throw std::invalid_argument("full_rank_matrix: condition_target must be >= 1");
  }
  Rng rng(seed);
  const Matrix U = orthonormalize_rows(gaussian_matrix(m, m, rng));
  const Matrix V = orthonormalize_rows(gaussian_matrix(m, n, rng));
  Vector sigma(m);
  for (Index i = 0; i < m; ++i) {
    const double t = m == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(m - 1);
    sigma(i) = std::pow(condition_target, -t);
  }
  return U * sigma.asDiagonal() * V;
}

struct Edge {
  int u = 0;
  int v = 0;
  double w = 0.0;
};

struct WeightedGraph {
  int vertex_count = 0;
  std::vector<Edge> edges;
};

/// How edges are drawn when the requested count exceeds the number of
/// vertex pairs.
enum class EdgeMultiplicity {
  /// Distinct pairs only; too many edges is a parameter error.
  simple,
  /// Every pair appears floor(n / P) times and the remaining n mod P edges
  /// are distinct pairs, P = number of pairs. Identical to `simple` when
  /// n <= P.
  balanced,
};

inline std::int64_t pair_count(int vertices) {
  return static_cast<std::int64_t>(vertices) * (vertices - 1) / 2;
}

/// Pair number p in lexicographic order of (u, v), u < v.
inline std::pair<int, int> decode_pair(std::int64_t p, int vertices) {
  int u = 0;
  std::int64_t row = vertices - 1;
  while (p >= row) {
    p -= row;
    ++u;
    --row;
  }
  return {u, u + 1 + static_cast<int>(p)};
}

class DisjointSets {
 public:
  explicit DisjointSets(int size) : parent_(static_cast<std::size_t>(size)), components_(size) {
    for (int i = 0; i < size; ++i) parent_[static_cast<std::size_t>(i)] = i;
  }

  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent_[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      --components_;
    }
  }

  int components() const { return components_; }

 private:
  std::vector<int> parent_;
  int components_;
};

inline bool is_connected(const WeightedGraph& g) {
  DisjointSets sets(g.vertex_count);
  for (const Edge& e : g.edges) sets.unite(e.u, e.v);
  return sets.components() == 1;
}

/// (m+1) x n signed incidence matrix; edge e contributes +sqrt(w) at the
/// smaller endpoint and -sqrt(w) at the larger one, so B B^T is the
/// weighted Laplacian.
inline Matrix incidence_matrix(const WeightedGraph& g) {
  Matrix B = Matrix::Zero(g.vertex_count, static_cast<Index>(g.edges.size()));
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const double s = std::sqrt(g.edges[e].w);
    B(g.edges[e].u, static_cast<Index>(e)) = s;
    B(g.edges[e].v, static_cast<Index>(e)) = -s;
  }
  return B;
}

inline constexpr int kGraphRetries = 1000;

struct GraphInstance {
  Matrix X;
  WeightedGraph graph;
};

/// Random connected weighted graph on m + 1 vertices with n edges, and the
/// m x n matrix of right singular vectors of its incidence matrix that
/// belong to the m nonzero singular values.
inline GraphInstance graph_instance(int m, int n, RngSeed seed,
                                    EdgeMultiplicity multiplicity = EdgeMultiplicity::simple) {
  if (m < 1 || n < m) throw std::invalid_argument("graph_instance: need 1 <= m <= n");
  const int vertices = m + 1;
  const std::int64_t pairs = pair_count(vertices);
  if (multiplicity == EdgeMultiplicity::simple && n > pairs) {
    throw std::invalid_argument("graph_instance: " + std::to_string(n) +
                                " edges exceed the simple-graph capacity " +
                                std::to_string(pairs) + " of " + std::to_string(vertices) +
                                " vertices");
  }
  const std::int64_t full_rounds = n / pairs;
  const std::int64_t remainder = n % pairs;

  Rng rng(seed);
  std::vector<std::int64_t> pool(static_cast<std::size_t>(pairs));
  WeightedGraph g;
  g.vertex_count = vertices;
  bool connected = false;
  for (int attempt = 0; attempt < kGraphRetries && !connected; ++attempt) {
    g.edges.clear();
    for (std::int64_t r = 0; r < full_rounds; ++r)
      for (std::int64_t p = 0; p < pairs; ++p) {
        const auto [u, v] = decode_pair(p, vertices);
        g.edges.push_back(Edge{u, v, 0.0});
      }
    // Partial Fisher-Yates over pair numbers.
    for (std::int64_t p = 0; p < pairs; ++p) pool[static_cast<std::size_t>(p)] = p;
    for (std::int64_t t = 0; t < remainder; ++t) {
      const auto pick = t + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(pairs - t)));
      std::swap(pool[static_cast<std::size_t>(t)], pool[static_cast<std::size_t>(pick)]);
      const auto [u, v] = decode_pair(pool[static_cast<std::size_t>(t)], vertices);
      g.edges.push_back(Edge{u, v, 0.0});
    }
    connected = is_connected(g);
  }
  if (!connected) {
    throw GenerationError("graph_instance: no connected graph after " +
                          std::to_string(kGraphRetries) + " attempts (m=" + std::to_string(m) +
                          ", n=" + std::to_string(n) + ")");
  }
  for (Edge& e : g.edges) e.w = rng.uniform_open();

  const Matrix B = incidence_matrix(g);
  Eigen::BDCSVD<Matrix> svd(B, Eigen::ComputeThinV);
  GraphInstance out;
  out.X = svd.matrixV().leftCols(m).transpose();
  out.graph = std::move(g);
  return out;
}

/// Edge-list text: header `p graph <vertices> <edges>`, then one `u v w`
/// line per edge with 1-based vertex numbers.
inline void write_edge_list(std::ostream& os, const WeightedGraph& g) {
  os << "p graph " << g.vertex_count << ' ' << g.edges.size() << '\n';
  char buf[64];
  for (const Edge& e : g.edges) {
    std::snprintf(buf, sizeof buf, "%.17g", e.w);
    os << e.u + 1 << ' ' << e.v + 1 << ' ' << buf << '\n';
  }
}

inline WeightedGraph read_edge_list(std::istream& is) {
  std::string p, kind;
  long long vertices = 0, edges = 0;
  if (!(is >> p >> kind >> vertices >> edges) || p != "p" || kind != "graph" || vertices < 1 ||
      edges < 0) {
    throw std::runtime_error("read_edge_list: bad header, expected `p graph <vertices> <edges>`");
  }
  WeightedGraph g;
  g.vertex_count = static_cast<int>(vertices);
  for (long long e = 0; e < edges; ++e) {
    long long u = 0, v = 0;
    double w = 0.0;
    if (!(is >> u >> v >> w)) {
      throw std::runtime_error("read_edge_list: truncated at edge " + std::to_string(e + 1));
    }
    if (u < 1 || v < 1 || u > vertices || v > vertices || u == v) {
      throw std::runtime_error("read_edge_list: bad endpoints at edge " + std::to_string(e + 1));
    }
    g.edges.push_back(Edge{static_cast<int>(u - 1), static_cast<int>(v - 1), w});
  }
  return g;
}

}  // namespace subsel
