#pragma once

// Test-only reference computations. These go through explicit inverses,
// full SVDs and enumeration, never through the library's fast paths.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// tr (Y - l I)^{-1} by explicit inversion.
inline double trace_inverse(const Matrix& Y, double l) {
  const Matrix shifted = Y - l * Matrix::Identity(Y.rows(), Y.cols());
  return shifted.inverse().trace();
}

inline Vector singular_values(const Matrix& A) {
  return Eigen::JacobiSVD<Matrix>(A).singularValues();
}

/// ||A^+||_2^2 for a full-row-rank A; +inf if singular.
inline double pinv_spectral_sq(const Matrix& A) {
  if (A.cols() < A.rows()) return std::numeric_limits<double>::infinity();
  const Vector sv = singular_values(A);
  const double smin = sv(sv.size() - 1);
  if (!(smin > 1e-12 * sv(0))) return std::numeric_limits<double>::infinity();
  return 1.0 / (smin * smin);
}

/// ||A^+||_F^2 = sum 1 / sigma_i^2.
inline double pinv_frobenius_sq(const Matrix& A) {
  if (A.cols() < A.rows()) return std::numeric_limits<double>::infinity();
  const Vector sv = singular_values(A);
  double s = 0.0;
  for (Index i = 0; i < sv.size(); ++i) s += 1.0 / (sv(i) * sv(i));
  return s;
}

inline Matrix columns(const Matrix& X, const std::vector<Index>& cols) {
  Matrix out(X.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Index>(c)) = X.col(cols[c]);
  return out;
}

/// Smallest ||X_S^+||_2^2 over all size-k subsets.
inline double best_subset_pinv_sq(const Matrix& X, int k) {
  const int n = static_cast<int>(X.cols());
  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  std::fill(mask.begin(), mask.begin() + k, true);
  double best = std::numeric_limits<double>::infinity();
  do {
    std::vector<Index> cols;
    for (int j = 0; j < n; ++j)
      if (mask[static_cast<std::size_t>(j)]) cols.push_back(j);
    best = std::min(best, pinv_spectral_sq(columns(X, cols)));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

/// Indices of the k largest |v_j|, ties to the smaller index, in that order.
inline std::vector<Index> top_k_by_magnitude(const Vector& v, int k) {
  std::vector<Index> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return std::abs(v(a)) > std::abs(v(b)); });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

/// Random symmetric PSD matrix G G^T with G m x (m + 2) Gaussian.
inline Matrix random_psd(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix G(m, m + 2);
  for (Index i = 0; i < G.size(); ++i) G.data()[i] = g(rng);
  return G * G.transpose();
}

/// Best certified lambda_min over a grid of eps' = eps delta_0 in (0, 1):
/// delta_0 (k - (m - 1) / eps') with delta_0 = (1 - eps') / (n (1 - eps'/m)).
struct GridOptimum {
  double objective;
  double epsilon;
};

inline GridOptimum grid_optimal_epsilon(int m, int k, int n, int points) {
  GridOptimum best{-std::numeric_limits<double>::infinity(), 0.0};
  for (int p = 1; p < points; ++p) {
    const double ep = static_cast<double>(p) / points;
    const double d0 = (1.0 - ep) / (n * (1.0 - ep / m));
    const double obj = d0 * (k - (m - 1) / ep);
    if (obj > best.objective) best = GridOptimum{obj, ep / d0};
  }
  return best;
}

}  // namespace oracle
