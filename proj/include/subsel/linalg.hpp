#pragma once

// Dense linear algebra and scalar search primitives used by the selection
// loop. Factorizations are delegated to Eigen.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace subsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when the input matrix does not have full row rank.
class RankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a bracketing search is given an interval that does not
/// straddle the target.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigenvalues in non-increasing order and the matching orthonormal basis
/// (column r of `basis` belongs to eigenvalues[r]).
struct EigenDecomposition {
  Vector eigenvalues;
  Matrix basis;

  double lambda_min() const { return eigenvalues(eigenvalues.size() - 1); }
  double lambda_max() const { return eigenvalues(0); }
};

/// X = L Q with L lower triangular and Q having orthonormal rows.
struct LQFactors {
  Matrix L;
  Matrix Q;
};

inline EigenDecomposition sym_eig(const Matrix& Y) {
  if (Y.rows() != Y.cols()) throw std::invalid_argument("sym_eig: matrix is not square");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(Y, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("sym_eig: eigen solver failed to converge");
  }
  // Eigen returns ascending order.
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.basis = solver.eigenvectors().rowwise().reverse();
  return out;
}

/// Thin LQ decomposition of a wide full-row-rank matrix, diag(L) > 0.
inline LQFactors lq(const Matrix& X) {
  const Index m = X.rows();
  const Index n = X.cols();
  if (m == 0 || m > n) {
    throw std::invalid_argument("lq: need 0 < rows <= cols, got " + std::to_string(m) + "x" +
                                std::to_string(n));
  }
  // X^T = Q~ R  =>  X = R^T Q~^T.
  Eigen::HouseholderQR<Matrix> qr(X.transpose());
  Matrix R = qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
  Matrix thin_q = qr.householderQ() * Matrix::Identity(n, m);

  const double scale = X.cwiseAbs().maxCoeff();
  for (Index j = 0; j < m; ++j) {
    if (!(std::abs(R(j, j)) > 1e-12 * scale)) {
      throw RankError("lq: input is rank deficient (pivot " + std::to_string(j) + ")");
    }
    if (R(j, j) < 0.0) {
      R.row(j) *= -1.0;
      thin_q.col(j) *= -1.0;
    }
  }
  return LQFactors{R.transpose(), thin_q.transpose()};
}

struct SingularValueSummary {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  /// sigma_min <= 1e-10 sigma_max, or fewer columns than rows.
  bool singular = true;
};

/// Smallest of the min(rows, cols) singular values. A matrix with fewer
/// columns than rows is reported singular with sigma_min = 0.
inline SingularValueSummary smallest_singular_value(const Matrix& A) {
  SingularValueSummary out;
  if (A.size() == 0) return out;
  const Vector sv = Eigen::BDCSVD<Matrix>(A).singularValues();
  out.sigma_max = sv(0);
  out.sigma_min = A.cols() < A.rows() ? 0.0 : sv(sv.size() - 1);
  out.singular = A.cols() < A.rows() || !(out.sigma_min > 1e-10 * out.sigma_max);
  return out;
}

/// Final bracket of a bisection: f(below) <= target <= f(above).
struct Bracket {
  double below = 0.0;
  double above = 0.0;
  double f_below = 0.0;
  double f_above = 0.0;
};

inline constexpr int kBisectionMaxIter = 200;
inline constexpr int kGoldenIterations = 80;

/// Bisection on [lo, hi] for f(x) = target, keeping track of which side is
/// below and which above the target. Stops at 200 iterations, at an exact
/// hit, or once the bracket width is 1e-13 max(1, |lo|, |hi|).
inline Bracket bisect_bracket(const std::function<double(double)>& f, double lo, double hi,
                              double target) {
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  const double g_lo = f_lo - target;
  const double g_hi = f_hi - target;
  if (!(g_lo * g_hi <= 0.0)) {
    throw BracketError("bisect: target not bracketed by [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  }
  Bracket br = g_lo <= 0.0 ? Bracket{lo, hi, f_lo, f_hi} : Bracket{hi, lo, f_hi, f_lo};
  if (g_lo == 0.0) return Bracket{lo, lo, f_lo, f_lo};
  if (g_hi == 0.0) return Bracket{hi, hi, f_hi, f_hi};

  const double xtol = 1e-13 * std::max({1.0, std::abs(lo), std::abs(hi)});
  for (int it = 0; it < kBisectionMaxIter; ++it) {
    if (std::abs(br.above - br.below) <= xtol) break;
    const double mid = 0.5 * (br.below + br.above);
    if (mid == br.below || mid == br.above) break;
    const double f_mid = f(mid);
    if (f_mid == target) return Bracket{mid, mid, f_mid, f_mid};
    if (f_mid < target) {
      br.below = mid;
      br.f_below = f_mid;
    } else {
      br.above = mid;
      br.f_above = f_mid;
    }
  }
  return br;
}

/// Root of f(x) = target for monotone f on [lo, hi]. Returns as soon as
/// |f(x) - target| <= 1e-9 max(1, |target|) or the bracket has collapsed.
inline double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                          double target) {
  const double ftol = 1e-9 * std::max(1.0, std::abs(target));
  bool hit = false;
  double hit_x = 0.0;
  auto probe = [&](double x) {
    const double v = f(x);
    if (!hit && std::abs(v - target) <= ftol) {
      hit = true;
      hit_x = x;
      return target;  // collapses the bracket onto x
    }
    return v;
  };
  const Bracket br = bisect_bracket(probe, lo, hi, target);
  if (hit) return hit_x;
  return std::abs(br.f_below - target) <= std::abs(br.f_above - target) ? br.below : br.above;
}

/// Golden-section search for a maximizer of f on [lo, hi], assuming
/// unimodality. Runs a fixed 80 iterations and returns the midpoint of the
/// final interval; the result is only a candidate.
inline double golden_max(const std::function<double(double)>& f, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("golden_max: need lo < hi");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < kGoldenIterations; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace subsel
