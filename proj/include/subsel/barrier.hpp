#pragma once

// Scalar mathematics of the single lower-barrier potential method.
//
// Everything here is a pure function of its arguments. The potential of a
// symmetric matrix Y at level l < lambda_min(Y) is
//
//     phi_l(Y) = tr (Y - l I)^{-1} = sum_j 1 / (lambda_j - l),
//
// and the guaranteed barrier advance delta for potential eps, with i of n
// columns already taken, is the smaller root of
//
//     c (1 - eps delta) = delta (1 - eps delta / m),   c = (1 - l - m/eps) / (n - i).

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>

namespace subsel {

/// Moving state of the barrier method after `iter` columns were selected.
struct BarrierState {
  double l = 0.0;
  double epsilon = 0.0;
  int iter = 0;
};

/// Both roots of the delta quadratic. `delta_star` is the one the method uses.
struct DeltaRoot {
  double delta_star = 0.0;
  double delta_large = 0.0;
};

/// a = x^T (Y - l'I)^{-1} x, b = x^T (Y - l'I)^{-2} x for one candidate x.
struct CandidateScore {
  double a = 0.0;
  double b = 0.0;
};

namespace detail {

[[noreturn]] inline void domain_fail(const char* op, const std::string& what) {
  throw std::domain_error(std::string(op) + ": " + what);
}

inline std::string fmt_args(std::initializer_list<std::pair<const char*, double>> args) {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [name, value] : args) {
    os << (first ? "" : ", ") << name << "=" << value;
    first = false;
  }
  return os.str();
}

inline void check_triple(const char* op, int m, int k, int n) {
  if (m < 1 || m > k || k > n) {
    domain_fail(op, "need 1 <= m <= k <= n, got " +
                        fmt_args({{"m", m}, {"k", k}, {"n", n}}));
  }
}

// Relative slack for identities that accumulate rounding over many steps.
inline constexpr double kStateSlack = 1e-9;

}  // namespace detail

/// True when eps lies in the admissible potential range: (0,1) for m = 1,
/// (0,inf) otherwise.
inline bool in_potential_range(int m, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) return false;
  return m > 1 || epsilon < 1.0;
}

inline double phi(std::span<const double> eigenvalues, double l) {
  if (eigenvalues.empty()) detail::domain_fail("phi", "empty spectrum");
  const double lambda_min = *std::min_element(eigenvalues.begin(), eigenvalues.end());
  if (!(l < lambda_min)) {
    detail::domain_fail("phi", "barrier not below spectrum: " +
                                   detail::fmt_args({{"l", l}, {"lambda_min", lambda_min}}));
  }
  double sum = 0.0;
  for (double lambda : eigenvalues) sum += 1.0 / (lambda - l);
  return sum;
}

/// Sherman-Morrison: phi_{l'}(Y + x x^T) = phi_{l'}(Y) - b / (1 + a).
inline double phi_rank1_update(double phi_at_lprime, CandidateScore score) {
  if (!(1.0 + score.a > 0.0)) {
    detail::domain_fail("phi_rank1_update", "1 + a must be positive, " +
                                                detail::fmt_args({{"a", score.a}}));
  }
  return phi_at_lprime - score.b / (1.0 + score.a);
}

/// Smaller root of the delta quadratic for barrier l and potential eps with
/// i of n columns selected.
inline DeltaRoot solve_delta(double l, double epsilon, int m, int n, int i) {
  if (m < 1 || i < 0 || i >= n) {
    detail::domain_fail("solve_delta", "need m >= 1 and 0 <= i < n, " +
                                           detail::fmt_args({{"m", m}, {"n", n}, {"i", i}}));
  }
  if (!in_potential_range(m, epsilon)) {
    detail::domain_fail("solve_delta", "potential outside admissible range, " +
                                           detail::fmt_args({{"epsilon", epsilon}, {"m", m}}));
  }
  const double m_over_eps = m / epsilon;
  double slack = 1.0 - l - m_over_eps;
  if (slack < 0.0) {
    // Y <= I only holds up to rounding, so a hair below zero is accepted.
    const double scale = std::max({1.0, std::abs(l), m_over_eps});
    if (slack < -detail::kStateSlack * scale) {
      detail::domain_fail("solve_delta", "barrier above 1 - m/eps, " +
                                             detail::fmt_args({{"l", l}, {"epsilon", epsilon}}));
    }
    slack = 0.0;
  }
  const double c = slack / static_cast<double>(n - i);

  // (eps/m) d^2 - (1 + c eps) d + c = 0. The larger root has no cancellation;
  // the smaller one follows from the product of roots c m / eps.
  const double b = 1.0 + c * epsilon;
  const double disc = std::max(0.0, b * b - 4.0 * c * epsilon / m);
  const double q = b + std::sqrt(disc);
  DeltaRoot root;
  root.delta_large = q * m / (2.0 * epsilon);
  root.delta_star = 2.0 * c / q;
  return root;
}

inline double gamma(int m, double epsilon, double delta) {
  if (!(delta >= 0.0) || !(epsilon * delta < 1.0)) {
    detail::domain_fail("gamma", "need 0 <= delta < 1/eps, " +
                                     detail::fmt_args({{"delta", delta}, {"epsilon", epsilon}}));
  }
  return delta * (1.0 - epsilon * delta / m) / (1.0 - epsilon * delta);
}

/// Potential level maximizing the certified final lambda_min. For m = 1 any
/// value in (0,1) is valid and 0.5 is used.
inline double epsilon_opt(int m, int k, int n) {
  detail::check_triple("epsilon_opt", m, k, n);
  if (m == 1) return 0.5;
  const double md = m, kd = k, nd = n;
  const double alpha = std::sqrt((kd - 1.0) * md + 1.0);
  const double num = 2.0 * (alpha - 1.0) + md * (kd * (alpha + md - 2.0) - 2.0 * alpha - md + 3.0);
  const double den = (kd - 1.0) * md * (kd - md + 1.0);
  return nd * num / den;
}

/// Guaranteed upper bound on ||X_S^+||_2^2 / ||X^+||_2^2.
inline double bound_tight(int m, int k, int n) {
  detail::check_triple("bound_tight", m, k, n);
  const double nd = n;
  if (m == 1) return nd / k;  // covers the removable singularity at m = k = 1
  const double alpha = std::sqrt((k - 1.0) * m + 1.0);
  const double ratio = (alpha - 1.0) / (alpha - k);
  return nd / m * ratio * ratio;
}

/// n / (sqrt(k) - sqrt(m - 1))^2, never smaller than bound_tight.
inline double bound_loose(int m, int k, int n) {
  detail::check_triple("bound_loose", m, k, n);
  const double gap = std::sqrt(static_cast<double>(k)) - std::sqrt(m - 1.0);
  return n / (gap * gap);
}

/// Guaranteed lower bound on lambda_min(Y_k) for orthonormal-row input.
inline double b0(int m, int k, int n) { return 1.0 / bound_tight(m, k, n); }

/// Lower bound on the final lambda_min(Y_k) reachable from a state with
/// `cols_selected` columns taken, barrier l and eps = phi_l(Y), if the
/// remaining steps keep the potential fixed.
inline double lookahead_B(double l, double epsilon, int m, int n, int cols_selected, int k) {
  if (cols_selected < 0 || cols_selected > k) {
    detail::domain_fail("lookahead_B", "need 0 <= cols_selected <= k, " +
                                           detail::fmt_args({{"cols_selected", cols_selected},
                                                             {"k", k}}));
  }
  const int remaining = k - cols_selected;
  if (remaining == 0) return l + 1.0 / epsilon;
  const DeltaRoot root = solve_delta(l, epsilon, m, n, cols_selected);
  return l + remaining * root.delta_star + 1.0 / epsilon;
}

/// Left end of the heuristic search interval; B is non-positive there.
inline double heuristic_left_end(int m) {
  if (m < 2) detail::domain_fail("heuristic_left_end", "requires m > 1");
  return -(m + 1.0) / (m - 1.0);
}

}  // namespace subsel
