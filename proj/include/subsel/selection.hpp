#pragma once

// Greedy column selection driven by a single lower barrier.
//
// The input is reduced to orthonormal rows by a thin LQ decomposition. Each
// iteration advances the barrier by the guaranteed delta, picks the column
// that minimizes the potential at the advanced barrier, and then moves the
// barrier with either the fixed-potential (principled) rule or the
// lookahead-guided (heuristic) rule.

#include "subsel/barrier.hpp"
#include "subsel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace subsel {

enum class Strategy { principled, heuristic };

inline const char* to_string(Strategy s) {
  return s == Strategy::principled ? "principled" : "heuristic";
}

struct SelectionConfig {
  int k = 0;
  Strategy strategy = Strategy::heuristic;
  bool trace_enabled = true;
};

/// Record of iteration `iter`: the state (l, epsilon) it started from, the
/// barrier advance used for scoring, the chosen column (0-based), the
/// potential phi_{l+delta}(Y_{iter+1}), and how the next state was produced.
struct IterationTrace {
  int iter = 0;
  double l = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  Index chosen_index = -1;
  double potential_after = 0.0;
  bool heuristic_applied = false;
  /// B_{iter+1}(l_{iter+1}) for the next state; NaN after the last iteration.
  double lookahead_value = std::numeric_limits<double>::quiet_NaN();
};

struct SelectionOutcome {
  /// Selected columns in selection order.
  std::vector<Index> indices;
  /// lambda_min(Q_S Q_S^T) recomputed from the selected columns.
  double final_lambda_min = 0.0;
  /// b0(m, k, n).
  double certified_lower_bound = 0.0;
  /// l_{k-1} + delta_{k-1}: the last barrier known to sit below the spectrum.
  double final_barrier = 0.0;
  std::vector<IterationTrace> trace;
};

/// Raised when a guarantee of the method fails to hold numerically.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One line per iteration: iter,l,epsilon,delta,chosen_index,potential_after,heuristic_applied
inline std::string trace_to_text(std::span<const IterationTrace> trace) {
  std::string out;
  char buf[256];
  for (const auto& t : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%td,%.17g,%d\n", t.iter, t.l, t.epsilon,
                  t.delta, t.chosen_index, t.potential_after, t.heuristic_applied ? 1 : 0);
    out += buf;
  }
  return out;
}

/// Open right end of a barrier search interval, lambda_min - eta.
inline double below_spectrum(double lambda_min) {
  return lambda_min - 1e-12 * std::max(1.0, std::abs(lambda_min));
}

inline Matrix gram_of_columns(const Matrix& Q, std::span<const Index> cols) {
  Matrix Y = Matrix::Zero(Q.rows(), Q.rows());
  for (Index j : cols) Y.selfadjointView<Eigen::Lower>().rankUpdate(Q.col(j));
  return Y.selfadjointView<Eigen::Lower>();
}

/// Working state of a selection run on an orthonormal-row matrix.
struct WorkingState {
  Matrix Q;
  int k = 0;
  Matrix Y;
  EigenDecomposition eig;
  std::vector<bool> taken;
  std::vector<Index> selected;
  BarrierState barrier;

  WorkingState(Matrix orthonormal_rows, int k_target) : Q(std::move(orthonormal_rows)), k(k_target) {
    const Index m = Q.rows();
    Y = Matrix::Zero(m, m);
    eig = EigenDecomposition{Vector::Zero(m), Matrix::Identity(m, m)};
    taken.assign(static_cast<std::size_t>(Q.cols()), false);
    const double eps0 = epsilon_opt(static_cast<int>(m), k, static_cast<int>(Q.cols()));
    barrier = BarrierState{-static_cast<double>(m) / eps0, eps0, 0};
  }

  int m() const { return static_cast<int>(Q.rows()); }
  int n() const { return static_cast<int>(Q.cols()); }
};

/// phi_{l'}(Y + x_j x_j^T) for every column j; +inf for taken columns.
/// Candidates are rotated into the eigenbasis of Y so each score costs O(m).
inline std::vector<double> candidate_potentials(const EigenDecomposition& eig, const Matrix& Q,
                                                double l_prime, const std::vector<bool>& taken) {
  const Index m = Q.rows();
  const Vector inv = (eig.eigenvalues.array() - l_prime).inverse().matrix();
  const Vector inv2 = inv.cwiseProduct(inv);
  const double base = inv.sum();
  const Matrix Z = eig.basis.transpose() * Q;

  std::vector<double> out(static_cast<std::size_t>(Q.cols()),
                          std::numeric_limits<double>::infinity());
  for (Index j = 0; j < Q.cols(); ++j) {
    if (taken[static_cast<std::size_t>(j)]) continue;
    CandidateScore s;
    for (Index r = 0; r < m; ++r) {
      const double z2 = Z(r, j) * Z(r, j);
      s.a += z2 * inv(r);
      s.b += z2 * inv2(r);
    }
    out[static_cast<std::size_t>(j)] = phi_rank1_update(base, s);
  }
  return out;
}

/// Selects one column: advance by delta_i, take the argmin of the updated
/// potential (smallest index on ties), and refresh Y and its spectrum. The
/// barrier is left for the caller to update.
inline IterationTrace greedy_step(WorkingState& st) {
  const int i = st.barrier.iter;
  if (i >= st.k) throw std::logic_error("greedy_step: all k columns already selected");

  IterationTrace t;
  t.iter = i;
  t.l = st.barrier.l;
  t.epsilon = st.barrier.epsilon;
  t.delta = solve_delta(st.barrier.l, st.barrier.epsilon, st.m(), st.n(), i).delta_star;

  const double l_prime = st.barrier.l + t.delta;
  const std::vector<double> pot = candidate_potentials(st.eig, st.Q, l_prime, st.taken);
  Index best = -1;
  double best_value = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < st.Q.cols(); ++j) {
    const double v = pot[static_cast<std::size_t>(j)];
    if (v < best_value) {
      best_value = v;
      best = j;
    }
  }
  if (best < 0) throw InvariantError("greedy_step: no candidate with a finite score");

  t.chosen_index = best;
  t.potential_after = best_value;
  st.taken[static_cast<std::size_t>(best)] = true;
  st.selected.push_back(best);
  st.Y.selfadjointView<Eigen::Lower>().rankUpdate(st.Q.col(best));
  st.Y = Matrix(st.Y.selfadjointView<Eigen::Lower>());
  st.eig = sym_eig(st.Y);
  st.barrier.iter = i + 1;
  return t;
}

/// Fixed-potential update: solve phi_l(Y_next) = eps on [l_prev, lambda_min).
/// Returns the bracket end with phi <= eps, so the new barrier never
/// overshoots. Any l_prev with phi_{l_prev}(Y_next) <= eps is a valid start,
/// in particular l_i + delta_i after a greedy step.
inline BarrierState principled_update(std::span<const double> next_eigenvalues, double l_prev,
                                      double eps_prev) {
  const double lambda_min = *std::min_element(next_eigenvalues.begin(), next_eigenvalues.end());
  const double hi = below_spectrum(lambda_min);
  if (!(l_prev < hi)) {
    throw InvariantError("principled_update: starting barrier is not below the spectrum");
  }
  auto f = [&](double l) { return phi(next_eigenvalues, l); };
  const double at_start = f(l_prev);
  if (at_start >= eps_prev) {
    if (at_start <= eps_prev * (1.0 + detail::kStateSlack)) return BarrierState{l_prev, eps_prev, 0};
    throw InvariantError("principled_update: potential at the starting barrier exceeds eps");
  }
  if (f(hi) < eps_prev) {
    // Only possible when eta is below the resolution of the potential.
    return BarrierState{hi, eps_prev, 0};
  }
  const Bracket br = bisect_bracket(f, l_prev, hi, eps_prev);
  return BarrierState{br.below, eps_prev, 0};
}

struct BarrierUpdate {
  BarrierState state;
  bool heuristic_applied = false;
  /// B at the returned state.
  double lookahead_value = 0.0;
};

/// B_{cols}(l) with eps = phi_l(Y); -inf where the quadratic is undefined.
inline double lookahead_at(std::span<const double> eigenvalues, double l, int n, int cols,
                           int k) {
  const int m = static_cast<int>(eigenvalues.size());
  try {
    return lookahead_B(l, phi(eigenvalues, l), m, n, cols, k);
  } catch (const std::domain_error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

/// Weight of l_min in the aggressive phase, (k - iter - 2) / m, once
/// iter + 1 >= k - m; empty during the conservative phase.
inline std::optional<double> heuristic_blend_weight(int iter, int k, int m) {
  if (iter + 1 < k - m) return std::nullopt;
  return static_cast<double>(k - iter - 2) / m;
}

/// Adaptive update after iteration `iter` (so iter + 1 columns are taken).
/// Picks a barrier between the lowest one keeping B >= b0 and the maximizer
/// of B, then reverts to principled_update if the candidate fails the
/// safety check. `l_prev` is the start of the fallback bracket.
inline BarrierUpdate heuristic_update(std::span<const double> next_eigenvalues, int iter, int k,
                                      int n, double l_prev, double eps_prev, double B0) {
  const int m = static_cast<int>(next_eigenvalues.size());
  if (m < 2) throw std::invalid_argument("heuristic_update: requires m > 1");
  const int cols = iter + 1;
  auto B = [&](double l) { return lookahead_at(next_eigenvalues, l, n, cols, k); };
  auto fallback = [&]() {
    const BarrierState s = principled_update(next_eigenvalues, l_prev, eps_prev);
    return BarrierUpdate{s, false, lookahead_B(s.l, s.epsilon, m, n, cols, k)};
  };

  const double lambda_min = *std::min_element(next_eigenvalues.begin(), next_eigenvalues.end());
  const double left = heuristic_left_end(m);
  const double right = below_spectrum(lambda_min);
  if (!(left < right)) return fallback();

  const double l_opt = golden_max(B, left, right);
  const double b_opt = B(l_opt);
  if (!(b_opt >= B0) || B(left) > B0) return fallback();

  double l_min = l_opt;
  try {
    l_min = bisect_bracket(B, left, l_opt, B0).above;
  } catch (const BracketError&) {
    return fallback();
  }

  double l_trial = l_min;
  if (const auto weight = heuristic_blend_weight(iter, k, m)) {
    l_trial = *weight * l_min + (1.0 - *weight) * l_opt;
  }
  if (!(l_trial < right)) return fallback();
  const double b_trial = B(l_trial);
  if (!(b_trial >= B0)) return fallback();
  return BarrierUpdate{BarrierState{l_trial, phi(next_eigenvalues, l_trial), 0}, true, b_trial};
}

namespace detail {

[[noreturn]] inline void breach(const std::string& what, std::span<const IterationTrace> trace) {
  throw InvariantError(what + "\ntrace (iter,l,epsilon,delta,chosen_index,potential_after,"
                              "heuristic_applied):\n" +
                       trace_to_text(trace));
}

}  // namespace detail

/// Runs the selection on a matrix that already has orthonormal rows.
inline SelectionOutcome select_orthonormal(const Matrix& Q, const SelectionConfig& config) {
  const int m = static_cast<int>(Q.rows());
  const int n = static_cast<int>(Q.cols());
  const int k = config.k;
  if (m < 1 || m > n || k < m || k > n) {
    throw std::invalid_argument("select: need 1 <= m <= k <= n, got m=" + std::to_string(m) +
                                " k=" + std::to_string(k) + " n=" + std::to_string(n));
  }
  const bool use_heuristic = config.strategy == Strategy::heuristic && m > 1;
  const double B0 = b0(m, k, n);

  WorkingState st(Q, k);
  std::vector<IterationTrace> trace;
  trace.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    IterationTrace t = greedy_step(st);
    const bool last = i == k - 1;
    trace.push_back(t);
    if (!(t.potential_after <= t.epsilon * (1.0 + detail::kStateSlack))) {
      detail::breach("select: potential increased at iteration " + std::to_string(i), trace);
    }
    if (last) break;

    const std::span<const double> eigs(st.eig.eigenvalues.data(),
                                       static_cast<std::size_t>(st.eig.eigenvalues.size()));
    // phi_{l+delta}(Y_{i+1}) <= eps, so the bracket can start at l + delta.
    const double start =
        t.potential_after <= t.epsilon ? t.l + t.delta : t.l;
    BarrierUpdate upd;
    if (use_heuristic) {
      upd = heuristic_update(eigs, i, k, n, start, t.epsilon, B0);
    } else {
      const BarrierState s = principled_update(eigs, start, t.epsilon);
      upd = BarrierUpdate{s, false, lookahead_at(eigs, s.l, n, i + 1, k)};
    }
    trace.back().heuristic_applied = upd.heuristic_applied;
    trace.back().lookahead_value = upd.lookahead_value;
    st.barrier = BarrierState{upd.state.l, upd.state.epsilon, i + 1};
  }

  SelectionOutcome out;
  out.indices = st.selected;
  out.certified_lower_bound = B0;
  out.final_barrier = trace.back().l + trace.back().delta;
  out.final_lambda_min = sym_eig(gram_of_columns(Q, out.indices)).lambda_min();
  if (!(out.final_lambda_min >= B0 * (1.0 - detail::kStateSlack))) {
    detail::breach("select: final lambda_min " + std::to_string(out.final_lambda_min) +
                       " below guaranteed " + std::to_string(B0),
                   trace);
  }
  if (config.trace_enabled) out.trace = std::move(trace);
  return out;
}

/// Selects k columns of a full-row-rank m x n matrix.
inline SelectionOutcome select(const Matrix& X, const SelectionConfig& config) {
  if (X.rows() < 1 || X.rows() > X.cols()) {
    throw std::invalid_argument("select: need a wide matrix with at least one row");
  }
  return select_orthonormal(lq(X).Q, config);
}

/// Recomputes lambda_min(Y_k) from the selected columns and checks it against
/// both the potential bound at the final barrier and b0(m, k, n).
inline bool certify(const SelectionOutcome& outcome, const Matrix& Q) {
  const int m = static_cast<int>(Q.rows());
  const int n = static_cast<int>(Q.cols());
  const int k = static_cast<int>(outcome.indices.size());
  if (k < m || k > n) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (Index j : outcome.indices) {
    if (j < 0 || j >= n || seen[static_cast<std::size_t>(j)]) return false;
    seen[static_cast<std::size_t>(j)] = true;
  }
  const EigenDecomposition eig = sym_eig(gram_of_columns(Q, outcome.indices));
  const double lambda_min = eig.lambda_min();
  const std::span<const double> eigs(eig.eigenvalues.data(),
                                     static_cast<std::size_t>(eig.eigenvalues.size()));
  const double slack = detail::kStateSlack;
  if (!(outcome.final_barrier < lambda_min)) return false;
  const double potential_bound = outcome.final_barrier + 1.0 / phi(eigs, outcome.final_barrier);
  if (!(lambda_min >= potential_bound - slack * std::max(1.0, std::abs(potential_bound)))) {
    return false;
  }
  return lambda_min >= b0(m, k, n) * (1.0 - slack);
}

}  // namespace subsel
