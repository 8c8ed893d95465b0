// Selects k columns of a random well-conditioned matrix and compares the
// achieved pseudoinverse norm with the guarantee.

#include "subsel/subsel.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
  const int m = argc > 1 ? std::atoi(argv[1]) : 5;
  const int n = argc > 2 ? std::atoi(argv[2]) : 60;
  const int k = argc > 3 ? std::atoi(argv[3]) : 12;

  const subsel::Matrix X = subsel::full_rank_matrix(m, n, 10.0, subsel::RngSeed{42});
  const subsel::SelectionOutcome out =
      subsel::select(X, subsel::SelectionConfig{k, subsel::Strategy::heuristic, true});

  const double full = subsel::smallest_singular_value(X).sigma_min;
  const double sub = subsel::smallest_singular_value(subsel::select_columns(X, out.indices)).sigma_min;
  std::printf("selected:");
  for (auto j : out.indices) std::printf(" %td", j);
  std::printf("\n||X_S^+||^2 / ||X^+||^2 = %.6f  (guarantee %.6f)\n",
              (full * full) / (sub * sub), subsel::bound_tight(m, k, n));
  std::printf("%s", subsel::trace_to_text(out.trace).c_str());
  return 0;
}
