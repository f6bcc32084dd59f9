// Positive-eigenvalue counts of the constrained Hessian at f_m, m = 1..M.
// Usage: demo_mode_ratios [M] [K]

#include <cstdio>
#include <cstdlib>

#include "strichartz/hessian.hpp"

int main(int argc, char** argv) {
  const int M = argc > 1 ? std::atoi(argv[1]) : 20;
  const int K = argc > 2 ? std::atoi(argv[2]) : strichartz::kDefaultTailCutoff;
  std::printf("m,block_positive,tail_positive,ratio\n");
  for (int m = 1; m <= M; ++m) {
    const auto r = strichartz::positive_ratio(m, K);
    std::printf("%d,%zu,%zu,%.6f\n", m, r.block_positive, r.tail_positive, r.ratio);
  }
}
