// Spectrum summary of the Gaussian Hessian for d = 1..3 in all three scalings.

#include <cstdio>

#include "strichartz/hessian.hpp"

int main() {
  using namespace strichartz;
  const int nmax[] = {40, 10, 8};
  std::printf("d,N,convention,negative,zero,positive,min,gap\n");
  for (int d = 1; d <= 3; ++d) {
    for (auto c : {HessianConvention::gram_shift, HessianConvention::iminus, HessianConvention::second_variation}) {
      const auto s = spectrum_gaussian(d, nmax[d - 1], c);
      std::printf("%d,%d,%s,%zu,%zu,%zu,%.6g,%.6g\n", d, nmax[d - 1], to_string(c).c_str(), s.spectrum.negative,
                  s.spectrum.zero, s.spectrum.positive, s.spectrum.min(), s.gap);
    }
  }
}
