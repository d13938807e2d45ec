#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "outpost/potential.hpp"

namespace testing_support {

using outpost::cplx;
using outpost::kPi;

// Points f(rho e^{i theta}) with rho drawn from [lo, hi].
inline std::vector<cplx> exterior_points(const outpost::Model& m, int count, double lo, double hi, unsigned seed = 1) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ur(lo, hi), ut(0.0, 2 * kPi);
  std::vector<cplx> out;
  for (int i = 0; i < count; ++i) out.push_back(m.frame().map().f(std::polar(ur(gen), ut(gen))));
  return out;
}

// (1/2 pi i) contour integral of conj(zeta) / (z - zeta) d zeta over the image of |w| = rho.
inline cplx cauchy_transform(const outpost::ExteriorMap& map, double rho, cplx z, int N = 4096) {
  cplx acc = 0.0;
  for (int k = 0; k < N; ++k) {
    cplx w = std::polar(rho, 2 * kPi * k / N);
    cplx zeta = map.f(w);
    cplx dzeta = map.df(w) * cplx(0, 1) * w;
    acc += std::conj(zeta) / (z - zeta) * dzeta;
  }
  return acc * (2 * kPi / N) / cplx(0, 2 * kPi);
}

}  // namespace testing_support
