#ifndef WFRAMES_TESTS_ORACLES_HPP
#define WFRAMES_TESTS_ORACLES_HPP

#include <cmath>

#include "wframes/types.hpp"

// Test-only oracles, independent of the library code paths they check.
namespace oracles {

// Degree of the unit h-field of the planar two-band family
// h = (sin k1, sin k2, u + cos k1 + cos k2), by midpoint quadrature with
// exact analytic derivatives. Under the library's pinned orientation the
// lower-band Chern number equals this degree.
inline double qwz_degree(double u, int n) {
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double k1 = 2 * wframes::pi * (i + 0.5) / n;
      const double k2 = 2 * wframes::pi * (j + 0.5) / n;
      const double h[3] = {std::sin(k1), std::sin(k2), u + std::cos(k1) + std::cos(k2)};
      const double d1[3] = {std::cos(k1), 0.0, -std::sin(k1)};
      const double d2[3] = {0.0, std::cos(k2), -std::sin(k2)};
      const double cross[3] = {d1[1] * d2[2] - d1[2] * d2[1], d1[2] * d2[0] - d1[0] * d2[2],
                               d1[0] * d2[1] - d1[1] * d2[0]};
      const double num = h[0] * cross[0] + h[1] * cross[1] + h[2] * cross[2];
      const double nrm = std::sqrt(h[0] * h[0] + h[1] * h[1] + h[2] * h[2]);
      total += num / (nrm * nrm * nrm);
    }
  total *= (2 * wframes::pi / n) * (2 * wframes::pi / n);
  return total / (4 * wframes::pi);
}

}  // namespace oracles

#endif
