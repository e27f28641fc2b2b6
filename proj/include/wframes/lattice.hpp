#ifndef WFRAMES_LATTICE_HPP
#define WFRAMES_LATTICE_HPP

#include <array>
#include <vector>

#include "wframes/types.hpp"

namespace wframes {

// Bravais lattice in dimension 1..3. Columns of `basis` are the primitive
// vectors a_1..a_dim in Cartesian coordinates.
struct Lattice {
  int dim = 0;
  RMat basis;

  static Lattice make(int dim, const RMat& basis);
  static Lattice cubic(int dim);                  // identity basis
  static Lattice hexagonal();                     // a1=(1,0), a2=(1/2,sqrt3/2)

  // Reciprocal basis b_1..b_dim as columns, (b_i, a_j) = 2*pi*delta_ij.
  RMat reciprocal() const;
};

// Uniform Gamma-centered grid on the Brillouin torus. Integer grid indices
// are the source of truth; Cartesian points are derived. Iteration is
// row-major in (m_1,...,m_dim), last index fastest.
class KGrid {
 public:
  static KGrid make(const Lattice& lattice, const std::vector<int>& sizes);

  int dim() const { return lattice_.dim; }
  long size() const { return total_; }
  int n(int dir) const { return n_[dir]; }
  const Lattice& lattice() const { return lattice_; }
  const RMat& reciprocal() const { return recip_; }

  long index(const std::array<int, 3>& m) const {
    long idx = 0;
    for (int j = 0; j < lattice_.dim; ++j) idx = idx * n_[j] + mod(m[j], n_[j]);
    return idx;
  }
  std::array<int, 3> multi(long idx) const {
    std::array<int, 3> m{0, 0, 0};
    for (int j = lattice_.dim - 1; j >= 0; --j) {
      m[j] = static_cast<int>(idx % n_[j]);
      idx /= n_[j];
    }
    return m;
  }
  RVec kpoint(long idx) const {
    const auto m = multi(idx);
    RVec frac = RVec::Zero(lattice_.dim);
    for (int j = 0; j < lattice_.dim; ++j) frac(j) = double(m[j]) / double(n_[j]);
    return recip_ * frac;
  }
  // Periodic neighbor along grid direction `dir`.
  long shifted(long idx, int dir, int step) const {
    auto m = multi(idx);
    m[dir] = mod(m[dir] + step, n_[dir]);
    return index(m);
  }
  // Cartesian length of one grid step along direction `dir`.
  double step_len(int dir) const { return recip_.col(dir).norm() / n_[dir]; }

  static int mod(int a, int n) {
    int r = a % n;
    return r < 0 ? r + n : r;
  }

 private:
  Lattice lattice_;
  std::array<int, 3> n_{1, 1, 1};
  long total_ = 0;
  RMat recip_;
};

}  // namespace wframes

#endif
