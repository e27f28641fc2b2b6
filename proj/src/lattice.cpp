#include "wframes/lattice.hpp"

#include <cmath>
#include <sstream>

namespace wframes {

Lattice Lattice::make(int dim, const RMat& basis) {
  if (dim < 1 || dim > 3)
    throw Error(ErrKind::config, "lattice dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (basis.rows() != dim || basis.cols() != dim)
    throw Error(ErrKind::config, "basis matrix must be dim x dim");
  if (std::abs(basis.determinant()) <= 1e-12)
    throw Error(ErrKind::degenerate_lattice, "basis matrix is numerically singular");
  Lattice l;
  l.dim = dim;
  l.basis = basis;
  return l;
}

Lattice Lattice::cubic(int dim) { return make(dim, RMat::Identity(dim, dim)); }

Lattice Lattice::hexagonal() {
  RMat a(2, 2);
  a << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
  return make(2, a);
}

RMat Lattice::reciprocal() const {
  if (std::abs(basis.determinant()) <= 1e-12)
    throw Error(ErrKind::degenerate_lattice, "basis matrix is numerically singular");
  // (b_i, a_j) = 2 pi delta_ij  <=>  B = 2 pi A^{-T}
  return 2.0 * pi * basis.inverse().transpose();
}

KGrid KGrid::make(const Lattice& lattice, const std::vector<int>& sizes) {
  if (static_cast<int>(sizes.size()) != lattice.dim)
    throw Error(ErrKind::config, "grid needs exactly one size per lattice dimension");
  KGrid g;
  g.lattice_ = lattice;
  g.recip_ = lattice.reciprocal();
  g.total_ = 1;
  for (int j = 0; j < lattice.dim; ++j) {
    if (sizes[j] < 2) {
      std::ostringstream os;
      os << "grid size N_" << (j + 1) << " = " << sizes[j] << " is below the minimum of 2";
      throw Error(ErrKind::grid_too_coarse, os.str());
    }
    g.n_[j] = sizes[j];
    g.total_ *= sizes[j];
  }
  return g;
}

}  // namespace wframes
