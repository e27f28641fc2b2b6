#include "wframes/reference.hpp"

#include <cmath>

namespace wframes::ref {

BandStructure band_structure(const BlochModel& model, const KGrid& grid, bool store_vectors) {
  BandStructure bs;
  bs.grid = grid;
  bs.fiber = model.fiber_dim();
  bs.eigenvalues.resize(grid.size());
  if (store_vectors) bs.eigenvectors.resize(grid.size());
  for (long idx = 0; idx < grid.size(); ++idx) {
    Eigen::SelfAdjointEigenSolver<Mat> es;
    es.compute(model.bloch_hamiltonian(grid.kpoint(idx)),
               store_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw Error(ErrKind::numerical_failure,
                  "eigensolver did not converge at k index " + std::to_string(idx));
    bs.eigenvalues[idx] = es.eigenvalues();
    if (store_vectors) bs.eigenvectors[idx] = es.eigenvectors();
  }
  return bs;
}

ProjectorField eigensum_projectors(const BandStructure& bands, const SpectralWindow& window) {
  const ResolvedWindow rw = resolve_window(bands, window);
  ProjectorField field;
  field.grid = bands.grid;
  field.fiber = bands.fiber;
  field.rank = rw.m;
  field.p.resize(bands.grid.size());
  for (long idx = 0; idx < bands.grid.size(); ++idx) {
    const Mat v = bands.eigenvectors[idx].middleCols(rw.first[idx], rw.m);
    field.p[idx] = v * v.adjoint();
  }
  field.smoothness = projector_smoothness(field.p, bands.grid);
  return field;
}

BlochSectionSet bloch_transform(const LatticeFunction& f) {
  const KGrid& grid = f.grid;
  const long n = grid.size();
  BlochSectionSet out;
  out.grid = grid;
  out.fiber = f.fiber;
  out.count = 1;
  out.psi.assign(1, std::vector<Vec>(n));
  for (long ik = 0; ik < n; ++ik) {
    const auto mk = grid.multi(ik);
    Vec acc = Vec::Zero(f.fiber);
    for (long ig = 0; ig < n; ++ig) {
      const auto mg = grid.multi(ig);
      double phase = 0.0;
      for (int j = 0; j < grid.dim(); ++j)
        phase += 2.0 * pi * double(mk[j]) * double(mg[j]) / double(grid.n(j));
      acc += std::polar(1.0, -phase) * f.values[ig];
    }
    out.psi[0][ik] = acc;
  }
  return out;
}

LatticeFunction synthesize_section(const KGrid& grid, const std::vector<Vec>& section) {
  const long n = grid.size();
  LatticeFunction f;
  f.grid = grid;
  f.fiber = static_cast<int>(section[0].size());
  f.values.resize(n);
  for (long ig = 0; ig < n; ++ig) {
    const auto mg = grid.multi(ig);
    Vec acc = Vec::Zero(f.fiber);
    for (long ik = 0; ik < n; ++ik) {
      const auto mk = grid.multi(ik);
      double phase = 0.0;
      for (int j = 0; j < grid.dim(); ++j)
        phase += 2.0 * pi * double(mk[j]) * double(mg[j]) / double(grid.n(j));
      acc += std::polar(1.0, phase) * section[ik];
    }
    f.values[ig] = acc / double(n);
  }
  return f;
}

double chern_sum(const ProjectorField& field, int a, int b, int slice) {
  const KGrid& grid = field.grid;
  const int na = grid.n(a), nb = grid.n(b);
  std::vector<Mat> frames(static_cast<std::size_t>(na) * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      std::array<int, 3> m{0, 0, 0};
      for (int dir = 0; dir < grid.dim(); ++dir) m[dir] = slice;
      m[a] = i;
      m[b] = j;
      frames[static_cast<std::size_t>(i) * nb + j] = field.frame(grid.index(m));
    }
  auto at = [&](int i, int j) -> const Mat& {
    return frames[static_cast<std::size_t>(KGrid::mod(i, na)) * nb + KGrid::mod(j, nb)];
  };
  double total = 0.0;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      // same loop orientation as the parallel kernel
      const cxd prod = (at(i, j).adjoint() * at(i, j + 1)).determinant() *
                       (at(i, j + 1).adjoint() * at(i + 1, j + 1)).determinant() *
                       (at(i + 1, j + 1).adjoint() * at(i + 1, j)).determinant() *
                       (at(i + 1, j).adjoint() * at(i, j)).determinant();
      total += std::arg(prod);
    }
  return total / (2.0 * pi);
}

}  // namespace wframes::ref
