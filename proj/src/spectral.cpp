#include "wframes/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wframes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
// Legendre recurrence.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(pi * (i + 0.75) / (n + 0.5));
    double p1 = t, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      p1 = t;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

struct ContourNode {
  cxd z;
  cxd w;  // includes dz and the 1/(2 pi i) prefactor
};

// Composite Gauss-Legendre on the four sides of the rectangle, q_pts nodes
// in total allocated proportionally to side length. The resolvent is
// analytic in a neighborhood of each side, so the per-side error decays
// geometrically; 256 nodes reach roundoff for the gapped gallery windows.
std::vector<ContourNode> rectangle_contour(double x0, double x1, double y, int q_pts) {
  const std::array<cxd, 4> corner = {cxd(x1, -y), cxd(x1, y), cxd(x0, y), cxd(x0, -y)};
  std::array<double, 4> len;
  double total = 0.0;
  for (int s = 0; s < 4; ++s) {
    len[s] = std::abs(corner[(s + 1) % 4] - corner[s]);
    total += len[s];
  }
  std::array<int, 4> n;
  int used = 0;
  for (int s = 0; s < 4; ++s) {
    n[s] = std::max(4, static_cast<int>(std::floor(q_pts * len[s] / total)));
    used += n[s];
  }
  n[1] += q_pts > used ? q_pts - used : 0;

  std::vector<ContourNode> nodes;
  const cxd pref = 1.0 / (2.0 * pi * cxd(0, 1));
  std::vector<double> gx, gw;
  for (int s = 0; s < 4; ++s) {
    const cxd za = corner[s], zb = corner[(s + 1) % 4];
    gauss_legendre(n[s], gx, gw);
    for (int i = 0; i < n[s]; ++i) {
      ContourNode nd;
      nd.z = 0.5 * (za + zb) + 0.5 * (zb - za) * gx[i];
      nd.w = pref * 0.5 * (zb - za) * gw[i];
      nodes.push_back(nd);
    }
  }
  return nodes;
}

}  // namespace

Mat ProjectorField::frame(long idx) const {
  Eigen::SelfAdjointEigenSolver<Mat> es(p[idx]);
  if (es.info() != Eigen::Success)
    throw Error(ErrKind::numerical_failure, "projector eigendecomposition failed at k index " +
                                                std::to_string(idx));
  // eigenvalues ascend; the trailing `rank` columns span Ran P
  return es.eigenvectors().rightCols(rank);
}

void ProjectorField::validate(double tol) const {
  for (long idx = 0; idx < grid.size(); ++idx) {
    const Mat& m = p[idx];
    const double idem = (m * m - m).norm();
    const double herm = hermitian_deviation(m);
    const double tr = std::abs(m.trace().real() - rank) + std::abs(m.trace().imag());
    if (idem > tol || herm > tol || tr > tol) {
      std::ostringstream os;
      os << "projector invariants violated at k index " << idx << " (idempotency " << idem
         << ", hermiticity " << herm << ", trace deviation " << tr << ")";
      throw Error(ErrKind::numerical_failure, os.str());
    }
  }
}

BandStructure band_structure(const BlochModel& model, const KGrid& grid, bool store_vectors) {
  if ((model.lattice().basis - grid.lattice().basis).norm() > 1e-14)
    throw Error(ErrKind::config, "model and grid use different lattices");
  BandStructure bs;
  bs.grid = grid;
  bs.fiber = model.fiber_dim();
  const long n = grid.size();
  bs.eigenvalues.resize(n);
  if (store_vectors) bs.eigenvectors.resize(n);

  int bad = -1;
#pragma omp parallel
  {
    Eigen::SelfAdjointEigenSolver<Mat> es;
#pragma omp for schedule(static)
    for (long idx = 0; idx < n; ++idx) {
      es.compute(model.bloch_hamiltonian(grid.kpoint(idx)),
                 store_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success) {
#pragma omp critical
        bad = static_cast<int>(idx);
        continue;
      }
      bs.eigenvalues[idx] = es.eigenvalues();
      if (store_vectors) bs.eigenvectors[idx] = es.eigenvectors();
    }
  }
  if (bad >= 0)
    throw Error(ErrKind::numerical_failure,
                "eigensolver did not converge at k index " + std::to_string(bad));
  return bs;
}

ResolvedWindow resolve_window(const BandStructure& bands, const SpectralWindow& window) {
  const long n = bands.grid.size();
  ResolvedWindow rw;
  rw.first.resize(n);
  if (window.kind == SpectralWindow::Kind::bands) {
    if (window.lo < 1 || window.hi < window.lo || window.hi > bands.fiber) {
      std::ostringstream os;
      os << "band window [" << window.lo << ", " << window.hi << "] out of range for fiber dimension "
         << bands.fiber;
      throw Error(ErrKind::config, os.str());
    }
    rw.m = window.hi - window.lo + 1;
    std::fill(rw.first.begin(), rw.first.end(), window.lo - 1);
    return rw;
  }
  if (!(window.emin < window.emax))
    throw Error(ErrKind::config, "energy window must satisfy emin < emax");
  rw.m = -1;
  for (long idx = 0; idx < n; ++idx) {
    const RVec& ev = bands.eigenvalues[idx];
    int first = -1, count = 0;
    for (int j = 0; j < ev.size(); ++j) {
      if (ev(j) >= window.emin && ev(j) <= window.emax) {
        if (first < 0) first = j;
        ++count;
      }
    }
    if (count == 0)
      throw Error(ErrKind::not_isolated, "energy window selects no band at k index " +
                                             std::to_string(idx));
    if (rw.m < 0) rw.m = count;
    if (count != rw.m) {
      std::ostringstream os;
      os << "window selects " << rw.m << " bands at k index 0 but " << count << " at k index " << idx;
      throw Error(ErrKind::not_isolated, os.str());
    }
    rw.first[idx] = first;
  }
  return rw;
}

GapReport gap_check(const BandStructure& bands, const SpectralWindow& window, double gap_tol) {
  const ResolvedWindow rw = resolve_window(bands, window);
  const long n = bands.grid.size();
  GapReport rep;
  rep.m = rw.m;
  rep.below = kInf;
  rep.above = kInf;
  for (long idx = 0; idx < n; ++idx) {
    const RVec& ev = bands.eigenvalues[idx];
    const int lo = rw.first[idx];
    const int hi = lo + rw.m - 1;
    if (lo > 0) rep.below = std::min(rep.below, ev(lo) - ev(lo - 1));
    if (hi < ev.size() - 1) rep.above = std::min(rep.above, ev(hi + 1) - ev(hi));
  }
  if (!(rep.below > gap_tol) || !(rep.above > gap_tol)) {
    std::ostringstream os;
    os << "window is not separated by gaps (gap_below " << rep.below << ", gap_above " << rep.above
       << ", tolerance " << gap_tol << ")";
    throw Error(ErrKind::gapless, os.str());
  }
  return rep;
}

ProjectorField projector_field(const BlochModel& model, const KGrid& grid,
                               const SpectralWindow& window, ProjectorMethod method, int q_pts,
                               double gap_tol, double validate_tol) {
  BandStructure bands = band_structure(model, grid, method == ProjectorMethod::eigensum);
  return projector_field(bands, model, window, method, q_pts, gap_tol, validate_tol);
}

ProjectorField projector_field(const BandStructure& bands, const BlochModel& model,
                               const SpectralWindow& window, ProjectorMethod method, int q_pts,
                               double gap_tol, double validate_tol) {
  const KGrid& grid = bands.grid;
  const long n = grid.size();
  const int d = bands.fiber;
  gap_check(bands, window, gap_tol);
  const ResolvedWindow rw = resolve_window(bands, window);

  ProjectorField field;
  field.grid = grid;
  field.fiber = d;
  field.rank = rw.m;
  field.p.resize(n);

  if (method == ProjectorMethod::eigensum) {
    if (!bands.has_vectors())
      throw Error(ErrKind::config, "eigensum projector needs stored eigenvectors");
#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < n; ++idx) {
      const Mat v = bands.eigenvectors[idx].middleCols(rw.first[idx], rw.m);
      field.p[idx] = v * v.adjoint();
    }
  } else {
    // Rectangle at the indirect mid-gap energies; a k-independent contour
    // needs the window bands to stay strictly between those lines.
    double win_min = kInf, win_max = -kInf, below_max = -kInf, above_min = kInf, radius = 0.0;
    for (long idx = 0; idx < n; ++idx) {
      const RVec& ev = bands.eigenvalues[idx];
      const int lo = rw.first[idx];
      const int hi = lo + rw.m - 1;
      win_min = std::min(win_min, ev(lo));
      win_max = std::max(win_max, ev(hi));
      if (lo > 0) below_max = std::max(below_max, ev(lo - 1));
      if (hi < d - 1) above_min = std::min(above_min, ev(hi + 1));
      radius = std::max(radius, std::max(std::abs(ev(0)), std::abs(ev(d - 1))));
    }
    const double y = radius + 1.0;
    const double x0 = (below_max > -kInf) ? 0.5 * (below_max + win_min) : -y;
    const double x1 = (above_min < kInf) ? 0.5 * (win_max + above_min) : y;
    if (below_max > -kInf && !(below_max < x0 && x0 < win_min))
      throw Error(ErrKind::contour_placement, "lower contour edge touches the spectrum");
    if (above_min < kInf && !(win_max < x1 && x1 < above_min))
      throw Error(ErrKind::contour_placement, "upper contour edge touches the spectrum");
    // rank constancy inside the contour
    for (long idx = 0; idx < n; ++idx) {
      const RVec& ev = bands.eigenvalues[idx];
      int inside = 0;
      for (int j = 0; j < d; ++j) inside += (ev(j) > x0 && ev(j) < x1) ? 1 : 0;
      if (inside != rw.m)
        throw Error(ErrKind::contour_placement,
                    "contour encloses " + std::to_string(inside) + " bands at k index " +
                        std::to_string(idx) + ", expected " + std::to_string(rw.m));
    }

    const auto nodes = rectangle_contour(x0, x1, y, q_pts);
#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < n; ++idx) {
      const Mat h = model.bloch_hamiltonian(grid.kpoint(idx));
      Mat acc = Mat::Zero(d, d);
      Mat shifted(d, d);
      for (const auto& nd : nodes) {
        shifted = -h;
        shifted.diagonal().array() += nd.z;
        acc += nd.w * shifted.partialPivLu().inverse();
      }
      field.p[idx] = 0.5 * (acc + acc.adjoint());
    }
  }

  field.smoothness = projector_smoothness(field.p, grid);
  field.validate(validate_tol);
  return field;
}

double projector_smoothness(const std::vector<Mat>& p, const KGrid& grid) {
  double c = 0.0;
  for (long idx = 0; idx < grid.size(); ++idx)
    for (int dir = 0; dir < grid.dim(); ++dir) {
      const double diff = (p[grid.shifted(idx, dir, 1)] - p[idx]).norm();
      c = std::max(c, diff / grid.step_len(dir));
    }
  return c;
}

ProjectorField projector_from_function(const KGrid& grid, int fiber,
                                       const std::function<Mat(const RVec&, long)>& fn) {
  ProjectorField field;
  field.grid = grid;
  field.fiber = fiber;
  field.p.resize(grid.size());
  for (long idx = 0; idx < grid.size(); ++idx) field.p[idx] = fn(grid.kpoint(idx), idx);
  field.rank = static_cast<int>(std::lround(field.p[0].trace().real()));
  field.smoothness = projector_smoothness(field.p, grid);
  return field;
}

ProjectorField direct_sum(const ProjectorField& a, const ProjectorField& b) {
  if (a.grid.size() != b.grid.size())
    throw Error(ErrKind::config, "direct sum needs fields on the same grid");
  ProjectorField field;
  field.grid = a.grid;
  field.fiber = a.fiber + b.fiber;
  field.rank = a.rank + b.rank;
  field.p.resize(a.grid.size());
  for (long idx = 0; idx < a.grid.size(); ++idx) {
    Mat m = Mat::Zero(field.fiber, field.fiber);
    m.topLeftCorner(a.fiber, a.fiber) = a.p[idx];
    m.bottomRightCorner(b.fiber, b.fiber) = b.p[idx];
    field.p[idx] = m;
  }
  field.smoothness = std::max(a.smoothness, b.smoothness);
  return field;
}

ProjectorField conjugate_field(const ProjectorField& a) {
  ProjectorField field = a;
  for (auto& m : field.p) m = m.conjugate();
  return field;
}

}  // namespace wframes
