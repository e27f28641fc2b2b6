#include "wframes/topology.hpp"

#include <cmath>
#include <sstream>

namespace wframes {

namespace {

// Frames of Ran P on the (a, b) sub-grid at a fixed transverse slice. The
// eigensolver is hoisted per thread; per-point construction of tiny dynamic
// matrices serializes on the allocator otherwise.
std::vector<Mat> slice_frames(const ProjectorField& field, int a, int b, int slice) {
  const KGrid& grid = field.grid;
  const int na = grid.n(a), nb = grid.n(b);
  std::vector<Mat> frames(static_cast<std::size_t>(na) * nb);
  std::exception_ptr err;
#pragma omp parallel
  {
    Eigen::SelfAdjointEigenSolver<Mat> es;
#pragma omp for schedule(static)
    for (long t = 0; t < static_cast<long>(frames.size()); ++t) {
      try {
        const int i = static_cast<int>(t / nb);
        const int j = static_cast<int>(t % nb);
        std::array<int, 3> m{0, 0, 0};
        for (int dir = 0; dir < grid.dim(); ++dir) m[dir] = slice;
        m[a] = i;
        m[b] = j;
        es.compute(field.p[grid.index(m)]);
        if (es.info() != Eigen::Success)
          throw Error(ErrKind::numerical_failure,
                      "projector eigendecomposition failed on the Chern slice");
        frames[t] = es.eigenvectors().rightCols(field.rank);
      } catch (...) {
#pragma omp critical
        err = std::current_exception();
      }
    }
  }
  if (err) std::rethrow_exception(err);
  return frames;
}

}  // namespace

std::vector<std::pair<int, int>> coordinate_planes(int dim) {
  std::vector<std::pair<int, int>> planes;
  for (int a = 0; a < dim; ++a)
    for (int b = a + 1; b < dim; ++b) planes.emplace_back(a, b);
  return planes;
}

int ChernReport::chern(int a, int b) const {
  for (const auto& e : entries)
    if (e.a == a && e.b == b) return e.c;
  throw Error(ErrKind::config, "no Chern entry for the requested plane");
}

std::map<std::pair<int, int>, int> ChernReport::negated() const {
  std::map<std::pair<int, int>, int> t;
  for (const auto& e : entries) t[{e.a, e.b}] = -e.c;
  return t;
}

ChernResult chern_number_detailed(const ProjectorField& field, int a, int b, int slice) {
  const KGrid& grid = field.grid;
  if (a < 0 || b <= a || b >= grid.dim())
    throw Error(ErrKind::config, "invalid coordinate plane");
  const int na = grid.n(a), nb = grid.n(b);
  if (na < 6 || nb < 6)
    throw Error(ErrKind::grid_too_coarse, "Chern evaluation needs at least 6 points per direction");

  const auto frames = slice_frames(field, a, b, slice);
  auto at = [&](int i, int j) -> const Mat& {
    return frames[static_cast<std::size_t>(KGrid::mod(i, na)) * nb + KGrid::mod(j, nb)];
  };

  // Orientation convention: the loop runs (i,j) -> (i,j+1) -> (i+1,j+1) ->
  // (i+1,j), which makes c equal the degree of the unit h-field for a
  // two-band family h.sigma (lower band of the elementary planar model: -1).
  std::vector<double> flux(static_cast<std::size_t>(na) * nb);
  double min_det = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : min_det)
  for (long t = 0; t < static_cast<long>(flux.size()); ++t) {
    const int i = static_cast<int>(t / nb);
    const int j = static_cast<int>(t % nb);
    const cxd d1 = (at(i, j).adjoint() * at(i, j + 1)).determinant();
    const cxd d2 = (at(i, j + 1).adjoint() * at(i + 1, j + 1)).determinant();
    const cxd d3 = (at(i + 1, j + 1).adjoint() * at(i + 1, j)).determinant();
    const cxd d4 = (at(i + 1, j).adjoint() * at(i, j)).determinant();
    min_det = std::min({min_det, std::abs(d1), std::abs(d2), std::abs(d3), std::abs(d4)});
    flux[t] = std::arg(d1 * d2 * d3 * d4);
  }
  if (min_det < 1e-6) {
    std::ostringstream os;
    os << "plaquette overlap determinant " << min_det << " below 1e-6; refine the grid";
    throw Error(ErrKind::degenerate_overlap, os.str());
  }

  double total = 0.0;  // deterministic serial accumulation
  for (const double f : flux) total += f;
  const double c_real = total / (2.0 * pi);
  ChernResult res;
  res.c = static_cast<int>(std::lround(c_real));
  res.residual = std::abs(c_real - res.c);
  if (res.residual > 0.01) {
    std::ostringstream os;
    os << "Chern sum " << c_real << " is " << res.residual
       << " away from an integer; refine the grid";
    throw Error(ErrKind::grid_too_coarse, os.str());
  }
  return res;
}

int chern_number(const ProjectorField& field, int a, int b) {
  return chern_number_detailed(field, a, b).c;
}

ChernReport chern_report(const ProjectorField& field) {
  const int dim = field.grid.dim();
  if (dim > 3) throw Error(ErrKind::config, "Chern report supports dimensions up to 3");
  ChernReport rep;
  for (const auto& [a, b] : coordinate_planes(dim)) {
    const ChernResult r0 = chern_number_detailed(field, a, b, 0);
    if (dim == 3) {
      int transverse = 3 - a - b;
      const ChernResult r1 = chern_number_detailed(field, a, b, field.grid.n(transverse) / 2);
      if (r1.c != r0.c) {
        std::ostringstream os;
        os << "Chern number of plane (" << a + 1 << "," << b + 1 << ") differs between slices 0 ("
           << r0.c << ") and N/2 (" << r1.c << ")";
        throw Error(ErrKind::grid_too_coarse, os.str());
      }
    }
    ChernReport::Entry e;
    e.a = a;
    e.b = b;
    e.c = r0.c;
    e.residual = r0.residual;
    rep.entries.push_back(e);
    if (e.c != 0) rep.trivial = false;
  }
  return rep;
}

NonvanishingSection nonvanishing_probe(const ProjectorField& field, std::uint64_t seed,
                                       int max_retries) {
  RandomStream rng(seed, 0x5ec71035);
  const long n = field.grid.size();
  NonvanishingSection best;
  best.min_norm = -1.0;
  for (int retry = 0; retry < max_retries; ++retry) {
    Vec v = rng.cnormal_vector(field.fiber);
    v.normalize();
    NonvanishingSection sec;
    sec.values.resize(n);
    double sum = 0.0, min_norm = std::numeric_limits<double>::infinity();
    for (long idx = 0; idx < n; ++idx) {
      sec.values[idx] = field.p[idx] * v;
      const double nrm = sec.values[idx].norm();
      sum += nrm;
      min_norm = std::min(min_norm, nrm);
    }
    sec.min_norm = min_norm;
    sec.mean_norm = sum / n;
    sec.retries_used = retry + 1;
    sec.accepted = min_norm > 1e-3 * sec.mean_norm;
    if (sec.accepted) return sec;
    if (sec.min_norm / sec.mean_norm > best.min_norm / std::max(best.mean_norm, 1e-300))
      best = std::move(sec);
  }
  best.retries_used = max_retries;
  return best;
}

NonvanishingSection nonvanishing_section(const ProjectorField& field, std::uint64_t seed,
                                         int max_retries) {
  NonvanishingSection sec = nonvanishing_probe(field, seed, max_retries);
  if (!sec.accepted) {
    std::ostringstream os;
    os << "no nonvanishing section after " << max_retries
       << " random draws; best min/mean norm ratio " << sec.min_norm / sec.mean_norm;
    throw Error(ErrKind::genericity_failure, os.str());
  }
  return sec;
}

Mat elementary_planar_projector(double t1, double t2, bool conjugated) {
  // h = (sin t1, sin t2, 1 + cos t1 + cos t2), |h| >= 1; the lower-band
  // projector is (I - h.sigma/|h|)/2 in closed form.
  const double hx = std::sin(t1), hy = std::sin(t2), hz = 1.0 + std::cos(t1) + std::cos(t2);
  const double nrm = std::sqrt(hx * hx + hy * hy + hz * hz);
  Mat p(2, 2);
  p(0, 0) = 0.5 * (1.0 - hz / nrm);
  p(1, 1) = 0.5 * (1.0 + hz / nrm);
  p(0, 1) = -0.5 * cxd(hx, -hy) / nrm;
  p(1, 0) = -0.5 * cxd(hx, hy) / nrm;
  return conjugated ? Mat(p.conjugate()) : p;
}

namespace {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

LineBundleField complementary_line_bundle(const KGrid& grid,
                                          const std::map<std::pair<int, int>, int>& targets) {
  int weight = 0;
  for (const auto& [plane, t] : targets) {
    if (plane.first < 0 || plane.second <= plane.first || plane.second >= grid.dim())
      throw Error(ErrKind::config, "Chern target names an invalid plane");
    if (std::abs(t) > 4)
      throw Error(ErrKind::unsupported_chern,
                  "requested |Chern| " + std::to_string(std::abs(t)) + " exceeds the cap of 4");
    weight += std::abs(t);
  }

  struct Factor {
    int a, b;
    bool conj;
  };
  std::vector<Factor> factors;
  for (const auto& [plane, t] : targets)
    for (int c = 0; c < std::abs(t); ++c) factors.push_back({plane.first, plane.second, t > 0});

  LineBundleField out;
  out.targets = targets;
  out.field.grid = grid;
  out.field.fiber = 1 << weight;
  out.field.rank = 1;
  out.field.p.resize(grid.size());

#pragma omp parallel for schedule(static)
  for (long idx = 0; idx < grid.size(); ++idx) {
    const auto m = grid.multi(idx);
    Mat ell = Mat::Ones(1, 1);
    for (const auto& f : factors) {
      const double ta = 2.0 * pi * m[f.a] / grid.n(f.a);
      const double tb = 2.0 * pi * m[f.b] / grid.n(f.b);
      ell = kron(ell, elementary_planar_projector(ta, tb, f.conj));
    }
    out.field.p[idx] = ell;
  }
  out.field.smoothness = projector_smoothness(out.field.p, grid);
  out.field.validate();

  // Chern class is additive under tensor products of line bundles; verify
  // on the constructed field rather than assuming it.
  for (const auto& [plane, t] : targets) {
    const int measured = chern_number(out.field, plane.first, plane.second);
    if (measured != t) {
      std::ostringstream os;
      os << "complementary bundle carries c(" << plane.first + 1 << "," << plane.second + 1 << ") = "
         << measured << ", target " << t;
      throw Error(ErrKind::numerical_failure, os.str());
    }
  }
  return out;
}

}  // namespace wframes
