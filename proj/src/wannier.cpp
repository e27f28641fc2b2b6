#include "wframes/wannier.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace wframes {

namespace {

// Per-dimension twiddle tables; the phase between k(mt) and cell g(m) is
// exactly 2 pi sum_j mt_j m_j / N_j, so all factors live on N_j-th roots.
struct Twiddles {
  std::array<std::vector<cxd>, 3> t;
  Twiddles(const KGrid& grid, double sign) {
    for (int j = 0; j < grid.dim(); ++j) {
      t[j].resize(grid.n(j));
      for (int r = 0; r < grid.n(j); ++r)
        t[j][r] = std::polar(1.0, sign * 2.0 * pi * r / grid.n(j));
    }
  }
  cxd factor(const KGrid& grid, const std::array<int, 3>& mk, const std::array<int, 3>& mg) const {
    cxd f(1, 0);
    for (int j = 0; j < grid.dim(); ++j)
      f *= t[j][(static_cast<long>(mk[j]) * mg[j]) % grid.n(j)];
    return f;
  }
};

int torus_dist(int m, int n) { return std::min(m, n - m); }

}  // namespace

LatticeFunction random_lattice_function(const KGrid& grid, int fiber, RandomStream& rng) {
  LatticeFunction f;
  f.grid = grid;
  f.fiber = fiber;
  f.values.resize(grid.size());
  for (long idx = 0; idx < grid.size(); ++idx) f.values[idx] = rng.cnormal_vector(fiber);
  return f;
}

BlochSectionSet bloch_transform(const LatticeFunction& f) {
  const KGrid& grid = f.grid;
  const long n = grid.size();
  if (static_cast<long>(f.values.size()) != n)
    throw Error(ErrKind::config, "lattice function does not match its grid");
  const Twiddles tw(grid, -1.0);

  BlochSectionSet out;
  out.grid = grid;
  out.fiber = f.fiber;
  out.count = 1;
  out.psi.assign(1, std::vector<Vec>(n));
#pragma omp parallel for schedule(static)
  for (long ik = 0; ik < n; ++ik) {
    const auto mk = grid.multi(ik);
    Vec acc = Vec::Zero(f.fiber);
    for (long ig = 0; ig < n; ++ig) acc += tw.factor(grid, mk, grid.multi(ig)) * f.values[ig];
    out.psi[0][ik] = acc;
  }
  return out;
}

LatticeFunction synthesize_section(const KGrid& grid, const std::vector<Vec>& section) {
  const long n = grid.size();
  if (static_cast<long>(section.size()) != n)
    throw Error(ErrKind::config, "section does not match the grid");
  const Twiddles tw(grid, +1.0);
  LatticeFunction f;
  f.grid = grid;
  f.fiber = static_cast<int>(section[0].size());
  f.values.resize(n);
#pragma omp parallel for schedule(static)
  for (long ig = 0; ig < n; ++ig) {
    const auto mg = grid.multi(ig);
    Vec acc = Vec::Zero(f.fiber);
    for (long ik = 0; ik < n; ++ik) acc += tw.factor(grid, grid.multi(ik), mg) * section[ik];
    f.values[ig] = acc / double(n);
  }
  return f;
}

namespace {

void compute_shells(WannierFunction& wf) {
  const KGrid& grid = wf.w.grid;
  const int dim = grid.dim();
  int t_max = 0;
  for (int j = 0; j < dim; ++j) t_max = std::max(t_max, grid.n(j) / 2);
  wf.shell_norms.assign(t_max + 1, 0.0);
  wf.dir_shell_norms.assign(dim, std::vector<double>(t_max + 1, 0.0));
  for (long idx = 0; idx < grid.size(); ++idx) {
    const auto m = grid.multi(idx);
    const double nrm = wf.w.values[idx].norm();
    int t_iso = 0;
    for (int j = 0; j < dim; ++j) {
      const int tj = torus_dist(m[j], grid.n(j));
      t_iso = std::max(t_iso, tj);
      wf.dir_shell_norms[j][tj] = std::max(wf.dir_shell_norms[j][tj], nrm);
    }
    wf.shell_norms[t_iso] = std::max(wf.shell_norms[t_iso], nrm);
  }
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& shell_norms, int t_lo, int t_hi) {
  DecayFit fit;
  const double floor = 1e3 * std::numeric_limits<double>::epsilon();
  std::vector<double> ts, ys;
  for (int t = t_lo; t <= t_hi && t < static_cast<int>(shell_norms.size()); ++t) {
    if (shell_norms[t] <= floor) continue;  // exact zeros and the noise floor
    ts.push_back(t);
    ys.push_back(-std::log(shell_norms[t]));
  }
  fit.points = static_cast<int>(ts.size());
  if (fit.points < 2) {
    fit.super_exponential = true;
    return fit;
  }
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (int i = 0; i < fit.points; ++i) {
    st += ts[i];
    sy += ys[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * ys[i];
  }
  const double denom = fit.points * stt - st * st;
  fit.rate = (fit.points * sty - st * sy) / denom;
  const double intercept = (sy - fit.rate * st) / fit.points;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / fit.points;
  for (int i = 0; i < fit.points; ++i) {
    const double pred = intercept + fit.rate * ts[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

void decay_profile(WannierSet& set, int t_lo, int t_hi) {
  if (t_lo < 2)
    throw Error(ErrKind::config, "fit range must start at shell 2 or later");
  if (!set.funcs.empty()) {
    const KGrid& grid = set.funcs[0].w.grid;
    int max_t = 0;
    for (int j = 0; j < grid.dim(); ++j) max_t = std::max(max_t, grid.n(j) / 2);
    // beyond half the maximal torus distance the shells wrap around
    if (t_hi > max_t / 2)
      throw Error(ErrKind::config, "fit range may reach at most shell " + std::to_string(max_t / 2) +
                                       " on this box");
  }
  set.fit_lo = t_lo;
  set.fit_hi = t_hi;
  for (auto& wf : set.funcs) {
    wf.iso_fit = fit_decay(wf.shell_norms, t_lo, t_hi);
    wf.dir_fits.clear();
    for (const auto& dirs : wf.dir_shell_norms) wf.dir_fits.push_back(fit_decay(dirs, t_lo, t_hi));
  }
}

WannierSet synthesize(const BlochSectionSet& sections) {
  WannierSet set;
  set.funcs.resize(sections.count);
  for (int j = 0; j < sections.count; ++j) {
    set.funcs[j].w = synthesize_section(sections.grid, sections.psi[j]);
    compute_shells(set.funcs[j]);
  }
  int min_n = sections.grid.n(0);
  for (int j = 1; j < sections.grid.dim(); ++j) min_n = std::min(min_n, sections.grid.n(j));
  const int hi = min_n / 4;
  if (hi >= 2) decay_profile(set, 2, hi);
  return set;
}

ParsevalCheckResult parseval_identity_check(const WannierSet& set, const ProjectorField& p,
                                            const FrameCertificate& cert, int trials,
                                            std::uint64_t seed) {
  if (!cert.accepted) {
    std::ostringstream os;
    os << "frame certificate was not accepted (residual " << cert.max_parseval_residual
       << ", bounds " << cert.frame_a << ", " << cert.frame_b << ", tolerance " << cert.tol << ")";
    throw Error(ErrKind::certificate_rejected, os.str());
  }
  const KGrid& grid = p.grid;
  const long n = grid.size();
  RandomStream rng(seed, 0x9a25e7a1);

  ParsevalCheckResult res;
  res.trials = trials;
  for (int trial = 0; trial < trials; ++trial) {
    // Project a random function into the spectral subspace in momentum
    // space; the result lies in H_S by construction.
    LatticeFunction g = random_lattice_function(grid, p.fiber, rng);
    BlochSectionSet ghat = bloch_transform(g);
    for (long ik = 0; ik < n; ++ik) ghat.psi[0][ik] = p.p[ik] * ghat.psi[0][ik];
    const LatticeFunction f = synthesize_section(grid, ghat.psi[0]);
    const double lhs = f.norm2();

    // brute-force double sum over shifts and cells; index arithmetic is
    // table-driven because this loop is the cost of the whole check
    const int dim = grid.dim();
    std::array<long, 3> stride{0, 0, 0};
    long acc_stride = 1;
    for (int j = dim - 1; j >= 0; --j) {
      stride[j] = acc_stride;
      acc_stride *= grid.n(j);
    }
    std::array<std::vector<long>, 3> wrap;
    for (int j = 0; j < dim; ++j) {
      wrap[j].resize(2 * grid.n(j));
      for (int t = 0; t < 2 * grid.n(j); ++t)
        wrap[j][t] = stride[j] * (t >= grid.n(j) ? t - grid.n(j) : t);
    }
    std::vector<std::array<int, 3>> cells(n);
    for (long ix = 0; ix < n; ++ix) cells[ix] = grid.multi(ix);

    double rhs = 0.0;
    for (const auto& wf : set.funcs) {
      std::vector<double> per_shift(n);
#pragma omp parallel for schedule(static)
      for (long ig = 0; ig < n; ++ig) {
        const auto& mg = cells[ig];
        cxd inner(0, 0);
        for (long ix = 0; ix < n; ++ix) {
          long shifted = 0;
          for (int j = 0; j < dim; ++j)
            shifted += wrap[j][cells[ix][j] - mg[j] + grid.n(j)];
          inner += wf.w.values[shifted].dot(f.values[ix]);
        }
        per_shift[ig] = std::norm(inner);
      }
      for (long ig = 0; ig < n; ++ig) rhs += per_shift[ig];
    }
    res.max_rel_err = std::max(res.max_rel_err, std::abs(lhs - rhs) / lhs);
  }
  return res;
}

ShiftOrthogonalityResult shift_orthonormality_check(const LatticeFunction& w,
                                                    const std::vector<Vec>& psi) {
  const KGrid& grid = w.grid;
  const long n = grid.size();
  const double norm2 = w.norm2();

  ShiftOrthogonalityResult res;
  for (long ig = 0; ig < n; ++ig) {
    const auto mg = grid.multi(ig);
    cxd inner(0, 0);
    for (long ix = 0; ix < n; ++ix) {
      const auto mx = grid.multi(ix);
      std::array<int, 3> shifted{0, 0, 0};
      for (int j = 0; j < grid.dim(); ++j) shifted[j] = mx[j] - mg[j];
      inner += w.values[grid.index(shifted)].dot(w.values[ix]);
    }
    const double expect = (ig == 0) ? norm2 : 0.0;
    res.shift_deviation = std::max(res.shift_deviation, std::abs(inner - expect));
  }

  double mean = 0.0;
  for (long ik = 0; ik < n; ++ik) mean += psi[ik].squaredNorm();
  mean /= double(n);
  for (long ik = 0; ik < n; ++ik)
    res.norm_deviation = std::max(res.norm_deviation, std::abs(psi[ik].squaredNorm() - mean));

  res.orthogonal = res.shift_deviation <= 1e-10;
  return res;
}

}  // namespace wframes
