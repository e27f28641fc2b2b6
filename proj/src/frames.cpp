#include "wframes/frames.hpp"

#include <cmath>
#include <sstream>

namespace wframes {

const char* to_string(Route r) {
  switch (r) {
    case Route::automatic: return "auto";
    case Route::basis: return "basis";
    case Route::augmented: return "augmented";
    case Route::embedded: return "embedded";
  }
  return "auto";
}

Route route_from_string(const std::string& s) {
  if (s == "auto") return Route::automatic;
  if (s == "basis") return Route::basis;
  if (s == "augmented") return Route::augmented;
  if (s == "embedded") return Route::embedded;
  throw Error(ErrKind::config, "unknown route '" + s + "' (auto, basis, augmented, embedded)");
}

namespace {

BlochSectionSet project_top_block(const BlochSectionSet& phi, int fiber) {
  BlochSectionSet out;
  out.grid = phi.grid;
  out.fiber = fiber;
  out.count = phi.count;
  out.psi.assign(phi.count, std::vector<Vec>(phi.grid.size()));
  for (int j = 0; j < phi.count; ++j)
    for (long idx = 0; idx < phi.grid.size(); ++idx) out.psi[j][idx] = phi.psi[j][idx].head(fiber);
  out.smoothness = sections_smoothness(out);
  return out;
}

BlochSectionSet project_by(const BlochSectionSet& phi, const ProjectorField& p) {
  BlochSectionSet out;
  out.grid = phi.grid;
  out.fiber = p.fiber;
  out.count = phi.count;
  out.psi.assign(phi.count, std::vector<Vec>(phi.grid.size()));
  for (int j = 0; j < phi.count; ++j)
    for (long idx = 0; idx < phi.grid.size(); ++idx) out.psi[j][idx] = p.p[idx] * phi.psi[j][idx];
  out.smoothness = sections_smoothness(out);
  return out;
}

double parseval_residual(const BlochSectionSet& s, const ProjectorField& p) {
  double res = 0.0;
  for (long idx = 0; idx < p.grid.size(); ++idx)
    res = std::max(res, (s.frame_operator(idx) - p.p[idx]).norm());
  return res;
}

}  // namespace

bool embed_line_bundle(const ProjectorField& p, const ProjectorField& ell, const Mat& j_map,
                       double threshold, ProjectorField& out) {
  const long n = p.grid.size();
  std::vector<Mat> a(n);
  std::vector<double> top(n);
#pragma omp parallel for schedule(static)
  for (long idx = 0; idx < n; ++idx) {
    const Mat q = Mat::Identity(p.fiber, p.fiber) - p.p[idx];
    a[idx] = q * j_map * ell.p[idx] * j_map.adjoint() * q;
    top[idx] = a[idx].trace().real();  // rank <= 1, so trace = top eigenvalue
  }
  double mean = 0.0, min_top = std::numeric_limits<double>::infinity();
  for (long idx = 0; idx < n; ++idx) {
    mean += top[idx];
    min_top = std::min(min_top, top[idx]);
  }
  mean /= double(n);
  if (!(min_top > threshold * mean)) return false;

  out.grid = p.grid;
  out.fiber = p.fiber;
  out.rank = 1;
  out.p.resize(n);
  for (long idx = 0; idx < n; ++idx) out.p[idx] = a[idx] / top[idx];
  out.smoothness = projector_smoothness(out.p, p.grid);
  return true;
}

ParsevalFrame parseval_sections(const ProjectorField& p, const ChernReport& report, Route route,
                                std::uint64_t seed, const FrameOptions& opt) {
  if (route == Route::automatic) route = report.trivial ? Route::basis : Route::augmented;

  ParsevalFrame out;
  out.certificate.route = route;
  out.certificate.tol = opt.tol;

  if (route == Route::basis) {
    if (!report.trivial) {
      std::ostringstream os;
      os << "route basis needs a trivial bundle, but";
      for (const auto& e : report.entries)
        if (e.c != 0) os << " c(" << e.a + 1 << "," << e.b + 1 << ") = " << e.c;
      throw Error(ErrKind::nonzero_chern, os.str());
    }
    out.sections = trivialize(p, opt.gauge, seed);
  } else if (route == Route::augmented) {
    const LineBundleField ell = complementary_line_bundle(p.grid, report.negated());
    const ProjectorField q = direct_sum(p, ell.field);
    const BlochSectionSet phi = trivialize(q, opt.gauge, seed);
    out.sections = project_top_block(phi, p.fiber);
  } else {
    if (p.fiber - p.rank < 1)
      throw Error(ErrKind::precondition,
                  "embedded route needs at least one fiber dimension outside the window");
    const LineBundleField ell = complementary_line_bundle(p.grid, report.negated());
    RandomStream rng(seed, 0xe3bedded);
    ProjectorField p_line;
    bool ok = false;
    int tries = 0;
    for (; tries < opt.embed_max_retries; ++tries) {
      const Mat j_map = rng.cnormal_matrix(p.fiber, ell.field.fiber);
      if (!embed_line_bundle(p, ell.field, j_map, opt.embed_threshold, p_line)) continue;
      // An imbedding carries the Chern class over; verify before using it.
      bool chern_ok = true;
      for (const auto& [plane, target] : ell.targets)
        if (chern_number(p_line, plane.first, plane.second) != target) {
          chern_ok = false;
          break;
        }
      if (!chern_ok) continue;
      ok = true;
      break;
    }
    if (!ok)
      throw Error(ErrKind::genericity_failure,
                  "no generic embedding found in " + std::to_string(opt.embed_max_retries) +
                      " random draws");
    ProjectorField q;
    q.grid = p.grid;
    q.fiber = p.fiber;
    q.rank = p.rank + 1;
    q.p.resize(p.grid.size());
    for (long idx = 0; idx < p.grid.size(); ++idx) q.p[idx] = p.p[idx] + p_line.p[idx];
    q.smoothness = projector_smoothness(q.p, q.grid);
    const BlochSectionSet phi = trivialize(q, opt.gauge, seed);
    out.sections = project_by(phi, p);
  }

  out.certificate.l = out.sections.count;
  out.certificate.max_parseval_residual = parseval_residual(out.sections, p);
  const auto [a, b] = frame_bounds(out.sections, p);
  out.certificate.frame_a = a;
  out.certificate.frame_b = b;
  out.certificate.smoothness = out.sections.smoothness;
  out.certificate.accepted = out.certificate.max_parseval_residual <= opt.tol &&
                             std::abs(a - 1.0) <= opt.tol && std::abs(b - 1.0) <= opt.tol;
  return out;
}

std::pair<double, double> frame_bounds(const BlochSectionSet& sections, const ProjectorField& p) {
  const long n = p.grid.size();
  double mismatch = 0.0;
  for (int j = 0; j < sections.count; ++j)
    for (long idx = 0; idx < n; ++idx)
      mismatch = std::max(mismatch,
                          (sections.psi[j][idx] - p.p[idx] * sections.psi[j][idx]).norm());
  if (mismatch > 1e-8) {
    std::ostringstream os;
    os << "sections leave Ran P by " << mismatch << " (tolerance 1e-8)";
    throw Error(ErrKind::subspace_mismatch, os.str());
  }

  double a = std::numeric_limits<double>::infinity(), b = 0.0;
  for (long idx = 0; idx < n; ++idx) {
    const Mat v = p.frame(idx);
    const Mat s = v.adjoint() * sections.frame_operator(idx) * v;
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    a = std::min(a, es.eigenvalues().minCoeff());
    b = std::max(b, es.eigenvalues().maxCoeff());
  }
  return {a, b};
}

}  // namespace wframes
