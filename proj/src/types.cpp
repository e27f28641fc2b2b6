#include "wframes/types.hpp"

namespace wframes {

const char* to_string(ErrKind k) {
  switch (k) {
    case ErrKind::degenerate_lattice: return "degenerate-lattice";
    case ErrKind::grid_too_coarse: return "grid-too-coarse";
    case ErrKind::unknown_model: return "unknown-model";
    case ErrKind::bad_model_file: return "bad-model-file";
    case ErrKind::gapless: return "gapless";
    case ErrKind::not_isolated: return "not-isolated";
    case ErrKind::numerical_failure: return "numerical-failure";
    case ErrKind::contour_placement: return "contour-placement";
    case ErrKind::degenerate_overlap: return "degenerate-overlap";
    case ErrKind::genericity_failure: return "genericity-failure";
    case ErrKind::branch_cut: return "branch-cut";
    case ErrKind::singular_gram: return "singular-gram";
    case ErrKind::nonzero_chern: return "nonzero-chern";
    case ErrKind::unsupported_chern: return "unsupported-chern";
    case ErrKind::subspace_mismatch: return "subspace-mismatch";
    case ErrKind::certificate_rejected: return "certificate-rejected";
    case ErrKind::precondition: return "precondition";
    case ErrKind::config: return "config";
    case ErrKind::io: return "io";
  }
  return "unknown";
}

Mat polar_unitary(const Mat& s) {
  Eigen::JacobiSVD<Mat> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Mat random_unitary(int n, RandomStream& rng) {
  Mat g = rng.cnormal_matrix(n, n);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  // fix the diagonal phases so the factorization is unique
  Mat r = q.adjoint() * g;
  for (int j = 0; j < n; ++j) {
    cxd d = r(j, j);
    q.col(j) *= (std::abs(d) > 0) ? d / std::abs(d) : cxd(1, 0);
  }
  return q;
}

UnitaryLog unitary_log(const Mat& w) {
  // A unitary matrix is normal, so its complex Schur form is diagonal up to
  // roundoff and the Schur basis is exactly unitary.
  Eigen::ComplexSchur<Mat> schur(w, true);
  if (schur.info() != Eigen::Success)
    throw Error(ErrKind::numerical_failure, "Schur decomposition of closure unitary failed");
  const int n = static_cast<int>(w.rows());
  UnitaryLog out;
  out.q = schur.matrixU();
  out.theta = RVec(n);
  out.min_dist_to_minus_one = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const cxd lam = schur.matrixT()(j, j);
    out.theta(j) = std::arg(lam);
    out.min_dist_to_minus_one = std::min(out.min_dist_to_minus_one, std::abs(lam + cxd(1, 0)));
  }
  return out;
}

double hermitian_deviation(const Mat& a) { return (a - a.adjoint()).norm(); }

}  // namespace wframes
