#ifndef WFRAMES_TYPES_HPP
#define WFRAMES_TYPES_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wframes {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Error kinds map 1:1 onto the CLI exit-code families documented in the README.
enum class ErrKind {
  degenerate_lattice,
  grid_too_coarse,
  unknown_model,
  bad_model_file,
  gapless,
  not_isolated,
  numerical_failure,
  contour_placement,
  degenerate_overlap,
  genericity_failure,
  branch_cut,
  singular_gram,
  nonzero_chern,
  unsupported_chern,
  subspace_mismatch,
  certificate_rejected,
  precondition,
  config,
  io,
};

const char* to_string(ErrKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrKind kind, const std::string& msg)
      : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}
  ErrKind kind() const { return kind_; }

 private:
  ErrKind kind_;
};

// Deterministic random stream. Normal variates come from an explicit
// Box-Muller so the byte stream does not depend on the standard library's
// distribution internals; identical seeds give identical runs everywhere.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : eng_(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1))) {}

  double uniform() {  // [0, 1)
    return (eng_() >> 11) * 0x1.0p-53;
  }
  double normal() {
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
  }
  cxd cnormal() {
    const double re = normal();
    const double im = normal();
    return cxd(re, im) / std::sqrt(2.0);
  }
  Vec cnormal_vector(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = cnormal();
    return v;
  }
  Mat cnormal_matrix(int rows, int cols) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = cnormal();
    return m;
  }
  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Closest unitary to S in Frobenius norm (polar factor via SVD).
Mat polar_unitary(const Mat& s);

// Random unitary, Haar-ish via QR of a complex Gaussian matrix.
Mat random_unitary(int n, RandomStream& rng);

// Eigenphases and eigenbasis of a unitary matrix through a complex Schur
// decomposition; Q is exactly unitary, phases in (-pi, pi].
struct UnitaryLog {
  Mat q;
  RVec theta;
  double min_dist_to_minus_one;  // min over eigenvalues of |lambda + 1|
};
UnitaryLog unitary_log(const Mat& w);

double hermitian_deviation(const Mat& a);

}  // namespace wframes

#endif
