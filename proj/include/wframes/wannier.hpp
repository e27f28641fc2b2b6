#ifndef WFRAMES_WANNIER_HPP
#define WFRAMES_WANNIER_HPP

#include "wframes/frames.hpp"

namespace wframes {

// Function on the periodic box of cells dual to a k-grid, with a fiber
// vector of orbital amplitudes per cell. Cell indices share the grid's
// row-major layout.
struct LatticeFunction {
  KGrid grid;
  int fiber = 0;
  std::vector<Vec> values;

  double norm2() const {
    double s = 0.0;
    for (const auto& v : values) s += v.squaredNorm();
    return s;
  }
};

LatticeFunction random_lattice_function(const KGrid& grid, int fiber, RandomStream& rng);

// Discrete Bloch transform f(k) = sum_g f(g) exp(-i k.g) and its inverse
// w(g) = (1/N) sum_k psi(k) exp(i k.g); exact mutual inverses on the torus.
BlochSectionSet bloch_transform(const LatticeFunction& f);
LatticeFunction synthesize_section(const KGrid& grid, const std::vector<Vec>& section);

// Least-squares exponential fit of shell norms.
struct DecayFit {
  double rate = 0.0;
  double r2 = 0.0;
  bool super_exponential = false;
  int points = 0;
};

struct WannierFunction {
  LatticeFunction w;
  std::vector<double> shell_norms;               // max cell norm at torus distance t
  std::vector<std::vector<double>> dir_shell_norms;
  DecayFit iso_fit;
  std::vector<DecayFit> dir_fits;
};

struct WannierSet {
  std::vector<WannierFunction> funcs;
  int fit_lo = 0, fit_hi = 0;
};

// Inverse transform of every section plus decay statistics over shells
// [2, min_j N_j/4] (the default guards against wrap-around contamination).
WannierSet synthesize(const BlochSectionSet& sections);

DecayFit fit_decay(const std::vector<double>& shell_norms, int t_lo, int t_hi);
void decay_profile(WannierSet& set, int t_lo, int t_hi);

// Brute-force verification of |f|^2 = sum_{j,g} |<f, w_{j,g}>|^2 on random
// members of the spectral subspace. Refuses frames without an accepted
// certificate.
struct ParsevalCheckResult {
  double max_rel_err = 0.0;
  int trials = 0;
};
ParsevalCheckResult parseval_identity_check(const WannierSet& set, const ProjectorField& p,
                                            const FrameCertificate& cert, int trials,
                                            std::uint64_t seed);

// Both sides of the orthogonality criterion: shifts of w are mutually
// orthogonal exactly when the transform has k-independent norm.
struct ShiftOrthogonalityResult {
  bool orthogonal = false;
  double shift_deviation = 0.0;  // max_g |<w, w_g> - delta_g0 |w|^2|
  double norm_deviation = 0.0;   // max_k | |psi(k)|^2 - mean |
};
ShiftOrthogonalityResult shift_orthonormality_check(const LatticeFunction& w,
                                                    const std::vector<Vec>& psi);

}  // namespace wframes

#endif
