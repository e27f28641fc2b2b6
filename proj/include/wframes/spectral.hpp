#ifndef WFRAMES_SPECTRAL_HPP
#define WFRAMES_SPECTRAL_HPP

#include <functional>
#include <vector>

#include "wframes/lattice.hpp"
#include "wframes/model.hpp"
#include "wframes/types.hpp"

namespace wframes {

// A window of the spectrum, either a contiguous 1-based band-index range or
// an energy interval. The window must select the same number of eigenvalues
// at every grid point; that count is m.
struct SpectralWindow {
  enum class Kind { bands, energy };
  Kind kind = Kind::bands;
  int lo = 1, hi = 1;
  double emin = 0.0, emax = 0.0;

  static SpectralWindow bands(int lo, int hi) {
    SpectralWindow w;
    w.kind = Kind::bands;
    w.lo = lo;
    w.hi = hi;
    return w;
  }
  static SpectralWindow energy(double emin, double emax) {
    SpectralWindow w;
    w.kind = Kind::energy;
    w.emin = emin;
    w.emax = emax;
    return w;
  }
};

struct BandStructure {
  KGrid grid;
  int fiber = 0;
  std::vector<RVec> eigenvalues;  // ascending per k
  std::vector<Mat> eigenvectors;  // empty unless requested
  bool has_vectors() const { return !eigenvectors.empty(); }
};

// Window resolved against a band structure: 0-based first index per k plus
// the (constant) band count m.
struct ResolvedWindow {
  int m = 0;
  std::vector<int> first;
};

struct GapReport {
  double below = 0.0;  // +inf when the window starts at the bottom band
  double above = 0.0;
  int m = 0;
};

// Rank-m orthogonal projector P(k) at every grid point; the discrete Bloch
// bundle of the window.
struct ProjectorField {
  KGrid grid;
  int fiber = 0;
  int rank = 0;
  std::vector<Mat> p;
  double smoothness = 0.0;  // max_k max_dir |P(k+d) - P(k)|_F / step

  const Mat& at(long idx) const { return p[idx]; }
  // Orthonormal basis of Ran P(k), columns of a fiber x rank matrix.
  Mat frame(long idx) const;
  void validate(double tol = 1e-10) const;
};

enum class ProjectorMethod { eigensum, riesz };

BandStructure band_structure(const BlochModel& model, const KGrid& grid,
                             bool store_vectors = true);

ResolvedWindow resolve_window(const BandStructure& bands, const SpectralWindow& window);

// Throws `gapless` when a bounding gap is not larger than gap_tol and
// `not-isolated` when the window captures a varying band count.
GapReport gap_check(const BandStructure& bands, const SpectralWindow& window,
                    double gap_tol = 1e-8);

// validate_tol guards the projector invariants; coarse Riesz quadratures
// (small q_pts) need it loosened to be representable at all.
ProjectorField projector_field(const BlochModel& model, const KGrid& grid,
                               const SpectralWindow& window,
                               ProjectorMethod method = ProjectorMethod::eigensum,
                               int q_pts = 256, double gap_tol = 1e-8,
                               double validate_tol = 1e-10);

// Assembles the field from precomputed bands (vectors required for eigensum).
ProjectorField projector_field(const BandStructure& bands, const BlochModel& model,
                               const SpectralWindow& window, ProjectorMethod method,
                               int q_pts = 256, double gap_tol = 1e-8,
                               double validate_tol = 1e-10);

double projector_smoothness(const std::vector<Mat>& p, const KGrid& grid);

// Utility fields used by the topology and frame layers.
ProjectorField projector_from_function(const KGrid& grid, int fiber,
                                       const std::function<Mat(const RVec&, long)>& fn);
ProjectorField direct_sum(const ProjectorField& a, const ProjectorField& b);
ProjectorField conjugate_field(const ProjectorField& a);

}  // namespace wframes

#endif
