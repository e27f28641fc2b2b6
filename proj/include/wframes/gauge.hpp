#ifndef WFRAMES_GAUGE_HPP
#define WFRAMES_GAUGE_HPP

#include "wframes/topology.hpp"

namespace wframes {

// l sections of the fiber over the k-grid; carrier of gauges and frames in
// momentum space. Sections are functions on the discrete torus, so
// periodicity is structural.
struct BlochSectionSet {
  KGrid grid;
  int fiber = 0;
  int count = 0;                       // l
  std::vector<std::vector<Vec>> psi;   // psi[j][k index]
  double smoothness = 0.0;             // max neighbor difference / grid step

  Mat matrix(long idx) const {
    Mat m(fiber, count);
    for (int j = 0; j < count; ++j) m.col(j) = psi[j][idx];
    return m;
  }
  // Frame operator sum_j psi_j psi_j^dagger at one grid point.
  Mat frame_operator(long idx) const {
    const Mat m = matrix(idx);
    return m * m.adjoint();
  }
};

double sections_smoothness(const BlochSectionSet& s);

enum class GaugeMethod { transport, projection };

// Parallel transport gauge: the frame at k = 0 is taken from eigenvectors
// (rotated by u0), moved along grid lines through polar decomposition of
// frame overlaps, and each line's closure unitary is spread along the line
// as W^(t/N) through the principal matrix logarithm. Throws `branch-cut`
// when a closure unitary has an eigenvalue within 1e-6 of -1.
BlochSectionSet transport_frame(const ProjectorField& q, const Mat& u0);

// Projection gauge: rank(q) random constant vectors projected by Q(k) and
// symmetrically orthonormalized, then polished by `smooth_sweeps` rounds of
// neighbor averaging plus re-orthonormalization. Throws `singular-gram` when
// the smallest Gram eigenvalue of the constant-vector stage falls below 1e-6.
BlochSectionSet projection_frame(const ProjectorField& q, std::uint64_t seed,
                                 int smooth_sweeps = 16);

// Smallest Gram eigenvalue the projection gauge would have to invert, over
// the whole grid. Never throws; this is the obstruction witness.
struct ProjectionProbe {
  double min_gram_eig = 0.0;
  long argmin = 0;
};
ProjectionProbe projection_probe(const ProjectorField& q, int r, std::uint64_t seed);

// Orthonormal frame of Ran Q for a field with vanishing Chern numbers.
// Transport retries up to 10 randomized initial frames on branch trouble.
BlochSectionSet trivialize(const ProjectorField& q, GaugeMethod method, std::uint64_t seed);

// Accumulated transport phase of a rank-1 bundle along direction `dir`, as a
// function of the transverse momentum, and its total winding across the
// transverse cycle. The winding matches the Chern number of the plane.
struct WindingDiagnostic {
  std::vector<double> phase;  // per transverse index
  int total = 0;
};
WindingDiagnostic winding_diagnostic(const ProjectorField& p, int dir, int transverse = -1);

}  // namespace wframes

#endif
