#ifndef WFRAMES_FRAMES_HPP
#define WFRAMES_FRAMES_HPP

#include "wframes/gauge.hpp"

namespace wframes {

enum class Route { automatic, basis, augmented, embedded };

const char* to_string(Route r);
Route route_from_string(const std::string& s);

struct FrameCertificate {
  int l = 0;
  double max_parseval_residual = 0.0;  // max_k |sum psi psi^dag - P|_F
  double frame_a = 0.0, frame_b = 0.0;
  double smoothness = 0.0;
  Route route = Route::automatic;
  bool accepted = false;
  double tol = 1e-9;
};

struct FrameOptions {
  GaugeMethod gauge = GaugeMethod::projection;
  double tol = 1e-9;
  int embed_max_retries = 50;
  double embed_threshold = 1e-4;  // relative to the mean top eigenvalue
};

struct ParsevalFrame {
  BlochSectionSet sections;
  FrameCertificate certificate;
};

// l Bloch sections of Ran P whose Wannier shifts form a Parseval frame of
// the spectral subspace: l = m when the bundle is trivial (an orthonormal
// frame), l = m + 1 otherwise.
//
//  basis      requires a trivial bundle; sections = trivialize(P).
//  augmented  adjoins the complementary line bundle on an auxiliary fiber,
//             trivializes the Chern-zero sum, and keeps the top fiber block.
//  embedded   realizes the complementary bundle inside Ran(I - P) through a
//             random bundle map, accepted by a genericity threshold, then
//             trivializes P + P_L on the original fiber and projects by P.
//  automatic  basis when trivial, augmented otherwise.
ParsevalFrame parseval_sections(const ProjectorField& p, const ChernReport& report, Route route,
                                std::uint64_t seed, const FrameOptions& opt = {});

// Frame bounds of the shift system: extremes over k of the spectrum of the
// frame operator restricted to Ran P(k). By discrete Plancherel these equal
// the real-space frame bounds.
std::pair<double, double> frame_bounds(const BlochSectionSet& sections, const ProjectorField& p);

// Rank-1 image of the bundle map J applied to the auxiliary bundle, pushed
// into Ran(I - P) and normalized. Returns false when the genericity
// threshold min_k tr A > threshold * mean_k tr A fails for
// A = (I-P) J ell J^dag (I-P).
bool embed_line_bundle(const ProjectorField& p, const ProjectorField& ell, const Mat& j_map,
                       double threshold, ProjectorField& out);

}  // namespace wframes

#endif
