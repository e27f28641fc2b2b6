#ifndef WFRAMES_REFERENCE_HPP
#define WFRAMES_REFERENCE_HPP

#include "wframes/wannier.hpp"

// Serial reference implementations of the parallel kernels. These stay
// deliberately simple (plain loops, direct phase evaluation) and are used by
// the tests to cross-check the OpenMP code paths and by the benchmark tool.
namespace wframes::ref {

BandStructure band_structure(const BlochModel& model, const KGrid& grid, bool store_vectors = true);

ProjectorField eigensum_projectors(const BandStructure& bands, const SpectralWindow& window);

// Direct double sums with per-term std::polar phases; independent of the
// twiddle-table transform they check.
BlochSectionSet bloch_transform(const LatticeFunction& f);
LatticeFunction synthesize_section(const KGrid& grid, const std::vector<Vec>& section);

// Pre-rounding plaquette flux sum divided by 2 pi.
double chern_sum(const ProjectorField& field, int a, int b, int slice = 0);

}  // namespace wframes::ref

#endif
