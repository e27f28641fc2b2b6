// Benchmark comparing the OpenMP kernels against the serial reference
// implementations on a medium-sized problem. Prints one line per kernel:
// serial ms, parallel ms, speedup, and the max deviation between results.

#include <chrono>
#include <cstdio>
#include <limits>

#include "wframes/reference.hpp"

using namespace wframes;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// warm up once, then report the best of three runs
template <class F>
double timed(F&& f) {
  f();
  double best = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

void row(const char* name, double serial, double parallel, double dev) {
  std::printf("%-18s %10.2f ms %10.2f ms %7.2fx   max|delta| %.3e\n", name, serial, parallel,
              serial / parallel, dev);
}

}  // namespace

int main() {
  const BlochModel model = builtin("qwz", {{"u", 1.0}});
  const KGrid grid = KGrid::make(model.lattice(), {96, 96});
  const SpectralWindow window = SpectralWindow::bands(1, 1);

  std::printf("%-18s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  BandStructure bands_par, bands_ser;
  const double t_band_par = timed([&] { bands_par = band_structure(model, grid, true); });
  const double t_band_ser = timed([&] { bands_ser = ref::band_structure(model, grid, true); });
  double dev = 0.0;
  for (long i = 0; i < grid.size(); ++i)
    dev = std::max(dev, (bands_par.eigenvalues[i] - bands_ser.eigenvalues[i]).norm());
  row("band_structure", t_band_ser, t_band_par, dev);

  ProjectorField field_par, field_ser;
  const double t_proj_par = timed([&] {
    field_par = projector_field(bands_par, model, window, ProjectorMethod::eigensum);
  });
  const double t_proj_ser = timed([&] { field_ser = ref::eigensum_projectors(bands_ser, window); });
  dev = 0.0;
  for (long i = 0; i < grid.size(); ++i) dev = std::max(dev, (field_par.p[i] - field_ser.p[i]).norm());
  row("projector_field", t_proj_ser, t_proj_par, dev);

  double chern_par = 0, chern_ser = 0;
  const double t_chern_par = timed([&] { chern_par = chern_number(field_par, 0, 1); });
  const double t_chern_ser = timed([&] { chern_ser = ref::chern_sum(field_ser, 0, 1); });
  row("chern_number", t_chern_ser, t_chern_par, std::abs(chern_par - chern_ser));

  const KGrid small = KGrid::make(model.lattice(), {40, 40});
  RandomStream rng(7);
  const LatticeFunction f = random_lattice_function(small, model.fiber_dim(), rng);
  BlochSectionSet hat_par, hat_ser;
  const double t_fwd_par = timed([&] { hat_par = bloch_transform(f); });
  const double t_fwd_ser = timed([&] { hat_ser = ref::bloch_transform(f); });
  dev = 0.0;
  for (long i = 0; i < small.size(); ++i)
    dev = std::max(dev, (hat_par.psi[0][i] - hat_ser.psi[0][i]).norm());
  row("bloch_transform", t_fwd_ser, t_fwd_par, dev);

  LatticeFunction back_par, back_ser;
  const double t_inv_par = timed([&] { back_par = synthesize_section(small, hat_par.psi[0]); });
  const double t_inv_ser = timed([&] { back_ser = ref::synthesize_section(small, hat_ser.psi[0]); });
  dev = 0.0;
  for (long i = 0; i < small.size(); ++i)
    dev = std::max(dev, (back_par.values[i] - back_ser.values[i]).norm());
  row("synthesize", t_inv_ser, t_inv_par, dev);

  return 0;
}
