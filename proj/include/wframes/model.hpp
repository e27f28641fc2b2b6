#ifndef WFRAMES_MODEL_HPP
#define WFRAMES_MODEL_HPP

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "wframes/lattice.hpp"
#include "wframes/types.hpp"

namespace wframes {

// Finite-range hopping table H_g on a Bravais lattice. The Bloch family
// H(k) = sum_g H_g exp(i k . (A g)) is Hermitian because the table is closed
// under g -> -g with adjoint matrices; closure is completed and verified at
// construction so a one-sided user list cannot produce a non-self-adjoint
// operator silently.
class BlochModel {
 public:
  using HopKey = std::array<int, 3>;  // integer lattice coordinates, unused trailing entries 0

  static BlochModel from_hoppings(const Lattice& lattice, int fiber_dim, std::string name,
                                  std::map<std::string, double> params,
                                  const std::map<HopKey, Mat>& hoppings);

  Mat bloch_hamiltonian(const RVec& k) const;

  const Lattice& lattice() const { return lattice_; }
  int fiber_dim() const { return fiber_; }
  int dim() const { return lattice_.dim; }
  const std::string& name() const { return name_; }
  const std::map<std::string, double>& params() const { return params_; }
  const std::map<HopKey, Mat>& hoppings() const { return hops_; }
  int hopping_range() const;  // max |g_j| over the support

 private:
  Lattice lattice_;
  int fiber_ = 0;
  std::string name_;
  std::map<std::string, double> params_;
  std::map<HopKey, Mat> hops_;
};

// Built-in gallery: atomic(d, dim), ssh(t1, t2), qwz(u), haldane(t1, t2, phi, M),
// qwz_stack_3d(u, tz). Unlisted parameter keys are rejected.
BlochModel builtin(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> builtin_names();
// One-line parameter summary per gallery entry, for `wframes models`.
std::string builtin_signature(const std::string& name);

// Plain-text model files; see README for the grammar. write/read round-trips
// are bit-identical because values are printed with 17 significant digits.
void write_model(const BlochModel& model, std::ostream& os);
BlochModel read_model(std::istream& is);
void save_model(const BlochModel& model, const std::string& path);
BlochModel load_model(const std::string& path);

}  // namespace wframes

#endif
