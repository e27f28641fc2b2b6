#include "wframes/model.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace wframes {

namespace {

BlochModel::HopKey negate(const BlochModel::HopKey& g) { return {-g[0], -g[1], -g[2]}; }

bool is_zero_key(const BlochModel::HopKey& g) { return g[0] == 0 && g[1] == 0 && g[2] == 0; }

Mat pauli(int i) {
  Mat s(2, 2);
  switch (i) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, cxd(0, -1), cxd(0, 1), 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

void check_params(const std::string& name, const std::map<std::string, double>& given,
                  std::map<std::string, double>& defaults) {
  for (const auto& [key, value] : given) {
    auto it = defaults.find(key);
    if (it == defaults.end())
      throw Error(ErrKind::config, "model '" + name + "' has no parameter '" + key + "'");
    it->second = value;
  }
}

}  // namespace

BlochModel BlochModel::from_hoppings(const Lattice& lattice, int fiber_dim, std::string name,
                                     std::map<std::string, double> params,
                                     const std::map<HopKey, Mat>& hoppings) {
  if (fiber_dim < 1) throw Error(ErrKind::config, "fiber dimension must be positive");
  BlochModel m;
  m.lattice_ = lattice;
  m.fiber_ = fiber_dim;
  m.name_ = std::move(name);
  m.params_ = std::move(params);

  for (const auto& [g, h] : hoppings) {
    if (h.rows() != fiber_dim || h.cols() != fiber_dim)
      throw Error(ErrKind::config, "hopping matrix has wrong dimensions in model '" + m.name_ + "'");
    for (int j = lattice.dim; j < 3; ++j)
      if (g[j] != 0)
        throw Error(ErrKind::config, "hopping vector uses components beyond the lattice dimension");
  }

  // Complete the Hermitian closure; verify where both sides were given.
  for (const auto& [g, h] : hoppings) {
    if (is_zero_key(g)) {
      if (hermitian_deviation(h) > 1e-14 * std::max(1.0, h.norm()))
        throw Error(ErrKind::config, "on-site block of model '" + m.name_ + "' is not Hermitian");
      m.hops_[g] = h;
      continue;
    }
    auto rev = hoppings.find(negate(g));
    if (rev != hoppings.end()) {
      if ((rev->second - h.adjoint()).norm() > 1e-14 * std::max(1.0, h.norm()))
        throw Error(ErrKind::config,
                    "hoppings of model '" + m.name_ + "' violate H(-g) = H(g)^dagger");
      m.hops_[g] = h;
    } else {
      m.hops_[g] = h;
      m.hops_[negate(g)] = h.adjoint();
    }
  }
  if (m.hops_.find({0, 0, 0}) == m.hops_.end())
    m.hops_[{0, 0, 0}] = Mat::Zero(fiber_dim, fiber_dim);
  return m;
}

Mat BlochModel::bloch_hamiltonian(const RVec& k) const {
  if (k.size() != lattice_.dim)
    throw Error(ErrKind::config, "quasi-momentum dimension does not match the lattice");
  Mat h = Mat::Zero(fiber_, fiber_);
  for (const auto& [g, hop] : hops_) {
    double phase = 0.0;
    for (int j = 0; j < lattice_.dim; ++j) phase += k.dot(lattice_.basis.col(j)) * g[j];
    h += hop * std::polar(1.0, phase);
  }
  return h;
}

int BlochModel::hopping_range() const {
  int r = 0;
  for (const auto& [g, hop] : hops_)
    for (int j = 0; j < 3; ++j) r = std::max(r, std::abs(g[j]));
  return r;
}

BlochModel builtin(const std::string& name, const std::map<std::string, double>& params) {
  using Key = BlochModel::HopKey;
  if (name == "atomic") {
    std::map<std::string, double> p{{"d", 2}, {"dim", 2}};
    auto given = params;
    check_params(name, given, p);
    const int d = static_cast<int>(p["d"]);
    const int dim = static_cast<int>(p["dim"]);
    if (d < 1) throw Error(ErrKind::config, "atomic: d must be >= 1");
    Mat onsite = Mat::Zero(d, d);
    for (int j = 0; j < d; ++j) onsite(j, j) = j;
    return BlochModel::from_hoppings(Lattice::cubic(dim), d, "atomic", p, {{Key{0, 0, 0}, onsite}});
  }
  if (name == "ssh") {
    std::map<std::string, double> p{{"t1", 1.0}, {"t2", 0.0}};
    auto given = params;
    check_params(name, given, p);
    Mat h0 = p["t1"] * pauli(1);
    Mat h1(2, 2);
    h1 << 0, 0, p["t2"], 0;
    return BlochModel::from_hoppings(Lattice::cubic(1), 2, "ssh", p,
                                     {{Key{0, 0, 0}, h0}, {Key{1, 0, 0}, h1}});
  }
  if (name == "qwz") {
    std::map<std::string, double> p{{"u", 1.0}};
    auto given = params;
    check_params(name, given, p);
    // H(k) = sin k1 s1 + sin k2 s2 + (u + cos k1 + cos k2) s3
    Mat hx = 0.5 * (pauli(3) - cxd(0, 1) * pauli(1));
    Mat hy = 0.5 * (pauli(3) - cxd(0, 1) * pauli(2));
    return BlochModel::from_hoppings(
        Lattice::cubic(2), 2, "qwz", p,
        {{Key{0, 0, 0}, p["u"] * pauli(3)}, {Key{1, 0, 0}, hx}, {Key{0, 1, 0}, hy}});
  }
  if (name == "haldane") {
    std::map<std::string, double> p{{"t1", 1.0}, {"t2", 0.1}, {"phi", pi / 2}, {"M", 0.0}};
    auto given = params;
    check_params(name, given, p);
    const double t1 = p["t1"], t2 = p["t2"], phi = p["phi"], big_m = p["M"];
    const cxd nnn = t2 * std::polar(1.0, phi);
    Mat e_ab(2, 2), e_aa(2, 2), e_bb(2, 2);
    e_ab << 0, 1, 0, 0;
    e_aa << 1, 0, 0, 0;
    e_bb << 0, 0, 0, 1;
    Mat h0(2, 2);
    h0 << big_m, t1, t1, -big_m;
    // NNN loops v1 = a1, v2 = a2 - a1, v3 = -a2 rotate counterclockwise; the
    // two sublattices carry opposite chirality phases. The table is given
    // fully closed because (1,0) and (0,-1) mix NN and NNN contributions.
    Mat loop = nnn * e_aa + std::conj(nnn) * e_bb;
    std::map<Key, Mat> hops;
    hops[{0, 0, 0}] = h0;
    hops[{-1, 0, 0}] = t1 * e_ab + loop.adjoint();
    hops[{1, 0, 0}] = loop + t1 * e_ab.adjoint();
    hops[{0, -1, 0}] = t1 * e_ab + loop;
    hops[{0, 1, 0}] = loop.adjoint() + t1 * e_ab.adjoint();
    hops[{-1, 1, 0}] = loop;
    hops[{1, -1, 0}] = loop.adjoint();
    return BlochModel::from_hoppings(Lattice::hexagonal(), 2, "haldane", p, hops);
  }
  if (name == "qwz_stack_3d") {
    std::map<std::string, double> p{{"u", 1.0}, {"tz", 0.1}};
    auto given = params;
    check_params(name, given, p);
    Mat hx = 0.5 * (pauli(3) - cxd(0, 1) * pauli(1));
    Mat hy = 0.5 * (pauli(3) - cxd(0, 1) * pauli(2));
    Mat hz = 0.5 * p["tz"] * pauli(3);
    return BlochModel::from_hoppings(Lattice::cubic(3), 2, "qwz_stack_3d", p,
                                     {{Key{0, 0, 0}, p["u"] * pauli(3)},
                                      {Key{1, 0, 0}, hx},
                                      {Key{0, 1, 0}, hy},
                                      {Key{0, 0, 1}, hz}});
  }
  throw Error(ErrKind::unknown_model,
              "no built-in model named '" + name + "'; known: atomic, ssh, qwz, haldane, qwz_stack_3d");
}

std::vector<std::string> builtin_names() { return {"atomic", "ssh", "qwz", "haldane", "qwz_stack_3d"}; }

std::string builtin_signature(const std::string& name) {
  if (name == "atomic") return "atomic(d=2, dim=2)        flat bands 0..d-1 on a cubic lattice";
  if (name == "ssh") return "ssh(t1=1, t2=0)           1D two-band chain";
  if (name == "qwz") return "qwz(u=1)                  2D two-band model, Chern -1 for 0<u<2";
  if (name == "haldane") return "haldane(t1=1, t2=0.1, phi=pi/2, M=0)  honeycomb model, |Chern| = 1";
  if (name == "qwz_stack_3d") return "qwz_stack_3d(u=1, tz=0.1) weakly coupled stack of qwz layers";
  return "";
}

void write_model(const BlochModel& model, std::ostream& os) {
  os << std::setprecision(17);
  os << "wframes-model 1\n";
  os << "name " << model.name() << "\n";
  os << "dim " << model.dim() << "\n";
  os << "fiber " << model.fiber_dim() << "\n";
  for (int j = 0; j < model.dim(); ++j) {
    os << "basis";
    for (int i = 0; i < model.dim(); ++i) os << " " << model.lattice().basis(i, j);
    os << "\n";
  }
  for (const auto& [key, value] : model.params()) os << "param " << key << " " << value << "\n";
  const int d = model.fiber_dim();
  for (const auto& [g, h] : model.hoppings()) {
    os << "hopping";
    for (int j = 0; j < model.dim(); ++j) os << " " << g[j];
    os << "\n";
    for (int i = 0; i < d; ++i) {
      os << "re";
      for (int j = 0; j < d; ++j) os << " " << h(i, j).real();
      os << "\n";
    }
    for (int i = 0; i < d; ++i) {
      os << "im";
      for (int j = 0; j < d; ++j) os << " " << h(i, j).imag();
      os << "\n";
    }
  }
  os << "end\n";
}

BlochModel read_model(std::istream& is) {
  auto fail = [](const std::string& msg) -> std::runtime_error {
    return Error(ErrKind::bad_model_file, msg);
  };
  std::string line, tok;
  if (!std::getline(is, line) || line.rfind("wframes-model", 0) != 0)
    throw fail("missing 'wframes-model' header");

  std::string name = "unnamed";
  int dim = -1, fiber = -1;
  std::vector<std::vector<double>> basis_rows;
  std::map<std::string, double> params;
  std::map<BlochModel::HopKey, Mat> hops;

  BlochModel::HopKey cur{0, 0, 0};
  std::vector<std::vector<double>> re_rows, im_rows;
  bool in_hopping = false;

  auto flush_hopping = [&]() {
    if (!in_hopping) return;
    if (static_cast<int>(re_rows.size()) != fiber || static_cast<int>(im_rows.size()) != fiber)
      throw fail("hopping block has wrong number of matrix rows");
    Mat h(fiber, fiber);
    for (int i = 0; i < fiber; ++i) {
      if (static_cast<int>(re_rows[i].size()) != fiber || static_cast<int>(im_rows[i].size()) != fiber)
        throw fail("hopping matrix row has wrong length");
      for (int j = 0; j < fiber; ++j) h(i, j) = cxd(re_rows[i][j], im_rows[i][j]);
    }
    if (hops.count(cur)) throw fail("duplicate hopping vector");
    hops[cur] = h;
    re_rows.clear();
    im_rows.clear();
    in_hopping = false;
  };

  while (std::getline(is, line)) {
    std::istringstream ls(line);
    if (!(ls >> tok) || tok[0] == '#') continue;
    if (tok == "end") break;
    if (tok == "name") {
      ls >> name;
    } else if (tok == "dim") {
      ls >> dim;
    } else if (tok == "fiber") {
      ls >> fiber;
    } else if (tok == "basis") {
      std::vector<double> row;
      double v;
      while (ls >> v) row.push_back(v);
      basis_rows.push_back(row);
    } else if (tok == "param") {
      std::string key;
      double v;
      if (!(ls >> key >> v)) throw fail("malformed param line");
      params[key] = v;
    } else if (tok == "hopping") {
      flush_hopping();
      if (dim < 1 || fiber < 1) throw fail("hopping block before dim/fiber");
      cur = {0, 0, 0};
      for (int j = 0; j < dim; ++j)
        if (!(ls >> cur[j])) throw fail("hopping vector has too few components");
      in_hopping = true;
    } else if (tok == "re" || tok == "im") {
      if (!in_hopping) throw fail("matrix row outside a hopping block");
      std::vector<double> row;
      double v;
      while (ls >> v) row.push_back(v);
      (tok == "re" ? re_rows : im_rows).push_back(row);
    } else {
      throw fail("unknown directive '" + tok + "'");
    }
  }
  flush_hopping();

  if (dim < 1 || dim > 3) throw fail("missing or invalid dim");
  if (fiber < 1) throw fail("missing or invalid fiber");
  if (static_cast<int>(basis_rows.size()) != dim) throw fail("expected one basis line per dimension");
  RMat basis(dim, dim);
  for (int j = 0; j < dim; ++j) {
    if (static_cast<int>(basis_rows[j].size()) != dim) throw fail("basis line has wrong length");
    for (int i = 0; i < dim; ++i) basis(i, j) = basis_rows[j][i];
  }
  return BlochModel::from_hoppings(Lattice::make(dim, basis), fiber, name, params, hops);
}

void save_model(const BlochModel& model, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrKind::io, "cannot open '" + path + "' for writing");
  write_model(model, os);
}

BlochModel load_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrKind::io, "cannot open '" + path + "' for reading");
  return read_model(is);
}

}  // namespace wframes
