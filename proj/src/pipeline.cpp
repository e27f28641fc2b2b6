#include "wframes/pipeline.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wframes {

namespace fs = std::filesystem;

namespace {

std::string fnum(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error(ErrKind::io, "cannot write '" + tmp.string() + "'");
    os << content;
  }
  fs::rename(tmp, path);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw Error(ErrKind::config, "key '" + key + "' expects a boolean, got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrKind::config, "key '" + key + "' expects a number, got '" + value + "'");
  }
}

long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrKind::config, "key '" + key + "' expects an integer, got '" + value + "'");
  }
}

std::string config_echo(const RunConfig& cfg) {
  std::ostringstream os;
  if (!cfg.model_file.empty())
    os << "  model.file " << cfg.model_file << "\n";
  else
    os << "  model.name " << cfg.model_name << "\n";
  for (const auto& [k, v] : cfg.model_params) os << "  model." << k << " " << fnum(v) << "\n";
  for (std::size_t j = 0; j < cfg.grid_sizes.size(); ++j)
    os << "  grid.n" << j + 1 << " " << cfg.grid_sizes[j] << "\n";
  if (cfg.window.kind == SpectralWindow::Kind::bands)
    os << "  window.lo " << cfg.window.lo << "\n  window.hi " << cfg.window.hi << "\n";
  else
    os << "  window.emin " << fnum(cfg.window.emin) << "\n  window.emax " << fnum(cfg.window.emax)
       << "\n";
  os << "  route " << to_string(cfg.route) << "\n";
  os << "  seed " << cfg.seed << "\n";
  os << "  tol.gap " << fnum(cfg.gap_tol) << "\n";
  os << "  tol.residual " << fnum(cfg.residual_tol) << "\n";
  os << "  parseval.trials " << cfg.parseval_trials << "\n";
  return os.str();
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  cfg.grid_sizes.clear();
  std::map<int, int> grid_entries;
  bool window_bands_set = false, window_energy_set = false;
  int window_lo = 1, window_hi = 1;
  double window_emin = 0, window_emax = 0;

  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key, value;
    if (!(ls >> key)) continue;
    if (!(ls >> value))
      throw Error(ErrKind::config, "line " + std::to_string(lineno) + ": key '" + key +
                                       "' has no value");

    if (key == "model.name") {
      cfg.model_name = value;
    } else if (key == "model.file") {
      cfg.model_file = value;
    } else if (key.rfind("model.", 0) == 0) {
      cfg.model_params[key.substr(6)] = parse_double(key, value);
    } else if (key.rfind("grid.n", 0) == 0) {
      const int j = static_cast<int>(parse_int(key, key.substr(6)));
      grid_entries[j] = static_cast<int>(parse_int(key, value));
    } else if (key == "window.lo") {
      window_lo = static_cast<int>(parse_int(key, value));
      window_bands_set = true;
    } else if (key == "window.hi") {
      window_hi = static_cast<int>(parse_int(key, value));
      window_bands_set = true;
    } else if (key == "window.emin") {
      window_emin = parse_double(key, value);
      window_energy_set = true;
    } else if (key == "window.emax") {
      window_emax = parse_double(key, value);
      window_energy_set = true;
    } else if (key == "route") {
      cfg.route = route_from_string(value);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "tol.gap") {
      cfg.gap_tol = parse_double(key, value);
    } else if (key == "tol.residual") {
      cfg.residual_tol = parse_double(key, value);
    } else if (key == "out.dir") {
      cfg.out_dir = value;
    } else if (key == "emit.bands") {
      cfg.emit_bands = parse_bool(key, value);
    } else if (key == "emit.chern") {
      cfg.emit_chern = parse_bool(key, value);
    } else if (key == "emit.frame") {
      cfg.emit_frame = parse_bool(key, value);
    } else if (key == "emit.wannier") {
      cfg.emit_wannier = parse_bool(key, value);
    } else if (key == "parseval.trials") {
      cfg.parseval_trials = static_cast<int>(parse_int(key, value));
    } else {
      throw Error(ErrKind::config, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }

  if (window_bands_set && window_energy_set)
    throw Error(ErrKind::config, "window.lo/hi and window.emin/emax cannot be mixed");
  cfg.window = window_energy_set ? SpectralWindow::energy(window_emin, window_emax)
                                 : SpectralWindow::bands(window_lo, window_hi);

  for (const auto& [j, nj] : grid_entries) {
    if (j < 1 || j > 3)
      throw Error(ErrKind::config, "grid.n" + std::to_string(j) + " is out of range");
    while (static_cast<int>(cfg.grid_sizes.size()) < j) cfg.grid_sizes.push_back(0);
    cfg.grid_sizes[j - 1] = nj;
  }
  for (std::size_t j = 0; j < cfg.grid_sizes.size(); ++j)
    if (cfg.grid_sizes[j] == 0)
      throw Error(ErrKind::config, "grid.n" + std::to_string(j + 1) + " is missing");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrKind::io, "cannot open config '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return parse_config_text(os.str());
}

std::vector<std::string> validate(const RunConfig& cfg) {
  std::vector<std::string> diags;

  int fiber = -1, dim = -1;
  if (!cfg.model_file.empty()) {
    try {
      const BlochModel m = load_model(cfg.model_file);
      fiber = m.fiber_dim();
      dim = m.dim();
    } catch (const Error& e) {
      diags.push_back(std::string("model file: ") + e.what());
    }
  } else {
    try {
      const BlochModel m = builtin(cfg.model_name, cfg.model_params);
      fiber = m.fiber_dim();
      dim = m.dim();
    } catch (const Error& e) {
      if (e.kind() == ErrKind::unknown_model) {
        std::string names;
        for (const auto& n : builtin_names()) names += (names.empty() ? "" : ", ") + n;
        diags.push_back("unknown model '" + cfg.model_name + "'; valid models: " + names);
      } else {
        diags.push_back(std::string("model: ") + e.what());
      }
    }
  }

  if (cfg.grid_sizes.empty()) diags.push_back("grid: no sizes given");
  for (std::size_t j = 0; j < cfg.grid_sizes.size(); ++j)
    if (cfg.grid_sizes[j] < 2)
      diags.push_back("grid-too-coarse: grid.n" + std::to_string(j + 1) + " = " +
                      std::to_string(cfg.grid_sizes[j]) + " is below the minimum of 2");
  if (dim > 0 && !cfg.grid_sizes.empty() && static_cast<int>(cfg.grid_sizes.size()) != dim)
    diags.push_back("grid: " + std::to_string(cfg.grid_sizes.size()) + " sizes given for a " +
                    std::to_string(dim) + "-dimensional model");

  if (cfg.window.kind == SpectralWindow::Kind::bands) {
    if (cfg.window.lo < 1 || cfg.window.hi < cfg.window.lo)
      diags.push_back("window: band range [" + std::to_string(cfg.window.lo) + ", " +
                      std::to_string(cfg.window.hi) + "] is malformed");
    else if (fiber > 0 && cfg.window.hi > fiber)
      diags.push_back("window: band index " + std::to_string(cfg.window.hi) +
                      " out of range for fiber dimension " + std::to_string(fiber));
  } else if (!(cfg.window.emin < cfg.window.emax)) {
    diags.push_back("window: energy interval is empty");
  }

  if (!(cfg.gap_tol > 0)) diags.push_back("tol.gap must be positive");
  if (!(cfg.residual_tol > 0)) diags.push_back("tol.residual must be positive");
  if (cfg.parseval_trials < 1) diags.push_back("parseval.trials must be at least 1");
  return diags;
}

int exit_code_for(ErrKind kind) {
  switch (kind) {
    case ErrKind::config:
    case ErrKind::unknown_model:
    case ErrKind::bad_model_file:
    case ErrKind::degenerate_lattice:
    case ErrKind::precondition:
    case ErrKind::unsupported_chern:
    case ErrKind::io:
      return 2;
    case ErrKind::gapless:
    case ErrKind::not_isolated:
    case ErrKind::contour_placement:
      return 3;
    case ErrKind::grid_too_coarse:
    case ErrKind::degenerate_overlap:
      return 4;
    case ErrKind::genericity_failure:
    case ErrKind::singular_gram:
    case ErrKind::branch_cut:
    case ErrKind::nonzero_chern:
    case ErrKind::numerical_failure:
      return 5;
    case ErrKind::certificate_rejected:
    case ErrKind::subspace_mismatch:
      return 6;
  }
  return 1;
}

namespace {

std::string bands_csv(const BandStructure& bands) {
  std::ostringstream os;
  const int dim = bands.grid.dim();
  os << "index";
  for (int j = 0; j < dim; ++j) os << ",m" << j + 1;
  for (int j = 0; j < dim; ++j) os << ",k" << j + 1;
  for (int j = 0; j < bands.fiber; ++j) os << ",lambda_" << j + 1;
  os << "\n";
  for (long idx = 0; idx < bands.grid.size(); ++idx) {
    os << idx;
    const auto m = bands.grid.multi(idx);
    for (int j = 0; j < dim; ++j) os << "," << m[j];
    const RVec k = bands.grid.kpoint(idx);
    for (int j = 0; j < dim; ++j) os << "," << fnum(k(j));
    for (int j = 0; j < bands.fiber; ++j) os << "," << fnum(bands.eigenvalues[idx](j));
    os << "\n";
  }
  return os.str();
}

std::string chern_text(const ChernReport& rep) {
  std::ostringstream os;
  for (const auto& e : rep.entries)
    os << "c " << e.a + 1 << " " << e.b + 1 << " " << e.c << " residual " << fnum(e.residual)
       << "\n";
  os << "trivial " << (rep.trivial ? "true" : "false") << "\n";
  return os.str();
}

std::string frame_text(const FrameCertificate& cert) {
  std::ostringstream os;
  os << "route " << to_string(cert.route) << "\n";
  os << "l " << cert.l << "\n";
  os << "max_parseval_residual " << fnum(cert.max_parseval_residual) << "\n";
  os << "frame_bounds " << fnum(cert.frame_a) << " " << fnum(cert.frame_b) << "\n";
  os << "smoothness " << fnum(cert.smoothness) << "\n";
  os << "tolerance " << fnum(cert.tol) << "\n";
  os << "accepted " << (cert.accepted ? "true" : "false") << "\n";
  return os.str();
}

std::string shells_csv(const WannierSet& set) {
  std::ostringstream os;
  const int dim = set.funcs.empty() ? 0 : set.funcs[0].w.grid.dim();
  os << "function,shell,r_iso";
  for (int j = 0; j < dim; ++j) os << ",r_dir" << j + 1;
  os << "\n";
  for (std::size_t f = 0; f < set.funcs.size(); ++f) {
    const auto& wf = set.funcs[f];
    for (std::size_t t = 0; t < wf.shell_norms.size(); ++t) {
      os << f + 1 << "," << t << "," << fnum(wf.shell_norms[t]);
      for (int j = 0; j < dim; ++j)
        os << ","
           << fnum(t < wf.dir_shell_norms[j].size() ? wf.dir_shell_norms[j][t] : 0.0);
      os << "\n";
    }
  }
  return os.str();
}

std::string coeffs_csv(const WannierSet& set) {
  std::ostringstream os;
  const int dim = set.funcs.empty() ? 0 : set.funcs[0].w.grid.dim();
  os << "function";
  for (int j = 0; j < dim; ++j) os << ",m" << j + 1;
  os << ",orbital,re,im\n";
  for (std::size_t f = 0; f < set.funcs.size(); ++f) {
    const auto& w = set.funcs[f].w;
    for (long idx = 0; idx < w.grid.size(); ++idx) {
      const auto m = w.grid.multi(idx);
      for (int orb = 0; orb < w.fiber; ++orb) {
        os << f + 1;
        for (int j = 0; j < dim; ++j) os << "," << m[j];
        os << "," << orb + 1 << "," << fnum(w.values[idx](orb).real()) << ","
           << fnum(w.values[idx](orb).imag()) << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace

RunResult run(const RunConfig& cfg) {
  std::ostringstream rep;
  {
    char stamp[64];
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    rep << "wframes run report\n";
    rep << "timestamp: " << stamp << "\n";
  }
  rep << "config:\n" << config_echo(cfg);

  const fs::path out_dir(cfg.out_dir);
  auto finish = [&](int code, const std::string& reason) {
    rep << (code == 0 ? "status: ok\n"
                      : "status: error code=" + std::to_string(code) + " " + reason + "\n");
    write_file_atomic(out_dir / "report.txt", rep.str());
    return RunResult{code, reason};
  };

  try {
    const BlochModel model = cfg.model_file.empty() ? builtin(cfg.model_name, cfg.model_params)
                                                    : load_model(cfg.model_file);
    if (static_cast<int>(cfg.grid_sizes.size()) != model.dim())
      throw Error(ErrKind::config, "grid has " + std::to_string(cfg.grid_sizes.size()) +
                                       " sizes for a " + std::to_string(model.dim()) +
                                       "-dimensional model");
    const KGrid grid = KGrid::make(model.lattice(), cfg.grid_sizes);

    const BandStructure bands = band_structure(model, grid, true);
    double lo = bands.eigenvalues[0](0), hi = lo;
    for (long idx = 0; idx < grid.size(); ++idx) {
      lo = std::min(lo, bands.eigenvalues[idx](0));
      hi = std::max(hi, bands.eigenvalues[idx](bands.fiber - 1));
    }
    rep << "[bands] fiber " << bands.fiber << ", points " << grid.size() << ", spectrum ["
        << fnum(lo) << ", " << fnum(hi) << "]\n";
    if (cfg.emit_bands) write_file_atomic(out_dir / "bands.csv", bands_csv(bands));

    const GapReport gap = gap_check(bands, cfg.window, cfg.gap_tol);
    rep << "[gap] m " << gap.m << ", gap_below " << fnum(gap.below) << ", gap_above "
        << fnum(gap.above) << "\n";

    const ProjectorField field =
        projector_field(bands, model, cfg.window, ProjectorMethod::eigensum, 256, cfg.gap_tol);
    rep << "[projector] rank " << field.rank << ", smoothness " << fnum(field.smoothness) << "\n";

    const ChernReport chern = chern_report(field);
    rep << "[chern]";
    for (const auto& e : chern.entries)
      rep << " c(" << e.a + 1 << "," << e.b + 1 << ")=" << e.c;
    rep << " trivial=" << (chern.trivial ? "true" : "false") << "\n";
    if (cfg.emit_chern) write_file_atomic(out_dir / "chern.txt", chern_text(chern));

    if (!chern.trivial && field.rank == 1 && grid.dim() == 2) {
      const WindingDiagnostic wd = winding_diagnostic(field, 0);
      rep << "[obstruction] transport-phase winding along k1 over the k2 cycle: " << wd.total
          << "\n";
    }

    FrameOptions opt;
    opt.tol = cfg.residual_tol;
    const ParsevalFrame frame = parseval_sections(field, chern, cfg.route, cfg.seed, opt);
    rep << "[frame] route " << to_string(frame.certificate.route) << ", l " << frame.certificate.l
        << ", residual " << fnum(frame.certificate.max_parseval_residual) << ", bounds ("
        << fnum(frame.certificate.frame_a) << ", " << fnum(frame.certificate.frame_b)
        << "), smoothness " << fnum(frame.certificate.smoothness) << "\n";
    if (cfg.emit_frame) write_file_atomic(out_dir / "frame.txt", frame_text(frame.certificate));
    if (!frame.certificate.accepted)
      throw Error(ErrKind::certificate_rejected,
                  "frame certificate rejected (residual " +
                      fnum(frame.certificate.max_parseval_residual) + ", tolerance " +
                      fnum(frame.certificate.tol) + ")");

    const WannierSet wann = synthesize(frame.sections);
    rep << "[wannier] functions " << wann.funcs.size() << ", fit shells [" << wann.fit_lo << ", "
        << wann.fit_hi << "]\n";
    for (std::size_t f = 0; f < wann.funcs.size(); ++f) {
      const auto& wf = wann.funcs[f];
      rep << "  w" << f + 1 << " norm2 " << fnum(wf.w.norm2());
      if (wf.iso_fit.super_exponential)
        rep << " decay super-exponential (at or below the noise floor)";
      else {
        rep << " rate " << fnum(wf.iso_fit.rate) << " r2 " << fnum(wf.iso_fit.r2) << " dir-rates";
        for (const auto& df : wf.dir_fits)
          rep << " " << (df.super_exponential ? std::string("super") : fnum(df.rate));
      }
      rep << "\n";
    }
    if (cfg.emit_wannier) {
      write_file_atomic(out_dir / "wannier_shells.csv", shells_csv(wann));
      write_file_atomic(out_dir / "wannier_coeffs.csv", coeffs_csv(wann));
    }

    const ParsevalCheckResult pc =
        parseval_identity_check(wann, field, frame.certificate, cfg.parseval_trials, cfg.seed);
    rep << "[parseval] trials " << pc.trials << ", max_rel_err " << fnum(pc.max_rel_err) << "\n";

    return finish(0, "");
  } catch (const Error& e) {
    return finish(exit_code_for(e.kind()), e.what());
  } catch (const std::exception& e) {
    return finish(1, std::string("unexpected: ") + e.what());
  }
}

}  // namespace wframes
