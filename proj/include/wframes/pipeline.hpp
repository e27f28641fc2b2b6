#ifndef WFRAMES_PIPELINE_HPP
#define WFRAMES_PIPELINE_HPP

#include <string>

#include "wframes/wannier.hpp"

namespace wframes {

// Flat dotted-key run configuration; see README for the full key list.
struct RunConfig {
  std::string model_name = "qwz";
  std::string model_file;  // when set, the model is loaded from this path
  std::map<std::string, double> model_params;
  std::vector<int> grid_sizes;
  SpectralWindow window = SpectralWindow::bands(1, 1);
  Route route = Route::automatic;
  std::uint64_t seed = 1;
  double gap_tol = 1e-8;
  double residual_tol = 1e-9;
  std::string out_dir = "out";
  bool emit_bands = true;
  bool emit_chern = true;
  bool emit_frame = true;
  bool emit_wannier = true;
  int parseval_trials = 20;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Schema and range diagnostics without running numerics; empty means clean.
std::vector<std::string> validate(const RunConfig& cfg);

struct RunResult {
  int exit_code = 0;
  std::string reason;  // one line, machine parsable; empty on success
};

// Full pipeline: model -> bands -> gap -> projectors -> Chern -> frame ->
// Wannier -> report. Writes report.txt plus the enabled data files into
// cfg.out_dir; the timestamp is the only nondeterministic report field.
RunResult run(const RunConfig& cfg);

int exit_code_for(ErrKind kind);

}  // namespace wframes

#endif
