#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wframes/pipeline.hpp"

namespace {

std::vector<int> parse_grid_flag(const std::string& s) {
  std::vector<int> sizes;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) sizes.push_back(std::stoi(tok));
  return sizes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parseval frames of exponentially localized Wannier functions "
               "for tight-binding models"};
  app.require_subcommand(1);

  std::string config_path, out_dir, route, grid;
  std::uint64_t seed = 0;
  bool seed_set = false, out_set = false, route_set = false, grid_set = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file")->required();
    cmd->add_option("--seed", seed, "override the configured seed")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("--out", out_dir, "override the output directory")
        ->each([&](const std::string&) { out_set = true; });
    cmd->add_option("--route", route, "override the route (auto|basis|augmented|embedded)")
        ->each([&](const std::string&) { route_set = true; });
    cmd->add_option("--grid", grid, "override the grid sizes, N1[,N2[,N3]]")
        ->each([&](const std::string&) { grid_set = true; });
  };

  CLI::App* cmd_run = app.add_subcommand("run", "run the full pipeline and write a report");
  add_common(cmd_run);
  CLI::App* cmd_validate = app.add_subcommand("validate", "check a configuration without numerics");
  add_common(cmd_validate);
  CLI::App* cmd_models = app.add_subcommand("models", "list the built-in model gallery");

  CLI11_PARSE(app, argc, argv);

  using namespace wframes;

  if (cmd_models->parsed()) {
    for (const auto& name : builtin_names()) std::cout << builtin_signature(name) << "\n";
    return 0;
  }

  RunConfig cfg;
  try {
    cfg = parse_config_file(config_path);
    if (seed_set) cfg.seed = seed;
    if (out_set) cfg.out_dir = out_dir;
    if (route_set) cfg.route = route_from_string(route);
    if (grid_set) cfg.grid_sizes = parse_grid_flag(grid);
  } catch (const Error& e) {
    std::cerr << "error code=2 kind=" << to_string(e.kind()) << " msg=\"" << e.what() << "\"\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error code=2 kind=config msg=\"" << e.what() << "\"\n";
    return 2;
  }

  if (cmd_validate->parsed()) {
    const auto diags = validate(cfg);
    for (const auto& d : diags) std::cout << "diagnostic: " << d << "\n";
    if (diags.empty()) std::cout << "config ok\n";
    return diags.empty() ? 0 : 2;
  }

  const RunResult result = run(cfg);
  if (result.exit_code != 0)
    std::cerr << "error code=" << result.exit_code << " msg=\"" << result.reason << "\"\n";
  else
    std::cout << "ok: report written to " << cfg.out_dir << "/report.txt\n";
  return result.exit_code;
}
