// Batch front-end: subcommand dispatch over a JSON run configuration.
// Exit codes: 0 success, 1 user/config error, 2 numerical failure.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vwave/config.hpp"
#include "vwave/errors.hpp"
#include "vwave/runner.hpp"
#include "vwave/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"vwave: conservative solutions of the quasilinear variational wave "
               "equation and their transport metric"};
  app.set_version_flag("--version", vwave::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<double> taus;
  int refine = 0;

  for (const std::string& name : vwave::known_commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--tau", taus, "slice times (overrides config)");
    if (name == "convergence")
      sub->add_option("--refine", refine, "number of refinement levels");
  }

  CLI11_PARSE(app, argc, argv);
  std::string cmd = app.get_subcommands().front()->get_name();

  try {
    vwave::RunConfig cfg = vwave::parse_config(config_path);
    vwave::DispatchOverrides ov;
    if (!out_dir.empty()) ov.out_dir = out_dir;
    ov.taus = taus;
    ov.refine = refine;
    int code = vwave::dispatch(cmd, cfg, ov);
    if (code != 0)
      std::fprintf(stderr, "vwave %s: finished with exit code %d (see summary.json)\n",
                   cmd.c_str(), code);
    return code;
  } catch (const vwave::ConfigError& e) {
    std::fprintf(stderr, "vwave: %s\n", e.what());
    return 1;
  } catch (const vwave::Error& e) {
    std::fprintf(stderr, "vwave: %s\n", e.what());
    return 2;
  }
}
