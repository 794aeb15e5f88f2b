#ifndef VWAVE_RUNNER_HPP
#define VWAVE_RUNNER_HPP

#include <optional>
#include <string>
#include <vector>

#include "vwave/config.hpp"
#include "vwave/goursat.hpp"

namespace vwave {

// Lattice geometry assembled from a config: a square index box whose data
// diagonal covers the support plus the light-cone margin.
struct PreparedRun {
  GridSpec gs;
  SolveOptions opts;
  double margin = 0;
  int n_s = 0;
};

PreparedRun prepare_run(const CoefficientSet& cs, const InitialData& data, double dx,
                        double T, const SolverBlock& solver = {},
                        std::optional<double> margin_override = {});
PreparedRun prepare_run(const RunConfig& cfg);

struct DispatchOverrides {
  std::optional<std::string> out_dir;
  std::vector<double> taus;
  int refine = 0;  // 0: command default
};

// Runs one subcommand, writes its artifacts plus summary.json into the output
// directory, and returns the process exit code (0 ok, 1 user error,
// 2 numerical failure).
int dispatch(const std::string& cmd, RunConfig& cfg, const DispatchOverrides& ov = {});

std::vector<std::string> known_commands();

}  // namespace vwave

#endif
