#ifndef VWAVE_CONFIG_HPP
#define VWAVE_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "vwave/coeffs.hpp"
#include "vwave/initdata.hpp"
#include "vwave/metric.hpp"

namespace vwave {

struct SolverBlock {
  int corrector_iters = 3;
  bool renormalize = true;
  int threads = 0;
};

struct GridBlock {
  double dx = 0;
  double T = 0;
  std::optional<double> margin;  // light-cone margin override
};

struct RunConfig {
  CoefficientSet cs;
  InitialData data_a;
  std::optional<InitialData> data_b;
  GridBlock grid;
  MetricWeights weights;
  bool weights_follow_template = true;
  int n_theta = 8;
  std::vector<double> taus;  // empty: command-specific default
  std::string out_dir = "out";
  SolverBlock solver;
  int validate_samples = 129;
  std::string config_hash;
  std::string source;
};

// Parses and validates a JSON run configuration. Errors carry the offending
// key name. The config hash is an FNV-1a digest of the canonical dump.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& json_text, const std::string& name = "<inline>");

// FNV-1a 64-bit digest, hex-encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace vwave

#endif
