#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coagfuse/core.hpp"
#include "coagfuse/fusion_flow.hpp"
#include "coagfuse/kernels.hpp"
#include "coagfuse/mc_engine.hpp"
#include "coagfuse/sectional.hpp"
#include "coagfuse/smolu1d.hpp"

namespace coagfuse {

/// Flat `key = value` configuration (UTF-8, '#' comments). Every lookup
/// records the resolved value, so canonical_text() reproduces the full
/// effective configuration including defaults; keys present in the file but
/// never consumed are reported as errors by ensure_consumed().
class Config {
 public:
  static Config from_string(const std::string& text);
  static Config from_file(const std::string& path);

  bool has(const std::string& key) const { return raw_.count(key) > 0; }

  double get_double(const std::string& key, double fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::string get_string(const std::string& key, const std::string& fallback);
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback);

  void set(const std::string& key, const std::string& value);

  /// Throws std::invalid_argument listing any file keys that were never read.
  void ensure_consumed() const;

  /// Sorted "key = value" lines of every resolved key.
  std::string canonical_text() const;
  std::string hash_hex() const;

 private:
  std::map<std::string, std::string> raw_;
  std::set<std::string> consumed_;
  std::map<std::string, std::string> resolved_;
};

/// Everything a run or study needs, decoded from one Config.
struct RunSetup {
  SimConfig sim;
  CoagKernelParams coag;
  FusionKernelParams fusion;
  InitSpec init;
  FlowTolerances flow_tol;
  std::optional<TruncationParams> trunc;
  GridSpec grid;
  SectionalRunConfig sectional;
  Smolu1dRunConfig smolu;
  std::size_t smolu_bins = 256;
  DiagnosticsSpec diagnostics;
  std::vector<double> study_lambdas = {1.0, 0.1, 0.01, 0.001};
  std::size_t replicas = 8;
  double study_delta1 = 0.1;
  double study_epsilon = 0.1;
  double conc_threshold = 0.05;
  bool emit_snapshots = false;
  std::string config_hash;
  std::string config_text;
};

/// Decodes the documented key schema; unknown keys raise.
RunSetup load_run_setup(Config& cfg);

}  // namespace coagfuse
