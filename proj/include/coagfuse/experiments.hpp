#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coagfuse/config.hpp"
#include "coagfuse/mc_engine.hpp"

namespace coagfuse {

/// Worker budget: COAGFUSE_THREADS when set, otherwise hardware concurrency.
std::size_t worker_cap();

struct ReplicaStats {
  double mean = 0.0;
  double se = 0.0;  // sample standard error, 0 for a single replica
};

ReplicaStats replica_stats(const std::vector<double>& xs);

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct StudyReport {
  std::string name;
  std::vector<Check> checks;
  std::map<std::string, std::string> files;  // filename -> byte content
  std::string summary_json;                  // includes timing; not byte-stable
  bool all_pass = true;
  double min_excess = 0.0;  // most negative particle excess seen in any replica

  void add_check(const std::string& name, double value, double threshold, bool pass);
};

struct ReplicaOutcome {
  std::optional<McResult> result;
  std::string error;  // nonempty when the replica aborted
};

/// Replica-parallel ensemble with seeds derived from (base seed, replica index);
/// results are ordered by replica index regardless of scheduling.
std::vector<ReplicaOutcome> run_mc_ensemble(const RunSetup& setup, double lambda,
                                            std::size_t replicas,
                                            const DiagnosticsSpec& probes,
                                            std::optional<std::uint64_t> stop_after_events =
                                                std::nullopt);

/// Matched mean-field initial data for the deterministic solvers.
Marginal1D initial_marginal(const RunSetup& setup, double v_min, double v_max,
                            std::size_t bins);
GridState initial_grid_state(const RunSetup& setup, const Grid2D& grid);

/// Lambda sweep toward the fast-fusion limit: concentration near the
/// isoperimetric line and weak distance of the cutoff marginal to the
/// one-dimensional reference, both non-increasing along the sweep.
StudyReport study_fast_fusion(const RunSetup& setup);

/// Lambda sweep toward frozen fusion: area-moment drift scaling like 1/lambda.
StudyReport study_slow_fusion(const RunSetup& setup);

/// MC ensemble vs sectional oracle moments at the checkpoints.
StudyReport study_cross_validation(const RunSetup& setup);

/// Write report files plus report.json and a plot stub into out_dir.
void write_study_outputs(const StudyReport& report, const std::string& out_dir);

/// `run-mc` outputs: per-replica moment/probe CSVs and summary.json.
StudyReport run_mc_command(const RunSetup& setup, std::size_t replicas);

/// `run-sectional` / `run-smolu1d` outputs.
StudyReport run_sectional_command(const RunSetup& setup);
StudyReport run_smolu1d_command(const RunSetup& setup);

}  // namespace coagfuse
