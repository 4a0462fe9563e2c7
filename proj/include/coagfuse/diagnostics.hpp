#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coagfuse/core.hpp"
#include "coagfuse/sectional.hpp"
#include "coagfuse/smolu1d.hpp"

namespace coagfuse {

/// Area cutoff chi_eps: 1 on (0, 1/eps^2], 0 on [2/eps^2, inf), linear ramp
/// in between.
struct CutoffSpec {
  double epsilon = 0.1;

  void validate() const;
  double chi(double area) const;
};

struct ProbeRecord {
  double time = 0.0;
  std::optional<double> concentration_fraction;
  std::optional<Marginal1D> cutoff_marginal;
};

/// What run_mc measures at each record time.
struct DiagnosticsSpec {
  std::vector<MomentKey> moment_pairs = {{0, 0}, {0, 1}, {1, 0}, {0, 2}};
  std::optional<double> concentration_delta1;
  std::optional<CutoffSpec> cutoff;
  std::vector<double> marginal_edges;  // used when cutoff is set
};

/// Weighted moment sums M_{k,l} = sum w a^k v^l over the ensemble.
/// Throws std::runtime_error naming the offending pair on a non-finite result.
MomentRecord moments(const ParticleSystem& sys, std::span<const MomentKey> pairs);

/// Fraction of v-weighted mass sitting strictly above the band e <= delta1;
/// the computable proxy for test functions vanishing near the isoperimetric
/// line. Throws std::invalid_argument on an empty system.
double concentration_fraction(const ParticleSystem& sys, double delta1);

/// Histogram of chi_eps(a) * weight over the given volume bins; mass outside
/// the edges is dropped on both ends.
Marginal1D cutoff_marginal(const ParticleSystem& sys, const CutoffSpec& spec,
                           std::span<const double> v_edges);

/// Bounded-Lipschitz-style distance between two marginals on common edges:
/// max over a fixed dictionary of 64 hat functions, each scaled to unit
/// Lipschitz and sup norm bounds. Throws on mismatched edges.
double weak_distance(const Marginal1D& m1, const Marginal1D& m2);

/// CSV serializers (shortest round-trip doubles, documented headers).
std::string moment_records_csv(std::span<const MomentRecord> records);
std::string probe_records_csv(std::span<const ProbeRecord> records);
std::string marginal_csv(const Marginal1D& m);
std::string grid_state_csv(const Grid2D& grid, const GridState& state);

}  // namespace coagfuse
