#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "coagfuse/core.hpp"
#include "coagfuse/diagnostics.hpp"
#include "coagfuse/fusion_flow.hpp"
#include "coagfuse/kernels.hpp"
#include "coagfuse/numeric.hpp"
#include "coagfuse/sum_tree.hpp"

namespace coagfuse {

struct EventLog {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t self_draws = 0;  // i == j redraws
  double wall_seconds = 0.0;
  double min_excess_seen = 0.0;  // most negative e observed (0 if none)
  bool beta_warning = false;     // beta >= 0.95 is outside the proven kernel range
};

struct McResult {
  ParticleSystem system;
  std::vector<MomentRecord> records;
  std::vector<ProbeRecord> probes;
  EventLog log;
};

/// Event-driven Marcus-Lushnikov simulation of the coagulation-fusion dynamics.
///
/// The event clock runs against the separable majorant
///   R_hat = weight * c_scale * (W- * W+ - sum_i w-_i w+_i),
/// which depends only on particle volumes. Fusion moves areas but never
/// volumes, so R_hat is constant between coagulation events and the
/// exponential waiting time against it is exact in law even while areas
/// drift continuously; proposals are thinned with the true kernel evaluated
/// at the proposal time. The only numerical approximation in the whole loop
/// is the fusion ODE integrator.
class McSimulation {
 public:
  McSimulation(ParticleSystem init, CoagKernelParams coag, FusionKernelParams fusion,
               SimConfig cfg, std::optional<TruncationParams> trunc = std::nullopt,
               FlowTolerances flow_tol = {});

  /// Total rate of the ordered-pair majorant; >= the true total coagulation
  /// rate, 0 when fewer than two particles remain.
  double total_majorant_rate() const;

  /// One thinning draw against the frozen current state: picks i ~ w-, j ~ w+
  /// (redrawing the pair while i == j), accepts with K(i,j) / majorant(i,j).
  /// Does not modify particle state; increments proposal counters.
  std::optional<std::pair<std::size_t, std::size_t>> sample_event();

  /// Runs until t_end, until fewer than two particles remain, or until
  /// `stop_after_events` accepted coagulations. Emits records at the
  /// configured cadence (plus t = 0 and the final time).
  McResult run(const DiagnosticsSpec& probes,
               std::optional<std::uint64_t> stop_after_events = std::nullopt);

  const ParticleSystem& system() const { return sys_; }
  std::size_t live_count() const { return live_; }
  const EventLog& log() const { return log_; }

  /// Bring every particle's fusion state up to the current clock.
  void sync_all();

 private:
  void sync_particle(std::size_t i);
  void apply_coagulation(std::size_t i, std::size_t j);
  void assign_weights(std::size_t i, double wm, double wp);
  void set_weights(std::size_t i);
  void maybe_rebuild();
  double pair_majorant(std::size_t i, std::size_t j) const;
  double kernel_value(const Particle& a, const Particle& b) const;

  ParticleSystem sys_;
  CoagKernelParams coag_;
  FusionKernelParams fusion_;
  SimConfig cfg_;
  std::optional<TruncationParams> trunc_;
  FlowTolerances flow_tol_;

  std::size_t live_ = 0;
  std::vector<double> wminus_;
  std::vector<double> wplus_;
  std::vector<double> synced_to_;  // per-particle fusion sync time
  PrefixSumTree tree_minus_;
  PrefixSumTree tree_plus_;
  double sum_self_products_ = 0.0;  // sum_i w-_i * w+_i
  std::uint64_t updates_since_rebuild_ = 0;
  std::uint64_t proposals_at_last_accept_ = 0;

  Rng rng_;
  EventLog log_;
};

/// Initial-condition generators; all produce spheres unless kappa > 0.
struct InitSpec {
  enum class Kind { Monodisperse, LogNormal, Ramified };
  Kind kind = Kind::Monodisperse;
  double v0 = 1.0;
  double log_sigma = 0.5;  // LogNormal / Ramified volume spread
  double kappa = 0.0;      // Ramified: e = kappa * v
  double weight = 0.0;     // <= 0 means 1 / n_particles
};

ParticleSystem make_initial_system(const InitSpec& init, const SimConfig& cfg);

/// Convenience wrapper: build the initial system for (cfg, seed) and run.
McResult run_mc(const CoagKernelParams& coag, const FusionKernelParams& fusion,
                const SimConfig& cfg, const InitSpec& init, const DiagnosticsSpec& probes,
                std::optional<TruncationParams> trunc = std::nullopt,
                std::optional<std::uint64_t> stop_after_events = std::nullopt,
                FlowTolerances flow_tol = {});

}  // namespace coagfuse
