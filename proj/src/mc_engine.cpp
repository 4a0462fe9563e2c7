#include "coagfuse/mc_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "coagfuse/csv.hpp"

namespace coagfuse {

namespace {
constexpr std::uint64_t kRebuildPeriod = 1u << 16;
constexpr std::uint64_t kStallWindow = 1000000;
}  // namespace

McSimulation::McSimulation(ParticleSystem init, CoagKernelParams coag,
                           FusionKernelParams fusion, SimConfig cfg,
                           std::optional<TruncationParams> trunc, FlowTolerances flow_tol)
    : sys_(std::move(init)),
      coag_(coag),
      fusion_(fusion),
      cfg_(cfg),
      trunc_(trunc),
      flow_tol_(flow_tol),
      live_(sys_.particles.size()),
      tree_minus_(std::span<const double>{}),
      tree_plus_(std::span<const double>{}),
      rng_(derive_seed(sys_.rng_seed, 0)) {
  coag_.validate();
  fusion_.validate();
  cfg_.validate();
  if (trunc_) trunc_->validate();
  if (!sys_.valid()) throw std::invalid_argument("run_mc: invalid initial system");
  for (const Particle& p : sys_.particles) {
    if (p.v < cfg_.v_min) {
      throw std::invalid_argument("run_mc: initial particle below v_min, v=" +
                                  fmt_double(p.v));
    }
  }
  if (coag_.beta >= 0.95) {
    log_.beta_warning = true;
    std::cerr << "run_mc: warning, beta=" << coag_.beta
              << " is close to the gelation-adjacent range (>= 0.95)\n";
  }

  wminus_.resize(live_);
  wplus_.resize(live_);
  synced_to_.assign(live_, sys_.time);
  KahanSum self;
  for (std::size_t i = 0; i < live_; ++i) {
    const auto [wm, wp] = eval_majorant_weights(coag_, sys_.particles[i]);
    wminus_[i] = wm;
    wplus_[i] = wp;
    self.add(wm * wp);
  }
  sum_self_products_ = self.value();
  tree_minus_.rebuild(wminus_);
  tree_plus_.rebuild(wplus_);
}

double McSimulation::total_majorant_rate() const {
  if (live_ < 2) return 0.0;
  const double ordered = tree_minus_.total() * tree_plus_.total() - sum_self_products_;
  return std::max(0.0, sys_.weight * coag_.c_scale * ordered);
}

double McSimulation::pair_majorant(std::size_t i, std::size_t j) const {
  return coag_.c_scale * (wminus_[i] * wplus_[j] + wminus_[j] * wplus_[i]);
}

double McSimulation::kernel_value(const Particle& a, const Particle& b) const {
  return trunc_ ? eval_coag_truncated(coag_, *trunc_, a, b) : eval_coag(coag_, a, b);
}

void McSimulation::sync_particle(std::size_t i) {
  const double dt = sys_.time - synced_to_[i];
  if (dt <= 0.0) return;
  if (cfg_.fusion_enabled() && sys_.particles[i].e > 0.0) {
    FlowStepSpec spec = default_flow_spec(fusion_, cfg_.lambda, dt, flow_tol_);
    sys_.particles[i] = flow_particle(sys_.particles[i], fusion_, spec);
    log_.min_excess_seen = std::min(log_.min_excess_seen, sys_.particles[i].e);
  }
  synced_to_[i] = sys_.time;
}

void McSimulation::sync_all() {
  for (std::size_t i = 0; i < live_; ++i) sync_particle(i);
}

std::optional<std::pair<std::size_t, std::size_t>> McSimulation::sample_event() {
  if (live_ < 2) return std::nullopt;
  ++log_.proposed;

  std::size_t i, j;
  for (std::uint64_t attempt = 0;; ++attempt) {
    i = tree_minus_.sample(rng_.uniform() * tree_minus_.total());
    j = tree_plus_.sample(rng_.uniform() * tree_plus_.total());
    if (i != j) break;
    ++log_.self_draws;
    if (attempt > kStallWindow) {
      throw std::runtime_error("sample_event: cannot draw a distinct pair");
    }
  }

  sync_particle(i);
  sync_particle(j);
  const double k = kernel_value(sys_.particles[i], sys_.particles[j]);
  const double k_hat = pair_majorant(i, j);
  // K <= majorant structurally; the ratio may exceed 1 only by rounding.
  if (rng_.uniform() * k_hat <= k) {
    ++log_.accepted;
    return std::make_pair(i, j);
  }
  ++log_.rejected;
  return std::nullopt;
}

void McSimulation::assign_weights(std::size_t i, double wm, double wp) {
  sum_self_products_ += wm * wp - wminus_[i] * wplus_[i];
  wminus_[i] = wm;
  wplus_[i] = wp;
  tree_minus_.set(i, wm);
  tree_plus_.set(i, wp);
  updates_since_rebuild_ += 1;
}

void McSimulation::set_weights(std::size_t i) {
  const auto [wm, wp] = eval_majorant_weights(coag_, sys_.particles[i]);
  assign_weights(i, wm, wp);
}

void McSimulation::maybe_rebuild() {
  if (updates_since_rebuild_ < kRebuildPeriod) return;
  updates_since_rebuild_ = 0;
  tree_minus_.rebuild(wminus_);
  tree_plus_.rebuild(wplus_);
  KahanSum self;
  for (std::size_t i = 0; i < live_; ++i) self.add(wminus_[i] * wplus_[i]);
  sum_self_products_ = self.value();
}

void McSimulation::apply_coagulation(std::size_t i, std::size_t j) {
  sys_.particles[i] = coagulate(sys_.particles[i], sys_.particles[j]);
  synced_to_[i] = sys_.time;
  log_.min_excess_seen = std::min(log_.min_excess_seen, sys_.particles[i].e);
  set_weights(i);

  // swap-remove j, keeping the live prefix dense and tree slots aligned
  const std::size_t last = live_ - 1;
  if (j != last) {
    sys_.particles[j] = sys_.particles[last];
    synced_to_[j] = synced_to_[last];
    assign_weights(j, wminus_[last], wplus_[last]);
  }
  assign_weights(last, 0.0, 0.0);
  sys_.particles.pop_back();
  synced_to_.pop_back();
  live_ = last;
  maybe_rebuild();
}

McResult McSimulation::run(const DiagnosticsSpec& probes,
                           std::optional<std::uint64_t> stop_after_events) {
  const auto t_start = std::chrono::steady_clock::now();
  McResult result;

  const auto record = [&]() {
    sync_all();
    result.records.push_back(moments(sys_, probes.moment_pairs));
    ProbeRecord probe;
    probe.time = sys_.time;
    if (probes.concentration_delta1 && live_ > 0) {
      probe.concentration_fraction =
          concentration_fraction(sys_, *probes.concentration_delta1);
    }
    if (probes.cutoff && probes.marginal_edges.size() >= 2) {
      probe.cutoff_marginal = cutoff_marginal(sys_, *probes.cutoff, probes.marginal_edges);
    }
    result.probes.push_back(std::move(probe));
  };

  record();
  double next_record = cfg_.record_interval;
  std::uint64_t last_window_accepted = 0;
  std::uint64_t last_window_proposed = 0;

  while (sys_.time < cfg_.t_end && live_ >= 2) {
    if (stop_after_events && log_.accepted >= *stop_after_events) break;
    const double rate = total_majorant_rate();
    if (rate <= 0.0) break;
    const double tau = rng_.exponential(rate);

    // Exponential clocks are memoryless: if the next record boundary comes
    // first, advance to it and redraw.
    const double boundary = std::min(cfg_.t_end, next_record);
    if (sys_.time + tau >= boundary) {
      sys_.time = boundary;
      if (boundary == next_record && boundary < cfg_.t_end) {
        record();
        next_record += cfg_.record_interval;
      }
      continue;
    }

    sys_.time += tau;
    const auto pair = sample_event();
    if (pair) apply_coagulation(pair->first, pair->second);

    if (log_.proposed - last_window_proposed >= kStallWindow) {
      if (log_.accepted - last_window_accepted <
          static_cast<std::uint64_t>(1e-4 * static_cast<double>(kStallWindow))) {
        throw std::runtime_error("run_mc: sampler stalled, acceptance < 1e-4 over " +
                                 fmt_u64(kStallWindow) + " proposals");
      }
      last_window_proposed = log_.proposed;
      last_window_accepted = log_.accepted;
    }
  }

  if (std::isfinite(cfg_.t_end) && sys_.time < cfg_.t_end && !stop_after_events) {
    // coagulation exhausted before the horizon; fusion still flows, so keep
    // emitting records at the cadence up to t_end
    while (next_record < cfg_.t_end * (1.0 - 1e-12)) {
      sys_.time = next_record;
      record();
      next_record += cfg_.record_interval;
    }
    sys_.time = cfg_.t_end;
  }
  record();

  log_.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  result.system = sys_;
  result.log = log_;
  return result;
}

ParticleSystem make_initial_system(const InitSpec& init, const SimConfig& cfg) {
  cfg.validate();
  ParticleSystem sys;
  sys.rng_seed = cfg.seed;
  sys.weight = (init.weight > 0.0) ? init.weight
                                   : 1.0 / static_cast<double>(cfg.n_particles);
  sys.sim_volume = 1.0 / sys.weight;
  sys.particles.reserve(cfg.n_particles);
  Rng rng(derive_seed(cfg.seed, 1));  // stream 1: initial condition
  for (std::size_t i = 0; i < cfg.n_particles; ++i) {
    double v = init.v0;
    if (init.kind == InitSpec::Kind::LogNormal ||
        (init.kind == InitSpec::Kind::Ramified && init.log_sigma > 0.0)) {
      v = init.v0 * std::exp(init.log_sigma * rng.normal());
      v = std::max(v, cfg.v_min);
    }
    const double e = (init.kind == InitSpec::Kind::Ramified) ? init.kappa * v : 0.0;
    sys.particles.push_back(Particle{v, e});
  }
  return sys;
}

McResult run_mc(const CoagKernelParams& coag, const FusionKernelParams& fusion,
                const SimConfig& cfg, const InitSpec& init, const DiagnosticsSpec& probes,
                std::optional<TruncationParams> trunc,
                std::optional<std::uint64_t> stop_after_events, FlowTolerances flow_tol) {
  McSimulation sim(make_initial_system(init, cfg), coag, fusion, cfg, trunc, flow_tol);
  return sim.run(probes, stop_after_events);
}

}  // namespace coagfuse
