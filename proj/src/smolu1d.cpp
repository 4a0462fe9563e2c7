#include "coagfuse/smolu1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coagfuse/csv.hpp"
#include "coagfuse/numeric.hpp"

namespace coagfuse {

Marginal1D Marginal1D::zeros(double v_min, double v_max, std::size_t n) {
  GridAxis ax = GridAxis::log_spaced(v_min, v_max, n);
  Marginal1D m;
  m.v_edges = std::move(ax.edges);
  m.pivots = std::move(ax.pivots);
  m.masses.assign(n, 0.0);
  return m;
}

double Marginal1D::total_mass() const { return kahan_total(masses); }

double Marginal1D::volume_moment(double power) const {
  KahanSum sum;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (masses[i] == 0.0) continue;
    sum.add(masses[i] * ((power == 0.0) ? 1.0 : std::pow(pivots[i], power)));
  }
  return sum.value();
}

void deposit_point_mass(Marginal1D& m, double v0, double number) {
  const PivotSplit s = pivot_split(m.pivots, v0);
  if (s.overflow) {
    m.exited_number += number;
    m.exited_v_mass += number * v0;
    return;
  }
  m.masses[s.lo] += number * s.frac_lo;
  if (s.frac_lo < 1.0) m.masses[s.lo + 1] += number * (1.0 - s.frac_lo);
}

namespace {

struct EffectiveKernelCache {
  std::vector<double> wminus;
  std::vector<double> wplus;
  double c_scale;

  EffectiveKernelCache(const CoagKernelParams& p, std::span<const double> pivots)
      : c_scale(p.c_scale) {
    wminus.reserve(pivots.size());
    wplus.reserve(pivots.size());
    for (double v : pivots) {
      wminus.push_back((p.alpha == 0.0) ? 1.0 : std::pow(v, -p.alpha));
      wplus.push_back((p.beta == 0.0) ? 1.0 : std::pow(v, p.beta));
    }
  }

  double operator()(std::size_t i, std::size_t j) const {
    return c_scale * (wminus[i] * wplus[j] + wminus[j] * wplus[i]);
  }
};

void step(Marginal1D& m, const EffectiveKernelCache& kern, double dt) {
  std::vector<std::size_t> occ;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.masses[i] > 0.0) occ.push_back(i);
  }
  if (occ.empty()) return;

  std::vector<double> loss(occ.size(), 0.0);
  double max_loss = 0.0;
  for (std::size_t ia = 0; ia < occ.size(); ++ia) {
    double rate = 0.0;
    for (std::size_t ib = 0; ib < occ.size(); ++ib) {
      rate += kern(occ[ia], occ[ib]) * m.masses[occ[ib]];
    }
    loss[ia] = rate;
    max_loss = std::max(max_loss, rate);
  }
  if (max_loss > 0.0 && dt > 0.5 / max_loss) {
    throw std::runtime_error("smolu1d step: dt=" + fmt_double(dt) +
                             " exceeds stability bound " + fmt_double(0.5 / max_loss));
  }

  std::vector<double> next = m.masses;
  for (std::size_t ia = 0; ia < occ.size(); ++ia) {
    next[occ[ia]] -= dt * m.masses[occ[ia]] * loss[ia];
  }
  for (std::size_t ia = 0; ia < occ.size(); ++ia) {
    const std::size_t a = occ[ia];
    for (std::size_t ib = ia; ib < occ.size(); ++ib) {
      const std::size_t b = occ[ib];
      const double events =
          dt * kern(a, b) * m.masses[a] * m.masses[b] * (a == b ? 0.5 : 1.0);
      if (events == 0.0) continue;
      const double v_new = m.pivots[a] + m.pivots[b];
      const PivotSplit s = pivot_split(m.pivots, v_new);
      if (s.overflow) {
        m.exited_number += events;
        m.exited_v_mass += events * v_new;
        continue;
      }
      next[s.lo] += events * s.frac_lo;
      if (s.frac_lo < 1.0) next[s.lo + 1] += events * (1.0 - s.frac_lo);
    }
  }
  for (double& x : next) x = std::max(0.0, x);
  m.masses = std::move(next);
}

double stability_bound(const Marginal1D& m, const EffectiveKernelCache& kern) {
  double max_loss = 0.0;
  for (std::size_t a = 0; a < m.size(); ++a) {
    if (m.masses[a] == 0.0) continue;
    double rate = 0.0;
    for (std::size_t b = 0; b < m.size(); ++b) {
      if (m.masses[b] > 0.0) rate += kern(a, b) * m.masses[b];
    }
    max_loss = std::max(max_loss, rate);
  }
  if (max_loss == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 / max_loss;
}

}  // namespace

void smolu1d_step(Marginal1D& m, const CoagKernelParams& params, double dt) {
  params.validate();
  const EffectiveKernelCache kern(params, m.pivots);
  step(m, kern, dt);
}

Smolu1dResult run_smolu1d(const Marginal1D& init, const CoagKernelParams& params,
                          const Smolu1dRunConfig& cfg,
                          std::span<const double> volume_moment_powers) {
  params.validate();
  Smolu1dResult out;
  Marginal1D m = init;
  const EffectiveKernelCache kern(params, m.pivots);

  const auto record = [&]() {
    MomentRecord rec;
    rec.time = m.time;
    for (double l : volume_moment_powers) {
      rec.entries[MomentKey{0.0, l}] = m.volume_moment(l);
    }
    out.records.push_back(std::move(rec));
    out.history.push_back(m);
  };

  record();
  double next_record = cfg.record_interval;
  while (m.time < cfg.t_end * (1.0 - 1e-12)) {
    const double bound = stability_bound(m, kern);
    double dt = std::min(cfg.dt_max, cfg.t_end - m.time);
    if (std::isfinite(bound)) dt = std::min(dt, 2.0 * cfg.coag_safety * bound);
    if (next_record > m.time) dt = std::min(dt, next_record - m.time);
    if (!(dt > 0.0)) break;
    step(m, kern, dt);
    m.time += dt;
    if (m.time >= next_record * (1.0 - 1e-12)) {
      record();
      next_record += cfg.record_interval;
    }
  }
  if (out.records.empty() || out.records.back().time < m.time * (1.0 - 1e-12)) record();
  out.final_state = std::move(m);
  return out;
}

}  // namespace coagfuse
