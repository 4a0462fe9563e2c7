#include "coagfuse/sectional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coagfuse/csv.hpp"
#include "coagfuse/numeric.hpp"

namespace coagfuse {

GridAxis GridAxis::log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo) || n < 1) {
    throw std::invalid_argument("GridAxis: need 0 < lo < hi and n >= 1");
  }
  GridAxis ax;
  ax.edges.resize(n + 1);
  const double step = std::log(hi / lo) / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    ax.edges[i] = lo * std::exp(step * static_cast<double>(i));
  }
  ax.edges.front() = lo;
  ax.edges.back() = hi;
  ax.pivots.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ax.pivots[i] = std::sqrt(ax.edges[i] * ax.edges[i + 1]);
  }
  return ax;
}

GridAxis GridAxis::excess_area(double e1, double e_max, std::size_t n) {
  if (!(e1 > 0.0 && e_max > e1) || n < 2) {
    throw std::invalid_argument("GridAxis: need 0 < e1 < e_max and n >= 2");
  }
  GridAxis tail = log_spaced(e1, e_max, n - 1);
  GridAxis ax;
  ax.edges.resize(n + 1);
  ax.edges[0] = 0.0;
  std::copy(tail.edges.begin(), tail.edges.end(), ax.edges.begin() + 1);
  ax.pivots.resize(n);
  ax.pivots[0] = 0.0;  // the isoperimetric line is its own pivot
  std::copy(tail.pivots.begin(), tail.pivots.end(), ax.pivots.begin() + 1);
  return ax;
}

PivotSplit pivot_split(std::span<const double> pivots, double x) {
  PivotSplit out;
  if (pivots.empty()) throw std::invalid_argument("pivot_split: empty axis");
  if (x <= pivots.front()) {
    out.lo = 0;
    out.frac_lo = 1.0;
    return out;
  }
  if (x > pivots.back()) {
    out.overflow = true;
    return out;
  }
  const auto it = std::upper_bound(pivots.begin(), pivots.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - pivots.begin());
  out.lo = hi - 1;
  if (hi == pivots.size()) {  // x == last pivot exactly
    out.lo = pivots.size() - 1;
    out.frac_lo = 1.0;
    return out;
  }
  out.frac_lo = (pivots[hi] - x) / (pivots[hi] - pivots[out.lo]);
  return out;
}

Grid2D Grid2D::make(const GridSpec& spec) {
  Grid2D g;
  g.v_axis = GridAxis::log_spaced(spec.v_min, spec.v_max, spec.nv);
  g.e_axis = GridAxis::excess_area(spec.e_first, spec.e_max, spec.ne);
  g.sphere_area_pivot.resize(spec.nv);
  for (std::size_t i = 0; i < spec.nv; ++i) {
    g.sphere_area_pivot[i] = sphere_area(g.v_axis.pivots[i]);
  }
  return g;
}

bool GridState::nonnegative() const {
  return std::all_of(mass.begin(), mass.end(),
                     [](double m) { return m >= 0.0 && std::isfinite(m); });
}

SectionalSolver::SectionalSolver(Grid2D grid, CoagKernelParams coag, FusionKernelParams fusion,
                                 std::optional<TruncationParams> trunc)
    : grid_(std::move(grid)), coag_(coag), fusion_(fusion), trunc_(trunc) {
  coag_.validate();
  fusion_.validate();
  if (trunc_) trunc_->validate();
  const std::size_t nc = grid_.cells();
  wminus_.resize(nc);
  wplus_.resize(nc);
  psi_.resize(nc);
  for (std::size_t iv = 0; iv < grid_.nv(); ++iv) {
    const double v = grid_.v_axis.pivots[iv];
    const double wm = (coag_.alpha == 0.0) ? 1.0 : std::pow(v, -coag_.alpha);
    const double wp = (coag_.beta == 0.0) ? 1.0 : std::pow(v, coag_.beta);
    const double s = grid_.sphere_area_pivot[iv];
    for (std::size_t ie = 0; ie < grid_.ne(); ++ie) {
      const std::size_t c = grid_.cell(iv, ie);
      wminus_[c] = wm;
      wplus_[c] = wp;
      psi_[c] = s / (grid_.e_axis.pivots[ie] + s);
    }
  }
}

double SectionalSolver::cell_kernel(std::size_t c1, std::size_t c2) const {
  double k = coag_.c_scale * (wminus_[c1] * wplus_[c2] + wminus_[c2] * wplus_[c1]);
  if (coag_.area_mod == AreaModulation::Sphericity) {
    k *= coag_.theta + (1.0 - coag_.theta) * psi_[c1] * psi_[c2];
  }
  if (trunc_) {
    k = std::min(k, trunc_->big_r);
    const std::size_t iv1 = c1 / grid_.ne();
    const std::size_t iv2 = c2 / grid_.ne();
    k *= xi_cutoff(*trunc_, grid_.v_axis.pivots[iv1] + grid_.v_axis.pivots[iv2]);
  }
  return k;
}

namespace {

std::vector<std::size_t> occupied_cells(const GridState& state) {
  std::vector<std::size_t> occ;
  occ.reserve(256);
  for (std::size_t c = 0; c < state.mass.size(); ++c) {
    if (state.mass[c] > 0.0) occ.push_back(c);
  }
  return occ;
}

}  // namespace

double SectionalSolver::coag_dt_bound(const GridState& state) const {
  const auto occ = occupied_cells(state);
  double max_loss = 0.0;
  for (std::size_t a : occ) {
    double rate = 0.0;
    for (std::size_t b : occ) rate += cell_kernel(a, b) * state.mass[b];
    max_loss = std::max(max_loss, rate);
  }
  if (max_loss == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 / max_loss;
}

void SectionalSolver::coag_step(GridState& state, double dt) const {
  const auto occ = occupied_cells(state);
  if (occ.empty() || dt == 0.0) return;

  // Euler loss rates; also determines the stability refusal.
  std::vector<double> loss(occ.size(), 0.0);
  double max_loss = 0.0;
  for (std::size_t ia = 0; ia < occ.size(); ++ia) {
    double rate = 0.0;
    for (std::size_t ib = 0; ib < occ.size(); ++ib) {
      rate += cell_kernel(occ[ia], occ[ib]) * state.mass[occ[ib]];
    }
    loss[ia] = rate;
    max_loss = std::max(max_loss, rate);
  }
  if (max_loss > 0.0 && dt > 0.5 / max_loss) {
    throw std::runtime_error("coag_step: dt=" + fmt_double(dt) +
                             " exceeds stability bound " + fmt_double(0.5 / max_loss));
  }

  std::vector<double> next = state.mass;
  for (std::size_t ia = 0; ia < occ.size(); ++ia) {
    next[occ[ia]] -= dt * state.mass[occ[ia]] * loss[ia];
  }

  const auto& vp = grid_.v_axis.pivots;
  const auto& ep = grid_.e_axis.pivots;
  const std::size_t ne = grid_.ne();
  for (std::size_t ia = 0; ia < occ.size(); ++ia) {
    const std::size_t a = occ[ia];
    const std::size_t iva = a / ne, iea = a % ne;
    const double na = state.mass[a];
    for (std::size_t ib = ia; ib < occ.size(); ++ib) {
      const std::size_t b = occ[ib];
      const double events =
          dt * cell_kernel(a, b) * na * state.mass[b] * (a == b ? 0.5 : 1.0);
      if (events == 0.0) continue;
      const std::size_t ivb = b / ne, ieb = b % ne;
      const double v_new = vp[iva] + vp[ivb];
      const double corr = grid_.sphere_area_pivot[iva] + grid_.sphere_area_pivot[ivb] -
                          sphere_area(v_new);
      const double e_new = std::max(0.0, ep[iea] + ep[ieb] + corr);
      const double a_new = e_new + sphere_area(v_new);

      const PivotSplit sv = pivot_split(vp, v_new);
      const PivotSplit se = pivot_split(ep, e_new);
      if (sv.overflow || se.overflow) {
        state.exited.number += events;
        state.exited.v_mass += events * v_new;
        state.exited.a_mass += events * a_new;
        continue;
      }
      double assigned_area = 0.0;
      for (int dv = 0; dv < 2; ++dv) {
        const double fv = (dv == 0) ? sv.frac_lo : 1.0 - sv.frac_lo;
        if (fv == 0.0) continue;
        const std::size_t tv = sv.lo + static_cast<std::size_t>(dv);
        for (int de = 0; de < 2; ++de) {
          const double fe = (de == 0) ? se.frac_lo : 1.0 - se.frac_lo;
          if (fe == 0.0) continue;
          const std::size_t te = se.lo + static_cast<std::size_t>(de);
          next[grid_.cell(tv, te)] += events * fv * fe;
          assigned_area += fv * fe * grid_.cell_area(tv, te);
        }
      }
      state.area_redistribution_error += events * std::abs(assigned_area - a_new);
    }
  }

  for (double& m : next) m = std::max(0.0, m);
  state.mass = std::move(next);
}

double SectionalSolver::fusion_speed(std::size_t iv, double e_edge, double lambda) const {
  if (e_edge == 0.0) return 0.0;
  const Particle rep{grid_.v_axis.pivots[iv], e_edge};
  const double r = trunc_ ? eval_fusion_mollified(fusion_, *trunc_, rep)
                          : eval_fusion(fusion_, rep);
  return r * e_edge / lambda;
}

double SectionalSolver::advect_dt_bound(const GridState& state, double lambda) const {
  if (!std::isfinite(lambda)) return std::numeric_limits<double>::infinity();
  const std::size_t ne = grid_.ne();
  double limit = std::numeric_limits<double>::infinity();
  for (std::size_t iv = 0; iv < grid_.nv(); ++iv) {
    for (std::size_t ie = 1; ie < ne; ++ie) {  // ie = 0 has zero outflow
      if (state.mass[grid_.cell(iv, ie)] <= 0.0) continue;
      const double speed = fusion_speed(iv, grid_.e_axis.edges[ie], lambda);
      if (speed > 0.0) limit = std::min(limit, grid_.e_axis.width(ie) / speed);
    }
  }
  return limit;
}

void SectionalSolver::advect_step(GridState& state, double lambda, double dt) const {
  if (!std::isfinite(lambda) || dt == 0.0) return;
  const double bound = advect_dt_bound(state, lambda);
  if (dt > bound) {
    throw std::runtime_error("advect_step: dt=" + fmt_double(dt) + " exceeds CFL bound " +
                             fmt_double(bound));
  }
  const std::size_t ne = grid_.ne();
  for (std::size_t iv = 0; iv < grid_.nv(); ++iv) {
    // downward sweep: flux through the lower edge of each cell
    double inflow = 0.0;  // from the cell above
    for (std::size_t ie = ne; ie-- > 0;) {
      const std::size_t c = grid_.cell(iv, ie);
      double outflow = 0.0;
      if (ie > 0 && state.mass[c] > 0.0) {
        const double speed = fusion_speed(iv, grid_.e_axis.edges[ie], lambda);
        outflow = dt * speed / grid_.e_axis.width(ie) * state.mass[c];
      }
      state.mass[c] += inflow - outflow;
      inflow = outflow;
    }
  }
}

SectionalResult run_sectional(const SectionalSolver& solver, GridState init,
                              const SectionalRunConfig& cfg,
                              std::span<const MomentKey> moment_pairs) {
  SectionalResult out;
  GridState state = std::move(init);

  const auto advect_span = [&](double span) {
    double left = span;
    while (left > span * 1e-12) {
      const double bound = solver.advect_dt_bound(state, cfg.lambda);
      const double sub = std::min(left, cfg.cfl_safety * bound);
      solver.advect_step(state, cfg.lambda, sub);
      left -= sub;
      if (!std::isfinite(bound)) break;
    }
  };

  const auto record = [&]() {
    MomentRecord rec = grid_moments(solver.grid(), state, moment_pairs);
    rec.time = state.time;
    out.records.push_back(std::move(rec));
    out.history.push_back(state);
  };

  record();
  double next_record = cfg.record_interval;
  while (state.time < cfg.t_end * (1.0 - 1e-12)) {
    const double bound = solver.coag_dt_bound(state);
    double dt = std::min(cfg.dt_max, cfg.t_end - state.time);
    if (std::isfinite(bound)) dt = std::min(dt, 2.0 * cfg.coag_safety * bound);
    if (next_record > state.time) dt = std::min(dt, next_record - state.time);
    if (!(dt > 0.0)) break;

    const bool fusion_on = std::isfinite(cfg.lambda);
    if (fusion_on) advect_span(0.5 * dt);
    solver.coag_step(state, dt);
    if (fusion_on) advect_span(0.5 * dt);
    state.time += dt;

    if (state.time >= next_record * (1.0 - 1e-12)) {
      record();
      next_record += cfg.record_interval;
    }
  }
  if (out.records.empty() || out.records.back().time < state.time * (1.0 - 1e-12)) {
    record();
  }
  out.final_state = std::move(state);
  return out;
}

MomentRecord grid_moments(const Grid2D& grid, const GridState& state,
                          std::span<const MomentKey> pairs) {
  MomentRecord rec;
  rec.time = state.time;
  for (const MomentKey& key : pairs) {
    KahanSum sum;
    for (std::size_t iv = 0; iv < grid.nv(); ++iv) {
      const double v = grid.v_axis.pivots[iv];
      const double vl = (key.l == 0.0) ? 1.0 : std::pow(v, key.l);
      for (std::size_t ie = 0; ie < grid.ne(); ++ie) {
        const double m = state.mass[grid.cell(iv, ie)];
        if (m == 0.0) continue;
        const double ak =
            (key.k == 0.0) ? 1.0 : std::pow(grid.cell_area(iv, ie), key.k);
        sum.add(m * ak * vl);
      }
    }
    rec.entries[key] = sum.value();
  }
  return rec;
}

void deposit_point_mass(const Grid2D& grid, GridState& state, double v0, double e0,
                        double number) {
  if (state.mass.empty()) state.mass.assign(grid.cells(), 0.0);
  const PivotSplit sv = pivot_split(grid.v_axis.pivots, v0);
  const PivotSplit se = pivot_split(grid.e_axis.pivots, e0);
  if (sv.overflow || se.overflow) {
    state.exited.number += number;
    state.exited.v_mass += number * v0;
    state.exited.a_mass += number * (e0 + sphere_area(v0));
    return;
  }
  for (int dv = 0; dv < 2; ++dv) {
    const double fv = (dv == 0) ? sv.frac_lo : 1.0 - sv.frac_lo;
    if (fv == 0.0) continue;
    for (int de = 0; de < 2; ++de) {
      const double fe = (de == 0) ? se.frac_lo : 1.0 - se.frac_lo;
      if (fe == 0.0) continue;
      state.mass[grid.cell(sv.lo + dv, se.lo + de)] += number * fv * fe;
    }
  }
}

}  // namespace coagfuse
