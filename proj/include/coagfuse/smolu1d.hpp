#pragma once

#include <span>
#include <vector>

#include "coagfuse/core.hpp"
#include "coagfuse/kernels.hpp"
#include "coagfuse/sectional.hpp"

namespace coagfuse {

/// Volume marginal on a log-spaced grid: mass per bin, pivots at geometric
/// bin centers.
struct Marginal1D {
  std::vector<double> v_edges;  // n + 1
  std::vector<double> pivots;   // n
  std::vector<double> masses;   // n
  double time = 0.0;
  double exited_number = 0.0;
  double exited_v_mass = 0.0;

  static Marginal1D zeros(double v_min, double v_max, std::size_t n);
  std::size_t size() const { return masses.size(); }
  double total_mass() const;
  double volume_moment(double power) const;
};

struct Smolu1dRunConfig {
  double t_end = 1.0;
  double record_interval = 0.25;
  double dt_max = 0.01;
  double coag_safety = 0.45;
};

struct Smolu1dResult {
  Marginal1D final_state;
  std::vector<Marginal1D> history;  // one per record time
  std::vector<MomentRecord> records;  // M_{0,l} volume moments, keys (0, l)
};

/// Fixed-pivot sectional evolution of the limit one-dimensional coagulation
/// equation with effective kernel K(c0 v^(2/3), v, c0 v'^(2/3), v').
Smolu1dResult run_smolu1d(const Marginal1D& init, const CoagKernelParams& params,
                          const Smolu1dRunConfig& cfg,
                          std::span<const double> volume_moment_powers);

/// One explicit Euler step; refuses dt beyond the positivity bound.
void smolu1d_step(Marginal1D& m, const CoagKernelParams& params, double dt);

/// Point mass v0 of weight `number` deposited by fixed-pivot split.
void deposit_point_mass(Marginal1D& m, double v0, double number);

}  // namespace coagfuse
