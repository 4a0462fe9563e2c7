#pragma once

#include <utility>

#include "coagfuse/core.hpp"

namespace coagfuse {

enum class AreaModulation { None, Sphericity };

/// Coagulation kernel family
///   K(a,v,a',v') = c_scale * (v^-alpha v'^beta + v'^-alpha v^beta) * m(a,v,a',v')
/// with m = 1 (None) or m = theta + (1-theta) * psi(a,v) * psi(a',v'),
/// psi = c0 v^(2/3) / a in (0,1]. Either way K sits between
/// theta*c_scale and c_scale times the separable volume factor, so the factor
/// itself is a sampling majorant.
struct CoagKernelParams {
  double c_scale = 1.0;
  double alpha = 0.25;
  double beta = 0.5;
  AreaModulation area_mod = AreaModulation::None;
  double theta = 1.0;    // only used with Sphericity
  bool relaxed = false;  // permits alpha = beta = 0 (constant-kernel fixture)

  /// Throws std::invalid_argument unless alpha > 0, beta in (0,1),
  /// beta - alpha in (0,1), theta in (0,1]; `relaxed` instead demands
  /// alpha = beta = 0 exactly.
  void validate() const;
};

/// Fusion rate family r(a,v) = r_scale * a^mu * v^sigma, mu >= -1.
struct FusionKernelParams {
  double r_scale = 1.0;
  double mu = 0.0;
  double sigma = 0.0;

  void validate() const;
};

/// Solver regularizers: capped kernel K_R = min(K, R), volume cutoff xi_R
/// (1 on (0,R], 0 on [2R,inf), linear in between), and the fusion mollifier
/// r_delta = r * max(v^sigma, L*delta) / (v^sigma * (1 + delta * a^mu)).
struct TruncationParams {
  double big_r = 1e308;
  double delta = 1e-8;
  double l_const = 1.0;

  void validate() const;
};

double eval_coag(const CoagKernelParams& params, const Particle& p, const Particle& q);

/// Per-particle separable majorant factors (v^-alpha, v^beta):
/// K(p,q) <= c_scale * (w_minus(p) w_plus(q) + w_minus(q) w_plus(p)).
std::pair<double, double> eval_majorant_weights(const CoagKernelParams& params,
                                                const Particle& p);

double eval_fusion(const FusionKernelParams& params, const Particle& p);

double eval_coag_truncated(const CoagKernelParams& params, const TruncationParams& trunc,
                           const Particle& p, const Particle& q);

double xi_cutoff(const TruncationParams& trunc, double v);

double eval_fusion_mollified(const FusionKernelParams& params, const TruncationParams& trunc,
                             const Particle& p);

/// Limit-equation kernel K(c0 v^(2/3), v, c0 v'^(2/3), v'): the coagulation
/// kernel evaluated on two spherical particles.
double eval_effective_kernel(const CoagKernelParams& params, double v, double vp);

}  // namespace coagfuse
