#include "coagfuse/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coagfuse/csv.hpp"

namespace coagfuse {

void CoagKernelParams::validate() const {
  if (!(c_scale > 0.0)) throw std::invalid_argument("coag kernel: c_scale must be > 0");
  if (relaxed) {
    if (alpha != 0.0 || beta != 0.0) {
      throw std::invalid_argument("coag kernel: relaxed mode requires alpha = beta = 0");
    }
  } else {
    if (!(alpha > 0.0)) throw std::invalid_argument("coag kernel: alpha must be > 0");
    if (!(beta > 0.0 && beta < 1.0)) {
      throw std::invalid_argument("coag kernel: beta must lie in (0,1)");
    }
    const double d = beta - alpha;
    if (!(d > 0.0 && d < 1.0)) {
      throw std::invalid_argument("coag kernel: beta - alpha must lie in (0,1), got " +
                                  fmt_double(d));
    }
  }
  if (area_mod == AreaModulation::Sphericity) {
    if (!(theta > 0.0 && theta <= 1.0)) {
      throw std::invalid_argument("coag kernel: theta must lie in (0,1]");
    }
  }
}

void FusionKernelParams::validate() const {
  if (!(r_scale > 0.0)) throw std::invalid_argument("fusion kernel: r_scale must be > 0");
  if (!(mu >= -1.0)) throw std::invalid_argument("fusion kernel: mu must be >= -1");
  if (!std::isfinite(sigma)) throw std::invalid_argument("fusion kernel: sigma must be finite");
}

void TruncationParams::validate() const {
  if (!(big_r > 0.0)) throw std::invalid_argument("truncation: big_r must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("truncation: delta must lie in (0,1)");
  }
  if (!(l_const > 0.0)) throw std::invalid_argument("truncation: l_const must be > 0");
}

namespace {

double volume_factor(const CoagKernelParams& params, double v, double vp) {
  if (params.alpha == 0.0 && params.beta == 0.0) return 2.0;
  return std::pow(v, -params.alpha) * std::pow(vp, params.beta) +
         std::pow(vp, -params.alpha) * std::pow(v, params.beta);
}

double sphericity(const Particle& p) {
  const double s = sphere_area(p.v);
  return s / (p.e + s);  // in (0,1], equals 1 on the isoperimetric line
}

}  // namespace

double eval_coag(const CoagKernelParams& params, const Particle& p, const Particle& q) {
  double k = params.c_scale * volume_factor(params, p.v, q.v);
  if (params.area_mod == AreaModulation::Sphericity) {
    k *= params.theta + (1.0 - params.theta) * sphericity(p) * sphericity(q);
  }
  return k;
}

std::pair<double, double> eval_majorant_weights(const CoagKernelParams& params,
                                                const Particle& p) {
  if (params.alpha == 0.0 && params.beta == 0.0) return {1.0, 1.0};
  return {std::pow(p.v, -params.alpha), std::pow(p.v, params.beta)};
}

double eval_fusion(const FusionKernelParams& params, const Particle& p) {
  const double r = params.r_scale * std::pow(p.area(), params.mu) * std::pow(p.v, params.sigma);
  if (!std::isfinite(r)) {
    throw std::runtime_error("eval_fusion: non-finite rate at v=" + fmt_double(p.v) +
                             " a=" + fmt_double(p.area()));
  }
  return r;
}

double xi_cutoff(const TruncationParams& trunc, double v) {
  const double r = trunc.big_r;
  if (v <= r) return 1.0;
  if (v >= 2.0 * r) return 0.0;
  return (2.0 * r - v) / r;
}

double eval_coag_truncated(const CoagKernelParams& params, const TruncationParams& trunc,
                           const Particle& p, const Particle& q) {
  const double k = std::min(eval_coag(params, p, q), trunc.big_r);
  return k * xi_cutoff(trunc, p.v + q.v);
}

double eval_fusion_mollified(const FusionKernelParams& params, const TruncationParams& trunc,
                             const Particle& p) {
  const double r = eval_fusion(params, p);
  const double vs = std::pow(p.v, params.sigma);
  const double am = std::pow(p.area(), params.mu);
  return r * std::max(vs, trunc.l_const * trunc.delta) / (vs * (1.0 + trunc.delta * am));
}

double eval_effective_kernel(const CoagKernelParams& params, double v, double vp) {
  // psi = 1 on the isoperimetric line, so any Sphericity modulation reduces to 1.
  return params.c_scale * volume_factor(params, v, vp);
}

}  // namespace coagfuse
