#pragma once

#include "coagfuse/core.hpp"
#include "coagfuse/kernels.hpp"

namespace coagfuse {

enum class FlowMethod { ClosedForm, AdaptiveImplicit };

/// One fusion transport step: integrate de/dt = -(1/lambda) r(e + c0 v^(2/3), v) e
/// over an elapsed time dt with v held fixed.
struct FlowStepSpec {
  double lambda = 1.0;  // +inf turns the flow into the identity
  double dt = 0.0;
  FlowMethod method = FlowMethod::ClosedForm;
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;

  void validate() const;
};

struct FlowTolerances {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
};

/// Default spec for the given fusion family: exact exponential when mu = 0,
/// adaptive implicit otherwise (the problem is stiff for small lambda).
FlowStepSpec default_flow_spec(const FusionKernelParams& fusion, double lambda, double dt,
                               const FlowTolerances& tol = {});

/// Excess area snaps to zero below this scale; the line e = 0 is absorbing.
inline double flow_absorb_floor(double v) {
  return 1e-14 * std::max(1.0, sphere_area(v));
}

/// Relax one particle toward the sphere. Volume is unchanged, e decays
/// monotonically and never crosses zero. Throws std::runtime_error with
/// particle context if the adaptive step size underflows.
Particle flow_particle(const Particle& p, const FusionKernelParams& kernel,
                       const FlowStepSpec& spec);

/// flow_particle mapped over the ensemble; count, weights and volumes unchanged.
ParticleSystem flow_system(const ParticleSystem& sys, const FusionKernelParams& kernel,
                           const FlowStepSpec& spec);

}  // namespace coagfuse
