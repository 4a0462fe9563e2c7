#include "coagfuse/fusion_flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coagfuse/csv.hpp"

namespace coagfuse {

void FlowStepSpec::validate() const {
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("flow: dt must be finite and >= 0");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("flow: lambda must be > 0");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw std::invalid_argument("flow: tolerances must be > 0");
  }
}

FlowStepSpec default_flow_spec(const FusionKernelParams& fusion, double lambda, double dt,
                               const FlowTolerances& tol) {
  FlowStepSpec spec;
  spec.lambda = lambda;
  spec.dt = dt;
  spec.method = (fusion.mu == 0.0) ? FlowMethod::ClosedForm : FlowMethod::AdaptiveImplicit;
  spec.rel_tol = tol.rel_tol;
  spec.abs_tol = tol.abs_tol;
  return spec;
}

namespace {

// The step works on y = ln e, where de/dt = -c (e+s)^mu e becomes
// dy/dt = -rate(y) with rate(y) = c (exp(y) + s)^mu. Once e << s the rate is
// constant in y, every implicit step is exact, and the integrator crosses the
// remaining decades to the absorbing floor in a handful of steps. The domain
// e > 0 is the whole line in y, so stages cannot overshoot the line.
struct LogDecayRhs {
  double c;   // r_scale * v^sigma / lambda
  double s;   // c0 * v^(2/3)
  double mu;

  double rate(double y) const { return c * std::pow(std::exp(y) + s, mu); }
};

// Root of g(Y) = Y + a_coef * rate(Y) - y_from. g(y_from) >= 0 and the rate is
// bounded above on (-inf, y_from], so a bracket always exists; Newton with a
// bisection safeguard (g need not be monotone for mu < 0).
double solve_stage(const LogDecayRhs& f, double a_coef, double y_from) {
  if (a_coef == 0.0) return y_from;
  const double rate_cap =
      (f.mu >= 0.0) ? f.rate(y_from) : f.c * std::pow(f.s, f.mu);
  double hi = y_from;
  double lo = y_from - a_coef * rate_cap;
  double y = hi;
  for (int it = 0; it < 200; ++it) {
    const double g = y + a_coef * f.rate(y) - y_from;
    if (g > 0.0) {
      hi = y;
    } else {
      lo = y;
    }
    const double e = std::exp(y);
    const double dg =
        1.0 + a_coef * f.c * f.mu * std::pow(e + f.s, f.mu - 1.0) * e;
    double next = (dg > 0.0) ? y - g / dg : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 1e-14 * (1.0 + std::abs(y))) return next;
    y = next;
  }
  return y;
}

// One L-stable SDIRK2 step (Alexander's method, gamma = 1 - 1/sqrt(2));
// stiffly accurate, order 2. Decay in y is monotone: result <= y.
double sdirk2_step(const LogDecayRhs& f, double y, double h) {
  constexpr double gamma = 0.2928932188134524756;  // 1 - 1/sqrt(2)
  const double y1 = solve_stage(f, gamma * h, y);
  const double rhs2 = y - h * (1.0 - gamma) * f.rate(y1);
  return solve_stage(f, gamma * h, rhs2);
}

double integrate_adaptive(const LogDecayRhs& f, double e0, double dt, double rel_tol,
                          double abs_tol, const Particle& ctx) {
  const double floor_e = flow_absorb_floor(ctx.v);
  const double floor_y = std::log(floor_e);
  double t = 0.0;
  double y = std::log(e0);
  double h = dt;
  const double h_min = dt * 1e-14;
  while (true) {
    const double remaining = dt - t;
    if (remaining <= dt * 1e-15) break;
    if (h < h_min) {
      throw std::runtime_error("flow_particle: step underflow at v=" + fmt_double(ctx.v) +
                               " e=" + fmt_double(std::exp(y)) + " t=" + fmt_double(t) +
                               " of dt=" + fmt_double(dt));
    }
    const double h_try = std::min(h, remaining);
    const double big = sdirk2_step(f, y, h_try);
    const double mid = sdirk2_step(f, y, 0.5 * h_try);
    const double fine = sdirk2_step(f, mid, 0.5 * h_try);
    const double err = std::abs(fine - big) / 3.0;  // order-2 step doubling
    // error in y is relative error in e; the floor sets the absolute scale
    const double tol = rel_tol + abs_tol / std::max(std::exp(fine), floor_e);
    if (err <= tol) {
      t += h_try;
      y = fine;
      if (y <= floor_y) return 0.0;
    }
    const double factor = (err > 0.0) ? 0.9 * std::cbrt(tol / err) : 4.0;
    h = h_try * std::clamp(factor, 0.2, 4.0);
  }
  return std::exp(y);
}

}  // namespace

Particle flow_particle(const Particle& p, const FusionKernelParams& kernel,
                       const FlowStepSpec& spec) {
  spec.validate();
  if (spec.dt == 0.0 || p.e == 0.0 || !std::isfinite(spec.lambda)) return p;

  const double s = sphere_area(p.v);
  const double c = kernel.r_scale * std::pow(p.v, kernel.sigma) / spec.lambda;

  double e_new;
  if (kernel.mu == 0.0 && spec.method == FlowMethod::ClosedForm) {
    e_new = p.e * std::exp(-c * spec.dt);
  } else if (spec.method == FlowMethod::ClosedForm) {
    throw std::invalid_argument("flow_particle: ClosedForm requires mu = 0");
  } else {
    e_new = integrate_adaptive(LogDecayRhs{c, s, kernel.mu}, p.e, spec.dt, spec.rel_tol,
                               spec.abs_tol, p);
  }
  if (e_new <= flow_absorb_floor(p.v)) e_new = 0.0;
  return Particle{p.v, std::min(e_new, p.e)};
}

ParticleSystem flow_system(const ParticleSystem& sys, const FusionKernelParams& kernel,
                           const FlowStepSpec& spec) {
  ParticleSystem out = sys;
  for (Particle& p : out.particles) {
    p = flow_particle(p, kernel, spec);
  }
  out.time = sys.time + spec.dt;
  return out;
}

}  // namespace coagfuse
