#include <cmath>

#include "coagfuse/fusion_flow.hpp"
#include "coagfuse/numeric.hpp"
#include "doctest.h"

using namespace coagfuse;

namespace {

// Independent oracle: fixed-step classical RK4 on de/dt = -c (e+s)^mu e.
double rk4_reference(double e0, double s, double c, double mu, double dt, int steps) {
  const auto f = [&](double e) { return -c * std::pow(e + s, mu) * e; };
  double e = e0;
  const double h = dt / steps;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(e);
    const double k2 = f(e + 0.5 * h * k1);
    const double k3 = f(e + 0.5 * h * k2);
    const double k4 = f(e + h * k3);
    e += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return e;
}

FlowStepSpec adaptive_spec(double lambda, double dt) {
  FlowStepSpec spec;
  spec.lambda = lambda;
  spec.dt = dt;
  spec.method = FlowMethod::AdaptiveImplicit;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-16;
  return spec;
}

}  // namespace

TEST_CASE("mu = 0 flow is the exact exponential") {
  FusionKernelParams fus;  // mu = 0, sigma = 0, R = 1
  const double c0 = sphere_area_coeff();
  const Particle p = make_particle(10.0, 1.0);
  FlowStepSpec spec;
  spec.lambda = 1.0;
  spec.dt = 1.0;
  const Particle out = flow_particle(p, fus, spec);
  CHECK(out.v == 1.0);
  const double expected_a = c0 + (10.0 - c0) * std::exp(-1.0);
  CHECK(out.area() == doctest::Approx(expected_a).epsilon(1e-12));

  SUBCASE("sigma enters the decay rate") {
    FusionKernelParams f2;
    f2.sigma = 2.0;
    const Particle big = make_particle(sphere_area(3.0) + 4.0, 3.0);
    FlowStepSpec s2 = spec;
    s2.dt = 0.3;
    const Particle o2 = flow_particle(big, f2, s2);
    CHECK(o2.e == doctest::Approx(4.0 * std::exp(-9.0 * 0.3)).epsilon(1e-12));
  }
}

TEST_CASE("the sphere is a fixed point of the flow") {
  FusionKernelParams fus;
  fus.mu = 1.0;
  for (double lambda : {1e-6, 1.0, 1e6}) {
    FlowStepSpec spec = adaptive_spec(lambda, 2.0);
    const Particle out = flow_particle(Particle{3.0, 0.0}, fus, spec);
    CHECK(out.e == 0.0);
    CHECK(out.v == 3.0);
  }
}

TEST_CASE("halving lambda squares the mu = 0 decay factor") {
  FusionKernelParams fus;
  const Particle p{1.0, 5.0};
  FlowStepSpec spec;
  spec.lambda = 0.8;
  spec.dt = 0.37;
  const double factor = flow_particle(p, fus, spec).e / p.e;
  spec.lambda = 0.4;
  const double factor2 = flow_particle(p, fus, spec).e / p.e;
  CHECK(factor2 == doctest::Approx(factor * factor).epsilon(1e-12));
}

TEST_CASE("lambda -> 0 relaxation onto the line") {
  FusionKernelParams fus;
  const Particle p{1.0, 5.0};
  double prev = p.e;
  for (int k = 1; k <= 6; ++k) {
    FlowStepSpec spec;
    spec.lambda = std::pow(10.0, -k);
    spec.dt = 0.1;
    const double e = flow_particle(p, fus, spec).e;
    CHECK(e <= prev);
    prev = e;
    if (k == 6) CHECK(e < 1e-12);
  }
}

TEST_CASE("adaptive implicit integrator against the fixed-step oracle, mu = 1") {
  FusionKernelParams fus;
  fus.mu = 1.0;
  const Particle p = make_particle(sphere_area(2.0) + 7.0, 2.0);
  const double dt = 0.5;
  const Particle out = flow_particle(p, fus, adaptive_spec(1.0, dt));

  const double s = sphere_area(2.0);
  const double ref = rk4_reference(7.0, s, 1.0, 1.0, dt, 1 << 18);
  CHECK(std::abs(out.e - ref) <= 1e-8 * ref);

  // closed form for mu = 1: q = e/(e+s) decays exponentially at rate c*s
  const double q0 = 7.0 / (7.0 + s);
  const double q = q0 * std::exp(-s * dt);
  const double analytic = s * q / (1.0 - q);
  CHECK(out.e == doctest::Approx(analytic).epsilon(1e-9));
}

TEST_CASE("adaptive integrator handles stiff fast fusion") {
  FusionKernelParams fus;
  fus.mu = 1.0;
  const Particle p = make_particle(sphere_area(1.0) + 3.0, 1.0);
  const Particle out = flow_particle(p, fus, adaptive_spec(1e-4, 0.5));
  CHECK(out.e == 0.0);  // fully relaxed and absorbed
}

TEST_CASE("monotone decay without overshoot across parameter families") {
  Rng rng(21);
  for (double mu : {-0.5, 0.0, 0.7, 1.0, 2.0}) {
    FusionKernelParams fus;
    fus.mu = mu;
    fus.sigma = -0.3;
    fus.r_scale = 1.7;
    for (int i = 0; i < 200; ++i) {
      const double v = std::exp(4.0 * (rng.uniform() - 0.5));
      const Particle p{v, 5.0 * rng.uniform() * sphere_area(v)};
      FlowStepSpec spec = adaptive_spec(std::exp(3.0 * (rng.uniform() - 0.5)),
                                        2.0 * rng.uniform());
      if (mu == 0.0) spec.method = FlowMethod::ClosedForm;
      const Particle out = flow_particle(p, fus, spec);
      CHECK(out.v == p.v);
      CHECK(out.e >= 0.0);
      CHECK(out.e <= p.e);
    }
  }
}

TEST_CASE("semigroup property within integrator tolerance") {
  FusionKernelParams fus;
  fus.mu = 1.5;
  const Particle p = make_particle(sphere_area(1.3) + 2.0, 1.3);
  const double t1 = 0.21, t2 = 0.34;
  const Particle once = flow_particle(p, fus, adaptive_spec(0.7, t1 + t2));
  const Particle twice =
      flow_particle(flow_particle(p, fus, adaptive_spec(0.7, t1)), fus,
                    adaptive_spec(0.7, t2));
  CHECK(twice.e == doctest::Approx(once.e).epsilon(1e-8));
}

TEST_CASE("flow_system maps the ensemble and conserves volume structure") {
  FusionKernelParams fus;
  fus.mu = 1.0;
  ParticleSystem sys;
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const double v = std::exp(2.0 * (rng.uniform() - 0.5));
    sys.particles.push_back(Particle{v, 3.0 * rng.uniform() * sphere_area(v)});
  }
  sys.weight = 1.0 / 500.0;

  SUBCASE("dt = 0 is the identity") {
    FlowStepSpec spec = adaptive_spec(1.0, 0.0);
    const ParticleSystem out = flow_system(sys, fus, spec);
    for (std::size_t i = 0; i < sys.size(); ++i) {
      CHECK(out.particles[i].e == sys.particles[i].e);
    }
  }

  FlowStepSpec spec = adaptive_spec(0.5, 0.4);
  const ParticleSystem out = flow_system(sys, fus, spec);
  REQUIRE(out.size() == sys.size());
  CHECK(out.weight == sys.weight);
  CHECK(out.time == doctest::Approx(sys.time + 0.4));

  KahanSum a_before, a_after, v_before, v_after;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    CHECK(out.particles[i].v == sys.particles[i].v);  // volumes untouched
    a_before.add(sys.particles[i].area());
    a_after.add(out.particles[i].area());
    v_before.add(sys.particles[i].v);
    v_after.add(out.particles[i].v);
  }
  CHECK(v_after.value() == v_before.value());
  CHECK(a_after.value() <= a_before.value());  // area dissipates
}
