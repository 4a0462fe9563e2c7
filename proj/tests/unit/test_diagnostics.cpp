#include <stdexcept>
#include <cmath>

#include "coagfuse/diagnostics.hpp"
#include "coagfuse/numeric.hpp"
#include "doctest.h"

using namespace coagfuse;

namespace {

ParticleSystem single_cluster_17_5() {
  // one valid cluster with a = 17, v = 5: M_{1,0} = 17, M_{0,1} = 5 at weight 1
  ParticleSystem sys;
  sys.particles = {make_particle(17.0, 5.0)};
  sys.weight = 1.0;
  return sys;
}

Marginal1D random_marginal(Rng& rng, const std::vector<double>& edges) {
  Marginal1D m;
  m.v_edges = edges;
  m.pivots.resize(edges.size() - 1);
  m.masses.resize(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    m.pivots[i] = std::sqrt(edges[i] * edges[i + 1]);
    m.masses[i] = rng.uniform();
  }
  return m;
}

}  // namespace

TEST_CASE("weighted moment sums") {
  const ParticleSystem sys = single_cluster_17_5();
  const std::vector<MomentKey> pairs = {{0, 0}, {0, 1}, {1, 0}};
  const MomentRecord rec = moments(sys, pairs);
  CHECK(rec.at(1, 0) == doctest::Approx(17.0).epsilon(1e-13));
  CHECK(rec.at(0, 1) == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(rec.at(0, 0) == doctest::Approx(1.0 * sys.weight));

  // weighted sum across several clusters, M_{0,0} = n * weight
  ParticleSystem many;
  many.weight = 0.5;
  many.particles = {make_particle(6.0, 1.0), make_particle(8.0, 1.0),
                    make_particle(10.0, 2.0)};
  const MomentRecord rec2 = moments(many, pairs);
  CHECK(rec2.at(0, 0) == doctest::Approx(1.5));
  CHECK(rec2.at(1, 0) == doctest::Approx(0.5 * 24.0));
  CHECK(rec2.at(0, 1) == doctest::Approx(0.5 * 4.0));
}

TEST_CASE("grid quadrature agrees with the particle sum on matched data") {
  GridSpec spec;
  spec.nv = 48;
  spec.ne = 8;
  spec.v_min = 0.5;
  spec.v_max = 16.0;
  spec.e_max = 16.0;
  const Grid2D grid = Grid2D::make(spec);

  ParticleSystem sys;
  sys.particles = {Particle{1.0, 0.0}, Particle{2.0, 1.5}, Particle{3.0, 0.2}};
  sys.weight = 0.5;
  GridState state;
  state.mass.assign(grid.cells(), 0.0);
  for (const Particle& p : sys.particles) {
    deposit_point_mass(grid, state, p.v, p.e, sys.weight);
  }

  const std::vector<MomentKey> pairs = {{0, 0}, {0, 1}, {1, 0}, {0, 2}};
  const MomentRecord mc = moments(sys, pairs);
  const MomentRecord gr = grid_moments(grid, state, pairs);
  CHECK(gr.at(0, 0) == doctest::Approx(mc.at(0, 0)).epsilon(1e-12));
  CHECK(gr.at(0, 1) == doctest::Approx(mc.at(0, 1)).epsilon(1e-12));
  // e-moment is exact, area adds the sphere term evaluated at split pivots
  CHECK(gr.at(1, 0) == doctest::Approx(mc.at(1, 0)).epsilon(0.01));
  CHECK(gr.at(0, 2) == doctest::Approx(mc.at(0, 2)).epsilon(0.01));
}

TEST_CASE("non-finite moment is reported with the offending pair") {
  ParticleSystem sys;
  sys.particles = {Particle{1e308, 0.0}};
  sys.weight = 1.0;
  const std::vector<MomentKey> pairs = {{0, 4}};
  CHECK_THROWS_AS(moments(sys, pairs), std::runtime_error);
}

TEST_CASE("concentration fraction") {
  ParticleSystem sys;
  sys.particles.assign(10, Particle{1.0, 0.0});
  sys.weight = 0.1;

  SUBCASE("all spheres give zero") {
    CHECK(concentration_fraction(sys, 0.1) == 0.0);
  }
  SUBCASE("everything beyond the band gives one") {
    for (auto& p : sys.particles) p.e = 0.2;
    CHECK(concentration_fraction(sys, 0.1) == doctest::Approx(1.0));
  }
  SUBCASE("v-weighted counting and monotonicity in delta1") {
    sys.particles = {Particle{3.0, 0.5}, Particle{1.0, 0.05}};
    const double f1 = concentration_fraction(sys, 0.01);
    const double f2 = concentration_fraction(sys, 0.1);
    const double f3 = concentration_fraction(sys, 1.0);
    CHECK(f1 == doctest::Approx(1.0));
    CHECK(f2 == doctest::Approx(3.0 / 4.0));
    CHECK(f3 == 0.0);
    CHECK(f1 >= f2);
    CHECK(f2 >= f3);
  }
  SUBCASE("empty system is an error") {
    sys.particles.clear();
    CHECK_THROWS_AS(concentration_fraction(sys, 0.1), std::invalid_argument);
  }
}

TEST_CASE("area cutoff marginal") {
  CutoffSpec spec;
  spec.epsilon = 0.1;  // cut begins at a = 100
  ParticleSystem sys;
  sys.weight = 1.0;
  sys.particles = {make_particle(50.0, 1.0), make_particle(150.0, 2.0),
                   make_particle(250.0, 4.0)};
  const std::vector<double> edges = {0.5, 1.5, 3.0, 8.0};

  const Marginal1D m = cutoff_marginal(sys, spec, edges);
  CHECK(m.masses[0] == doctest::Approx(1.0));   // chi = 1
  CHECK(m.masses[1] == doctest::Approx(0.5));   // a = 150 sits mid-ramp
  CHECK(m.masses[2] == doctest::Approx(0.0));   // beyond 2/eps^2
  const double total = m.masses[0] + m.masses[1] + m.masses[2];
  CHECK(total <= 3.0);

  SUBCASE("epsilon -> 0 recovers the plain histogram") {
    CutoffSpec tight;
    tight.epsilon = 0.01;  // cut at a = 1e4, far above every particle
    const Marginal1D full = cutoff_marginal(sys, tight, edges);
    CHECK(full.masses[0] == doctest::Approx(1.0));
    CHECK(full.masses[1] == doctest::Approx(1.0));
    CHECK(full.masses[2] == doctest::Approx(1.0));
  }
}

TEST_CASE("weak distance") {
  const std::vector<double> edges = [] {
    GridAxis ax = GridAxis::log_spaced(0.5, 64.0, 24);
    return ax.edges;
  }();

  Rng rng(8);
  const Marginal1D a = random_marginal(rng, edges);
  const Marginal1D b = random_marginal(rng, edges);
  const Marginal1D c = random_marginal(rng, edges);

  SUBCASE("identical marginals are at distance zero") {
    CHECK(weak_distance(a, a) == 0.0);
  }
  SUBCASE("pseudometric properties on random marginals") {
    CHECK(weak_distance(a, b) == doctest::Approx(weak_distance(b, a)).epsilon(1e-14));
    CHECK(weak_distance(a, c) <= weak_distance(a, b) + weak_distance(b, c) + 1e-13);
    CHECK(weak_distance(a, b) >= 0.0);
  }
  SUBCASE("a point mass moved by one bin is controlled by the Lipschitz bound") {
    Marginal1D m1 = a, m2 = a;
    for (auto& x : m1.masses) x = 0.0;
    m2 = m1;
    const std::size_t bin = 10;
    m1.masses[bin] = 2.0;
    m2.masses[bin + 1] = 2.0;
    const double h = m1.pivots[bin + 1] - m1.pivots[bin];
    CHECK(weak_distance(m1, m2) <= h * 2.0 + 1e-12);
  }
  SUBCASE("mismatched edges are refused") {
    Marginal1D other = a;
    other.v_edges[1] *= 1.01;
    CHECK_THROWS_AS(weak_distance(a, other), std::invalid_argument);
  }
}
