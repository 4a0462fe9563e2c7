#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace coagfuse {

/// Surface area of a sphere of volume v is sphere_area_coeff() * v^(2/3).
inline double sphere_area_coeff() {
  static const double c0 = std::cbrt(36.0 * std::numbers::pi);
  return c0;
}

inline double sphere_area(double v) {
  const double r = std::cbrt(v);
  return sphere_area_coeff() * r * r;
}

/// One cluster, stored as (volume v, excess area e) with e = a - c0*v^(2/3) >= 0.
/// The excess-area coordinate makes the isoperimetric constraint a sign condition
/// instead of a cancellation-prone inequality between large numbers.
struct Particle {
  double v = 1.0;
  double e = 0.0;

  double area() const { return e + sphere_area(v); }
  bool valid() const {
    return v > 0.0 && e >= 0.0 && std::isfinite(v) && std::isfinite(e);
  }
};

/// Relative tolerance for accepting inputs slightly below the isoperimetric line;
/// such inputs are clamped onto the line (e = 0).
inline constexpr double kIsoInputTol = 1e-9;

/// Build a particle from raw (area, volume). Throws std::invalid_argument on
/// v <= 0 or on an isoperimetric violation beyond kIsoInputTol (relative).
Particle make_particle(double a, double v);

/// Merge two clusters: volumes and areas both add exactly.
/// In (v, e) coordinates: v = v1+v2, e = e1+e2 + c0*(v1^(2/3)+v2^(2/3)-(v1+v2)^(2/3));
/// the correction term is nonnegative by subadditivity of x -> x^(2/3).
Particle coagulate(const Particle& p, const Particle& q);

/// Weighted ensemble of particles. Each simulation particle contributes `weight`
/// to the number density, i.e. the nominal box volume is 1/weight pairs-rate-wise.
struct ParticleSystem {
  std::vector<Particle> particles;
  double weight = 1.0;
  double sim_volume = 1.0;
  std::uint64_t rng_seed = 0;
  double time = 0.0;

  std::size_t size() const { return particles.size(); }
  bool valid() const;
};

struct SimConfig {
  double lambda = 1.0;  // fusion time-scale ratio; +inf disables fusion
  double t_end = 1.0;
  std::size_t n_particles = 10000;
  double v_min = 0.5;  // guards the v^(-alpha) singularity
  double record_interval = 0.25;
  std::uint64_t seed = 1;

  void validate() const;
  bool fusion_enabled() const { return std::isfinite(lambda); }
};

/// Exponent pair (k, l) of a moment M_{k,l} = sum w * a^k * v^l.
struct MomentKey {
  double k = 0.0;
  double l = 0.0;
  bool operator<(const MomentKey& o) const {
    return k < o.k || (k == o.k && l < o.l);
  }
  bool operator==(const MomentKey& o) const { return k == o.k && l == o.l; }
};

struct MomentRecord {
  double time = 0.0;
  std::map<MomentKey, double> entries;

  double at(double k, double l) const;
};

/// Snapshot CSV with columns time,v,e,a,weight; values printed with
/// shortest round-trip decimal formatting.
std::string snapshot_csv(const ParticleSystem& sys);

}  // namespace coagfuse
