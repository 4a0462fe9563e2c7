#include "coagfuse/core.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "coagfuse/csv.hpp"

namespace coagfuse {

Particle make_particle(double a, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument("make_particle: volume must be positive and finite, got v=" +
                                fmt_double(v));
  }
  if (!std::isfinite(a)) {
    throw std::invalid_argument("make_particle: area must be finite");
  }
  const double a_min = sphere_area(v);
  if (a < a_min * (1.0 - kIsoInputTol)) {
    throw std::invalid_argument("make_particle: isoperimetric violation, a=" + fmt_double(a) +
                                " < c0*v^(2/3)=" + fmt_double(a_min));
  }
  return Particle{v, std::max(0.0, a - a_min)};
}

Particle coagulate(const Particle& p, const Particle& q) {
  const double v = p.v + q.v;
  const double corr = sphere_area(p.v) + sphere_area(q.v) - sphere_area(v);
  // corr >= 0 exactly; clamp shields against last-ulp cancellation when one
  // volume dominates and both excesses are zero.
  const double e = std::max(0.0, p.e + q.e + corr);
  return Particle{v, e};
}

bool ParticleSystem::valid() const {
  if (!(weight > 0.0) || !(sim_volume > 0.0) || !(time >= 0.0)) return false;
  return std::all_of(particles.begin(), particles.end(),
                     [](const Particle& p) { return p.valid(); });
}

void SimConfig::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("SimConfig: lambda must be > 0");
  if (!(t_end > 0.0)) throw std::invalid_argument("SimConfig: t_end must be > 0");
  if (!(v_min > 0.0)) throw std::invalid_argument("SimConfig: v_min must be > 0");
  if (n_particles < 1) throw std::invalid_argument("SimConfig: n_particles must be >= 1");
  if (!(record_interval > 0.0)) {
    throw std::invalid_argument("SimConfig: record_interval must be > 0");
  }
}

double MomentRecord::at(double k, double l) const {
  auto it = entries.find(MomentKey{k, l});
  if (it == entries.end()) {
    throw std::out_of_range("MomentRecord: no entry for (" + fmt_double(k) + "," +
                            fmt_double(l) + ")");
  }
  return it->second;
}

std::string snapshot_csv(const ParticleSystem& sys) {
  std::string out = "time,v,e,a,weight\n";
  for (const Particle& p : sys.particles) {
    out += fmt_double(sys.time);
    out += ',';
    out += fmt_double(p.v);
    out += ',';
    out += fmt_double(p.e);
    out += ',';
    out += fmt_double(p.area());
    out += ',';
    out += fmt_double(sys.weight);
    out += '\n';
  }
  return out;
}

}  // namespace coagfuse
