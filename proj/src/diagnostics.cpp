#include "coagfuse/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coagfuse/csv.hpp"
#include "coagfuse/numeric.hpp"

namespace coagfuse {

void CutoffSpec::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("CutoffSpec: epsilon must lie in (0,1)");
  }
}

double CutoffSpec::chi(double area) const {
  const double lo = 1.0 / (epsilon * epsilon);
  if (area <= lo) return 1.0;
  if (area >= 2.0 * lo) return 0.0;
  return 2.0 - area / lo;
}

MomentRecord moments(const ParticleSystem& sys, std::span<const MomentKey> pairs) {
  MomentRecord rec;
  rec.time = sys.time;
  for (const MomentKey& key : pairs) {
    KahanSum sum;
    for (const Particle& p : sys.particles) {
      double term = sys.weight;
      if (key.k != 0.0) term *= std::pow(p.area(), key.k);
      if (key.l != 0.0) term *= std::pow(p.v, key.l);
      sum.add(term);
    }
    const double value = sum.value();
    if (!std::isfinite(value)) {
      throw std::runtime_error("moments: non-finite M_(" + fmt_double(key.k) + "," +
                               fmt_double(key.l) + ")");
    }
    rec.entries[key] = value;
  }
  return rec;
}

double concentration_fraction(const ParticleSystem& sys, double delta1) {
  if (!(delta1 > 0.0)) throw std::invalid_argument("concentration_fraction: delta1 must be > 0");
  if (sys.particles.empty()) {
    throw std::invalid_argument("concentration_fraction: empty system");
  }
  KahanSum total, off_line;
  for (const Particle& p : sys.particles) {
    total.add(p.v);
    if (p.e > delta1) off_line.add(p.v);
  }
  return off_line.value() / total.value();
}

Marginal1D cutoff_marginal(const ParticleSystem& sys, const CutoffSpec& spec,
                           std::span<const double> v_edges) {
  spec.validate();
  if (v_edges.size() < 2) throw std::invalid_argument("cutoff_marginal: need >= 2 edges");
  Marginal1D m;
  m.v_edges.assign(v_edges.begin(), v_edges.end());
  m.pivots.resize(v_edges.size() - 1);
  for (std::size_t i = 0; i + 1 < v_edges.size(); ++i) {
    m.pivots[i] = std::sqrt(v_edges[i] * v_edges[i + 1]);
  }
  m.masses.assign(m.pivots.size(), 0.0);
  m.time = sys.time;
  for (const Particle& p : sys.particles) {
    if (p.v < v_edges.front() || p.v >= v_edges.back()) continue;
    const auto it = std::upper_bound(v_edges.begin(), v_edges.end(), p.v);
    const std::size_t bin = static_cast<std::size_t>(it - v_edges.begin()) - 1;
    m.masses[bin] += sys.weight * spec.chi(p.area());
  }
  return m;
}

namespace {

struct Hat {
  double center;
  double half_width;
  double height;  // min(1, half_width) keeps both sup and Lipschitz norms <= 1

  double operator()(double v) const {
    const double t = 1.0 - std::abs(v - center) / half_width;
    return t > 0.0 ? height * t : 0.0;
  }
};

std::vector<Hat> hat_dictionary(std::span<const double> edges) {
  constexpr std::size_t kCenters = 16;
  const double lo = edges.front();
  const double hi = edges.back();
  const double step = std::log(hi / lo) / static_cast<double>(kCenters - 1);
  std::vector<Hat> dict;
  dict.reserve(kCenters * 4);
  for (std::size_t i = 0; i < kCenters; ++i) {
    const double c = lo * std::exp(step * static_cast<double>(i));
    for (double scale : {0.25, 0.5, 1.0, 2.0}) {
      const double w = scale * c;
      dict.push_back(Hat{c, w, std::min(1.0, w)});
    }
  }
  return dict;
}

}  // namespace

double weak_distance(const Marginal1D& m1, const Marginal1D& m2) {
  if (m1.v_edges != m2.v_edges) {
    throw std::invalid_argument("weak_distance: marginals must share bin edges");
  }
  const auto dict = hat_dictionary(m1.v_edges);
  double dist = 0.0;
  for (const Hat& hat : dict) {
    KahanSum diff;
    for (std::size_t i = 0; i < m1.size(); ++i) {
      const double d = m1.masses[i] - m2.masses[i];
      if (d != 0.0) diff.add(d * hat(m1.pivots[i]));
    }
    dist = std::max(dist, std::abs(diff.value()));
  }
  return dist;
}

std::string moment_records_csv(std::span<const MomentRecord> records) {
  std::string out = "time";
  std::vector<MomentKey> keys;
  if (!records.empty()) {
    for (const auto& [key, _] : records.front().entries) {
      keys.push_back(key);
      out += ",M_" + fmt_double(key.k) + "_" + fmt_double(key.l);
    }
  }
  out += '\n';
  for (const MomentRecord& rec : records) {
    out += fmt_double(rec.time);
    for (const MomentKey& key : keys) {
      out += ',';
      out += fmt_double(rec.at(key.k, key.l));
    }
    out += '\n';
  }
  return out;
}

std::string probe_records_csv(std::span<const ProbeRecord> records) {
  std::string out = "time,concentration_fraction\n";
  for (const ProbeRecord& rec : records) {
    out += fmt_double(rec.time);
    out += ',';
    out += rec.concentration_fraction ? fmt_double(*rec.concentration_fraction) : "nan";
    out += '\n';
  }
  return out;
}

std::string marginal_csv(const Marginal1D& m) {
  std::string out = "time,v_lo,v_hi,mass\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += fmt_double(m.time);
    out += ',';
    out += fmt_double(m.v_edges[i]);
    out += ',';
    out += fmt_double(m.v_edges[i + 1]);
    out += ',';
    out += fmt_double(m.masses[i]);
    out += '\n';
  }
  return out;
}

std::string grid_state_csv(const Grid2D& grid, const GridState& state) {
  std::string out = "time,v_lo,v_hi,e_lo,e_hi,density\n";
  for (std::size_t iv = 0; iv < grid.nv(); ++iv) {
    for (std::size_t ie = 0; ie < grid.ne(); ++ie) {
      const double m = state.mass[grid.cell(iv, ie)];
      if (m == 0.0) continue;
      out += fmt_double(state.time);
      out += ',';
      out += fmt_double(grid.v_axis.edges[iv]);
      out += ',';
      out += fmt_double(grid.v_axis.edges[iv + 1]);
      out += ',';
      out += fmt_double(grid.e_axis.edges[ie]);
      out += ',';
      out += fmt_double(grid.e_axis.edges[ie + 1]);
      out += ',';
      out += fmt_double(m);
      out += '\n';
    }
  }
  return out;
}

}  // namespace coagfuse
