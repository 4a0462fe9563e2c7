#include "coagfuse/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "coagfuse/csv.hpp"
#include "coagfuse/diagnostics.hpp"
#include "coagfuse/numeric.hpp"
#include "json.hpp"

namespace coagfuse {

using nlohmann::json;

std::size_t worker_cap() {
  if (const char* env = std::getenv("COAGFUSE_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<std::size_t>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

namespace {

template <typename Fn>
void run_tasks(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min(count, worker_cap());
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) break;
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double find_record_time(const std::vector<MomentRecord>& records, double t, double k,
                        double l) {
  for (const auto& rec : records) {
    if (std::abs(rec.time - t) <= 1e-9 * std::max(1.0, t)) return rec.at(k, l);
  }
  throw std::runtime_error("no record at t=" + fmt_double(t));
}

const ProbeRecord& find_probe(const std::vector<ProbeRecord>& probes, double t) {
  for (const auto& p : probes) {
    if (std::abs(p.time - t) <= 1e-9 * std::max(1.0, t)) return p;
  }
  throw std::runtime_error("no probe at t=" + fmt_double(t));
}

const Marginal1D& history_at(const std::vector<Marginal1D>& history, double t) {
  for (const auto& m : history) {
    if (std::abs(m.time - t) <= 1e-9 * std::max(1.0, t)) return m;
  }
  throw std::runtime_error("no marginal at t=" + fmt_double(t));
}

double initial_number_density(const RunSetup& setup) {
  const double w = setup.init.weight > 0.0
                       ? setup.init.weight
                       : 1.0 / static_cast<double>(setup.sim.n_particles);
  return w * static_cast<double>(setup.sim.n_particles);
}

json checks_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const Check& c : checks) {
    arr.push_back({{"name", c.name},
                   {"value", c.value},
                   {"threshold", c.threshold},
                   {"pass", c.pass}});
  }
  return arr;
}

json base_summary(const RunSetup& setup, const std::string& study) {
  return json{{"study", study},
              {"config_hash", setup.config_hash},
              {"seed", setup.sim.seed},
              {"config", setup.config_text}};
}

void fold_min_excess(StudyReport& report, const std::vector<ReplicaOutcome>& outcomes) {
  for (const auto& outcome : outcomes) {
    if (!outcome.result) continue;
    report.min_excess = std::min(report.min_excess, outcome.result->log.min_excess_seen);
    for (const Particle& p : outcome.result->system.particles) {
      report.min_excess = std::min(report.min_excess, p.e);
    }
  }
}

}  // namespace

ReplicaStats replica_stats(const std::vector<double>& xs) {
  ReplicaStats st;
  if (xs.empty()) return st;
  KahanSum sum;
  for (double x : xs) sum.add(x);
  st.mean = sum.value() / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    KahanSum sq;
    for (double x : xs) sq.add((x - st.mean) * (x - st.mean));
    const double var = sq.value() / static_cast<double>(xs.size() - 1);
    st.se = std::sqrt(std::max(0.0, var) / static_cast<double>(xs.size()));
  }
  return st;
}

void StudyReport::add_check(const std::string& check_name, double value, double threshold,
                            bool pass) {
  checks.push_back(Check{check_name, value, threshold, pass});
  all_pass = all_pass && pass;
}

std::vector<ReplicaOutcome> run_mc_ensemble(const RunSetup& setup, double lambda,
                                            std::size_t replicas,
                                            const DiagnosticsSpec& probes,
                                            std::optional<std::uint64_t> stop_after_events) {
  std::vector<ReplicaOutcome> out(replicas);
  run_tasks(replicas, [&](std::size_t r) {
    SimConfig cfg = setup.sim;
    cfg.lambda = lambda;
    cfg.seed = derive_seed(setup.sim.seed, 2 + r);
    try {
      out[r].result = run_mc(setup.coag, setup.fusion, cfg, setup.init, probes, setup.trunc,
                             stop_after_events, setup.flow_tol);
    } catch (const std::exception& ex) {
      out[r].error = ex.what();
    }
  });
  return out;
}

Marginal1D initial_marginal(const RunSetup& setup, double v_min, double v_max,
                            std::size_t bins) {
  Marginal1D m = Marginal1D::zeros(v_min, v_max, bins);
  const double n0 = initial_number_density(setup);
  if (setup.init.kind == InitSpec::Kind::Monodisperse ||
      (setup.init.kind == InitSpec::Kind::Ramified && setup.init.log_sigma <= 0.0)) {
    deposit_point_mass(m, setup.init.v0, n0);
    return m;
  }
  // log-normal volume marginal, bin-integrated
  const double s = setup.init.log_sigma * std::sqrt(2.0);
  const double lv0 = std::log(setup.init.v0);
  double cdf_lo = 0.5 * (1.0 + std::erf((std::log(m.v_edges.front()) - lv0) / s));
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double cdf_hi = 0.5 * (1.0 + std::erf((std::log(m.v_edges[i + 1]) - lv0) / s));
    m.masses[i] = n0 * (cdf_hi - cdf_lo);
    cdf_lo = cdf_hi;
  }
  return m;
}

GridState initial_grid_state(const RunSetup& setup, const Grid2D& grid) {
  GridState state;
  state.mass.assign(grid.cells(), 0.0);
  const double n0 = initial_number_density(setup);
  if (setup.init.kind == InitSpec::Kind::Monodisperse) {
    deposit_point_mass(grid, state, setup.init.v0, 0.0, n0);
    return state;
  }
  // v-marginal integrated over bins; e placed per generator (0 or kappa*v)
  Marginal1D marg = initial_marginal(setup, grid.v_axis.edges.front(),
                                     grid.v_axis.edges.back(), grid.nv());
  const double kappa =
      (setup.init.kind == InitSpec::Kind::Ramified) ? setup.init.kappa : 0.0;
  for (std::size_t i = 0; i < marg.size(); ++i) {
    if (marg.masses[i] == 0.0) continue;
    const double v = grid.v_axis.pivots[i];
    deposit_point_mass(grid, state, v, kappa * v, marg.masses[i]);
  }
  return state;
}

StudyReport study_fast_fusion(const RunSetup& setup) {
  StudyReport report;
  report.name = "fast-fusion";

  std::vector<double> sweep = setup.study_lambdas;
  std::sort(sweep.begin(), sweep.end(), std::greater<>());
  if (sweep.size() < 2 || sweep.front() > 1.0 + 1e-12 ||
      sweep.front() / sweep.back() < 999.0) {
    throw std::invalid_argument(
        "study fast-fusion: sweep must span >= 3 decades of lambda at or below 1");
  }

  // one-dimensional reference from the matched initial volume marginal
  Marginal1D ref_init =
      initial_marginal(setup, setup.grid.v_min, setup.grid.v_max, setup.smolu_bins);
  Smolu1dRunConfig scfg = setup.smolu;
  const std::vector<double> powers = {0.0, 1.0, 2.0};
  const Smolu1dResult ref = run_smolu1d(ref_init, setup.coag, scfg, powers);

  std::vector<double> checkpoints;
  for (double t = setup.sim.record_interval; t <= setup.sim.t_end * (1.0 + 1e-12);
       t += setup.sim.record_interval) {
    checkpoints.push_back(std::min(t, setup.sim.t_end));
  }

  DiagnosticsSpec probes;
  probes.moment_pairs = {{0, 0}, {0, 1}, {1, 0}};
  probes.concentration_delta1 = setup.study_delta1;
  probes.cutoff = CutoffSpec{setup.study_epsilon};
  probes.marginal_edges = ref_init.v_edges;

  struct SweepPoint {
    double lambda;
    std::map<double, ReplicaStats> conc;  // by checkpoint
    std::map<double, ReplicaStats> dist;
    double volume_moment = 0.0;
    std::size_t aborted = 0;
  };
  std::vector<SweepPoint> points;

  for (double lambda : sweep) {
    SweepPoint pt;
    pt.lambda = lambda;
    const auto outcomes = run_mc_ensemble(setup, lambda, setup.replicas, probes);
    fold_min_excess(report, outcomes);
    std::map<double, std::vector<double>> conc_by_t, dist_by_t;
    std::vector<double> volumes;
    for (const auto& outcome : outcomes) {
      if (!outcome.result) {
        ++pt.aborted;
        continue;
      }
      const McResult& res = *outcome.result;
      for (double t : checkpoints) {
        const ProbeRecord& probe = find_probe(res.probes, t);
        if (probe.concentration_fraction) {
          conc_by_t[t].push_back(*probe.concentration_fraction);
        }
        if (probe.cutoff_marginal) {
          dist_by_t[t].push_back(weak_distance(*probe.cutoff_marginal,
                                               history_at(ref.history, t)));
        }
      }
      volumes.push_back(find_record_time(res.records, setup.sim.t_end, 0.0, 1.0));
    }
    if (volumes.empty()) {
      throw std::runtime_error("study fast-fusion: every replica aborted at lambda=" +
                               fmt_double(lambda));
    }
    for (double t : checkpoints) {
      pt.conc[t] = replica_stats(conc_by_t[t]);
      pt.dist[t] = replica_stats(dist_by_t[t]);
    }
    pt.volume_moment = replica_stats(volumes).mean;
    points.push_back(std::move(pt));
  }

  // monotone along the sweep within 2 SE, at every checkpoint
  for (double t : checkpoints) {
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
      const auto& a = points[k];
      const auto& b = points[k + 1];
      const double d_conc = b.conc.at(t).mean - a.conc.at(t).mean;
      const double tol_conc =
          2.0 * std::sqrt(a.conc.at(t).se * a.conc.at(t).se +
                          b.conc.at(t).se * b.conc.at(t).se);
      report.add_check("conc_noninc_t" + fmt_double(t) + "_" + fmt_double(a.lambda) + "to" +
                           fmt_double(b.lambda),
                       d_conc, tol_conc, d_conc <= tol_conc);
      const double d_dist = b.dist.at(t).mean - a.dist.at(t).mean;
      const double tol_dist =
          2.0 * std::sqrt(a.dist.at(t).se * a.dist.at(t).se +
                          b.dist.at(t).se * b.dist.at(t).se);
      report.add_check("dist_noninc_t" + fmt_double(t) + "_" + fmt_double(a.lambda) + "to" +
                           fmt_double(b.lambda),
                       d_dist, tol_dist, d_dist <= tol_dist);
    }
  }

  // smallest lambda concentrates near the line
  const double t_probe = std::min(0.5, checkpoints.back());
  const double conc_small = points.back().conc.at(t_probe).mean;
  report.add_check("conc_at_lambda_" + fmt_double(points.back().lambda), conc_small,
                   setup.conc_threshold, conc_small < setup.conc_threshold);

  // volume is conserved and matches the one-dimensional reference
  const double n0v0 = initial_number_density(setup) * setup.init.v0;
  const double ref_volume =
      ref.final_state.volume_moment(1.0) + ref.final_state.exited_v_mass;
  for (const auto& pt : points) {
    const double err = std::abs(pt.volume_moment - ref_volume) / n0v0;
    report.add_check("volume_match_lambda_" + fmt_double(pt.lambda), err, 1e-6,
                     err <= 1e-6);
  }

  std::string csv = "lambda,time,conc_mean,conc_se,dist_mean,dist_se,aborted\n";
  for (const auto& pt : points) {
    for (double t : checkpoints) {
      csv += fmt_double(pt.lambda);
      csv += ',';
      csv += fmt_double(t);
      csv += ',';
      csv += fmt_double(pt.conc.at(t).mean);
      csv += ',';
      csv += fmt_double(pt.conc.at(t).se);
      csv += ',';
      csv += fmt_double(pt.dist.at(t).mean);
      csv += ',';
      csv += fmt_double(pt.dist.at(t).se);
      csv += ',';
      csv += fmt_u64(pt.aborted);
      csv += '\n';
    }
  }
  report.files["fast_fusion.csv"] = csv;
  report.files["smolu_reference.csv"] = marginal_csv(ref.final_state);

  json summary = base_summary(setup, report.name);
  summary["checks"] = checks_json(report.checks);
  json records = json::array();
  for (const auto& pt : points) {
    for (double t : checkpoints) {
      records.push_back({{"lambda", pt.lambda},
                         {"time", t},
                         {"conc_mean", pt.conc.at(t).mean},
                         {"conc_se", pt.conc.at(t).se},
                         {"dist_mean", pt.dist.at(t).mean},
                         {"dist_se", pt.dist.at(t).se}});
    }
  }
  summary["records"] = records;
  summary["pass"] = report.all_pass;
  report.summary_json = summary.dump(2);
  return report;
}

StudyReport study_slow_fusion(const RunSetup& setup) {
  StudyReport report;
  report.name = "slow-fusion";

  std::vector<double> sweep = setup.study_lambdas;
  std::sort(sweep.begin(), sweep.end());
  if (sweep.size() < 2 || sweep.front() < 10.0) {
    throw std::invalid_argument("study slow-fusion: sweep must contain lambdas >= 10");
  }

  DiagnosticsSpec probes;
  probes.moment_pairs = {{0, 0}, {0, 1}, {1, 0}};

  struct SweepPoint {
    double lambda;
    ReplicaStats drift;
    double worst_volume_drift = 0.0;
    std::size_t aborted = 0;
  };
  std::vector<SweepPoint> points;

  for (double lambda : sweep) {
    SweepPoint pt;
    pt.lambda = lambda;
    const auto outcomes = run_mc_ensemble(setup, lambda, setup.replicas, probes);
    fold_min_excess(report, outcomes);
    std::vector<double> drifts;
    for (const auto& outcome : outcomes) {
      if (!outcome.result) {
        ++pt.aborted;
        continue;
      }
      const auto& recs = outcome.result->records;
      const double a0 = recs.front().at(1, 0);
      const double aT = recs.back().at(1, 0);
      drifts.push_back(std::abs(aT - a0) / a0);
      const double v0 = recs.front().at(0, 1);
      const double vT = recs.back().at(0, 1);
      pt.worst_volume_drift = std::max(pt.worst_volume_drift, std::abs(vT - v0) / v0);
    }
    if (drifts.empty()) {
      throw std::runtime_error("study slow-fusion: every replica aborted at lambda=" +
                               fmt_double(lambda));
    }
    pt.drift = replica_stats(drifts);
    report.add_check("volume_conserved_lambda_" + fmt_double(lambda), pt.worst_volume_drift,
                     1e-10, pt.worst_volume_drift <= 1e-10);
    points.push_back(std::move(pt));
  }

  // least-squares slope of ln(drift) on ln(lambda); expect ~ -1
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& pt : points) {
    const double x = std::log(pt.lambda);
    const double y = std::log(std::max(pt.drift.mean, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(points.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  report.add_check("drift_loglog_slope", slope, -0.8,
                   slope >= -1.2 && slope <= -0.8);

  // fusion disabled: both conserved
  {
    SimConfig cfg = setup.sim;
    cfg.lambda = std::numeric_limits<double>::infinity();
    cfg.seed = derive_seed(setup.sim.seed, 9999);
    const McResult res = run_mc(setup.coag, setup.fusion, cfg, setup.init, probes,
                                setup.trunc, std::nullopt, setup.flow_tol);
    report.min_excess = std::min(report.min_excess, res.log.min_excess_seen);
    const auto& recs = res.records;
    const double da = std::abs(recs.back().at(1, 0) - recs.front().at(1, 0)) /
                      recs.front().at(1, 0);
    const double dv = std::abs(recs.back().at(0, 1) - recs.front().at(0, 1)) /
                      recs.front().at(0, 1);
    report.add_check("fusion_off_area_conserved", da, 1e-10, da <= 1e-10);
    report.add_check("fusion_off_volume_conserved", dv, 1e-10, dv <= 1e-10);
  }

  std::string csv = "lambda,drift_mean,drift_se,aborted\n";
  for (const auto& pt : points) {
    csv += fmt_double(pt.lambda);
    csv += ',';
    csv += fmt_double(pt.drift.mean);
    csv += ',';
    csv += fmt_double(pt.drift.se);
    csv += ',';
    csv += fmt_u64(pt.aborted);
    csv += '\n';
  }
  report.files["slow_fusion.csv"] = csv;

  json summary = base_summary(setup, report.name);
  summary["checks"] = checks_json(report.checks);
  json records = json::array();
  for (const auto& pt : points) {
    records.push_back({{"lambda", pt.lambda},
                       {"drift_mean", pt.drift.mean},
                       {"drift_se", pt.drift.se}});
  }
  summary["records"] = records;
  summary["slope"] = slope;
  summary["pass"] = report.all_pass;
  report.summary_json = summary.dump(2);
  return report;
}

StudyReport study_cross_validation(const RunSetup& setup) {
  StudyReport report;
  report.name = "cross-validate";

  DiagnosticsSpec probes;
  probes.moment_pairs = {{0, 0}, {0, 1}, {1, 0}, {0, 2}};
  const auto outcomes = run_mc_ensemble(setup, setup.sim.lambda, setup.replicas, probes);
  fold_min_excess(report, outcomes);

  const Grid2D grid = Grid2D::make(setup.grid);
  SectionalSolver solver(grid, setup.coag, setup.fusion, setup.trunc);
  SectionalRunConfig scfg = setup.sectional;
  scfg.lambda = setup.sim.lambda;
  const std::vector<MomentKey> pairs = {{0, 0}, {0, 1}, {1, 0}, {0, 2}};
  const SectionalResult sect =
      run_sectional(solver, initial_grid_state(setup, grid), scfg, pairs);

  std::vector<double> checkpoints;
  for (double t = 0.0; t <= setup.sim.t_end * (1.0 + 1e-12);
       t += setup.sim.record_interval) {
    checkpoints.push_back(std::min(t, setup.sim.t_end));
  }

  const std::vector<MomentKey> targets = {{0, 0}, {0, 2}, {1, 0}};
  std::string csv = "time,moment,mc_mean,mc_se,sectional,threshold,pass\n";
  std::size_t aborted = 0;
  for (double t : checkpoints) {
    for (const MomentKey& key : targets) {
      std::vector<double> values;
      for (const auto& outcome : outcomes) {
        if (!outcome.result) continue;
        values.push_back(find_record_time(outcome.result->records, t, key.k, key.l));
      }
      const ReplicaStats st = replica_stats(values);
      const double sect_value = find_record_time(sect.records, t, key.k, key.l);
      const double err = std::abs(st.mean - sect_value);
      const double threshold = std::max(0.05 * std::abs(sect_value), 3.0 * st.se);
      const bool pass = t == 0.0 ? err <= std::max(1e-9, 0.02 * std::abs(sect_value))
                                 : err <= threshold;
      const std::string label = "M_" + fmt_double(key.k) + "_" + fmt_double(key.l);
      report.add_check(label + "_t" + fmt_double(t), err,
                       t == 0.0 ? std::max(1e-9, 0.02 * std::abs(sect_value)) : threshold,
                       pass);
      csv += fmt_double(t) + "," + label + "," + fmt_double(st.mean) + "," +
             fmt_double(st.se) + "," + fmt_double(sect_value) + "," +
             fmt_double(threshold) + "," + (pass ? "1" : "0") + "\n";
    }
  }
  for (const auto& outcome : outcomes) {
    if (!outcome.result) ++aborted;
  }

  report.files["cross_validation.csv"] = csv;
  report.files["sectional_final.csv"] = grid_state_csv(grid, sect.final_state);

  json summary = base_summary(setup, report.name);
  summary["checks"] = checks_json(report.checks);
  summary["aborted_replicas"] = aborted;
  summary["sectional_area_redistribution_error"] =
      sect.final_state.area_redistribution_error;
  summary["pass"] = report.all_pass;
  report.summary_json = summary.dump(2);
  return report;
}

namespace {

const char* kPlotStub = R"(#!/usr/bin/env python3
# Renders the CSV outputs in this directory (requires matplotlib + pandas).
import glob
import pandas as pd
import matplotlib.pyplot as plt

for path in sorted(glob.glob("*.csv")):
    df = pd.read_csv(path)
    if df.empty:
        continue
    fig, ax = plt.subplots()
    cols = [c for c in df.columns if c != "time"]
    x = df["time"] if "time" in df.columns else df.index
    for col in cols[:6]:
        ax.plot(x, df[col], label=col)
    ax.set_title(path)
    ax.legend(fontsize=6)
    fig.savefig(path.replace(".csv", ".png"), dpi=120)
    plt.close(fig)
)";

}  // namespace

void write_study_outputs(const StudyReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (const auto& [name, content] : report.files) {
    std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
    out << content;
  }
  {
    std::ofstream out(fs::path(out_dir) / "report.json", std::ios::binary);
    out << report.summary_json << '\n';
  }
  {
    std::ofstream out(fs::path(out_dir) / "plot.py", std::ios::binary);
    out << kPlotStub;
  }
}

StudyReport run_mc_command(const RunSetup& setup, std::size_t replicas) {
  StudyReport report;
  report.name = "run-mc";

  DiagnosticsSpec probes = setup.diagnostics;
  probes.concentration_delta1 = setup.study_delta1;
  const auto outcomes = run_mc_ensemble(setup, setup.sim.lambda, replicas, probes);
  fold_min_excess(report, outcomes);

  json replica_logs = json::array();
  std::vector<const McResult*> ok;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (!outcomes[r].result) {
      replica_logs.push_back({{"replica", r}, {"error", outcomes[r].error}});
      continue;
    }
    const McResult& res = *outcomes[r].result;
    ok.push_back(&res);
    report.files["replica_" + std::to_string(r) + "_moments.csv"] =
        moment_records_csv(res.records);
    report.files["replica_" + std::to_string(r) + "_probes.csv"] =
        probe_records_csv(res.probes);
    if (setup.emit_snapshots) {
      report.files["replica_" + std::to_string(r) + "_snapshot.csv"] =
          snapshot_csv(res.system);
    }
    replica_logs.push_back({{"replica", r},
                            {"proposed", res.log.proposed},
                            {"accepted", res.log.accepted},
                            {"rejected", res.log.rejected},
                            {"self_draws", res.log.self_draws},
                            {"wall_seconds", res.log.wall_seconds},
                            {"final_count", res.system.size()}});
  }
  if (ok.empty()) throw std::runtime_error("run-mc: every replica aborted");

  // cross-replica means and standard errors per record time and moment
  json records = json::array();
  const auto& ref_records = ok.front()->records;
  for (std::size_t ri = 0; ri < ref_records.size(); ++ri) {
    json entry;
    entry["time"] = ref_records[ri].time;
    for (const auto& [key, _] : ref_records[ri].entries) {
      std::vector<double> values;
      for (const McResult* res : ok) {
        if (ri < res->records.size()) {
          values.push_back(res->records[ri].at(key.k, key.l));
        }
      }
      const ReplicaStats st = replica_stats(values);
      entry["M_" + fmt_double(key.k) + "_" + fmt_double(key.l)] = {{"mean", st.mean},
                                                                   {"se", st.se}};
    }
    records.push_back(entry);
  }

  json summary = base_summary(setup, report.name);
  summary["records"] = records;
  summary["checks"] = json::array();
  summary["replicas"] = replica_logs;
  summary["pass"] = true;
  report.summary_json = summary.dump(2);
  return report;
}

StudyReport run_sectional_command(const RunSetup& setup) {
  StudyReport report;
  report.name = "run-sectional";

  const Grid2D grid = Grid2D::make(setup.grid);
  SectionalSolver solver(grid, setup.coag, setup.fusion, setup.trunc);
  SectionalRunConfig scfg = setup.sectional;
  const std::vector<MomentKey> pairs = {{0, 0}, {0, 1}, {1, 0}, {0, 2}};
  const SectionalResult res =
      run_sectional(solver, initial_grid_state(setup, grid), scfg, pairs);

  report.files["moments.csv"] = moment_records_csv(res.records);
  std::string cells;
  for (const GridState& snap : res.history) {
    const std::string csv = grid_state_csv(grid, snap);
    cells += (cells.empty() ? csv : csv.substr(csv.find('\n') + 1));
  }
  report.files["cells.csv"] = cells;

  json summary = base_summary(setup, report.name);
  summary["checks"] = json::array();
  summary["exit_tally"] = {{"number", res.final_state.exited.number},
                           {"v_mass", res.final_state.exited.v_mass},
                           {"a_mass", res.final_state.exited.a_mass}};
  summary["area_redistribution_error"] = res.final_state.area_redistribution_error;
  summary["pass"] = true;
  report.summary_json = summary.dump(2);
  return report;
}

StudyReport run_smolu1d_command(const RunSetup& setup) {
  StudyReport report;
  report.name = "run-smolu1d";

  Marginal1D init =
      initial_marginal(setup, setup.grid.v_min, setup.grid.v_max, setup.smolu_bins);
  const std::vector<double> powers = {0.0, 1.0, 2.0};
  const Smolu1dResult res = run_smolu1d(init, setup.coag, setup.smolu, powers);

  report.files["moments.csv"] = moment_records_csv(res.records);
  std::string marginals;
  for (const Marginal1D& snap : res.history) {
    const std::string csv = marginal_csv(snap);
    marginals += (marginals.empty() ? csv : csv.substr(csv.find('\n') + 1));
  }
  report.files["marginal.csv"] = marginals;

  json summary = base_summary(setup, report.name);
  summary["checks"] = json::array();
  summary["exit_tally"] = {{"number", res.final_state.exited_number},
                           {"v_mass", res.final_state.exited_v_mass}};
  summary["pass"] = true;
  report.summary_json = summary.dump(2);
  return report;
}

}  // namespace coagfuse
