#pragma once

// Task execution behind the command-line tool. execute() is a pure function
// of the resolved config: results never depend on the worker count.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mucogarch/cli/config.hpp"
#include "mucogarch/conditions.hpp"
#include "mucogarch/ergolab.hpp"
#include "mucogarch/generator.hpp"
#include "mucogarch/parallel.hpp"
#include "mucogarch/process.hpp"
#include "mucogarch/serialize.hpp"

namespace mucogarch::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct OutputFile {
  std::string name;
  std::string content;
  std::string description;
};

struct RunOutcome {
  json results;
  json summary = json::object();  // flat scalars, used for sweep tables
  std::vector<OutputFile> files;
  bool inconclusive = false;
};

namespace detail {

inline std::vector<double> time_grid(const json& task) {
  const double horizon = task.at("horizon").get<double>();
  const double step = task.at("grid_step").get<double>();
  if (!(horizon > 0.0)) throw ConfigError("'task.horizon' must be > 0 for this task");
  if (!(step > 0.0)) throw ConfigError("'task.grid_step' must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(horizon / step));
  return uniform_grid(0.0, horizon, std::max<std::size_t>(n, 1) + 1);
}

inline std::uint64_t seed_of(const json& task) { return task.at("seed").get<std::uint64_t>(); }

inline RunOutcome run_simulate(const json& cfg) {
  const json& task = cfg.at("task");
  const ModelParams params = model_from(cfg);
  const CompoundPoissonSpec spec = noise_from(cfg);
  const PsdMatrix y0 = initial_state_from(cfg);
  const std::vector<double> grid = time_grid(task);
  SimOptions opts;
  opts.track_g = task.at("track_g").get<bool>();
  const PathRecord rec = simulate_path(params, spec, y0, grid.back(), grid,
                                       derive_seed(seed_of(task), "simulate"), opts);

  double max_norm = 0.0;
  for (const auto& e : rec.skeleton) max_norm = std::max(max_norm, e.Y.norm());
  const double recon = reconstruct_path(rec);

  RunOutcome out;
  out.results = {{"n_jumps", rec.train.size()},
                 {"n_grid", grid.size()},
                 {"final_Y", matrix_json(rec.skeleton.back().Y)},
                 {"max_frobenius_norm", num(max_norm)},
                 {"reconstruction_error", num(recon)}};
  out.summary = {{"n_jumps", rec.train.size()},
                 {"max_frobenius_norm", num(max_norm)},
                 {"reconstruction_error", num(recon)}};

  json events = json::array();
  for (std::size_t i = 0; i < rec.train.size(); ++i)
    events.push_back({{"time", rec.train.times[i]}, {"mark", vector_json(rec.train.marks[i])}});
  out.files.push_back({"skeleton.csv", skeleton_csv(rec).str(),
                       "time, event_type (grid|pre_jump|post_jump), upper triangle of Y row by row"});
  out.files.push_back({"events.json", json{{"jumps", events}}.dump(2) + "\n",
                       "jump times and marks of the driving compound Poisson process"});
  if (opts.track_g) {
    std::vector<std::string> header{"time"};
    for (int i = 0; i < params.dim(); ++i) header.push_back("g_" + std::to_string(i + 1));
    CsvTable t(header);
    for (const auto& g : rec.g_samples) {
      std::vector<std::string> row{csv_number(g.time)};
      for (Eigen::Index i = 0; i < g.G.size(); ++i) row.push_back(csv_number(g.G(i)));
      t.add(row);
    }
    out.files.push_back({"log_price.csv", t.str(), "time, components of G"});
  }
  return out;
}

inline void add_condition(RunOutcome& out, json& list, CsvTable& table, const ConditionReport& r) {
  list.push_back(to_json(r));
  const auto integral = r.extras.count("integral") ? r.extras.at("integral") : r.lhs;
  table.add({r.name, csv_number(r.lhs), csv_number(r.lhs_stderr), csv_number(r.rhs),
             to_string(r.satisfied), csv_number(integral)});
  out.summary[r.name + ".lhs"] = num(r.lhs);
  out.summary[r.name + ".lhs_stderr"] = num(r.lhs_stderr);
  out.summary[r.name + ".rhs"] = num(r.rhs);
  out.summary[r.name + ".verdict"] = to_string(r.satisfied);
  out.summary[r.name + ".integral"] = num(integral);
  if (r.satisfied == Verdict::inconclusive) out.inconclusive = true;
}

inline ConditionReport geom_report(const ModelParams& params, const CompoundPoissonSpec& spec,
                                   const json& task) {
  return check_geom_ergodicity_any(params, spec, task.at("p").get<double>(),
                                   task.at("n_mc").get<long>(),
                                   derive_seed(seed_of(task), "geom_ergodicity"));
}

inline RunOutcome run_check(const json& cfg) {
  const json& task = cfg.at("task");
  const ModelParams params = model_from(cfg);
  const CompoundPoissonSpec spec = noise_from(cfg);
  const long n_mc = task.at("n_mc").get<long>();
  const std::uint64_t seed = seed_of(task);

  RunOutcome out;
  json list = json::array();
  json skipped = json::object();
  CsvTable table({"name", "lhs", "lhs_stderr", "rhs", "verdict", "integral"});

  K2BOptions k2b;
  k2b.domain = task.at("k2b_domain").get<std::string>() == "symmetric" ? K2BDomain::symmetric
                                                                        : K2BDomain::psd;
  k2b.random_starts = task.at("k2b_random_starts").get<int>();
  try {
    const BSNormContext ctx = make_bs_context(params.B(), params.A(), k2b);
    add_condition(out, list, table,
                  check_log_stationarity(params, spec, ctx, n_mc, derive_seed(seed, "log_stationarity")));
    const int k = task.at("k").get<int>();
    if (k >= 1)
      add_condition(out, list, table,
                    check_moment_k(params, spec, ctx, k, n_mc, derive_seed(seed, "moment_k")));
    out.results["bs_norm"] = {{"lambda", num(ctx.lambda)}, {"cond_S", num(ctx.cond_S)},
                              {"K2B", num(ctx.K2B)},       {"alpha1", num(ctx.alpha1)},
                              {"norm_AA", num(ctx.norm_AA)}};
  } catch (const NotDiagonalizableError& e) {
    skipped["log_stationarity"] = e.what();
    skipped["moment_k"] = e.what();
  }
  add_condition(out, list, table, geom_report(params, spec, task));
  add_condition(out, list, table, check_first_order(params, spec, n_mc, derive_seed(seed, "first_order")));

  out.results["conditions"] = list;
  out.results["skipped"] = skipped;
  out.files.push_back({"conditions.csv", table.str(),
                       "name, lhs, lhs_stderr, rhs, verdict (yes|no|inconclusive), integral"});
  return out;
}

inline RunOutcome run_generator(const json& cfg, ExecPolicy policy) {
  const json& task = cfg.at("task");
  const ModelParams params = model_from(cfg);
  const CompoundPoissonSpec spec = noise_from(cfg);
  const PsdMatrix y0 = initial_state_from(cfg);
  const double p = task.at("p").get<double>();
  const long n_mc = task.at("n_mc").get<long>();
  const std::size_t n_paths = task.at("n_paths").get<std::size_t>();
  const std::uint64_t seed = seed_of(task);

  RunOutcome out;
  const GeneratorEval eval =
      extended_generator(params, spec, y0, p, n_mc, derive_seed(seed, "generator"));
  const GrowthConstants growth = growth_constants(params, spec, p, n_mc, derive_seed(seed, "growth"));
  const ConditionReport geom = geom_report(params, spec, task);

  ScanOptions scan;
  scan.sampler.radius = task.at("radius").get<double>();
  scan.n_states = task.at("n_states").get<std::size_t>();
  scan.n_mc = n_mc;
  scan.exploratory = geom.satisfied != Verdict::yes;
  scan.policy = policy;
  const DriftFitReport fit = foster_lyapunov_scan(params, spec, p, scan, derive_seed(seed, "scan"));

  const std::vector<double> hs = task.at("h").get<std::vector<double>>();
  DynkinOptions dyn{n_paths, n_mc, policy};
  const DynkinSweep dynkin = dynkin_rate_check(params, spec, y0, p, hs, dyn, derive_seed(seed, "dynkin"));

  const std::vector<double> grid = time_grid(task);
  GronwallOptions gro{n_paths, n_mc, policy};
  const GronwallResult gronwall = gronwall_check(params, spec, y0, p, grid, gro, derive_seed(seed, "gronwall"));

  out.results = {{"generator", to_json(eval)},
                 {"growth_constants", to_json(growth)},
                 {"geom_ergodicity_verdict", to_string(geom.satisfied)},
                 {"drift_fit", to_json(fit)},
                 {"dynkin", to_json(dynkin)},
                 {"gronwall", to_json(gronwall)}};
  out.summary = {{"Au", num(eval.total.value)},
                 {"Au_stderr", num(eval.total.std_error)},
                 {"c1", num(fit.c1)},
                 {"e", num(fit.e)},
                 {"k", num(fit.k)},
                 {"violations", fit.violations},
                 {"c2", num(growth.c2)},
                 {"dynkin_C", num(dynkin.fitted_C)},
                 {"dynkin_passed", dynkin.passed},
                 {"gronwall_max_ratio", num(gronwall.max_ratio)}};

  CsvTable s({"norm", "Au", "Au_stderr", "u", "slack"});
  for (const auto& r : fit.rows)
    s.add({csv_number(r.norm), csv_number(r.Au), csv_number(r.Au_stderr), csv_number(r.u),
           csv_number(r.slack)});
  out.files.push_back({"scan.csv", s.str(),
                       "one row per sampled state: ||x||, Au, stderr, u, slack of the fitted drift inequality"});
  CsvTable d({"h", "difference_quotient", "dq_stderr", "Au", "Au_stderr", "discrepancy",
              "discrepancy_stderr", "relative_discrepancy"});
  for (const auto& r : dynkin.results)
    d.add({csv_number(r.h), csv_number(r.difference_quotient.value),
           csv_number(r.difference_quotient.std_error), csv_number(r.generator.value),
           csv_number(r.generator.std_error), csv_number(r.discrepancy),
           csv_number(r.discrepancy_stderr), csv_number(r.relative_discrepancy)});
  out.files.push_back({"dynkin.csv", d.str(), "Dynkin difference quotient against Au per h"});
  CsvTable g({"t", "mean_u", "mean_u_stderr", "bound", "ratio", "ratio_stderr"});
  for (const auto& r : gronwall.rows)
    g.add({csv_number(r.t), csv_number(r.mean_u.value), csv_number(r.mean_u.std_error),
           csv_number(r.bound), csv_number(r.ratio), csv_number(r.ratio_stderr)});
  out.files.push_back({"gronwall.csv", g.str(), "E u(Y_t) against u(x) e^{c2 t}"});
  return out;
}

inline ExperimentConfig experiment_from(const json& cfg, ExecPolicy policy) {
  const json& task = cfg.at("task");
  const ModelParams params = model_from(cfg);
  const int d = params.dim();
  std::vector<PsdMatrix> starts;
  for (const auto& s : task.at("initial_states")) starts.emplace_back(matrix_from(s, d));
  if (starts.empty()) {
    starts.push_back(initial_state_from(cfg));
    starts.push_back(PsdMatrix(Matrix(Matrix::Identity(d, d))));
    starts.push_back(PsdMatrix(Matrix(100.0 * Matrix::Identity(d, d))));
  }
  ExperimentConfig ec{params, noise_from(cfg), task.at("p").get<double>(), starts,
                      task.at("horizon").get<double>()};
  if (!task.at("burn_in").is_null()) ec.burn_in = task.at("burn_in").get<double>();
  if (ec.horizon > 0.0) ec.grid = time_grid(task);
  ec.n_paths = task.at("n_paths").get<std::size_t>();
  ec.n_batches = task.at("n_batches").get<std::size_t>();
  ec.seed = seed_of(task);
  ec.policy = policy;
  return ec;
}

inline RunOutcome run_ergolab(const json& cfg, const std::string& which, ExecPolicy policy) {
  const json& task = cfg.at("task");
  RunOutcome out;
  if (which == "coupling") {
    const CouplingResult c = coupling_experiment(experiment_from(cfg, policy));
    out.results = to_json(c);
    out.summary = {{"slope", num(c.slope)}, {"r_squared", num(c.r_squared)}};
    CsvTable t({"t", "mean_distance"});
    for (const auto& r : c.rows) t.add({csv_number(r.t), csv_number(r.mean_distance)});
    out.files.push_back({"coupling.csv", t.str(), "t, mean Frobenius distance between coupled paths"});
  } else if (which == "moments") {
    const ExperimentConfig ec = experiment_from(cfg, policy);
    const MomentResult m = stationary_moment_estimate(ec);
    ExperimentConfig ens = ec;
    ens.seed = derive_seed(ec.seed, "ensemble-run");
    const Estimate e = ensemble_moment_estimate(ens);
    out.results = to_json(m);
    out.results["ensemble_at_horizon"] = to_json(e);
    out.summary = {{"time_average", num(m.time_average.value)},
                   {"time_average_stderr", num(m.time_average.std_error)},
                   {"ensemble", num(e.value)},
                   {"ensemble_stderr", num(e.std_error)}};
    CsvTable t({"t", "value", "running_mean"});
    for (const auto& r : m.trace)
      t.add({csv_number(r.t), csv_number(r.value), csv_number(r.running_mean)});
    out.files.push_back({"moments_trace.csv", t.str(), "t, ||Y_t||_2^p, running time average"});
  } else if (which == "multistart") {
    const MultiStartResult m = multi_start_convergence(experiment_from(cfg, policy));
    out.results = to_json(m);
    out.summary = {{"max_ks", num(m.max_statistic)}, {"critical_value", num(m.critical_value)}};
    CsvTable t({"start_a", "start_b", "functional", "ks"});
    for (const auto& r : m.rows)
      t.add({std::to_string(r.start_a), std::to_string(r.start_b), r.functional,
             csv_number(r.statistic)});
    out.files.push_back({"ks.csv", t.str(), "pairwise KS statistics per functional"});
  } else if (which == "rank-probe") {
    const ModelParams params = model_from(cfg);
    const int l = task.at("l").is_null() ? params.dim() : task.at("l").get<int>();
    RankProbeOptions opts;
    opts.allow_singular_a = task.at("allow_singular_a").get<bool>();
    opts.policy = policy;
    const RankProbeResult r =
        irreducibility_rank_probe(params, noise_from(cfg), initial_state_from(cfg), l,
                                  task.at("n_trials").get<std::size_t>(),
                                  derive_seed(seed_of(task), "rank-probe"), opts);
    out.results = to_json(r);
    out.summary = {{"frequency", r.frequency}};
  } else {
    const ModelParams params = model_from(cfg);
    const std::vector<double> grid = time_grid(task);
    const AperiodicityResult a =
        aperiodicity_flow_check(params, task.at("K").get<double>(), grid,
                                task.at("n_samples").get<std::size_t>(),
                                derive_seed(seed_of(task), "aperiodicity"));
    out.results = to_json(a);
    out.summary = {{"return_time", num(a.return_time)},
                   {"transient_constant", num(a.transient_constant)},
                   {"violations", a.violations}};
  }
  return out;
}

}  // namespace detail

/// Runs the task named in a resolved config.
inline RunOutcome execute(const json& resolved, ExecPolicy policy = {}) {
  const std::string name = resolved.at("task").at("name").get<std::string>();
  RunOutcome out;
  if (name == "simulate") out = detail::run_simulate(resolved);
  else if (name == "check") out = detail::run_check(resolved);
  else if (name == "generator") out = detail::run_generator(resolved, policy);
  else if (name.rfind("ergolab.", 0) == 0) out = detail::run_ergolab(resolved, name.substr(8), policy);
  else throw ConfigError("unknown task '" + name + "'");
  out.results["task"] = name;
  out.results["config_hash"] = config_hash(resolved);
  return out;
}

inline json manifest_for(const json& resolved, const RunOutcome& out) {
  json files = json::array();
  files.push_back({{"name", "results.json"}, {"description", "task results"}});
  for (const auto& f : out.files) files.push_back({{"name", f.name}, {"description", f.description}});
  return {{"tool", "mucogarch"},
          {"version", kToolVersion},
          {"config", resolved},
          {"config_hash", config_hash(resolved)},
          {"outputs", files}};
}

/// Writes manifest.json, results.json and the task files into dir.
inline void write_outputs(const std::filesystem::path& dir, const json& resolved,
                          const RunOutcome& out) {
  for (const auto& f : out.files) write_file_atomic(dir / f.name, f.content);
  write_file_atomic(dir / "results.json", out.results.dump(2) + "\n");
  write_file_atomic(dir / "manifest.json", manifest_for(resolved, out).dump(2) + "\n");
}

struct SweepRow {
  double value = 0.0;
  RunOutcome outcome;
  json config;
};

/// Runs the configured task once per value of a numeric config field. Value i
/// uses seed derive_seed(task.seed, "sweep", i).
inline std::vector<SweepRow> run_sweep(const json& resolved, const std::string& axis,
                                       const std::vector<double>& values, ExecPolicy policy = {}) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (axis.empty()) throw ConfigError("sweep needs an axis");
  const json probe = resolved.at(json::json_pointer("/" + [&] {
    std::string s = axis;
    for (auto& c : s)
      if (c == '.') c = '/';
    return s;
  }()));
  if (!probe.is_number() && !probe.is_null())
    throw ConfigError("sweep axis '" + axis + "' is not a numeric field");
  const std::uint64_t base = resolved.at("task").at("seed").get<std::uint64_t>();
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    json cfg = resolved;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    apply_override(cfg, axis + "=" + buf);
    cfg["task"]["seed"] = derive_seed(base, "sweep", i);
    cfg = resolve_config(cfg);
    rows.push_back({values[i], execute(cfg, policy), cfg});
  }
  return rows;
}

/// Writes per-value run directories, sweep.csv and a sweep-level manifest.
inline void write_sweep(const std::filesystem::path& dir, const json& resolved,
                        const std::string& axis, const std::vector<SweepRow>& rows) {
  std::vector<std::string> keys;
  for (const auto& r : rows)
    for (const auto& [k, _] : r.outcome.summary.items())
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  std::vector<std::string> header{"value"};
  header.insert(header.end(), keys.begin(), keys.end());
  CsvTable table(header);
  json runs = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "value_%03zu", i);
    write_outputs(dir / name, rows[i].config, rows[i].outcome);
    std::vector<std::string> line{csv_number(rows[i].value)};
    for (const auto& k : keys) {
      const json& s = rows[i].outcome.summary;
      if (!s.contains(k) || s.at(k).is_null()) line.push_back("");
      else if (s.at(k).is_string()) line.push_back(s.at(k).get<std::string>());
      else if (s.at(k).is_boolean()) line.push_back(s.at(k).get<bool>() ? "true" : "false");
      else line.push_back(csv_number(s.at(k).get<double>()));
    }
    table.add(line);
    runs.push_back({{"value", rows[i].value},
                    {"dir", name},
                    {"config_hash", config_hash(rows[i].config)},
                    {"summary", rows[i].outcome.summary}});
  }
  write_file_atomic(dir / "sweep.csv", table.str());
  const json results{{"axis", axis}, {"runs", runs}};
  write_file_atomic(dir / "results.json", results.dump(2) + "\n");
  std::vector<double> values;
  for (const auto& r : rows) values.push_back(r.value);
  const json manifest{{"tool", "mucogarch"},
                      {"version", kToolVersion},
                      {"config", resolved},
                      {"config_hash", config_hash(resolved)},
                      {"sweep", {{"axis", axis}, {"values", values}}},
                      {"outputs", json::array({{{"name", "sweep.csv"},
                                                {"description", "value plus the summary scalars of each run"}},
                                               {{"name", "value_NNN/"},
                                                {"description", "full run artifacts per value"}}})}};
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace mucogarch::cli
