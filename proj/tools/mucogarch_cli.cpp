// mucogarch: command-line front end.
//
//   mucogarch simulate --config cfg.json --out runs/sim
//   mucogarch check --config cfg.json --p 2 --strict
//   mucogarch ergolab rank-probe --config cfg.json --l 2 --d 2
//   mucogarch sweep --config cfg.json --axis noise.rate --values 1,1.5,2,2.5
//   mucogarch run --config runs/sim/manifest.json
//
// Exit status: 0 ok, 1 other failure, 2 parse or validation error,
// 3 inconclusive verdict under --strict, 4 numerical defect.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mucogarch/cli/config.hpp"
#include "mucogarch/cli/run.hpp"

namespace {

using mucogarch::cli::json;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool strict = false;
  unsigned threads = 1;
  std::vector<std::string> sets;
  std::optional<double> p;
  std::optional<int> k;
  std::optional<int> l;
  std::optional<int> d;
  std::string axis;
  std::string values;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "run configuration (JSON) or a manifest.json")->required();
  app->add_option("--seed", c.seed, "top-level seed (overrides task.seed)");
  app->add_option("--out", c.out, "output directory (overrides output.dir)");
  app->add_flag("--strict", c.strict, "exit 3 when any verdict is inconclusive");
  app->add_option("--threads", c.threads, "worker threads (results do not depend on it)");
  app->add_option("--set", c.sets, "override as dotted.key=value (value parsed as JSON)");
  app->add_option("--p", c.p, "moment order p (task.p)");
  app->add_option("--k", c.k, "moment order k (task.k)");
  app->add_option("--l", c.l, "jump count for the rank probe (task.l)");
  app->add_option("--d", c.d, "expected model dimension");
}

struct ParseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseFailure("cannot read config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseFailure(std::string("config is not valid JSON: ") + e.what());
  }
}

json prepare(const Common& c, const std::string& task_name) {
  json raw = load_config(c.config);
  if (raw.is_object() && raw.contains("config") && raw.contains("config_hash")) raw = raw.at("config");
  for (const auto& s : c.sets) mucogarch::cli::apply_override(raw, s);
  if (!task_name.empty()) raw["task"]["name"] = task_name;
  if (c.seed) raw["task"]["seed"] = *c.seed;
  if (c.p) raw["task"]["p"] = *c.p;
  if (c.k) raw["task"]["k"] = *c.k;
  if (c.l) raw["task"]["l"] = *c.l;
  if (c.out) raw["output"]["dir"] = *c.out;
  json resolved = mucogarch::cli::resolve_config(raw);
  if (c.d && resolved.at("model").at("dim").get<int>() != *c.d)
    throw mucogarch::cli::ConfigError("--d " + std::to_string(*c.d) +
                                      " does not match model.dim " +
                                      resolved.at("model").at("dim").dump());
  return resolved;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw mucogarch::cli::ConfigError("bad sweep value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw mucogarch::cli::ConfigError("sweep needs a non-empty --values list");
  return out;
}

int run_task(const Common& c, const std::string& task_name) {
  const json resolved = prepare(c, task_name);
  const mucogarch::ExecPolicy policy{std::max(1u, c.threads)};
  const std::string dir = resolved.at("output").at("dir").get<std::string>();
  const auto outcome = mucogarch::cli::execute(resolved, policy);
  mucogarch::cli::write_outputs(dir, resolved, outcome);
  std::cout << "wrote " << dir << "/results.json (config " << mucogarch::cli::config_hash(resolved)
            << ")\n";
  if (c.strict && outcome.inconclusive) {
    std::cerr << "strict: at least one verdict is inconclusive\n";
    return 3;
  }
  return 0;
}

int run_sweep(const Common& c) {
  const std::vector<double> values = parse_values(c.values);
  const json resolved = prepare(c, "");
  const mucogarch::ExecPolicy policy{std::max(1u, c.threads)};
  const std::string dir = resolved.at("output").at("dir").get<std::string>();
  const auto rows = mucogarch::cli::run_sweep(resolved, c.axis, values, policy);
  mucogarch::cli::write_sweep(dir, resolved, c.axis, rows);
  std::cout << "wrote " << dir << "/sweep.csv (" << rows.size() << " runs)\n";
  bool inconclusive = false;
  for (const auto& r : rows) inconclusive = inconclusive || r.outcome.inconclusive;
  if (c.strict && inconclusive) {
    std::cerr << "strict: at least one verdict is inconclusive\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MUCOGARCH(1,1) volatility simulation and ergodicity diagnostics"};
  app.require_subcommand(1);
  Common c;
  std::string task_name;

  struct Entry {
    CLI::App* cmd;
    std::string task;
  };
  std::vector<Entry> entries;
  for (const char* name : {"simulate", "check", "generator"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " task");
    add_common(sub, c);
    entries.push_back({sub, name});
  }
  auto* run = app.add_subcommand("run", "run the task named in the config (e.g. a manifest)");
  add_common(run, c);
  entries.push_back({run, ""});

  auto* ergolab = app.add_subcommand("ergolab", "ergodicity experiments");
  ergolab->require_subcommand(1);
  for (const char* name : {"coupling", "moments", "multistart", "rank-probe", "aperiodicity"}) {
    auto* sub = ergolab->add_subcommand(name, std::string("ergolab ") + name);
    add_common(sub, c);
    entries.push_back({sub, std::string("ergolab.") + name});
  }

  auto* sweep = app.add_subcommand("sweep", "run the configured task over values of one field");
  add_common(sweep, c);
  sweep->add_option("--axis", c.axis, "dotted config path, e.g. noise.rate")->required();
  sweep->add_option("--values", c.values, "comma-separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sweep->parsed()) return run_sweep(c);
    for (const auto& e : entries)
      if (e.cmd->parsed()) return run_task(c, e.task);
    std::cerr << "error: no task selected\n";
    return 2;
  } catch (const ParseFailure& e) {
    std::cerr << "error: parse failure: " << e.what() << "\n";
    return 2;
  } catch (const mucogarch::NumericalDefect& e) {
    std::cerr << "error: numerical defect: " << e.what() << "\n";
    return 4;
  } catch (const mucogarch::OverflowError& e) {
    std::cerr << "error: numerical defect (overflow): " << e.what() << "\n";
    return 4;
  } catch (const mucogarch::InvalidArgument& e) {
    std::cerr << "error: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
