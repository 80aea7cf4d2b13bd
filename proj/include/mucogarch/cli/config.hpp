#pragma once

// Run configuration: strict JSON schema, defaults, dotted-path overrides and
// the content hash recorded in manifests.
//
// {
//   "model":  {"dim": d, "A": [...], "B": [...], "C": [...]},   row-major, d*d entries
//   "noise":  {"law": "gaussian", "rate": r, "sigma": s}
//           | {"law": "ball_uniform", "rate": r, "radius": R}
//           | {"law": "point_mass", "rate": r, "atoms": [[...], ...], "weights": [...]}
//           | {"law": "truncated_gaussian", "rate": r, "sigma": s, "radius": R},
//   "task":   {"name": ..., task parameters, see task_defaults()},
//   "output": {"dir": "out"}
// }

#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mucogarch/errors.hpp"
#include "mucogarch/levy.hpp"
#include "mucogarch/matcore.hpp"
#include "mucogarch/process.hpp"
#include "mucogarch/rng.hpp"

namespace mucogarch::cli {

using json = nlohmann::json;

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

inline const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{
      "simulate",         "check",          "generator",           "ergolab.coupling",
      "ergolab.moments",  "ergolab.multistart", "ergolab.rank-probe", "ergolab.aperiodicity"};
  return names;
}

/// Every task key with its default. null means "derive from the model".
inline json task_defaults() {
  return {{"name", "check"},
          {"seed", 0},
          {"p", 1.0},
          {"k", 1},
          {"n_mc", 20000},
          {"n_paths", 1000},
          {"horizon", 10.0},
          {"grid_step", 0.1},
          {"Y0", nullptr},              // row-major; null = zero matrix
          {"initial_states", json::array()},
          {"burn_in", nullptr},         // null = 10 / |m_B|
          {"n_batches", 20},
          {"l", nullptr},               // null = dim
          {"n_trials", 1000},
          {"allow_singular_a", false},
          {"K", 1.0},
          {"n_samples", 200},
          {"n_states", 1000},
          {"radius", 1000.0},
          {"h", json::array({0.1, 0.05, 0.025})},
          {"track_g", false},
          {"k2b_domain", "psd"},
          {"k2b_random_starts", 50}};
}

namespace detail {

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + where + "." + key + "'");
}

inline double number_at(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing key '" + where + "." + key + "'");
  if (!obj.at(key).is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
  return obj.at(key).get<double>();
}

inline std::vector<double> numbers(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ConfigError("'" + where + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number()) throw ConfigError("'" + where + "' must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline void check_square(const json& arr, int dim, const std::string& where) {
  if (numbers(arr, where).size() != static_cast<std::size_t>(dim) * dim)
    throw ConfigError("'" + where + "' must hold dim*dim row-major entries");
}

inline json resolve_model(const json& m) {
  reject_unknown(m, {"dim", "A", "B", "C"}, "model");
  if (!m.contains("dim") || !m.at("dim").is_number_integer() || m.at("dim").get<int>() <= 0)
    throw ConfigError("'model.dim' must be a positive integer");
  const int d = m.at("dim").get<int>();
  for (const char* k : {"A", "B", "C"}) {
    if (!m.contains(k)) throw ConfigError(std::string("missing key 'model.") + k + "'");
    check_square(m.at(k), d, std::string("model.") + k);
  }
  return m;
}

inline json resolve_noise(const json& n, int dim) {
  if (!n.is_object() || !n.contains("law") || !n.at("law").is_string())
    throw ConfigError("'noise.law' must be a string");
  const std::string law = n.at("law").get<std::string>();
  json out{{"law", law}, {"rate", number_at(n, "rate", "noise")}};
  if (law == "gaussian") {
    reject_unknown(n, {"law", "rate", "sigma"}, "noise");
    out["sigma"] = number_at(n, "sigma", "noise");
  } else if (law == "ball_uniform") {
    reject_unknown(n, {"law", "rate", "radius"}, "noise");
    out["radius"] = number_at(n, "radius", "noise");
  } else if (law == "truncated_gaussian") {
    reject_unknown(n, {"law", "rate", "sigma", "radius"}, "noise");
    out["sigma"] = number_at(n, "sigma", "noise");
    out["radius"] = number_at(n, "radius", "noise");
  } else if (law == "point_mass") {
    reject_unknown(n, {"law", "rate", "atoms", "weights"}, "noise");
    if (!n.contains("atoms") || !n.at("atoms").is_array())
      throw ConfigError("'noise.atoms' must be an array of vectors");
    for (const auto& a : n.at("atoms"))
      if (numbers(a, "noise.atoms").size() != static_cast<std::size_t>(dim))
        throw ConfigError("'noise.atoms' entries must have dim components");
    out["atoms"] = n.at("atoms");
    out["weights"] = n.contains("weights")
                         ? n.at("weights")
                         : json(std::vector<double>(n.at("atoms").size(), 1.0 / n.at("atoms").size()));
    numbers(out["weights"], "noise.weights");
  } else {
    throw ConfigError("unknown jump law '" + law + "'");
  }
  return out;
}

inline json resolve_task(const json& t, int dim) {
  json out = task_defaults();
  std::set<std::string> allowed;
  for (const auto& [k, _] : out.items()) allowed.insert(k);
  reject_unknown(t, allowed, "task");
  for (const auto& [k, v] : t.items()) {
    const json& def = out.at(k);
    const bool ok = v.is_null() ? def.is_null() || k == "Y0" || k == "burn_in" || k == "l"
                    : def.is_null() ? (k == "Y0" ? v.is_array() : v.is_number())
                    : def.is_number_integer() ? v.is_number_integer()
                    : def.is_number() ? v.is_number()
                    : def.type() == v.type();
    if (!ok) throw ConfigError("'task." + k + "' has the wrong type");
    out[k] = def.is_number_float() && v.is_number() ? json(v.get<double>()) : v;
  }
  const std::string name = out.at("name").get<std::string>();
  bool known = false;
  for (const auto& n : task_names()) known = known || n == name;
  if (!known) throw ConfigError("unknown task '" + name + "'");
  if (!out.at("seed").is_number_unsigned() && out.at("seed").get<std::int64_t>() < 0)
    throw ConfigError("'task.seed' must be >= 0");
  out["seed"] = out.at("seed").get<std::uint64_t>();
  if (!out.at("Y0").is_null()) check_square(out.at("Y0"), dim, "task.Y0");
  for (const auto& s : out.at("initial_states")) check_square(s, dim, "task.initial_states[]");
  numbers(out.at("h"), "task.h");
  const std::string dom = out.at("k2b_domain").get<std::string>();
  if (dom != "psd" && dom != "symmetric") throw ConfigError("'task.k2b_domain' must be psd or symmetric");
  for (const char* k : {"n_mc", "n_paths", "n_trials", "n_states", "n_samples", "n_batches", "k"})
    if (out.at(k).get<long long>() < 0) throw ConfigError(std::string("'task.") + k + "' must be >= 0");
  return out;
}

}  // namespace detail

/// Validates a raw config (or a manifest wrapping one) and returns it with
/// every default filled in. Throws ConfigError on any schema violation.
inline json resolve_config(const json& raw_in) {
  const json raw = raw_in.is_object() && raw_in.contains("config") && raw_in.contains("config_hash")
                       ? raw_in.at("config")
                       : raw_in;
  detail::reject_unknown(raw, {"model", "noise", "task", "output"}, "config");
  if (!raw.contains("model")) throw ConfigError("missing section 'model'");
  if (!raw.contains("noise")) throw ConfigError("missing section 'noise'");
  json out;
  out["model"] = detail::resolve_model(raw.at("model"));
  const int dim = out["model"]["dim"].get<int>();
  out["noise"] = detail::resolve_noise(raw.at("noise"), dim);
  out["task"] = detail::resolve_task(raw.contains("task") ? raw.at("task") : json::object(), dim);
  json output{{"dir", "out"}};
  if (raw.contains("output")) {
    detail::reject_unknown(raw.at("output"), {"dir"}, "output");
    if (raw.at("output").contains("dir")) {
      if (!raw.at("output").at("dir").is_string()) throw ConfigError("'output.dir' must be a string");
      output["dir"] = raw.at("output").at("dir");
    }
  }
  out["output"] = output;
  return out;
}

/// Hash of model, noise and task (the output location is not part of a run's identity).
inline std::string config_hash(const json& resolved) {
  const json core{{"model", resolved.at("model")},
                  {"noise", resolved.at("noise")},
                  {"task", resolved.at("task")}};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(mucogarch::detail::fnv1a(core.dump())));
  return buf;
}

/// Applies "a.b.c=value"; value is parsed as JSON, falling back to a string.
inline void apply_override(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &cfg;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("bad override path '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key)) (*node)[key] = json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

inline Matrix matrix_from(const json& arr, int dim) {
  const std::vector<double> v = arr.get<std::vector<double>>();
  return from_row_major(dim, v);
}

inline ModelParams model_from(const json& resolved) {
  const json& m = resolved.at("model");
  const int d = m.at("dim").get<int>();
  return ModelParams(matrix_from(m.at("A"), d), matrix_from(m.at("B"), d),
                     PsdMatrix(matrix_from(m.at("C"), d)));
}

inline CompoundPoissonSpec noise_from(const json& resolved) {
  const json& n = resolved.at("noise");
  const int d = resolved.at("model").at("dim").get<int>();
  const std::string law = n.at("law").get<std::string>();
  const double rate = n.at("rate").get<double>();
  if (law == "gaussian") return CompoundPoissonSpec(rate, GaussianLaw{n.at("sigma").get<double>()}, d);
  if (law == "ball_uniform")
    return CompoundPoissonSpec(rate, BallUniformLaw{n.at("radius").get<double>()}, d);
  if (law == "truncated_gaussian")
    return CompoundPoissonSpec(
        rate, TruncatedGaussianLaw{n.at("sigma").get<double>(), n.at("radius").get<double>()}, d);
  PointMassMixture pm;
  for (const auto& a : n.at("atoms")) {
    const std::vector<double> v = a.get<std::vector<double>>();
    pm.atoms.push_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  pm.weights = n.at("weights").get<std::vector<double>>();
  return CompoundPoissonSpec(rate, pm, d);
}

inline PsdMatrix initial_state_from(const json& resolved) {
  const int d = resolved.at("model").at("dim").get<int>();
  const json& y0 = resolved.at("task").at("Y0");
  if (y0.is_null()) return PsdMatrix::zero(d);
  return PsdMatrix(matrix_from(y0, d));
}

}  // namespace mucogarch::cli
