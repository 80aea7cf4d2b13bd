#pragma once

// JSON and CSV output for report types, and atomic file writes.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mucogarch/conditions.hpp"
#include "mucogarch/ergolab.hpp"
#include "mucogarch/errors.hpp"
#include "mucogarch/generator.hpp"
#include "mucogarch/process.hpp"

namespace mucogarch {

using json = nlohmann::json;

/// Non-finite doubles become null (JSON has no NaN / Inf).
inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const Estimate& e) { return {{"value", num(e.value)}, {"stderr", num(e.std_error)}}; }

inline json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v(i)));
  return out;
}

inline json to_json(const ConditionReport& r) {
  json extras = json::object();
  for (const auto& [k, v] : r.extras) extras[k] = num(v);
  json subs = json::object();
  for (const auto& [k, v] : r.sub_verdicts) subs[k] = to_string(v);
  return {{"name", r.name},       {"lhs", num(r.lhs)},
          {"lhs_stderr", num(r.lhs_stderr)}, {"rhs", num(r.rhs)},
          {"satisfied", to_string(r.satisfied)}, {"inputs_digest", r.inputs_digest},
          {"extras", extras},     {"sub_verdicts", subs}};
}

inline json to_json(const GeneratorEval& g) {
  return {{"x", vector_json(g.x)},
          {"p", g.p},
          {"drift_part", num(g.drift_part)},
          {"jump_part", to_json(g.jump_part)},
          {"total", to_json(g.total)}};
}

inline json to_json(const GrowthConstants& g) {
  return {{"p", g.p},
          {"m_max", num(g.m_max)},
          {"m_min", num(g.m_min)},
          {"norm_AA", num(g.norm_AA)},
          {"jump_coeff", to_json(g.jump_coeff)},
          {"dbar", to_json(g.dbar)},
          {"c2", num(g.c2)},
          {"reliable", g.reliable}};
}

inline json to_json(const DriftFitReport& r) {
  return {{"p", r.p},          {"n_states", r.n_states},
          {"c1", num(r.c1)},   {"e", num(r.e)},
          {"k", num(r.k)},     {"violations", r.violations},
          {"verified", r.verified}, {"exploratory", r.exploratory}};
}

inline json to_json(const DynkinResult& r) {
  return {{"h", r.h},
          {"difference_quotient", to_json(r.difference_quotient)},
          {"generator", to_json(r.generator)},
          {"discrepancy", num(r.discrepancy)},
          {"discrepancy_stderr", num(r.discrepancy_stderr)},
          {"relative_discrepancy", num(r.relative_discrepancy)}};
}

inline json to_json(const DynkinSweep& s) {
  json rs = json::array();
  for (const auto& r : s.results) rs.push_back(to_json(r));
  return {{"results", rs},
          {"fitted_C", num(s.fitted_C)},
          {"stable", s.stable},
          {"passed", s.passed}};
}

inline json to_json(const GronwallResult& g) {
  return {{"constants", to_json(g.constants)},
          {"max_ratio", num(g.max_ratio)},
          {"passed", g.passed}};
}

inline json to_json(const CouplingResult& c) {
  return {{"slope", num(c.slope)},
          {"intercept", num(c.intercept)},
          {"slope_stderr", num(c.slope_stderr)},
          {"slope_ci95", {num(c.slope - 1.96 * c.slope_stderr), num(c.slope + 1.96 * c.slope_stderr)}},
          {"r_squared", num(c.r_squared)},
          {"burn_in", num(c.burn_in)},
          {"fit_points", c.fit_points},
          {"diagnostic", "synchronous coupling (shared jump trains)"}};
}

inline json to_json(const MomentResult& m) {
  return {{"p", m.p},
          {"time_average", to_json(m.time_average)},
          {"n_samples", m.n_samples},
          {"n_batches", m.n_batches},
          {"burn_in", num(m.burn_in)}};
}

inline json to_json(const MultiStartResult& m) {
  return {{"max_statistic", num(m.max_statistic)},
          {"critical_value_0.01", num(m.critical_value)},
          {"n_per_start", m.n_per_start},
          {"proxy", "two-sample Kolmogorov-Smirnov on 1-d functionals"}};
}

inline json to_json(const RankProbeResult& r) {
  return {{"frequency", r.frequency},
          {"full_rank", r.full_rank},
          {"gram_full_rank", r.gram_full_rank},
          {"n_trials", r.n_trials},
          {"l", r.l},
          {"min_relative_lambda", num(r.min_relative_lambda)},
          {"max_route_discrepancy", num(r.max_route_discrepancy)}};
}

inline json to_json(const AperiodicityResult& a) {
  return {{"delta", num(a.delta)},
          {"transient_constant", num(a.transient_constant)},
          {"return_time", num(a.return_time)},
          {"n_checked", a.n_checked},
          {"violations", a.violations}};
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw InvalidArgument("csv row width differs from header");
    rows_.push_back(std::move(row));
  }

  std::string str() const {
    std::ostringstream os;
    write_row(os, header_);
    for (const auto& r : rows_) write_row(os, r);
    return os.str();
  }

 private:
  static void write_row(std::ostringstream& os, const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Column names y_ij (i <= j) for the upper triangle of a d x d state.
inline std::vector<std::string> upper_triangle_names(int d) {
  std::vector<std::string> out;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) out.push_back("y_" + std::to_string(i + 1) + std::to_string(j + 1));
  return out;
}

inline CsvTable skeleton_csv(const PathRecord& rec) {
  std::vector<std::string> header{"time", "event_type"};
  for (auto& n : upper_triangle_names(rec.params.dim())) header.push_back(n);
  CsvTable t(header);
  for (const auto& e : rec.skeleton) {
    std::vector<std::string> row{csv_number(e.time), to_string(e.type)};
    for (double v : upper_triangle(e.Y)) row.push_back(csv_number(v));
    t.add(row);
  }
  return t;
}

/// Writes via a temporary file and rename so readers never see partial output.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mucogarch
