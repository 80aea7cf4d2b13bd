// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mucogarch/mucogarch.hpp"

namespace fs = std::filesystem;
using namespace mucogarch;
using json = nlohmann::json;

namespace {

// Pinned tolerances and sizes.
constexpr int kExactRuns = 1000;
constexpr std::size_t kMaxJumps = 50;
constexpr double kExactTol = 1e-10;
constexpr double kConeTol = 1e-10;
constexpr int kScalarSeeds = 100;
constexpr double kScalarTol = 1e-12;
constexpr double kExactBudgetSeconds = 120.0;
constexpr double kDynkinBudgetSeconds = 300.0;
constexpr std::size_t kDynkinPaths = 100000;
constexpr long kDynkinMc = 100000;
constexpr double kThresholdStep = 0.05;
constexpr int kImplicationInstances = 200;
constexpr std::size_t kScanStates = 10000;
constexpr double kScanRadius = 1000.0;
constexpr std::size_t kGronwallPaths = 10000;
constexpr std::size_t kRankTrials = 10000;
constexpr double kKsAlpha = 0.01;
constexpr double kCouplingR2 = 0.9;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> grid_of(double horizon, int points) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) g.push_back(horizon * i / (points - 1));
  return g;
}

struct Rand {
  std::mt19937_64 rng;
  explicit Rand(std::uint64_t s) : rng(s) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  Matrix gauss(int d, double scale) {
    std::normal_distribution<double> n;
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = scale * n(rng);
    return m;
  }
  Matrix stable(int d) {
    Matrix b = gauss(d, 0.5);
    b -= (spectral_abscissa(b) + uniform(0.2, 2.0)) * Matrix::Identity(d, d);
    return b;
  }
  Matrix orthogonal(int d) {
    const Eigen::HouseholderQR<Matrix> qr(gauss(d, 1.0));
    return qr.householderQ();
  }
  Matrix spd(int d, double lo, double hi) {
    const Matrix q = orthogonal(d);
    Vector ev(d);
    for (int i = 0; i < d; ++i) ev(i) = uniform(lo, hi);
    const Matrix m = q * ev.asDiagonal() * q.transpose();
    return 0.5 * (m + m.transpose());
  }
  Matrix psd(int d, double norm) {
    Matrix w = Matrix::Zero(d, d);
    const int r = integer(1, d);
    for (int k = 0; k < r; ++k) {
      const Matrix g = gauss(d, 1.0).col(0);
      w += g * g.transpose();
    }
    return norm * w / w.norm();
  }
};

ModelParams identity_family(int d) {
  return ModelParams(Matrix::Identity(d, d), -Matrix::Identity(d, d), PsdMatrix::identity(d));
}

CompoundPoissonSpec point_mass_e1(double rate, int d) {
  return CompoundPoissonSpec(rate, PointMassMixture{{Vector::Unit(d, 0)}, {1.0}}, d);
}

ModelParams gaussian_d2() {
  return ModelParams(0.4 * Matrix::Identity(2, 2), Matrix{{-1.0, 0.3}, {0.0, -1.2}},
                     PsdMatrix(Matrix{{1.0, 0.2}, {0.2, 0.5}}));
}

// ---------------------------------------------------------------------------

void criteria_1_and_2() {
  const auto t0 = std::chrono::steady_clock::now();
  Rand gen(101);
  double worst_rel = 0.0;
  std::size_t psd_viol = 0, lower_viol = 0, max_jumps = 0;
  for (int run = 0; run < kExactRuns; ++run) {
    const int d = gen.integer(1, 3);
    const ModelParams p(gen.gauss(d, 0.5), gen.stable(d), PsdMatrix(gen.spd(d, 0.2, 2.0)));
    const CompoundPoissonSpec spec(gen.uniform(0.5, 3.0), GaussianLaw{gen.uniform(0.3, 1.0)}, d);
    const PsdMatrix y0(gen.psd(d, gen.uniform(0.0, 3.0)));
    const double horizon = 10.0;
    JumpTrain train = sample_jump_train(spec, horizon, derive_seed(1, "exactness", run));
    if (train.size() > kMaxJumps) {
      train.times.resize(kMaxJumps);
      train.marks.resize(kMaxJumps);
    }
    max_jumps = std::max(max_jumps, train.size());
    const PathRecord rec = simulate_with_train(p, y0, train, grid_of(horizon, 51));
    double ymax = 0.0;
    for (const auto& e : rec.skeleton) {
      ymax = std::max(ymax, e.Y.norm());
      const double scale = 1.0 + spectral_norm(e.Y);
      if (lambda_min_sym(e.Y) < -kConeTol * scale) ++psd_viol;
      if (e.type != EventType::grid) continue;
      const Matrix et = mat_exp(p.B(), e.time);
      if (lambda_min_sym(e.Y - et * y0.matrix() * et.transpose()) < -kConeTol * scale) ++lower_viol;
    }
    worst_rel = std::max(worst_rel, reconstruct_path(rec) / (1.0 + ymax));
  }
  const double secs = seconds_since(t0);
  report(1, worst_rel <= kExactTol && secs <= kExactBudgetSeconds,
         "reconstruction: worst error / (1 + max||Y||_F) = " + fmt("%.3e", worst_rel) +
             " over " + std::to_string(kExactRuns) + " runs (<= " + std::to_string(max_jumps) +
             " jumps), " + fmt("%.1f s", secs));
  report(2, psd_viol == 0 && lower_viol == 0,
         "cone invariants: " + std::to_string(psd_viol) + " PSD violations, " +
             std::to_string(lower_viol) + " lower-bound violations");
}

void criterion_3() {
  Rand gen(103);
  double worst = 0.0;
  std::size_t events = 0;
  for (int seed = 0; seed < kScalarSeeds; ++seed) {
    const double a = gen.uniform(0.1, 1.5), b = -gen.uniform(0.1, 2.0), c = gen.uniform(0.1, 2.0);
    const double y0 = gen.uniform(0.0, 3.0);
    const ModelParams p(Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b),
                        PsdMatrix(Matrix::Constant(1, 1, c)));
    const CompoundPoissonSpec spec(gen.uniform(0.5, 5.0), GaussianLaw{1.0}, 1);
    const PathRecord rec = simulate_path(p, spec, PsdMatrix(Matrix::Constant(1, 1, y0)), 10.0,
                                         grid_of(10.0, 21), seed);
    double y = y0, now = 0.0;
    std::size_t j = 0;
    for (const auto& e : rec.skeleton) {
      y *= std::exp(2.0 * b * (e.time - now));
      now = e.time;
      if (e.type == EventType::post_jump) {
        const double x = rec.train.marks[j++](0);
        y += a * a * (c + y) * x * x;
      }
      worst = std::max(worst, std::abs(e.Y(0, 0) - y) / (1.0 + std::abs(y)));
      ++events;
    }
  }
  report(3, worst <= kScalarTol,
         "scalar recursion: worst relative gap " + fmt("%.3e", worst) + " over " +
             std::to_string(events) + " events, " + std::to_string(kScalarSeeds) + " seeds");
}

void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> hs{0.1, 0.05, 0.025};
  const DynkinOptions opts{kDynkinPaths, kDynkinMc, {}};

  const ModelParams s(Matrix::Constant(1, 1, 0.8), Matrix::Constant(1, 1, -1.0),
                      PsdMatrix(Matrix::Constant(1, 1, 1.0)));
  const CompoundPoissonSpec pm(1.5, PointMassMixture{{Vector::Constant(1, 1.0)}, {1.0}}, 1);
  const DynkinSweep one = dynkin_rate_check(s, pm, PsdMatrix(Matrix::Constant(1, 1, 1.0)), 1.0, hs, opts, 41);

  const CompoundPoissonSpec g(1.0, GaussianLaw{1.0}, 2);
  const DynkinSweep two = dynkin_rate_check(gaussian_d2(), g, PsdMatrix::identity(2), 1.0, hs, opts, 42);
  const double secs = seconds_since(t0);

  std::string detail;
  for (const auto* sw : {&one, &two}) {
    detail += sw == &one ? "d=1 point mass: " : "; d=2 gaussian: ";
    detail += "C = " + fmt("%.3g", sw->fitted_C) + " (D/h";
    for (const auto& r : sw->results) detail += fmt(" %.3g", r.discrepancy / r.h);
    detail += std::string(") ") + (sw->passed ? "ok" : "not ok");
  }
  detail += fmt(", %.1f s", secs);
  report(4, one.passed && two.passed && secs <= kDynkinBudgetSeconds, detail);
}

/// First rate on the sweep grid whose verdict is not yes, and whether the
/// verdict column flips exactly once.
struct Flip {
  double at = -1.0;
  bool single = false;
};

Flip sweep_flip(const std::function<Verdict(double)>& verdict, double lo, double hi) {
  Flip f;
  int flips = 0;
  bool yes_prev = true;
  const int n = static_cast<int>(std::llround((hi - lo) / kThresholdStep));
  for (int i = 0; i <= n; ++i) {
    const double r = lo + i * kThresholdStep;
    const bool yes = verdict(r) == Verdict::yes;
    if (yes != yes_prev) {
      ++flips;
      if (f.at < 0.0) f.at = r;
    }
    yes_prev = yes;
  }
  f.single = flips == 1;
  return f;
}

void criterion_5() {
  const ModelParams fam = identity_family(2);
  const BSNormContext ctx = make_bs_context(fam.B(), fam.A());
  struct Case {
    const char* name;
    double threshold;
    std::function<Verdict(double)> verdict;
  };
  const std::vector<Case> cases{
      {"log-moment", 2.0 / std::log(2.0),
       [&](double r) { return check_log_stationarity(fam, point_mass_e1(r, 2), ctx, 0, 1).satisfied; }},
      {"moment k=1", 2.0,
       [&](double r) { return check_moment_k(fam, point_mass_e1(r, 2), ctx, 1, 0, 1).satisfied; }},
      {"geometric p=1", 2.0,
       [&](double r) { return check_geom_ergodicity(fam, point_mass_e1(r, 2), 1.0, 0, 1).satisfied; }},
      {"geometric p=1/2", 1.0 / (std::sqrt(2.0) - 1.0),
       [&](double r) { return check_geom_ergodicity_small_p(fam, point_mass_e1(r, 2), 0.5, 0, 1).satisfied; }},
  };
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    const Flip f = sweep_flip(c.verdict, 1.0, 4.0);
    const bool ok = f.single && f.at >= c.threshold - 1e-12 && f.at - c.threshold <= kThresholdStep + 1e-12;
    pass = pass && ok;
    detail += std::string(detail.empty() ? "" : "; ") + c.name + fmt(" flips at %.2f", f.at) +
              fmt(" (threshold %.4f)", c.threshold);
  }
  report(5, pass, detail);
}

void criterion_6() {
  Rand gen(106);
  int geom_yes = 0, geom_bad = 0, k2_yes = 0, k_bad = 0;
  for (int i = 0; i < kImplicationInstances; ++i) {
    const int d = gen.integer(1, 3);
    const Matrix q = gen.orthogonal(d);
    Vector ev(d);
    for (int j = 0; j < d; ++j) ev(j) = gen.uniform(-3.0, -0.2);
    Matrix b = q * ev.asDiagonal() * q.transpose();
    b = 0.5 * (b + b.transpose());
    const ModelParams p(gen.gauss(d, gen.uniform(0.1, 0.8)), b, PsdMatrix(gen.spd(d, 0.2, 2.0)));
    const double rate = gen.uniform(0.1, 4.0);
    CompoundPoissonSpec spec(rate, GaussianLaw{gen.uniform(0.2, 1.0)}, d);
    if (i % 2 == 1) {
      PointMassMixture law;
      const double height = gen.uniform(0.2, 1.5);
      for (int j = 0; j < d; ++j)
        for (double sgn : {-1.0, 1.0}) {
          law.atoms.push_back(sgn * height * Vector::Unit(d, j));
          law.weights.push_back(0.5 / d);
        }
      spec = CompoundPoissonSpec(rate, law, d);
    }
    const std::uint64_t seed = derive_seed(6, "implication", i);
    const ConditionReport geom = check_geom_ergodicity(p, spec, 1.0, 20000, seed);
    const ConditionReport first = check_first_order(p, spec, 20000, seed);
    if (geom.satisfied == Verdict::yes) {
      ++geom_yes;
      if (first.sub_verdicts.at("B_hat_stable") == Verdict::no) ++geom_bad;
    }
    const BSNormContext ctx = make_bs_context(p.B(), p.A());
    const ConditionReport k2 = check_moment_k(p, spec, ctx, 2, 20000, seed);
    const ConditionReport k1 = check_moment_k(p, spec, ctx, 1, 20000, seed);
    if (k2.satisfied == Verdict::yes) {
      ++k2_yes;
      if (k1.satisfied != Verdict::yes) ++k_bad;
    }
  }
  report(6, geom_bad == 0 && k_bad == 0,
         std::to_string(geom_bad) + " contradictions among " + std::to_string(geom_yes) +
             " geometric-yes instances; " + std::to_string(k_bad) + " among " +
             std::to_string(k2_yes) + " k=2-yes instances (" + std::to_string(kImplicationInstances) +
             " instances)");
}

void criterion_7() {
  ScanOptions opts;
  opts.n_states = kScanStates;
  opts.sampler.radius = kScanRadius;
  opts.n_mc = 0;  // closed form: point-mass laws

  struct Config {
    std::string name;
    ModelParams params;
    CompoundPoissonSpec spec;
    double p;
  };
  const ModelParams fam = identity_family(2);
  const ModelParams zero_a(Matrix::Zero(2, 2), -Matrix::Identity(2, 2), PsdMatrix::identity(2));
  std::vector<Config> yes_cases;
  for (double r : {0.5, 1.0, 1.5, 1.9}) yes_cases.push_back({fmt("A=I p=1 rate %.2g", r), fam, point_mass_e1(r, 2), 1.0});
  for (double r : {0.2, 0.5}) yes_cases.push_back({fmt("A=I p=2 rate %.2g", r), fam, point_mass_e1(r, 2), 2.0});
  for (double r : {1.0, 3.0}) yes_cases.push_back({fmt("A=0 p=2 rate %.2g", r), zero_a, point_mass_e1(r, 2), 2.0});

  bool pass = true;
  std::string detail;
  double min_c1 = std::numeric_limits<double>::infinity();
  std::size_t yes_violations = 0;
  for (const auto& c : yes_cases) {
    const ConditionReport geom = check_geom_ergodicity(c.params, c.spec, c.p, 0, 1);
    if (geom.satisfied != Verdict::yes) {
      pass = false;
      detail += c.name + " is not a verdict-yes configuration; ";
      continue;
    }
    const DriftFitReport rep = foster_lyapunov_scan(c.params, c.spec, c.p, opts, 7);
    min_c1 = std::min(min_c1, rep.c1);
    yes_violations += rep.violations;
    if (!(rep.c1 > 0.0) || rep.violations != 0 || !rep.verified) {
      pass = false;
      detail += c.name + " not verified; ";
    }
  }
  detail += std::to_string(yes_cases.size()) + " verdict-yes configurations: min c1 = " +
            fmt("%.3g", min_c1) + ", violations = " + std::to_string(yes_violations);

  // 2x past the threshold of the closed-form family: p = 1 (threshold 2) and
  // p = 1/2 (threshold 1/(sqrt 2 - 1)).
  const std::vector<std::pair<double, double>> past{{1.0, 4.0}, {0.5, 2.0 / (std::sqrt(2.0) - 1.0)}};
  for (const auto& [p, r] : past) {
    const DriftFitReport rep = foster_lyapunov_scan(fam, point_mass_e1(r, 2), p, opts, 7);
    if (rep.violations == 0) pass = false;
    detail += fmt("; p=%.2g", p) + fmt(" rate %.3g", r) + ": " + std::to_string(rep.violations) +
              " violations";
  }
  report(7, pass, detail);

  // The p = 2 condition carries a 2^{p-1} factor and is not sharp: twice its
  // threshold the drift inequality still holds. Printed for the record only.
  const DriftFitReport loose = foster_lyapunov_scan(fam, point_mass_e1(8.0 / 7.0, 2), 2.0, opts, 7);
  std::printf("         note: p=2 family at twice its threshold (rate 8/7): %zu violations, c1 = %.3g\n",
              loose.violations, loose.c1);
}

void criterion_8() {
  const CompoundPoissonSpec spec(1.0, GaussianLaw{1.0}, 2);
  const GronwallResult r = gronwall_check(gaussian_d2(), spec, PsdMatrix::identity(2), 1.0,
                                          grid_of(5.0, 11), GronwallOptions{kGronwallPaths, 100000, {}}, 8);
  double later = 0.0;  // the t = 0 ratio is 1 by construction
  for (const auto& row : r.rows)
    if (row.t > 0.0) later = std::max(later, row.ratio);
  report(8, r.passed,
         "max E u(Y_t) / (u(x) e^{c2 t}) over t in (0, 5] = " + fmt("%.4f", later) + " with c2 = " +
             fmt("%.4g", r.constants.c2) + ", " + std::to_string(kGronwallPaths) + " paths");
}

void criterion_9() {
  bool pass = true;
  std::string detail;
  for (int d : {2, 3}) {
    Rand gen(109 + d);
    Matrix a = gen.gauss(d, 0.5) + Matrix::Identity(d, d);
    const ModelParams p(a, gen.stable(d), PsdMatrix(gen.spd(d, 0.2, 2.0)));
    const CompoundPoissonSpec g(1.0, GaussianLaw{1.0}, d);
    const double below = irreducibility_rank_probe(p, g, PsdMatrix::identity(d), d - 1, kRankTrials, 9).frequency;
    const RankProbeResult full = irreducibility_rank_probe(p, g, PsdMatrix::identity(d), d, kRankTrials, 9);
    const double at = full.frequency;
    // rank-one A = u v^T; B = -I keeps range(A) invariant under the flow
    const Vector u = gen.gauss(d, 1.0).col(0), v = gen.gauss(d, 1.0).col(0);
    const ModelParams singular(u * v.transpose(), -Matrix::Identity(d, d), PsdMatrix::identity(d));
    RankProbeOptions allow;
    allow.allow_singular_a = true;
    const double deficient =
        irreducibility_rank_probe(singular, g, PsdMatrix::identity(d), d, kRankTrials, 9, allow).frequency;
    pass = pass && below == 0.0 && at == 1.0 && deficient == 0.0;
    detail += (detail.empty() ? "" : "; ") + std::string("d=") + std::to_string(d) +
              fmt(": l<d %.4g", below) + fmt(", l=d %.4g", at) + " (Gram eigenvalue rule " + std::to_string(full.gram_full_rank) + "/" +
              std::to_string(kRankTrials) + ")" + fmt(", rank-one A %.4g", deficient);
  }
  report(9, pass, detail + " (" + std::to_string(kRankTrials) + " trials)");
}

void criterion_10() {
  const ModelParams p = gaussian_d2();
  const CompoundPoissonSpec spec(1.0, GaussianLaw{1.0}, 2);
  const bool yes = check_geom_ergodicity(p, spec, 1.0, 100000, 10).satisfied == Verdict::yes;
  const double horizon = 20.0 / std::abs(numerical_range_max(p.B()));
  const std::vector<PsdMatrix> starts{PsdMatrix(Matrix(0.1 * Matrix::Identity(2, 2))),
                                      PsdMatrix::identity(2),
                                      PsdMatrix(Matrix(100.0 * Matrix::Identity(2, 2)))};
  ExperimentConfig cfg{p, spec, 1.0, starts, horizon};
  cfg.n_paths = 1000;
  cfg.seed = 10;
  const CouplingResult c = coupling_experiment(cfg);
  const MultiStartResult m = multi_start_convergence(cfg);
  const double crit = ks_critical_value(cfg.n_paths, cfg.n_paths, kKsAlpha);
  ExperimentConfig zero = cfg;
  zero.horizon = 0.0;
  const MultiStartResult m0 = multi_start_convergence(zero);
  const bool pass = yes && c.slope < 0.0 && c.r_squared > kCouplingR2 && m.max_statistic < crit &&
                    m0.max_statistic == 1.0;
  report(10, pass,
         std::string("verdict ") + (yes ? "yes" : "not yes") + fmt(", coupling slope %.3f", c.slope) +
             fmt(" (R^2 %.4f)", c.r_squared) + fmt(", max KS %.4f", m.max_statistic) +
             fmt(" vs critical %.4f", crit) + fmt(" at horizon %.2f", horizon) +
             fmt(", KS at horizon 0 = %.3g", m0.max_statistic));
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MUCOGARCH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion_11() {
  const fs::path root = fs::temp_directory_path() / "mucogarch_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const json model = {{"dim", 2}, {"A", {0.4, 0, 0, 0.4}}, {"B", {-1, 0.3, 0, -1.2}}, {"C", {1, 0.2, 0.2, 0.5}}};
  const json noise = {{"law", "gaussian"}, {"rate", 1.0}, {"sigma", 1.0}};
  const std::vector<json> tasks{
      {{"name", "check"}, {"n_mc", 5000}, {"seed", 1}},
      {{"name", "simulate"}, {"horizon", 5.0}, {"seed", 2}},
      {{"name", "ergolab.coupling"}, {"n_paths", 200}, {"horizon", 6.0}, {"burn_in", 1.0}, {"seed", 3}},
      {{"name", "ergolab.multistart"}, {"n_paths", 200}, {"horizon", 5.0}, {"burn_in", 1.0}, {"seed", 4}},
      {{"name", "generator"}, {"n_mc", 500}, {"n_paths", 500}, {"n_states", 300}, {"horizon", 2.0},
       {"grid_step", 0.5}, {"seed", 5}},
  };
  int identical = 0;
  std::string failed;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const fs::path dir = root / ("task_" + std::to_string(i));
    fs::create_directories(dir);
    const json cfg = {{"model", model}, {"noise", noise}, {"task", tasks[i]}, {"output", {{"dir", (dir / "first").string()}}}};
    std::ofstream(dir / "config.json") << cfg.dump(2);
    const bool ok = run_cli("run --config " + (dir / "config.json").string() + " --threads 1") == 0 &&
                    run_cli("run --config " + (dir / "first" / "manifest.json").string() + " --threads 4 --out " +
                            (dir / "second").string()) == 0;
    const bool same = ok && slurp(dir / "first" / "results.json") == slurp(dir / "second" / "results.json") &&
                      json::parse(slurp(dir / "first" / "manifest.json")).at("config_hash") ==
                          json::parse(slurp(dir / "second" / "manifest.json")).at("config_hash");
    if (same) ++identical;
    else failed += " " + tasks[i].at("name").get<std::string>();
  }
  report(11, identical == static_cast<int>(tasks.size()),
         std::to_string(identical) + "/" + std::to_string(tasks.size()) +
             " manifests re-run bit-for-bit with 4 threads after 1" + (failed.empty() ? "" : "; differing:" + failed));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void()>>> steps{
      {"1-2", criteria_1_and_2}, {"3", criterion_3}, {"4", criterion_4},  {"5", criterion_5},
      {"6", criterion_6},        {"7", criterion_7}, {"8", criterion_8},  {"9", criterion_9},
      {"10", criterion_10},      {"11", criterion_11}};
  for (const auto& [name, fn] : steps) {
    try {
      fn();
    } catch (const std::exception& e) {
      std::printf("criterion %s: FAIL  error: %s\n", name, e.what());
      ++failures;
    }
  }
  std::printf("%d criterion check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
