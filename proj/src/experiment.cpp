#include "bridgelab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "bridgelab/prox.hpp"
#include "bridgelab/rng.hpp"
#include "bridgelab/theory.hpp"

namespace bridgelab {

using nlohmann::json;

namespace {

// ---------- json helpers with field-path diagnostics ----------

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw config_error("field " + path + ": expected a number");
  return j.get<double>();
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  return get_number(obj.at(key), path + "." + key);
}

double require_number(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw config_error("field " + path + "." + key + ": missing");
  return get_number(obj.at(key), path + "." + key);
}

int get_int(const json& obj, const std::string& path, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& j = obj.at(key);
  if (!j.is_number_integer()) throw config_error("field " + path + "." + key + ": expected an integer");
  return j.get<int>();
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& j = obj.at(key);
  if (!j.is_boolean()) throw config_error("field " + path + "." + key + ": expected a boolean");
  return j.get<bool>();
}

std::vector<double> get_grid(const json& obj, const char* key) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  const json& j = obj.at(key);
  if (!j.is_array()) throw config_error(std::string("field ") + key + ": expected an array");
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_number(j[i], std::string(key) + "[" + std::to_string(i) + "]"));
  return out;
}

SignalDistribution dist_from_json(const json& j) {
  if (!j.is_object()) throw config_error("field dist: expected an object");
  if (!j.contains("kind")) throw config_error("field dist.kind: missing");
  const std::string kind = j.at("kind").is_string() ? j.at("kind").get<std::string>() : "";
  try {
    if (kind == "point_mass") {
      if (!j.contains("atoms") || !j.at("atoms").is_array())
        throw config_error("field dist.atoms: expected an array of [value, prob] pairs");
      std::vector<std::pair<double, double>> atoms;
      for (std::size_t i = 0; i < j.at("atoms").size(); ++i) {
        const json& a = j.at("atoms")[i];
        const std::string path = "dist.atoms[" + std::to_string(i) + "]";
        if (!a.is_array() || a.size() != 2)
          throw config_error("field " + path + ": expected [value, prob]");
        atoms.emplace_back(get_number(a[0], path + "[0]"), get_number(a[1], path + "[1]"));
      }
      return SignalDistribution::point_mass(std::move(atoms));
    }
    if (kind == "two_point")
      return SignalDistribution::two_point(require_number(j, "dist", "mu1"),
                                           require_number(j, "dist", "mu2"),
                                           require_number(j, "dist", "alpha"));
    if (kind == "uniform") return SignalDistribution::uniform(require_number(j, "dist", "theta"));
    if (kind == "exp_tail")
      return SignalDistribution::exp_tail(require_number(j, "dist", "tau"),
                                          require_number(j, "dist", "q0"));
    if (kind == "power_zero")
      return SignalDistribution::power_zero(require_number(j, "dist", "ell"),
                                            require_number(j, "dist", "cap"));
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("field dist: ") + e.what());
  }
  throw config_error("field dist.kind: unknown kind '" + kind +
                     "' (expected point_mass|two_point|uniform|exp_tail|power_zero)");
}

json dist_to_json(const SignalDistribution& dist) {
  json j;
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PointMassSet>) {
          j["kind"] = "point_mass";
          json atoms = json::array();
          for (const auto& [value, prob] : d.atoms) atoms.push_back({value, prob});
          j["atoms"] = atoms;
        } else if constexpr (std::is_same_v<T, TwoPointMagnitude>) {
          j["kind"] = "two_point";
          j["mu1"] = d.mu1;
          j["mu2"] = d.mu2;
          j["alpha"] = d.alpha;
        } else if constexpr (std::is_same_v<T, UniformMagnitude>) {
          j["kind"] = "uniform";
          j["theta"] = d.theta;
        } else if constexpr (std::is_same_v<T, ExpTailMagnitude>) {
          j["kind"] = "exp_tail";
          j["tau"] = d.tau;
          j["q0"] = d.q0;
        } else {
          j["kind"] = "power_zero";
          j["ell"] = d.ell;
          j["cap"] = d.cap;
        }
      },
      dist.variant());
  return j;
}

// fixed numeric formatting: shortest round-trip-exact decimal
std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  double back = 0.0;
  for (int prec = 15; prec <= 16; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, x);
    std::sscanf(shorter, "%lf", &back);
    if (back == x) return shorter;
  }
  return buf;
}

std::string fmt(std::uint64_t x) { return std::to_string(x); }

// ---------- sweep worker pool ----------

void run_pool(std::size_t tasks, int threads, const std::function<void(std::size_t)>& work) {
  if (threads < 1) threads = 1;
  if (tasks == 0) return;
  const int workers = static_cast<int>(std::min<std::size_t>(tasks, threads));
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks) return;
        work(i);
      }
    });
  for (std::thread& t : pool) t.join();
}

struct ManifestInfo {
  std::string subcommand;
  int threads = 1;
};

void write_manifest(const std::string& out_path, const ManifestInfo& info,
                    const ExperimentConfig& cfg, const RunReport& report) {
  json m;
  m["subcommand"] = info.subcommand;
  m["artifact_version"] = kArtifactVersion;
  m["threads"] = info.threads;
  m["wall_time_seconds"] = report.wall_seconds;
  m["config"] = json::parse(config_to_json(cfg));
  m["failures"] = report.failures;
  std::ofstream f(out_path + ".manifest.json");
  f << m.dump(2) << "\n";
}

struct SEPointSpec {
  double q, delta, sigma_w;
};

// shared runner for the amse and phase subcommands
RunReport run_se_sweep(const ExperimentConfig& cfg, const std::vector<SEPointSpec>& points,
                       const std::string& out_path, int threads) {
  RunReport report;
  const RiskEvaluator evaluator(*cfg.dist, cfg.quadrature);
  SEConfig se_cfg;
  se_cfg.fp_tol = cfg.fp_tol;
  se_cfg.chi_search = cfg.chi_search;

  std::vector<CurvePoint> rows(points.size());
  run_pool(points.size(), threads, [&](std::size_t i) {
    try {
      rows[i].outcome =
          solve(evaluator, points[i].q, points[i].delta, points[i].sigma_w, cfg.scaled, se_cfg);
      rows[i].ok = true;
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  });

  std::ofstream csv(out_path);
  if (!csv) throw config_error("cannot open output path " + out_path);
  csv << "q,delta,sigma_w,scaled,sigma_bar,chi_star,amse,iterations,residual\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok) {
      std::ostringstream what;
      what << "point (q=" << points[i].q << ", delta=" << points[i].delta
           << ", sigma_w=" << points[i].sigma_w << "): " << rows[i].error;
      report.failures.push_back(what.str());
      continue;
    }
    const SEOutcome& o = rows[i].outcome;
    csv << fmt(o.q) << ',' << fmt(o.delta) << ',' << fmt(o.sigma_w) << ',' << (o.scaled ? 1 : 0)
        << ',' << fmt(o.sigma_bar) << ',' << fmt(o.chi_star) << ',' << fmt(o.amse) << ','
        << o.iterations << ',' << fmt(o.residual) << '\n';
  }
  return report;
}

RunReport run_amse(const ExperimentConfig& cfg, const std::string& out_path, int threads) {
  std::vector<SEPointSpec> points;
  for (double q : cfg.q_grid)
    for (double d : cfg.delta_grid)
      for (double sw : cfg.sigma_w_grid) points.push_back({q, d, sw});
  return run_se_sweep(cfg, points, out_path, threads);
}

RunReport run_phase(const ExperimentConfig& cfg, const std::string& out_path, int threads) {
  double sw = cfg.sigma_w_grid.front();
  for (double s : cfg.sigma_w_grid) sw = std::min(sw, s);
  std::vector<SEPointSpec> points;
  for (double q : cfg.q_grid)
    for (double d : cfg.delta_grid) points.push_back({q, d, sw});
  return run_se_sweep(cfg, points, out_path, threads);
}

RunReport run_expand(const ExperimentConfig& cfg, const std::string& out_path, int threads) {
  RunReport report;
  const RiskEvaluator evaluator(*cfg.dist, cfg.quadrature);
  SEConfig se_cfg;
  se_cfg.fp_tol = cfg.fp_tol;
  se_cfg.chi_search = cfg.chi_search;

  std::vector<SEPointSpec> points;
  for (double q : cfg.q_grid)
    for (double d : cfg.delta_grid)
      for (double sw : cfg.sigma_w_grid) points.push_back({q, d, sw});

  struct Row {
    ExpansionReport rep;
    double se_amse = 0.0;
    bool ok = false;
    std::string error;
  };
  std::vector<Row> rows(points.size());
  run_pool(points.size(), threads, [&](std::size_t i) {
    try {
      const auto& pt = points[i];
      rows[i].rep = cfg.scaled ? large_delta_expansion(pt.q, pt.delta, pt.sigma_w, *cfg.dist)
                               : small_noise_expansion(pt.q, pt.delta, pt.sigma_w, *cfg.dist);
      rows[i].se_amse = solve(evaluator, pt.q, pt.delta, pt.sigma_w, cfg.scaled, se_cfg).amse;
      rows[i].ok = true;
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  });

  std::ofstream csv(out_path);
  if (!csv) throw config_error("cannot open output path " + out_path);
  csv << "q,delta,sigma_w,first_term,second_term,validity,se_amse,residual_ratio\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok) {
      report.failures.push_back("point (q=" + fmt(points[i].q) + ", delta=" + fmt(points[i].delta) +
                                ", sigma_w=" + fmt(points[i].sigma_w) + "): " + rows[i].error);
      continue;
    }
    const ExpansionReport& r = rows[i].rep;
    const double gap = rows[i].se_amse - r.first_term;
    const double ratio = r.second_term != 0.0 ? gap / r.second_term
                                              : std::numeric_limits<double>::quiet_NaN();
    csv << fmt(r.q) << ',' << fmt(r.delta) << ',' << fmt(r.sigma_w) << ',' << fmt(r.first_term)
        << ',' << fmt(r.second_term) << ',' << to_string(r.validity) << ','
        << fmt(rows[i].se_amse) << ',' << fmt(ratio) << '\n';
  }
  return report;
}

RunReport run_qstar(const ExperimentConfig& cfg, const std::string& out_path, std::ostream& log) {
  RunReport report;
  const QStarResult res = q_star(*cfg.dist);
  std::ofstream csv(out_path);
  if (!csv) throw config_error("cannot open output path " + out_path);
  csv << "q,cq\n";
  for (const auto& [q, v] : res.curve) csv << fmt(q) << ',' << fmt(v) << '\n';
  char line[64];
  std::snprintf(line, sizeof(line), "q_star=%.3f", res.q_star);
  log << line << "\n";
  return report;
}

RunReport run_mc(const ExperimentConfig& cfg, const std::string& out_path, int threads) {
  RunReport report;
  if (cfg.mc.seeds.empty()) throw config_error("field mc.seeds: must be nonempty for mc runs");
  if (cfg.lambda_grid.empty()) throw config_error("field lambda_grid: must be nonempty for mc runs");
  if (cfg.sigma_w_grid.empty())
    throw config_error("field sigma_w_grid: mc runs use the first entry, provide one");
  if (cfg.q_grid.empty()) throw config_error("field q_grid: must be nonempty for mc runs");

  const double sigma_w = cfg.sigma_w_grid.front();
  const double delta = static_cast<double>(cfg.mc.n) / static_cast<double>(cfg.mc.p);
  const RiskEvaluator evaluator(*cfg.dist, cfg.quadrature);
  SEConfig se_cfg;
  se_cfg.fp_tol = cfg.fp_tol;
  se_cfg.chi_search = cfg.chi_search;

  // shared asymptotic targets per q
  std::vector<double> targets(cfg.q_grid.size());
  for (std::size_t k = 0; k < cfg.q_grid.size(); ++k)
    targets[k] = solve(evaluator, cfg.q_grid[k], delta, sigma_w, cfg.mc.scaled, se_cfg).amse;

  SolverConfig solver_cfg;
  solver_cfg.tol = cfg.mc.fista_tol;
  solver_cfg.max_iter = cfg.mc.max_iter;

  struct Task {
    std::uint64_t seed;
    std::size_t q_index;
  };
  std::vector<Task> tasks;
  for (std::uint64_t seed : cfg.mc.seeds)
    for (std::size_t k = 0; k < cfg.q_grid.size(); ++k) tasks.push_back({seed, k});

  struct TaskRows {
    std::vector<SolveResult> curve;
    bool ok = false;
    std::string error;
  };
  std::vector<TaskRows> results(tasks.size());
  run_pool(tasks.size(), threads, [&](std::size_t i) {
    try {
      const Instance inst = generate(cfg.mc.n, cfg.mc.p, *cfg.dist, sigma_w, cfg.mc.scaled,
                                     tasks[i].seed);
      SweepResult sweep = lambda_sweep(inst, cfg.q_grid[tasks[i].q_index], cfg.lambda_grid,
                                       solver_cfg);
      for (const SolveResult& r : sweep.curve)
        if (!r.converged)
          throw std::runtime_error("solver hit the iteration cap at lambda = " + fmt(r.lambda));
      results[i].curve = std::move(sweep.curve);
      results[i].ok = true;
    } catch (const std::exception& e) {
      results[i].error = e.what();
    }
  });

  std::ofstream csv(out_path);
  if (!csv) throw config_error("cannot open output path " + out_path);
  csv << "seed,n,p,q,lambda,iterations,grad_norm,mse,se_amse,rel_err\n";
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const double q = cfg.q_grid[tasks[i].q_index];
    if (!results[i].ok) {
      report.failures.push_back("mc (seed=" + fmt(tasks[i].seed) + ", q=" + fmt(q) +
                                "): " + results[i].error);
      continue;
    }
    const double target = targets[tasks[i].q_index];
    for (const SolveResult& r : results[i].curve) {
      csv << fmt(tasks[i].seed) << ',' << cfg.mc.n << ',' << cfg.mc.p << ',' << fmt(q) << ','
          << fmt(r.lambda) << ',' << r.iterations << ',' << fmt(r.grad_norm) << ',' << fmt(r.mse)
          << ',' << fmt(target) << ',' << fmt((r.mse - target) / target) << '\n';
    }
  }
  return report;
}

}  // namespace

SignalDistribution dist_from_json_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("dist json: ") + e.what());
  }
  return dist_from_json(j);
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config: expected a json object");

  ExperimentConfig cfg;
  if (j.contains("dist")) cfg.dist = dist_from_json(j.at("dist"));
  cfg.q_grid = get_grid(j, "q_grid");
  cfg.delta_grid = get_grid(j, "delta_grid");
  cfg.sigma_w_grid = get_grid(j, "sigma_w_grid");
  cfg.lambda_grid = get_grid(j, "lambda_grid");
  cfg.scaled = get_bool(j, "", "scaled", false);

  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    if (!q.is_object()) throw config_error("field quadrature: expected an object");
    cfg.quadrature.hermite_nodes = get_int(q, "quadrature", "hermite_nodes", 61);
    cfg.quadrature.b_nodes = get_int(q, "quadrature", "b_nodes", 200);
    if (cfg.quadrature.hermite_nodes < 2)
      throw config_error("field quadrature.hermite_nodes: must be >= 2");
    if (cfg.quadrature.b_nodes < 8) throw config_error("field quadrature.b_nodes: must be >= 8");
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (!s.is_object()) throw config_error("field solver: expected an object");
    cfg.fp_tol = get_number(s, "solver", "fp_tol", 1e-12);
    cfg.chi_search.grid_points = get_int(s, "solver", "chi_grid_points", 64);
    cfg.chi_search.golden_tol = get_number(s, "solver", "golden_tol", 1e-10);
    if (!(cfg.fp_tol > 0.0)) throw config_error("field solver.fp_tol: must be positive");
    if (!(cfg.chi_search.golden_tol > 0.0))
      throw config_error("field solver.golden_tol: must be positive");
    if (cfg.chi_search.grid_points < 4)
      throw config_error("field solver.chi_grid_points: must be >= 4");
  }
  if (j.contains("mc")) {
    const json& m = j.at("mc");
    if (!m.is_object()) throw config_error("field mc: expected an object");
    cfg.mc.n = get_int(m, "mc", "n", 2000);
    cfg.mc.p = get_int(m, "mc", "p", 1000);
    cfg.mc.fista_tol = get_number(m, "mc", "fista_tol", 1e-9);
    cfg.mc.max_iter = get_int(m, "mc", "max_iter", 50000);
    cfg.mc.scaled = get_bool(m, "mc", "scaled", false);
    if (cfg.mc.n < 1 || cfg.mc.p < 1) throw config_error("field mc.n/mc.p: must be >= 1");
    if (!(cfg.mc.fista_tol > 0.0)) throw config_error("field mc.fista_tol: must be positive");
    if (cfg.mc.max_iter < 1) throw config_error("field mc.max_iter: must be >= 1");
    if (m.contains("seeds")) {
      const json& s = m.at("seeds");
      if (!s.is_array()) throw config_error("field mc.seeds: expected an array");
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s[i].is_number_integer())
          throw config_error("field mc.seeds[" + std::to_string(i) + "]: expected an integer");
        cfg.mc.seeds.push_back(s[i].get<std::uint64_t>());
      }
    }
  }
  for (double q : cfg.q_grid)
    if (!(q >= 1.0 && q <= 2.0)) throw config_error("field q_grid: entries must lie in [1,2]");
  for (double d : cfg.delta_grid)
    if (!(d > 0.0)) throw config_error("field delta_grid: entries must be positive");
  for (double sw : cfg.sigma_w_grid)
    if (!(sw >= 0.0)) throw config_error("field sigma_w_grid: entries must be >= 0");
  for (double l : cfg.lambda_grid)
    if (!(l >= 0.0)) throw config_error("field lambda_grid: entries must be >= 0");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("cannot open config file " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_experiment_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  if (cfg.dist) j["dist"] = dist_to_json(*cfg.dist);
  j["q_grid"] = cfg.q_grid;
  j["delta_grid"] = cfg.delta_grid;
  j["sigma_w_grid"] = cfg.sigma_w_grid;
  j["lambda_grid"] = cfg.lambda_grid;
  j["scaled"] = cfg.scaled;
  j["quadrature"] = {{"hermite_nodes", cfg.quadrature.hermite_nodes},
                     {"b_nodes", cfg.quadrature.b_nodes}};
  j["solver"] = {{"fp_tol", cfg.fp_tol},
                 {"chi_grid_points", cfg.chi_search.grid_points},
                 {"golden_tol", cfg.chi_search.golden_tol}};
  j["mc"] = {{"n", cfg.mc.n},         {"p", cfg.mc.p},
             {"seeds", cfg.mc.seeds}, {"fista_tol", cfg.mc.fista_tol},
             {"max_iter", cfg.mc.max_iter}, {"scaled", cfg.mc.scaled}};
  return j.dump(2);
}

bool prox_selftest(std::ostream& log) {
  Rng rng(0x9d7e6a3c2f15b4d8ULL);
  const int points = 10000;
  int fixed_point_fail = 0, symmetry_fail = 0, scale_fail = 0, deriv_fail = 0, order_fail = 0;
  double worst_fixed_point = 0.0, worst_scale = 0.0, worst_deriv = 0.0;

  for (int i = 0; i < points; ++i) {
    const double u = (rng.uniform() < 0.5 ? -1.0 : 1.0) *
                     std::pow(10.0, -3.0 + 6.0 * rng.uniform());
    const double chi = std::pow(10.0, -4.0 + 6.0 * rng.uniform());
    double q = 1.0 + rng.uniform();
    const double pick = rng.uniform();
    if (pick < 0.05) q = 1.0;
    else if (pick < 0.10) q = 2.0;

    const ProxResult p = prox(u, chi, q);

    // fixed-point characterization: q = 1 only holds off the dead zone, and
    // for q near 1 with chi >> |u| the root underflows double precision
    const bool off_kink = q > 1.0 || std::abs(u) > chi;
    const bool representable =
        q == 1.0 || std::abs(u) >= chi * q ||
        std::log(std::abs(u) / (chi * q)) / (q - 1.0) > -690.0;
    if (off_kink && representable) {
      const double sgn = u < 0.0 ? -1.0 : 1.0;
      const double res =
          p.value + chi * q * std::pow(std::abs(p.value), q - 1.0) * sgn - u;
      const double rel = std::abs(res) / std::fmax(1.0, std::abs(u));
      worst_fixed_point = std::fmax(worst_fixed_point, rel);
      if (rel > 1e-12) ++fixed_point_fail;
    }

    const ProxResult m = prox(-u, chi, q);
    if (m.value != -p.value || m.d_du != p.d_du || m.d_dchi != -p.d_dchi) ++symmetry_fail;

    const double alpha = std::pow(10.0, -1.0 + 2.0 * rng.uniform());
    const ProxResult s = prox(alpha * u, std::pow(alpha, 2.0 - q) * chi, q);
    const double scale_err = std::abs(alpha * p.value - s.value) /
                             std::fmax(1e-30, std::abs(alpha * p.value));
    if (p.value != 0.0) {
      worst_scale = std::fmax(worst_scale, scale_err);
      if (scale_err > 1e-11) ++scale_fail;
    }

    // central finite differences, keeping clear of u = 0 and the q = 1 kink
    const double hu = 1e-6 * std::abs(u);
    const bool near_kink = q == 1.0 && std::abs(std::abs(u) - chi) < 4.0 * hu;
    if (std::abs(u) > 4.0 * hu && hu > 0.0 && !near_kink) {
      const double fd_du =
          (prox(u + hu, chi, q).value - prox(u - hu, chi, q).value) / (2.0 * hu);
      const double rel = std::abs(fd_du - p.d_du) / std::fmax(1e-8, std::abs(p.d_du));
      worst_deriv = std::fmax(worst_deriv, rel);
      if (rel > 1e-5) ++deriv_fail;
    }
    const double hc = 1e-6 * std::fmax(1e-2, chi);
    const bool kink_chi = q == 1.0 && std::abs(std::abs(u) - chi) < 4.0 * hc;
    if (chi > 4.0 * hc && !kink_chi && std::abs(u) > 1e-3) {
      const double fd_dchi =
          (prox(u, chi + hc, q).value - prox(u, chi - hc, q).value) / (2.0 * hc);
      const double rel = std::abs(fd_dchi - p.d_dchi) / std::fmax(1e-8, std::abs(p.d_dchi));
      worst_deriv = std::fmax(worst_deriv, rel);
      if (rel > 1e-5) ++deriv_fail;
    }

    // monotonicity in u and shrinkage ordering in chi
    const double u2 = u + std::abs(u) * rng.uniform();
    if (prox(u2, chi, q).value < p.value - 1e-13 * std::fmax(1.0, std::abs(u))) ++order_fail;
    const double chi2 = chi * (1.0 + rng.uniform());
    if (std::abs(prox(u, chi2, q).value) > std::abs(p.value) * (1.0 + 1e-12) + 1e-300)
      ++order_fail;
  }

  const int total = fixed_point_fail + symmetry_fail + scale_fail + deriv_fail + order_fail;
  log << "prox-selftest: " << points << " points"
      << " | fixed-point worst " << worst_fixed_point << " fails " << fixed_point_fail
      << " | symmetry fails " << symmetry_fail << " | scale worst " << worst_scale << " fails "
      << scale_fail << " | derivative worst " << worst_deriv << " fails " << deriv_fail
      << " | ordering fails " << order_fail << "\n";
  log << (total == 0 ? "prox-selftest: PASS" : "prox-selftest: FAIL") << "\n";
  return total == 0;
}

int run_subcommand(const std::string& name, const std::string& config_path,
                   const std::string& out_path, int threads, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  if (name == "prox-selftest") return prox_selftest(log) ? 0 : 1;

  ExperimentConfig cfg;
  try {
    cfg = load_experiment_config(config_path);
    if (!cfg.dist) throw config_error("field dist: required for " + name);
    if (name != "qstar") {
      if ((name == "amse" || name == "expand" || name == "phase") &&
          (cfg.q_grid.empty() || cfg.delta_grid.empty() || cfg.sigma_w_grid.empty()))
        throw config_error("fields q_grid/delta_grid/sigma_w_grid: required for " + name);
    }
  } catch (const config_error& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  }

  RunReport report;
  try {
    if (name == "amse") {
      report = run_amse(cfg, out_path, threads);
    } else if (name == "phase") {
      report = run_phase(cfg, out_path, threads);
    } else if (name == "expand") {
      report = run_expand(cfg, out_path, threads);
    } else if (name == "qstar") {
      report = run_qstar(cfg, out_path, log);
    } else if (name == "mc") {
      report = run_mc(cfg, out_path, threads);
    } else {
      log << "unknown subcommand '" << name << "'\n";
      return 2;
    }
  } catch (const config_error& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    report.failures.push_back(e.what());
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(out_path, {name, threads}, cfg, report);
  for (const std::string& f : report.failures) log << "failure: " << f << "\n";
  report.exit_code = report.failures.empty() ? 0 : 1;
  return report.exit_code;
}

}  // namespace bridgelab
