#include "dladmc/experiment.hpp"

#include "dladmc/error.hpp"
#include "dladmc/io.hpp"
#include "dladmc/partition.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace dladmc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidInput("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidInput("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidInput("config key '" + key + "': expected true/false, got '" + v + "'");
}

std::string_view to_string(SvdBackend b) {
  switch (b) {
    case SvdBackend::automatic: return "automatic";
    case SvdBackend::full: return "full";
    case SvdBackend::truncated: return "truncated";
  }
  return "automatic";
}

SvdBackend parse_backend(const std::string& v) {
  if (v == "automatic") return SvdBackend::automatic;
  if (v == "full") return SvdBackend::full;
  if (v == "truncated") return SvdBackend::truncated;
  throw InvalidInput("unknown svd backend '" + v + "'");
}

bool wants(const ExperimentConfig& cfg, Method m) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
}

nlohmann::json metrics_json(const Metrics& m, bool timing) {
  nlohmann::json j{{"rmse", m.rmse}, {"mae", m.mae}, {"rank", m.rank}};
  if (timing) j["wall_time_s"] = m.wall_time_s;
  return j;
}

nlohmann::json stat_json(const SummaryStat& s) {
  nlohmann::json j{{"mean", s.mean}};
  j["std"] = s.std ? nlohmann::json(*s.std) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::dladmc: return "dladmc";
    case Method::bladmc: return "bladmc";
    case Method::acl: return "acl";
    case Method::mht: return "mht";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "dladmc") return Method::dladmc;
  if (name == "bladmc") return Method::bladmc;
  if (name == "acl" || name == "ladmc") return Method::acl;
  if (name == "mht" || name == "quad") return Method::mht;
  throw InvalidInput("unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_methods(std::string_view list) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto token = trim(list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!token.empty()) {
      const Method m = parse_method(token);
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw InvalidInput("no methods given");
  return out;
}

void ExperimentConfig::validate() const {
  scenario.validate();
  if (methods.empty()) throw InvalidInput("no methods selected");
  if (replications < 1) throw InvalidInput("replications must be at least 1");
  if (block_rows < 1 || block_rows > scenario.n1 || block_cols < 1 || block_cols > scenario.n2) {
    throw InvalidInput("block dimensions must lie in [1, n1] x [1, n2]");
  }
  if (grid_points < 1) throw InvalidInput("grid_points must be at least 1");
  if (!(grid_low_ratio > 0.0 && grid_low_ratio <= 1.0)) throw InvalidInput("grid_low_ratio must lie in (0, 1]");
  if (grid_patience < 0) throw InvalidInput("grid_patience must be non-negative");
  admm.validate();
  quad.validate();
  refine.validate();
}

// LAD path over a decreasing grid, warm-starting ADMM from the previous state.
TuneResult tune_acl(const ObservationSet& train, std::span<const double> y, const ObservationSet& valid,
                    const ExperimentConfig& cfg) {
  const auto grid = log_lambda_grid(lad_lambda_max(train, y), cfg.grid_points, cfg.grid_low_ratio);
  std::optional<AdmmState> warm;
  const LambdaFit fit = [&](double lambda) {
    AdmmConfig ac = cfg.admm;
    ac.lambda = lambda;
    auto res = fit_lad_nuclear_full(train, y, ac, warm ? &*warm : nullptr);
    warm = std::move(res.state);
    return std::move(res.estimate);
  };
  return tune_lambda(fit, grid, valid, {cfg.grid_patience});
}

TuneResult tune_mht(const ObservationSet& train, std::span<const double> y, const ObservationSet& valid,
                    const ExperimentConfig& cfg) {
  const auto grid = log_lambda_grid(quadratic_lambda_max(train, y), cfg.grid_points, cfg.grid_low_ratio);
  Eigen::MatrixXd warm = Eigen::MatrixXd::Zero(train.rows(), train.cols());
  const LambdaFit fit = [&](double lambda) {
    QuadSolverConfig qc = cfg.quad;
    qc.lambda = lambda;
    auto est = fit_quadratic_nuclear(train, y, qc, &warm);
    warm = est.values;
    return est;
  };
  return tune_lambda(fit, grid, valid, {cfg.grid_patience});
}

BlockedTune tune_bladmc(const ObservationSet& train, std::span<const double> y, const ObservationSet& valid,
                        const ExperimentConfig& cfg, unsigned threads) {
  const auto p = make_partition(train.rows(), train.cols(), cfg.block_rows, cfg.block_cols);
  double lambda_max = 0.0;
  for (const auto& blk : scatter(train, y, p)) {
    if (!blk.obs.empty()) lambda_max = std::max(lambda_max, lad_lambda_max(blk.obs, blk.responses));
  }
  const auto grid = log_lambda_grid(lambda_max, cfg.grid_points, cfg.grid_low_ratio);
  std::vector<AdmmState> warm;
  BlockedTune out;
  std::vector<std::vector<double>> lambdas_by_grid;
  const LambdaFit fit = [&](double lambda) {
    BlockedFitOptions opts;
    opts.threads = threads;
    opts.warm_states = warm;
    auto res = fit_bladmc(train, y, p, std::vector<double>{lambda}, cfg.admm, opts);
    warm = std::move(res.states);
    std::vector<double> lams;
    for (const auto& b : res.blocks) lams.push_back(b.lambda);
    lambdas_by_grid.push_back(std::move(lams));
    return std::move(res.estimate);
  };
  out.tune = tune_lambda(fit, grid, valid, {cfg.grid_patience});
  out.block_lambdas.assign(p.block_count(), out.tune.best_lambda);
  return out;
}

SyntheticInstance make_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  SyntheticInstance inst;
  SyntheticScenario train_sc = cfg.scenario;
  train_sc.noise.seed = derive_seed(seed, 11);
  SyntheticScenario valid_sc = cfg.scenario;
  valid_sc.noise.seed = derive_seed(seed, 12);
  inst.a_star = gen_lowrank(cfg.scenario.n1, cfg.scenario.n2, cfg.scenario.rank, derive_seed(seed, 10));
  inst.train = sample_observations(inst.a_star, train_sc);
  inst.valid = sample_observations(inst.a_star, valid_sc);
  inst.truth = (inst.a_star.array() + cfg.scenario.noise_median()).matrix();
  return inst;
}

ReplicationResult run_replication(const ExperimentConfig& cfg, int replication) {
  ReplicationResult out;
  out.replication = replication;
  out.seed = cfg.base_seed + static_cast<std::uint64_t>(replication);
  const unsigned block_threads = std::max(1u, cfg.threads);

  const SyntheticInstance inst = make_instance(cfg, out.seed);
  const ObservationSet& train = inst.train;
  const ObservationSet& valid = inst.valid;
  const Eigen::MatrixXd& truth = inst.truth;
  const std::vector<double> y = train.values();

  auto record = [&](Method m, TuneResult& tuned, double seconds) {
    Metrics mt = metrics(tuned.best_estimate, truth, cfg.rank_rel_tol);
    mt.wall_time_s = seconds;
    out.metrics[m] = mt;
    out.lambda[m] = tuned.best_lambda;
    out.iterations[m] = tuned.best_estimate.iterations_used;
  };

  if (wants(cfg, Method::mht)) {
    const auto start = Clock::now();
    auto tuned = tune_mht(train, y, valid, cfg);
    record(Method::mht, tuned, seconds_since(start));
  }
  if (wants(cfg, Method::acl)) {
    const auto start = Clock::now();
    auto tuned = tune_acl(train, y, valid, cfg);
    record(Method::acl, tuned, seconds_since(start));
  }
  if (wants(cfg, Method::bladmc) || wants(cfg, Method::dladmc)) {
    const auto start = Clock::now();
    auto blocked = tune_bladmc(train, y, valid, cfg, block_threads);
    const double blocked_time = seconds_since(start);
    out.bladmc_block_lambdas = blocked.block_lambdas;
    if (wants(cfg, Method::bladmc)) record(Method::bladmc, blocked.tune, blocked_time);

    if (wants(cfg, Method::dladmc)) {
      const auto refine_start = Clock::now();
      RefinementConfig rc = cfg.refine;
      rc.block_rows = cfg.block_rows;
      rc.block_cols = cfg.block_cols;
      if (cfg.known_rank) rc.r_star = cfg.scenario.rank;
      RefineContext ctx;
      ctx.validation = &valid;
      ctx.ground_truth = &truth;
      auto res = dladmc(train, y, blocked.tune.best_estimate, rc, cfg.quad, ctx);
      Metrics mt = metrics(res.estimate, truth, cfg.rank_rel_tol);
      mt.wall_time_s = blocked_time + seconds_since(refine_start);
      out.metrics[Method::dladmc] = mt;
      out.lambda[Method::dladmc] = res.trace.empty() ? 0.0 : res.trace.back().lambda_t;
      out.iterations[Method::dladmc] = static_cast<int>(res.trace.size());
      out.dladmc_trace = std::move(res.trace);
    }
  }
  return out;
}

SummaryStat summarize(std::span<const double> values) {
  SummaryStat s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  const auto reps = static_cast<std::size_t>(cfg.replications);
  report.replications.resize(reps);

  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(reps)));
  ExperimentConfig inner = cfg;
  if (workers > 1) inner.threads = 1;
  auto run_one = [&](std::size_t i) {
    try {
      report.replications[i] = run_replication(inner, static_cast<int>(i));
    } catch (const std::exception& e) {
      auto& r = report.replications[i];
      r.replication = static_cast<int>(i);
      r.seed = cfg.base_seed + i;
      r.ok = false;
      r.error = e.what();
    }
  };
  if (workers == 1) {
    for (std::size_t i = 0; i < reps; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < reps;) run_one(i);
      });
    }
  }

  for (Method m : cfg.methods) {
    ReportRow row;
    row.method = m;
    row.scenario = cfg.scenario.name;
    std::vector<double> rmse, mae, rank, time;
    for (const auto& r : report.replications) {
      if (!r.ok) {
        ++row.failures;
        continue;
      }
      const auto& mt = r.metrics.at(m);
      rmse.push_back(mt.rmse);
      mae.push_back(mt.mae);
      rank.push_back(mt.rank);
      time.push_back(mt.wall_time_s);
    }
    row.replications = static_cast<int>(rmse.size());
    row.rmse = summarize(rmse);
    row.mae = summarize(mae);
    row.rank = summarize(rank);
    row.mean_wall_time_s = summarize(time).mean;
    report.rows.push_back(row);
  }
  return report;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report, bool include_timing) {
  auto opt = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); };
  out << "method,scenario,replications,failures,rmse_mean,rmse_std,mae_mean,mae_std,rank_mean,rank_std";
  if (include_timing) out << ",time_mean_s";
  out << '\n';
  for (const auto& r : report.rows) {
    out << to_string(r.method) << ',' << r.scenario << ',' << r.replications << ',' << r.failures << ','
        << io::format_double(r.rmse.mean) << ',' << opt(r.rmse.std) << ',' << io::format_double(r.mae.mean) << ','
        << opt(r.mae.std) << ',' << io::format_double(r.rank.mean) << ',' << opt(r.rank.std);
    if (include_timing) out << ',' << io::format_double(r.mean_wall_time_s);
    out << '\n';
  }
}

std::string report_json(const ExperimentReport& report, const ExperimentConfig& cfg, bool include_timing) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json conf;
  for (const auto& [k, v] : describe_config(cfg)) conf[k] = v;
  j["config"] = conf;
  j["summary"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row{{"method", to_string(r.method)},
                               {"scenario", r.scenario},
                               {"replications", r.replications},
                               {"failures", r.failures}};
    row["rmse"] = stat_json(r.rmse);
    row["mae"] = stat_json(r.mae);
    row["rank"] = stat_json(r.rank);
    if (include_timing) row["time_mean_s"] = r.mean_wall_time_s;
    j["summary"].push_back(row);
  }
  j["replications"] = nlohmann::ordered_json::array();
  for (const auto& r : report.replications) {
    nlohmann::ordered_json rep{{"replication", r.replication}, {"seed", r.seed}, {"ok", r.ok}};
    if (!r.ok) rep["error"] = r.error;
    for (const auto& [m, mt] : r.metrics) {
      auto mj = metrics_json(mt, include_timing);
      mj["lambda"] = r.lambda.at(m);
      mj["iterations"] = r.iterations.at(m);
      rep["methods"][std::string(to_string(m))] = mj;
    }
    if (!r.dladmc_trace.empty()) {
      auto trace = nlohmann::ordered_json::array();
      for (const auto& row : r.dladmc_trace) {
        nlohmann::ordered_json t{{"t", row.t},        {"f0_hat", row.f0_hat}, {"f0_raw", row.f0_raw},
                                 {"h_t", row.h_t},    {"a_Nt", row.a_Nt},     {"lambda_t", row.lambda_t},
                                 {"e", std::isfinite(row.e) ? nlohmann::json(row.e) : nlohmann::json("inf")},
                                 {"r_star", row.r_star}};
        if (row.metrics) t["metrics"] = metrics_json(*row.metrics, false);
        trace.push_back(t);
      }
      rep["dladmc_trace"] = trace;
    }
    j["replications"].push_back(rep);
  }
  return j.dump(2);
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    kv[key] = value;
  }
  return kv;
}

ExperimentConfig apply_config(ExperimentConfig c, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, v] : kv) {
    if (key == "name") c.scenario.name = v;
    else if (key == "n1") c.scenario.n1 = to_int(key, v);
    else if (key == "n2") c.scenario.n2 = to_int(key, v);
    else if (key == "rank") c.scenario.rank = static_cast<int>(to_int(key, v));
    else if (key == "observe_rate") c.scenario.observe_rate = to_double(key, v);
    else if (key == "noise") c.scenario.noise.kind = parse_noise_kind(v);
    else if (key == "center_median") c.scenario.center_median = to_bool(key, v);
    else if (key == "seed") c.base_seed = static_cast<std::uint64_t>(to_int(key, v));
    else if (key == "replications") c.replications = static_cast<int>(to_int(key, v));
    else if (key == "methods") c.methods = parse_methods(v);
    else if (key == "block_rows") c.block_rows = to_int(key, v);
    else if (key == "block_cols") c.block_cols = to_int(key, v);
    else if (key == "partition") {
      std::istringstream ps(v);
      long long n1 = 0, n2 = 0, m1 = 0, m2 = 0;
      std::string extra;
      if (!(ps >> n1 >> n2 >> m1 >> m2) || (ps >> extra)) throw InvalidInput("partition expects 'n1 n2 m1 m2'");
      c.scenario.n1 = n1;
      c.scenario.n2 = n2;
      c.block_rows = m1;
      c.block_cols = m2;
    }
    else if (key == "grid_points") c.grid_points = static_cast<int>(to_int(key, v));
    else if (key == "grid_low_ratio") c.grid_low_ratio = to_double(key, v);
    else if (key == "grid_patience") c.grid_patience = static_cast<int>(to_int(key, v));
    else if (key == "threads") c.threads = static_cast<unsigned>(to_int(key, v));
    else if (key == "rank_rel_tol") c.rank_rel_tol = c.refine.rank_rel_tol = to_double(key, v);
    else if (key == "box_bound") c.admm.box_bound = c.quad.box_bound = v == "inf" ? std::numeric_limits<double>::infinity() : to_double(key, v);
    else if (key == "admm_rho") c.admm.rho = to_double(key, v);
    else if (key == "admm_adaptive_rho") c.admm.adaptive_rho = to_bool(key, v);
    else if (key == "admm_max_iters") c.admm.max_iters = static_cast<int>(to_int(key, v));
    else if (key == "admm_tol") c.admm.primal_tol = c.admm.dual_tol = to_double(key, v);
    else if (key == "quad_max_iters") c.quad.max_iters = static_cast<int>(to_int(key, v));
    else if (key == "quad_rel_tol") c.quad.rel_tol = to_double(key, v);
    else if (key == "quad_step_rule") {
      if (v == "fixed") c.quad.step_rule = StepRule::fixed;
      else if (v == "backtracking") c.quad.step_rule = StepRule::backtracking;
      else throw InvalidInput("quad_step_rule expects fixed or backtracking");
    }
    else if (key == "svd_backend") c.admm.svd.backend = c.quad.svd.backend = parse_backend(v);
    else if (key == "svd_truncated_min_dim") c.admm.svd.truncated_min_dim = c.quad.svd.truncated_min_dim = to_int(key, v);
    else if (key == "refine_T_max") c.refine.T_max = static_cast<int>(to_int(key, v));
    else if (key == "refine_c1") c.refine.c1 = to_double(key, v);
    else if (key == "refine_c2") c.refine.c2 = to_double(key, v);
    else if (key == "refine_rel_change_tol") c.refine.rel_change_tol = to_double(key, v);
    else if (key == "refine_f0_floor") c.refine.f0_floor = to_double(key, v);
    else if (key == "refine_bandwidth_rate") {
      if (v == "current") c.refine.bandwidth_current_rate = true;
      else if (v == "previous") c.refine.bandwidth_current_rate = false;
      else throw InvalidInput("refine_bandwidth_rate expects previous or current");
    }
    else if (key == "refine_h_floor_constant") c.refine.h_floor_constant = to_double(key, v);
    else if (key == "refine_r_star") {
      c.known_rank = v == "known";
      if (v == "estimated" || v == "known") c.refine.r_star.reset();
      else c.refine.r_star = static_cast<int>(to_int(key, v));
    }
    else if (key == "refine_lambda_rule") {
      if (v == "validation") c.refine.lambda_rule = ValidationLambda{c.grid_points, c.grid_low_ratio, c.grid_patience};
      else if (v == "schedule") {
        if (!std::holds_alternative<ScheduleLambda>(c.refine.lambda_rule)) c.refine.lambda_rule = ScheduleLambda{};
      }
      else throw InvalidInput("refine_lambda_rule expects validation or schedule");
    }
    else if (key == "refine_lambda_C") {
      c.refine.lambda_rule = ScheduleLambda{to_double(key, v)};
    }
    else throw InvalidInput("unknown config key '" + key + "'");
  }
  // The refinement grid follows the shared grid settings.
  if (auto* rule = std::get_if<ValidationLambda>(&c.refine.lambda_rule)) {
    *rule = ValidationLambda{c.grid_points, c.grid_low_ratio, c.grid_patience};
  }
  c.refine.block_rows = c.block_rows;
  c.refine.block_cols = c.block_cols;
  return c;
}

std::vector<std::pair<std::string, std::string>> describe_config(const ExperimentConfig& c) {
  auto d = [](double x) { return io::format_double(x); };
  std::string methods;
  for (Method m : c.methods) methods += (methods.empty() ? "" : ",") + std::string(to_string(m));
  std::vector<std::pair<std::string, std::string>> out{
      {"name", c.scenario.name},
      {"n1", std::to_string(c.scenario.n1)},
      {"n2", std::to_string(c.scenario.n2)},
      {"rank", std::to_string(c.scenario.rank)},
      {"observe_rate", d(c.scenario.observe_rate)},
      {"noise", std::string(to_string(c.scenario.noise.kind))},
      {"center_median", c.scenario.center_median ? "true" : "false"},
      {"seed", std::to_string(c.base_seed)},
      {"replications", std::to_string(c.replications)},
      {"methods", methods},
      {"block_rows", std::to_string(c.block_rows)},
      {"block_cols", std::to_string(c.block_cols)},
      {"grid_points", std::to_string(c.grid_points)},
      {"grid_low_ratio", d(c.grid_low_ratio)},
      {"grid_patience", std::to_string(c.grid_patience)},
      {"rank_rel_tol", d(c.rank_rel_tol)},
      {"box_bound", std::isfinite(c.quad.box_bound) ? d(c.quad.box_bound) : "inf"},
      {"admm_rho", d(c.admm.rho)},
      {"admm_adaptive_rho", c.admm.adaptive_rho ? "true" : "false"},
      {"admm_max_iters", std::to_string(c.admm.max_iters)},
      {"admm_tol", d(c.admm.primal_tol)},
      {"quad_max_iters", std::to_string(c.quad.max_iters)},
      {"quad_rel_tol", d(c.quad.rel_tol)},
      {"quad_step_rule", c.quad.step_rule == StepRule::fixed ? "fixed" : "backtracking"},
      {"svd_backend", std::string(to_string(c.quad.svd.backend))},
      {"svd_truncated_min_dim", std::to_string(c.quad.svd.truncated_min_dim)},
      {"refine_T_max", std::to_string(c.refine.T_max)},
      {"refine_c1", d(c.refine.c1)},
      {"refine_c2", d(c.refine.c2)},
      {"refine_rel_change_tol", d(c.refine.rel_change_tol)},
      {"refine_f0_floor", d(c.refine.f0_floor)},
      {"refine_h_floor_constant", d(c.refine.h_floor_constant)},
      {"refine_bandwidth_rate", c.refine.bandwidth_current_rate ? "current" : "previous"},
      {"refine_r_star", c.known_rank ? "known" : c.refine.r_star ? std::to_string(*c.refine.r_star) : "estimated"},
  };
  if (const auto* s = std::get_if<ScheduleLambda>(&c.refine.lambda_rule)) {
    out.emplace_back("refine_lambda_rule", "schedule");
    out.emplace_back("refine_lambda_C", d(s->C));
  } else {
    out.emplace_back("refine_lambda_rule", "validation");
  }
  return out;
}

}  // namespace dladmc
