#include "dladmc_cli/dispatch.hpp"

#include "dladmc/error.hpp"
#include "dladmc/experiment.hpp"
#include "dladmc/ingest.hpp"
#include "dladmc/io.hpp"
#include "dladmc/lad_admm.hpp"
#include "dladmc/partition.hpp"
#include "dladmc/prox.hpp"
#include "dladmc/refine.hpp"
#include "dladmc/synthetic.hpp"
#include "dladmc/tuning.hpp"
#include "dladmc/version.hpp"

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace dladmc::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

unsigned default_threads() {
  if (const char* env = std::getenv("DLADMC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

namespace {

struct Common {
  std::string config_path;
  std::uint64_t seed = 1;
  bool seed_set = false;
  unsigned threads = default_threads();
  std::string manifest_path;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config,--scenario", c.config_path, "key = value settings file")->check(CLI::ExistingFile);
  cmd->add_option_function<std::uint64_t>(
      "--seed",
      [&c](const std::uint64_t& s) {
        c.seed = s;
        c.seed_set = true;
      },
      "base random seed");
  cmd->add_option("--threads", c.threads, "worker threads (default $DLADMC_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--manifest", c.manifest_path, "run manifest path (JSON)");
}

ExperimentConfig load_config(const Common& c) {
  ExperimentConfig cfg;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw InvalidInput("cannot open config file " + c.config_path);
    cfg = apply_config(cfg, parse_key_values(in));
  }
  if (c.seed_set) cfg.base_seed = c.seed;
  cfg.threads = c.threads;
  return cfg;
}

Json config_json(const ExperimentConfig& cfg) {
  Json j = Json::object();
  for (const auto& [k, v] : describe_config(cfg)) j[k] = v;
  return j;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::ofstream open_out(const fs::path& p) {
  ensure_parent(p);
  std::ofstream out(p);
  if (!out) throw InvalidInput("cannot write " + p.string());
  return out;
}

// Everything needed to rerun: argv, resolved settings and seeds. Timing and
// output paths are informational.
struct Manifest {
  std::string command;
  std::span<const std::string> args;
  Json config = Json::object();
  Json seeds = Json::object();
  Json outputs = Json::array();
  Json extra = Json::object();
  Clock::time_point start = Clock::now();

  void output(const fs::path& p) { outputs.push_back(p.string()); }

  void write(const fs::path& path) const {
    Json j;
    j["command"] = command;
    j["argv"] = Json::array();
    for (const auto& a : args) j["argv"].push_back(a);
    j["version"] = kVersion;
    j["config"] = config;
    j["seeds"] = seeds;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    j["outputs"] = outputs;
    j["wall_time_s"] = std::chrono::duration<double>(Clock::now() - start).count();
    auto out = open_out(path);
    out << j.dump(2) << '\n';
  }
};

fs::path manifest_or(const Common& c, const fs::path& fallback) {
  return c.manifest_path.empty() ? fallback : fs::path(c.manifest_path);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  Common common;
  std::string out_dir;
  std::optional<Index> n1, n2;
  std::optional<int> rank;
  std::optional<double> rate;
  std::string noise;
};

int run_simulate(const SimulateArgs& a, std::span<const std::string> args, std::ostream& out) {
  ExperimentConfig cfg = load_config(a.common);
  if (a.n1) cfg.scenario.n1 = *a.n1;
  if (a.n2) cfg.scenario.n2 = *a.n2;
  if (a.rank) cfg.scenario.rank = *a.rank;
  if (a.rate) cfg.scenario.observe_rate = *a.rate;
  if (!a.noise.empty()) cfg.scenario.noise.kind = parse_noise_kind(a.noise);
  cfg.scenario.validate();

  Manifest m{"simulate", args};
  const auto inst = make_instance(cfg, cfg.base_seed);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  io::write_matrix(dir / "A_star.txt", inst.a_star);
  io::write_observations(dir / "train.txt", inst.train);
  io::write_observations(dir / "valid.txt", inst.valid);
  m.output(dir / "A_star.txt");
  m.output(dir / "train.txt");
  m.output(dir / "valid.txt");
  m.config = config_json(cfg);
  m.seeds = Json{{"seed", cfg.base_seed},
                 {"a_star", derive_seed(cfg.base_seed, 10)},
                 {"train", derive_seed(cfg.base_seed, 11)},
                 {"valid", derive_seed(cfg.base_seed, 12)}};
  m.extra["noise_median"] = cfg.scenario.noise_median();
  m.write(manifest_or(a.common, dir / "manifest.json"));
  out << "wrote " << inst.train.size() << " training and " << inst.valid.size() << " validation entries to "
      << dir.string() << '\n';
  return kExitOk;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  Common common;
  std::string method;
  std::optional<double> lambda;
  std::string obs, valid, out;
  std::optional<Index> block_rows, block_cols;
  std::string trace;
};

int run_fit(const FitArgs& a, std::span<const std::string> args, std::ostream& out) {
  ExperimentConfig cfg = load_config(a.common);
  const Method method = parse_method(a.method);
  const ObservationSet train = io::read_observations(a.obs);
  const std::vector<double> y = train.values();
  std::optional<ObservationSet> valid;
  if (!a.valid.empty()) valid = io::read_observations(a.valid);
  if (valid && (valid->rows() != train.rows() || valid->cols() != train.cols())) {
    throw InvalidInput("validation set dimensions differ from the training set");
  }
  cfg.block_rows = a.block_rows.value_or(std::min(cfg.block_rows, train.rows()));
  cfg.block_cols = a.block_cols.value_or(std::min(cfg.block_cols, train.cols()));
  if (a.lambda && *a.lambda < 0.0) throw InvalidInput("--lambda must be non-negative");

  Manifest m{"fit", args};
  m.extra["method"] = std::string(to_string(method));
  MatrixEstimate est;
  double chosen = a.lambda.value_or(0.0);
  const auto need_lambda = [&] {
    if (!a.lambda && !valid) throw InvalidInput("fit: give --lambda or --valid for tuning");
  };

  if (method == Method::mht) {
    need_lambda();
    if (a.lambda) {
      QuadSolverConfig qc = cfg.quad;
      qc.lambda = *a.lambda;
      est = fit_quadratic_nuclear(train, y, qc);
    } else {
      auto t = tune_mht(train, y, *valid, cfg);
      chosen = t.best_lambda;
      est = std::move(t.best_estimate);
    }
  } else if (method == Method::acl) {
    need_lambda();
    if (a.lambda) {
      AdmmConfig ac = cfg.admm;
      ac.lambda = *a.lambda;
      est = fit_lad_nuclear(train, y, ac);
    } else {
      auto t = tune_acl(train, y, *valid, cfg);
      chosen = t.best_lambda;
      est = std::move(t.best_estimate);
    }
  } else {
    const auto p = make_partition(train.rows(), train.cols(), cfg.block_rows, cfg.block_cols);
    if (a.lambda) {
      BlockedFitOptions opts;
      opts.threads = cfg.threads;
      est = fit_bladmc(train, y, p, std::vector<double>{*a.lambda}, cfg.admm, opts).estimate;
    } else if (valid) {
      auto t = tune_bladmc(train, y, *valid, cfg, cfg.threads);
      chosen = t.tune.best_lambda;
      est = std::move(t.tune.best_estimate);
    } else {
      BlockedFitOptions opts;
      opts.threads = cfg.threads;
      auto res = fit_bladmc(train, y, p, TheoryLambdaRule{}, cfg.admm, opts);
      Json lams = Json::array();
      for (const auto& b : res.blocks) lams.push_back(b.lambda);
      m.extra["block_lambdas"] = lams;
      est = std::move(res.estimate);
    }
    if (method == Method::dladmc) {
      RefinementConfig rc = cfg.refine;
      rc.block_rows = cfg.block_rows;
      rc.block_cols = cfg.block_cols;
      if (!valid) rc.lambda_rule = ScheduleLambda{};
      RefineContext ctx;
      if (valid) ctx.validation = &*valid;
      auto res = dladmc(train, y, est, rc, cfg.quad, ctx);
      m.extra["initial_lambda"] = chosen;
      m.extra["refinement_iterations"] = res.trace.size();
      chosen = res.trace.back().lambda_t;
      if (!a.trace.empty()) {
        auto t = open_out(a.trace);
        write_trace_csv(t, res.trace);
        m.output(a.trace);
      }
      est = std::move(res.estimate);
    }
  }

  io::write_matrix(a.out, est.values);
  m.output(a.out);
  m.config = config_json(cfg);
  m.extra["lambda"] = chosen;
  m.extra["converged"] = est.info.converged;
  m.extra["warnings"] = est.info.warnings;
  m.write(manifest_or(a.common, fs::path(a.out + ".manifest.json")));
  out << to_string(method) << ": lambda " << chosen << ", rank " << numeric_rank(est) << ", wrote " << a.out << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------ refine

struct RefineArgs {
  Common common;
  std::string initial, obs, valid, truth, out = "refined.txt", trace = "trace.csv";
  std::optional<int> T, r_star;
  std::optional<double> c1, c2, lambda_C;
  std::optional<Index> block_rows, block_cols;
};

int run_refine(const RefineArgs& a, std::span<const std::string> args, std::ostream& out) {
  ExperimentConfig cfg = load_config(a.common);
  const ObservationSet train = io::read_observations(a.obs);
  const std::vector<double> y = train.values();
  const Eigen::MatrixXd initial = io::read_matrix(a.initial);
  if (initial.rows() != train.rows() || initial.cols() != train.cols()) {
    throw InvalidInput("initial matrix dimensions differ from the observation set");
  }
  RefinementConfig rc = cfg.refine;
  rc.block_rows = a.block_rows.value_or(train.rows());
  rc.block_cols = a.block_cols.value_or(train.cols());
  if (a.T) rc.T_max = *a.T;
  if (a.r_star) rc.r_star = *a.r_star;
  if (a.c1) rc.c1 = *a.c1;
  if (a.c2) rc.c2 = *a.c2;

  std::optional<ObservationSet> valid;
  std::optional<Eigen::MatrixXd> truth;
  if (!a.valid.empty()) valid = io::read_observations(a.valid);
  if (!a.truth.empty()) truth = io::read_matrix(a.truth);
  if (!valid || a.lambda_C) rc.lambda_rule = ScheduleLambda{a.lambda_C.value_or(1.0)};
  RefineContext ctx;
  if (valid) ctx.validation = &*valid;
  if (truth) ctx.ground_truth = &*truth;

  Manifest m{"refine", args};
  auto res = dladmc(train, y, MatrixEstimate(initial), rc, cfg.quad, ctx);
  io::write_matrix(a.out, res.estimate.values);
  m.output(a.out);
  {
    auto t = open_out(a.trace);
    write_trace_csv(t, res.trace);
  }
  m.output(a.trace);
  cfg.refine = rc;
  m.config = config_json(cfg);
  m.extra["initial_rate"] = res.initial_rate;
  m.extra["iterations"] = res.trace.size();
  m.write(manifest_or(a.common, fs::path(a.out + ".manifest.json")));
  out << "refined in " << res.trace.size() << " iterations, wrote " << a.out << " and " << a.trace << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
  Common common;
  std::string methods;
  std::optional<int> reps;
  std::string out = "report.csv", json;
  bool timing = false;
};

int run_bench(const BenchArgs& a, std::span<const std::string> args, std::ostream& out) {
  ExperimentConfig cfg = load_config(a.common);
  if (!a.methods.empty()) cfg.methods = parse_methods(a.methods);
  if (a.reps) cfg.replications = *a.reps;
  cfg.validate();

  Manifest m{"bench", args};
  const auto report = run_experiment(cfg);
  {
    auto f = open_out(a.out);
    write_report_csv(f, report, a.timing);
  }
  m.output(a.out);
  const fs::path json_path = a.json.empty() ? fs::path(a.out).replace_extension(".json") : fs::path(a.json);
  {
    auto f = open_out(json_path);
    f << report_json(report, cfg, a.timing) << '\n';
  }
  m.output(json_path);
  m.config = config_json(cfg);
  Json reps = Json::array();
  for (int r = 0; r < cfg.replications; ++r) reps.push_back(cfg.base_seed + static_cast<std::uint64_t>(r));
  m.seeds = Json{{"base_seed", cfg.base_seed}, {"replication_seeds", reps}};
  m.write(manifest_or(a.common, fs::path(a.out).replace_extension(".manifest.json")));
  write_report_csv(out, report, false);
  return kExitOk;
}

// ------------------------------------------------------------------ ingest

struct IngestArgs {
  Common common;
  std::string ratings, train, test, out_dir;
  int min_count = 20;
  std::string filter_mode = "fixed_point";
  double outliers = 0.0;
  bool outliers_first = false;
  int folds = 0;
  bool biscale = false;
};

FilterMode parse_filter_mode(const std::string& s) {
  if (s == "fixed_point") return FilterMode::fixed_point;
  if (s == "single_pass") return FilterMode::single_pass;
  if (s == "rows_then_cols") return FilterMode::rows_then_cols;
  throw InvalidInput("unknown filter mode '" + s + "'");
}

void write_index(const fs::path& p, const std::map<std::int64_t, Index>& index) {
  auto f = open_out(p);
  for (const auto& [id, i] : index) f << i << ' ' << id << '\n';
}

void write_biscaled(const fs::path& dir, const std::string& stem, const ObservationSet& obs, Manifest& m) {
  const auto y = obs.values();
  const auto res = biscale(obs, y);
  std::vector<Entry> scaled = obs.entries();
  for (std::size_t k = 0; k < scaled.size(); ++k) scaled[k].value = res.scaled[k];
  io::write_observations(dir / (stem + "_scaled.txt"), ObservationSet(obs.rows(), obs.cols(), std::move(scaled)));
  auto f = open_out(dir / (stem + "_biscale.txt"));
  f << "# kind index center scale\n";
  for (Index i = 0; i < obs.rows(); ++i)
    f << "row " << i << ' ' << io::format_double(res.params.row_center(i)) << ' '
      << io::format_double(res.params.row_scale(i)) << '\n';
  for (Index j = 0; j < obs.cols(); ++j)
    f << "col " << j << ' ' << io::format_double(res.params.col_center(j)) << ' '
      << io::format_double(res.params.col_scale(j)) << '\n';
  m.output(dir / (stem + "_scaled.txt"));
  m.output(dir / (stem + "_biscale.txt"));
  m.extra[stem + "_biscale"] = Json{{"iterations", res.params.iterations}, {"converged", res.params.converged}};
}

int run_ingest(const IngestArgs& a, std::span<const std::string> args, std::ostream& out) {
  const bool provider = !a.train.empty() || !a.test.empty();
  if (provider == !a.ratings.empty()) throw InvalidInput("ingest: give either --ratings or both --train and --test");
  if (provider && (a.train.empty() || a.test.empty())) throw InvalidInput("ingest: --train and --test go together");
  if (a.min_count < 0) throw InvalidInput("--min-count must be non-negative");
  const FilterMode mode = parse_filter_mode(a.filter_mode);
  const std::uint64_t seed = a.common.seed;

  Manifest m{"ingest", args};
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  Json summary;

  std::optional<ProviderSplit> split;
  RatingsTable table;
  if (provider) {
    split = load_provider_split(a.train, a.test);
    table = split->full;
  } else {
    table = parse_movielens(fs::path(a.ratings));
  }
  summary["raw"] = Json{{"ratings", table.size()}, {"users", table.n_users()}, {"items", table.n_items()}};

  const std::uint64_t outlier_seed = derive_seed(seed, 20);
  auto inject = [&](const RatingsTable& t) { return a.outliers > 0.0 ? inject_outliers(t, a.outliers, outlier_seed) : t; };
  if (a.outliers_first) table = inject(table);
  RatingsTable filtered = filter_min_counts(table, a.min_count, mode);
  if (!a.outliers_first) filtered = inject(filtered);
  summary["filtered"] =
      Json{{"ratings", filtered.size()}, {"users", filtered.n_users()}, {"items", filtered.n_items()}};

  io::write_observations(dir / "ratings.txt", filtered.to_observations());
  write_index(dir / "users.txt", filtered.user_index());
  write_index(dir / "items.txt", filtered.item_index());
  m.output(dir / "ratings.txt");
  m.output(dir / "users.txt");
  m.output(dir / "items.txt");

  if (split) {
    // Outliers affect the training ratings only; test ratings stay as given.
    const auto restricted = restrict_split(*split, filtered);
    std::vector<Rating> train = restricted.train;
    if (a.outliers > 0.0) train = inject_outliers(RatingsTable(train), a.outliers, outlier_seed).ratings();
    const auto train_obs = filtered.to_observations(train);
    const auto test_obs = filtered.to_observations(restricted.test);
    io::write_observations(dir / "train.txt", train_obs);
    io::write_observations(dir / "test.txt", test_obs);
    m.output(dir / "train.txt");
    m.output(dir / "test.txt");
    summary["train"] = train_obs.size();
    summary["test"] = test_obs.size();
    if (a.biscale) write_biscaled(dir, "train", train_obs, m);
  } else if (a.biscale) {
    write_biscaled(dir, "ratings", filtered.to_observations(), m);
  }

  if (a.folds > 0) {
    const auto obs = filtered.to_observations();
    const auto folds = split_folds(obs.size(), a.folds, derive_seed(seed, 21));
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<Entry> e;
      e.reserve(folds[f].size());
      for (auto k : folds[f]) e.push_back(obs[k]);
      const fs::path p = dir / ("fold_" + std::to_string(f) + ".txt");
      io::write_observations(p, ObservationSet(obs.rows(), obs.cols(), std::move(e)));
      m.output(p);
    }
  }

  m.config = Json{{"min_count", a.min_count},
                  {"filter_mode", a.filter_mode},
                  {"outliers", a.outliers},
                  {"outliers_first", a.outliers_first},
                  {"folds", a.folds},
                  {"biscale", a.biscale}};
  m.seeds = Json{{"seed", seed}, {"outliers", outlier_seed}, {"folds", derive_seed(seed, 21)}};
  m.extra["summary"] = summary;
  m.write(manifest_or(a.common, dir / "manifest.json"));
  out << "filtered " << summary["raw"]["ratings"] << " ratings to " << filtered.size() << " (" << filtered.n_users()
      << " x " << filtered.n_items() << ")\n";
  return kExitOk;
}

}  // namespace

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed median matrix completion"};
  app.name("dladmc");
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "draw a synthetic target, training and validation sets");
  add_common(simulate, sim.common);
  simulate->add_option("--out-dir", sim.out_dir, "output directory")->required();
  simulate->add_option("--n1", sim.n1);
  simulate->add_option("--n2", sim.n2);
  simulate->add_option("--rank", sim.rank);
  simulate->add_option("--rate", sim.rate, "observation rate in (0, 1]");
  simulate->add_option("--noise", sim.noise, "normal, cauchy, exponential, student_t or s1..s4");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit one estimator to an observation file");
  add_common(fit_cmd, fit.common);
  fit_cmd->add_option("--method", fit.method, "dladmc, bladmc, acl (ladmc) or mht (quad)")->required();
  fit_cmd->add_option("--lambda", fit.lambda, "fixed regularization; otherwise tuned on --valid");
  fit_cmd->add_option("--obs", fit.obs, "training observations")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--valid", fit.valid, "validation observations")->check(CLI::ExistingFile);
  fit_cmd->add_option("--out", fit.out, "estimate matrix file")->required();
  fit_cmd->add_option("--block-rows", fit.block_rows);
  fit_cmd->add_option("--block-cols", fit.block_cols);
  fit_cmd->add_option("--trace", fit.trace, "refinement trace CSV (dladmc)");

  RefineArgs ref;
  auto* refine = app.add_subcommand("refine", "pseudo-data refinement from an initial estimate");
  add_common(refine, ref.common);
  refine->add_option("--initial", ref.initial, "initial estimate matrix")->required()->check(CLI::ExistingFile);
  refine->add_option("--obs", ref.obs, "training observations")->required()->check(CLI::ExistingFile);
  refine->add_option("--valid", ref.valid, "validation set for lambda_t")->check(CLI::ExistingFile);
  refine->add_option("--truth", ref.truth, "reference matrix for trace metrics")->check(CLI::ExistingFile);
  refine->add_option("--T", ref.T, "maximum iterations");
  refine->add_option("--r-star", ref.r_star);
  refine->add_option("--c1", ref.c1);
  refine->add_option("--c2", ref.c2);
  refine->add_option("--lambda-C", ref.lambda_C, "scheduled lambda constant");
  refine->add_option("--block-rows", ref.block_rows, "block rows of the initial estimate");
  refine->add_option("--block-cols", ref.block_cols, "block columns of the initial estimate");
  refine->add_option("--out", ref.out, "refined matrix file")->capture_default_str();
  refine->add_option("--trace", ref.trace, "trace CSV")->capture_default_str();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "replicated simulation study");
  add_common(bench_cmd, bench.common);
  bench_cmd->add_option("--methods", bench.methods, "comma separated");
  bench_cmd->add_option("--reps", bench.reps, "replications");
  bench_cmd->add_option("--out", bench.out, "CSV report")->capture_default_str();
  bench_cmd->add_option("--json", bench.json, "JSON report (default: CSV path with .json)");
  bench_cmd->add_flag("--timing", bench.timing, "include wall-clock columns");

  IngestArgs ing;
  auto* ingest = app.add_subcommand("ingest", "MovieLens preprocessing");
  add_common(ingest, ing.common);
  ingest->add_option("--ratings", ing.ratings, "ratings file (u.data style)")->check(CLI::ExistingFile);
  ingest->add_option("--train", ing.train, "provider training split")->check(CLI::ExistingFile);
  ingest->add_option("--test", ing.test, "provider test split")->check(CLI::ExistingFile);
  ingest->add_option("--out-dir", ing.out_dir)->required();
  ingest->add_option("--min-count", ing.min_count, "minimum ratings per user and item")->capture_default_str();
  ingest->add_option("--filter-mode", ing.filter_mode, "fixed_point, single_pass or rows_then_cols")->capture_default_str();
  ingest->add_option("--outliers", ing.outliers, "fraction of 5-ratings turned into 1")->capture_default_str();
  ingest->add_flag("--outliers-first", ing.outliers_first, "inject outliers before filtering");
  ingest->add_option("--folds", ing.folds, "write this many cross-validation folds");
  ingest->add_flag("--biscale", ing.biscale, "also write bi-scaled observations");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim, args, out);
    if (fit_cmd->parsed()) return run_fit(fit, args, out);
    if (refine->parsed()) return run_refine(ref, args, out);
    if (bench_cmd->parsed()) return run_bench(bench, args, out);
    if (ingest->parsed()) return run_ingest(ing, args, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ParseError& e) {
    err << "parse error (line " << e.line() << "): " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace dladmc::cli
