#include "dladmc/error.hpp"
#include "dladmc/experiment.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace dladmc;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.scenario.n1 = 24;
  cfg.scenario.n2 = 20;
  cfg.scenario.rank = 2;
  cfg.scenario.observe_rate = 0.5;
  cfg.block_rows = 12;
  cfg.block_cols = 10;
  cfg.grid_points = 5;
  cfg.grid_low_ratio = 1e-2;
  cfg.replications = 3;
  cfg.refine.T_max = 2;
  cfg.refine.lambda_rule = ValidationLambda{5, 1e-2, 0};
  return cfg;
}

std::string csv_of(const ExperimentReport& r) {
  std::ostringstream out;
  write_report_csv(out, r);
  return out.str();
}

}  // namespace

TEST(Methods, Parse) {
  EXPECT_EQ(parse_method("ladmc"), Method::acl);
  EXPECT_EQ(parse_method("quad"), Method::mht);
  EXPECT_EQ(parse_methods("dladmc,bladmc,mht"),
            (std::vector<Method>{Method::dladmc, Method::bladmc, Method::mht}));
  EXPECT_THROW(parse_method("svd"), InvalidInput);
  EXPECT_THROW(parse_methods(""), InvalidInput);
}

TEST(Config, ParseAndApply) {
  std::istringstream in(
      "# scenario\n"
      "n1 = 50\n"
      "n2=40\n"
      "noise = cauchy   # S2\n"
      "methods = dladmc,mht\n"
      "partition = 50 40 25 20\n"
      "refine_lambda_rule = schedule\n"
      "refine_lambda_C = 2.5\n"
      "seed = 9\n");
  const auto kv = parse_key_values(in);
  const auto cfg = apply_config(ExperimentConfig{}, kv);
  EXPECT_EQ(cfg.scenario.n1, 50);
  EXPECT_EQ(cfg.scenario.n2, 40);
  EXPECT_EQ(cfg.scenario.noise.kind, NoiseKind::cauchy);
  EXPECT_EQ(cfg.methods.size(), 2u);
  EXPECT_EQ(cfg.block_rows, 25);
  EXPECT_EQ(cfg.block_cols, 20);
  EXPECT_EQ(cfg.base_seed, 9u);
  ASSERT_TRUE(std::holds_alternative<ScheduleLambda>(cfg.refine.lambda_rule));
  EXPECT_EQ(std::get<ScheduleLambda>(cfg.refine.lambda_rule).C, 2.5);
}

TEST(Config, Errors) {
  EXPECT_THROW(apply_config(ExperimentConfig{}, {{"bogus", "1"}}), InvalidInput);
  EXPECT_THROW(apply_config(ExperimentConfig{}, {{"n1", "ten"}}), InvalidInput);
  EXPECT_THROW(apply_config(ExperimentConfig{}, {{"partition", "1 2 3"}}), InvalidInput);
  std::istringstream bad("n1 50\n");
  EXPECT_THROW(parse_key_values(bad), ParseError);
}

TEST(Config, DescribeRoundTrips) {
  auto cfg = tiny_config();
  cfg.scenario.noise.kind = NoiseKind::student_t;
  std::map<std::string, std::string> kv;
  for (const auto& [k, v] : describe_config(cfg)) kv[k] = v;
  const auto back = apply_config(ExperimentConfig{}, kv);
  EXPECT_EQ(describe_config(back), describe_config(cfg));
}

TEST(Summarize, StdNeedsTwoValues) {
  std::vector<double> one{2.0};
  EXPECT_FALSE(summarize(one).std.has_value());
  std::vector<double> two{1.0, 3.0};
  const auto s = summarize(two);
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_NEAR(*s.std, std::sqrt(2.0), 1e-12);
}

TEST(Experiment, SingleReplicationOmitsStd) {
  auto cfg = tiny_config();
  cfg.replications = 1;
  cfg.methods = {Method::mht};
  const auto report = run_experiment(cfg);
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_FALSE(report.rows[0].rmse.std.has_value());
  const auto csv = csv_of(report);
  EXPECT_NE(csv.find("mht,S1,1,0,"), std::string::npos);
}

TEST(Experiment, ReportsAreDeterministicAcrossThreadCounts) {
  auto cfg = tiny_config();
  const auto a = run_experiment(cfg);
  cfg.threads = 3;
  const auto b = run_experiment(cfg);
  EXPECT_EQ(csv_of(a), csv_of(b));
  cfg.threads = 1;
  EXPECT_EQ(report_json(a, cfg), report_json(b, cfg));
  ASSERT_EQ(a.rows.size(), 4u);
  for (const auto& row : a.rows) {
    EXPECT_EQ(row.replications, 3);
    EXPECT_EQ(row.failures, 0);
    EXPECT_TRUE(std::isfinite(row.rmse.mean));
  }
  for (const auto& rep : a.replications) EXPECT_FALSE(rep.dladmc_trace.empty());
}

TEST(Experiment, InvalidConfig) {
  auto cfg = tiny_config();
  cfg.block_rows = 100;
  EXPECT_THROW(run_experiment(cfg), InvalidInput);
  cfg = tiny_config();
  cfg.methods.clear();
  EXPECT_THROW(run_experiment(cfg), InvalidInput);
}
