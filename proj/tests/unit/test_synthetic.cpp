#include "dladmc/error.hpp"
#include "dladmc/synthetic.hpp"
#include "dladmc/tuning.hpp"
#include "dladmc/lad_admm.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace dladmc;
using Eigen::MatrixXd;

TEST(GenLowrank, RankAndDeterminism) {
  const MatrixXd a = gen_lowrank(40, 30, 3, 12);
  EXPECT_EQ(numeric_rank(a), 3);
  EXPECT_EQ(a, gen_lowrank(40, 30, 3, 12));
  EXPECT_NE(a, gen_lowrank(40, 30, 3, 13));
}

TEST(GenLowrank, EntryVarianceIsRank) {
  const int r = 3;
  const int draws = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < draws; ++s) {
    const double v = gen_lowrank(1, 1, r, static_cast<std::uint64_t>(s))(0, 0);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double var = sum_sq / draws - mean * mean;
  EXPECT_NEAR(var, r, 0.05 * r);
}

TEST(SampleObservations, CountAndRange) {
  SyntheticScenario sc;
  EXPECT_EQ(sc.sample_count(), 32000u);
  sc.n1 = 30;
  sc.n2 = 20;
  sc.noise.seed = 5;
  const MatrixXd a = gen_lowrank(30, 20, 3, 1);
  const auto obs = sample_observations(a, sc);
  EXPECT_EQ(obs.size(), sc.sample_count());
  const auto again = sample_observations(a, sc);
  for (std::size_t k = 0; k < obs.size(); ++k) {
    EXPECT_EQ(obs[k].row, again[k].row);
    EXPECT_EQ(obs[k].value, again[k].value);
  }
}

TEST(SampleObservations, InvalidScenario) {
  SyntheticScenario sc;
  sc.observe_rate = 0.0;
  EXPECT_THROW(sc.validate(), InvalidInput);
  sc = SyntheticScenario{};
  sc.rank = 0;
  EXPECT_THROW(sc.validate(), InvalidInput);
  sc = SyntheticScenario{};
  EXPECT_THROW(sample_observations(MatrixXd::Zero(3, 3), sc), InvalidInput);
}

namespace {

double median_of(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST(Noise, MonteCarloMoments) {
  const std::size_t n = 100000;
  EXPECT_NEAR(median_of(draw_noise(NoiseKind::cauchy, n, 3)), 0.0, 0.02);
  const auto z = draw_noise(NoiseKind::normal, n, 4);
  double s = 0.0, ss = 0.0;
  for (double x : z) {
    s += x;
    ss += x * x;
  }
  EXPECT_NEAR(std::sqrt(ss / n - (s / n) * (s / n)), 1.0, 0.02);
  EXPECT_NEAR(median_of(draw_noise(NoiseKind::exponential, n, 5)), 0.0, 0.02);
  EXPECT_NEAR(median_of(draw_noise(NoiseKind::exponential, n, 5, false)), std::log(2.0), 0.02);
  EXPECT_NEAR(median_of(draw_noise(NoiseKind::student_t, n, 6)), 0.0, 0.02);
}

TEST(Noise, ParseNames) {
  EXPECT_EQ(parse_noise_kind("cauchy"), NoiseKind::cauchy);
  EXPECT_EQ(parse_noise_kind("s3"), NoiseKind::exponential);
  EXPECT_EQ(parse_noise_kind("S4"), NoiseKind::student_t);
  EXPECT_THROW(parse_noise_kind("laplace"), InvalidInput);
  SyntheticScenario sc;
  sc.noise.kind = NoiseKind::exponential;
  sc.center_median = false;
  EXPECT_DOUBLE_EQ(sc.noise_median(), std::log(2.0));
}

TEST(DeriveSeed, DistinctStreams) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(LogGrid, ShapeAndOrder) {
  const auto g = log_lambda_grid(2.0, 20, 1e-4);
  ASSERT_EQ(g.size(), 20u);
  EXPECT_DOUBLE_EQ(g.front(), 2.0);
  EXPECT_NEAR(g.back(), 2e-4, 1e-15);
  for (std::size_t k = 1; k < g.size(); ++k) EXPECT_LT(g[k], g[k - 1]);
  EXPECT_EQ(log_lambda_grid(3.0, 1).size(), 1u);
  EXPECT_THROW(log_lambda_grid(-1.0), InvalidInput);
}

TEST(TuneLambda, SinglePointGrid) {
  ObservationSet valid(2, 2, {{0, 0, 1.0}});
  std::vector<double> grid{0.3};
  const auto res = tune_lambda([](double) { return MatrixEstimate(MatrixXd::Zero(2, 2)); }, grid, valid);
  EXPECT_EQ(res.best_lambda, 0.3);
  EXPECT_EQ(res.validation_losses.size(), 1u);
}

TEST(TuneLambda, TiesResolveToSmallestLambda) {
  ObservationSet valid(2, 2, {{0, 0, 1.0}});
  std::vector<double> grid{0.5, 0.2, 0.1};
  const auto res = tune_lambda([](double) { return MatrixEstimate(MatrixXd::Zero(2, 2)); }, grid, valid);
  EXPECT_EQ(res.best_lambda, 0.1);
}

TEST(TuneLambda, FailuresAreRecorded) {
  ObservationSet valid(2, 2, {{0, 0, 1.0}});
  std::vector<double> grid{0.5, 0.2};
  const auto res = tune_lambda(
      [](double l) {
        if (l > 0.3) throw NumericalError("boom");
        return MatrixEstimate(MatrixXd::Ones(2, 2));
      },
      grid, valid);
  EXPECT_EQ(res.best_lambda, 0.2);
  EXPECT_TRUE(std::isnan(res.validation_losses[0]));
  EXPECT_EQ(res.failures.size(), 1u);
  EXPECT_THROW(tune_lambda([](double) -> MatrixEstimate { throw NumericalError("x"); }, grid, valid),
               NumericalError);
  EXPECT_THROW(tune_lambda([](double) { return MatrixEstimate(); }, std::span<const double>{}, valid),
               InvalidInput);
}

TEST(TuneLambda, SelectsArgminOnS1Instance) {
  const MatrixXd a = gen_lowrank(50, 50, 3, 2);
  SyntheticScenario sc;
  sc.n1 = sc.n2 = 50;
  sc.noise.seed = 3;
  const auto train = sample_observations(a, sc);
  sc.noise.seed = 4;
  const auto valid = sample_observations(a, sc);
  const auto y = train.values();
  const auto grid = log_lambda_grid(lad_lambda_max(train, y), 8, 1e-2);
  AdmmConfig cfg;
  const auto res = tune_lambda(
      [&](double l) {
        AdmmConfig c = cfg;
        c.lambda = l;
        return fit_lad_nuclear(train, y, c);
      },
      grid, valid);
  ASSERT_EQ(res.validation_losses.size(), grid.size());
  for (double loss : res.validation_losses) EXPECT_LE(res.validation_losses[res.best_index], loss);
  EXPECT_EQ(res.best_lambda, grid[res.best_index]);
}
