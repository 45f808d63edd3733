#include "dladmc/error.hpp"
#include "dladmc/partition.hpp"
#include "dladmc/synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <tuple>

using namespace dladmc;
using Eigen::MatrixXd;

TEST(Partition, PaperLayout) {
  const auto p = make_partition(400, 400, 200, 200);
  EXPECT_EQ(p.block_count(), 4u);
  for (std::size_t id = 0; id < 4; ++id) {
    const auto b = p.block(id);
    EXPECT_EQ(b.rows.size(), 200);
    EXPECT_EQ(b.cols.size(), 200);
  }
}

TEST(Partition, SingleBlockAndRaggedEdges) {
  EXPECT_EQ(make_partition(7, 9, 7, 9).block_count(), 1u);
  const auto p = make_partition(5, 4, 2, 2);
  EXPECT_EQ(p.row_ranges(), (std::vector<IndexRange>{{0, 2}, {2, 4}, {4, 5}}));
  EXPECT_EQ(p.block_count(), 6u);
  EXPECT_EQ(p.block_of(4, 3), 5u);
  EXPECT_EQ(p.block(5).row_block, 2u);
  EXPECT_EQ(p.block(5).col_block, 1u);
}

TEST(Partition, InvalidShapesThrow) {
  EXPECT_THROW(make_partition(4, 4, 0, 2), InvalidInput);
  EXPECT_THROW(make_partition(4, 4, 5, 2), InvalidInput);
  const auto p = make_partition(4, 4, 2, 2);
  EXPECT_THROW(p.block(4), RangeError);
  EXPECT_THROW(p.block_of(4, 0), RangeError);
}

TEST(Scatter, LocalIndexArithmetic) {
  const auto p = make_partition(400, 400, 200, 200);
  ObservationSet obs(400, 400, {{250, 100, 1.0}});
  const auto y = obs.values();
  const auto blocks = scatter(obs, y, p);
  ASSERT_EQ(blocks.size(), 4u);
  const auto& b = blocks[2];
  EXPECT_EQ(b.bounds.row_block, 1u);
  EXPECT_EQ(b.bounds.col_block, 0u);
  ASSERT_EQ(b.obs.size(), 1u);
  EXPECT_EQ(b.obs[0].row, 50);
  EXPECT_EQ(b.obs[0].col, 100);
  EXPECT_TRUE(blocks[0].obs.empty());
}

TEST(Scatter, RoundTripPreservesMultiset) {
  SyntheticScenario sc;
  sc.n1 = 23;
  sc.n2 = 17;
  sc.observe_rate = 0.8;
  sc.noise.seed = 6;
  const auto obs = sample_observations(gen_lowrank(23, 17, 2, 1), sc);
  const auto y = obs.values();
  const auto p = make_partition(23, 17, 5, 6);
  const auto blocks = scatter(obs, y, p);
  std::vector<std::tuple<Index, Index, double>> orig, back;
  for (const auto& e : obs.entries()) orig.emplace_back(e.row, e.col, e.value);
  std::vector<bool> seen(obs.size(), false);
  for (const auto& b : blocks) {
    for (std::size_t k = 0; k < b.obs.size(); ++k) {
      const auto& e = b.obs[k];
      back.emplace_back(e.row + b.bounds.rows.begin, e.col + b.bounds.cols.begin, b.responses[k]);
      const auto src = b.source_index[k];
      EXPECT_FALSE(seen[src]);
      seen[src] = true;
      EXPECT_EQ(obs[src].row, e.row + b.bounds.rows.begin);
    }
  }
  std::sort(orig.begin(), orig.end());
  std::sort(back.begin(), back.end());
  EXPECT_EQ(orig, back);
}

TEST(Gather, RoundTripAndZeros) {
  const MatrixXd a = gen_lowrank(11, 9, 3, 4);
  const auto p = make_partition(11, 9, 4, 5);
  std::vector<MatrixEstimate> blocks, zeros;
  for (std::size_t id = 0; id < p.block_count(); ++id) {
    const auto b = p.block(id);
    blocks.emplace_back(MatrixXd(a.block(b.rows.begin, b.cols.begin, b.rows.size(), b.cols.size())));
    zeros.emplace_back(MatrixXd::Zero(b.rows.size(), b.cols.size()));
  }
  EXPECT_EQ(gather(blocks, p).values, a);
  EXPECT_EQ(gather(zeros, p).values, MatrixXd::Zero(11, 9));
  blocks[0] = MatrixEstimate(MatrixXd::Zero(1, 1));
  EXPECT_THROW(gather(blocks, p), InvalidInput);
}

TEST(Gather, RankBoundedBySumOfBlockRanks) {
  const auto p = make_partition(30, 30, 15, 15);
  std::vector<MatrixEstimate> blocks;
  int total = 0;
  for (std::size_t id = 0; id < p.block_count(); ++id) {
    blocks.emplace_back(gen_lowrank(15, 15, 2, 40 + id));
    total += numeric_rank(blocks.back().values);
  }
  const int r = numeric_rank(gather(blocks, p).values);
  EXPECT_LE(r, total);
  EXPECT_GT(r, 2);
}

TEST(TheoryLambda, Formula) {
  TheoryLambdaRule rule{2.0};
  EXPECT_DOUBLE_EQ(rule(200, 100, 5000), 2.0 * std::sqrt(std::log(300.0) / (100.0 * 5000.0)));
}

namespace {

struct Instance {
  ObservationSet obs;
  std::vector<double> y;
};

Instance make_instance(Index n, std::uint64_t seed) {
  SyntheticScenario sc;
  sc.n1 = sc.n2 = n;
  sc.observe_rate = 0.4;
  sc.noise.seed = seed;
  auto obs = sample_observations(gen_lowrank(n, n, 2, seed), sc);
  auto y = obs.values();
  return {std::move(obs), std::move(y)};
}

}  // namespace

TEST(FitBladmc, SingleBlockMatchesFullFit) {
  const auto inst = make_instance(20, 3);
  AdmmConfig cfg;
  cfg.lambda = 0.05;
  const auto p = make_partition(20, 20, 20, 20);
  const auto blocked = fit_bladmc(inst.obs, inst.y, p, std::vector<double>{0.05}, cfg);
  const auto full = fit_lad_nuclear(inst.obs, inst.y, cfg);
  EXPECT_LT((blocked.estimate.values - full.values).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FitBladmc, BitwiseIndependentOfThreadCount) {
  const auto inst = make_instance(30, 8);
  const auto p = make_partition(30, 30, 10, 15);
  AdmmConfig cfg;
  BlockedFitOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = fit_bladmc(inst.obs, inst.y, p, TheoryLambdaRule{0.5}, cfg, one);
  const auto b = fit_bladmc(inst.obs, inst.y, p, TheoryLambdaRule{0.5}, cfg, four);
  ASSERT_EQ(a.estimate.values.size(), b.estimate.values.size());
  EXPECT_EQ(0, std::memcmp(a.estimate.values.data(), b.estimate.values.data(),
                           sizeof(double) * a.estimate.values.size()));
}

TEST(FitBladmc, EmptyBlockFallsBackToZeros) {
  ObservationSet obs(4, 4, {{0, 0, 1.0}, {1, 1, 2.0}, {0, 1, -1.0}});
  const auto y = obs.values();
  const auto p = make_partition(4, 4, 2, 2);
  const auto fit = fit_bladmc(obs, y, p, std::vector<double>{0.01}, AdmmConfig{});
  EXPECT_TRUE(fit.blocks[3].skipped);
  EXPECT_EQ(fit.estimate.values.bottomRightCorner(2, 2), MatrixXd::Zero(2, 2));
  EXPECT_FALSE(fit.estimate.info.warnings.empty());
}

TEST(FitBladmc, LambdaVectorSizeMustMatch) {
  const auto inst = make_instance(10, 1);
  const auto p = make_partition(10, 10, 5, 5);
  EXPECT_THROW(fit_bladmc(inst.obs, inst.y, p, std::vector<double>{0.1, 0.2}, AdmmConfig{}), InvalidInput);
}
