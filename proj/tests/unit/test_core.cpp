#include "dladmc/core.hpp"
#include "dladmc/error.hpp"
#include "dladmc/io.hpp"
#include "dladmc/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

using namespace dladmc;
using Eigen::MatrixXd;

TEST(EntryOf, PicksCanonicalEntry) {
  const MatrixXd id = MatrixXd::Identity(2, 2);
  EXPECT_EQ(entry_of(0, 0, id), 1.0);
  EXPECT_EQ(entry_of(0, 1, id), 0.0);
  MatrixXd a = MatrixXd::Zero(3, 4);
  a(2, 3) = 3.7;
  EXPECT_EQ(entry_of(2, 3, a), 3.7);
  EXPECT_EQ(entry_of(2, 3, MatrixEstimate(a)), 3.7);
}

TEST(EntryOf, OutOfRangeThrows) {
  const MatrixXd a = MatrixXd::Zero(2, 2);
  EXPECT_THROW(entry_of(2, 0, a), RangeError);
  EXPECT_THROW(entry_of(0, -1, a), RangeError);
}

TEST(ObservationSet, RejectsBadInput) {
  EXPECT_THROW(ObservationSet(0, 3), InvalidInput);
  EXPECT_THROW(ObservationSet(2, 2, {{2, 0, 1.0}}), RangeError);
  ObservationSet obs(2, 2);
  EXPECT_THROW(obs.push_back({0, 5, 1.0}), RangeError);
  obs.push_back({1, 1, 4.0});
  EXPECT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs.values(), std::vector<double>{4.0});
}

TEST(EvalLoss, Examples) {
  const MatrixXd a = MatrixXd::Zero(2, 2);
  ObservationSet obs(2, 2, {{0, 0, 0.0}, {1, 1, 0.0}});
  std::vector<double> zero{0.0, 0.0};
  EXPECT_EQ(eval_loss(obs, zero, a, Loss::absolute), 0.0);
  EXPECT_EQ(eval_loss(obs, zero, a, Loss::quadratic), 0.0);
  std::vector<double> pm{1.0, -1.0};
  EXPECT_DOUBLE_EQ(eval_loss(obs, pm, a, Loss::absolute), 1.0);
  EXPECT_DOUBLE_EQ(eval_loss(obs, pm, a, Loss::quadratic), 1.0);
}

TEST(EvalLoss, SizeMismatchThrows) {
  ObservationSet obs(2, 2, {{0, 0, 0.0}});
  std::vector<double> y{1.0, 2.0};
  EXPECT_THROW(eval_loss(obs, y, MatrixXd::Zero(2, 2), Loss::absolute), InvalidInput);
}

TEST(Metrics, Examples) {
  const MatrixXd ref = gen_lowrank(6, 5, 2, 3);
  auto m = metrics(MatrixEstimate(ref), ref);
  EXPECT_EQ(m.rmse, 0.0);
  EXPECT_EQ(m.mae, 0.0);
  EXPECT_EQ(m.rank, 2);
  m = metrics(MatrixEstimate(MatrixXd(ref.array() + 1.0)), ref);
  EXPECT_NEAR(m.rmse, 1.0, 1e-12);
  EXPECT_NEAR(m.mae, 1.0, 1e-12);
}

TEST(Metrics, HeldOutEntries) {
  MatrixXd a = MatrixXd::Zero(2, 2);
  ObservationSet test(2, 2, {{0, 0, 2.0}, {1, 0, -2.0}});
  auto m = metrics(MatrixEstimate(a), test);
  EXPECT_DOUBLE_EQ(m.rmse, 2.0);
  EXPECT_DOUBLE_EQ(m.mae, 2.0);
}

TEST(NumericRank, Examples) {
  Eigen::VectorXd d(3);
  d << 3.0, 1.0, 1e-12;
  EXPECT_EQ(numeric_rank(MatrixXd(d.asDiagonal()), 1e-6), 2);
  EXPECT_EQ(numeric_rank(MatrixXd::Zero(4, 4)), 0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) EXPECT_EQ(numeric_rank(gen_lowrank(30, 20, 3, seed)), 3);
}

TEST(NumericRank, ToleranceMustLieInUnitInterval) {
  Eigen::VectorXd s(2);
  s << 1.0, 0.5;
  EXPECT_THROW(numeric_rank(s, 0.0), InvalidInput);
  EXPECT_THROW(numeric_rank(s, 1.0), InvalidInput);
}

TEST(NumericRank, InvariantUnderScaling) {
  const MatrixXd a = gen_lowrank(25, 18, 4, 11);
  for (double c : {1e-3, 0.5, 7.0, 1e4}) EXPECT_EQ(numeric_rank(MatrixXd(c * a)), 4);
}

TEST(Metrics, InvariantUnderEntryPermutation) {
  const MatrixXd ref = gen_lowrank(10, 8, 2, 5);
  const MatrixXd est = ref + gen_lowrank(10, 8, 1, 6);
  Eigen::PermutationMatrix<Eigen::Dynamic> pr(10), pc(8);
  pr.setIdentity();
  pc.setIdentity();
  std::swap(pr.indices()[0], pr.indices()[7]);
  std::swap(pc.indices()[2], pc.indices()[5]);
  const auto m1 = metrics(MatrixEstimate(est), ref);
  const auto m2 = metrics(MatrixEstimate(MatrixXd(pr * est * pc)), MatrixXd(pr * ref * pc));
  EXPECT_NEAR(m1.rmse, m2.rmse, 1e-12);
  EXPECT_NEAR(m1.mae, m2.mae, 1e-12);
  EXPECT_EQ(m1.rank, m2.rank);
}

TEST(Io, ObservationRoundTrip) {
  ObservationSet obs(3, 4, {{0, 0, 0.1}, {2, 3, -1.0 / 3.0}, {2, 3, 1e-300}, {1, 2, 12345.678}});
  std::stringstream ss;
  io::write_observations(ss, obs);
  const auto back = io::read_observations(ss);
  ASSERT_EQ(back.rows(), 3);
  ASSERT_EQ(back.cols(), 4);
  ASSERT_EQ(back.size(), obs.size());
  for (std::size_t k = 0; k < obs.size(); ++k) {
    EXPECT_EQ(back[k].row, obs[k].row);
    EXPECT_EQ(back[k].col, obs[k].col);
    EXPECT_EQ(back[k].value, obs[k].value);
  }
}

TEST(Io, MatrixRoundTripIsExact) {
  const MatrixXd a = gen_lowrank(5, 7, 2, 9) / 3.0;
  std::stringstream ss;
  io::write_matrix(ss, a);
  EXPECT_EQ(io::read_matrix(ss), a);
}

TEST(Io, MalformedInputThrowsParseError) {
  std::stringstream bad("# 2 2 1\n0 0\n");
  EXPECT_THROW(io::read_observations(bad), ParseError);
  std::stringstream short_matrix("2 2\n1 2\n3\n");
  EXPECT_THROW(io::read_matrix(short_matrix), ParseError);
  std::stringstream out_of_range("# 2 2 1\n5 0 1.0\n");
  EXPECT_THROW(io::read_observations(out_of_range), std::exception);
}

TEST(Io, FormatDouble) {
  EXPECT_EQ(io::format_double(0.5), "0.5");
  EXPECT_EQ(std::stod(io::format_double(0.1)), 0.1);
}
