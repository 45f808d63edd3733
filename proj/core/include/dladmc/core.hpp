#pragma once

// Observation model, losses and evaluation metrics shared by every solver.
//
// Designs are canonical basis matrices e_i e_j^T, so an observation is stored
// as an index pair and tr(X^T A) is the entry lookup A(i, j).

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dladmc {

using Index = Eigen::Index;

struct Entry {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

/// Partially observed n_rows x n_cols matrix. Entries may repeat a (row, col)
/// pair since observations are drawn with replacement.
class ObservationSet {
 public:
  ObservationSet() = default;
  /// Throws RangeError if any entry lies outside the dimensions and
  /// InvalidInput for non-positive dimensions.
  ObservationSet(Index n_rows, Index n_cols, std::vector<Entry> entries = {});

  Index rows() const noexcept { return n_rows_; }
  Index cols() const noexcept { return n_cols_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const Entry& operator[](std::size_t k) const { return entries_[k]; }

  /// The observed responses Y_k in entry order.
  std::vector<double> values() const;

  void push_back(const Entry& e);

 private:
  Index n_rows_ = 0;
  Index n_cols_ = 0;
  std::vector<Entry> entries_;
};

/// Solver diagnostics attached to an estimate.
struct FitInfo {
  bool converged = true;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double final_rho = 0.0;
  std::vector<std::string> warnings;
};

/// Dense estimate with optional cached singular values (non-increasing).
struct MatrixEstimate {
  Eigen::MatrixXd values;
  std::optional<Eigen::VectorXd> singular_values;
  int iterations_used = 0;
  std::vector<double> objective_trace;
  FitInfo info;

  MatrixEstimate() = default;
  explicit MatrixEstimate(Eigen::MatrixXd v) : values(std::move(v)) {}

  Index rows() const noexcept { return values.rows(); }
  Index cols() const noexcept { return values.cols(); }
};

struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
  int rank = 0;
  double wall_time_s = 0.0;
};

enum class Loss { absolute, quadratic };

inline constexpr double kDefaultRankTolerance = 1e-6;

/// tr(X^T A) for X = e_row e_col^T. Throws RangeError when out of range.
double entry_of(Index row, Index col, const MatrixEstimate& a);
double entry_of(Index row, Index col, const Eigen::MatrixXd& a);

/// (1/N) sum_k rho(y_k - A(i_k, j_k)) with rho = |.| or (.)^2.
double eval_loss(const ObservationSet& obs, std::span<const double> responses,
                 const Eigen::MatrixXd& a, Loss loss);
double eval_loss(const ObservationSet& obs, std::span<const double> responses,
                 const MatrixEstimate& a, Loss loss);

/// Errors over all n1*n2 entries of a fully known reference matrix.
Metrics metrics(const MatrixEstimate& a_hat, const Eigen::MatrixXd& reference,
                double rank_rel_tol = kDefaultRankTolerance);

/// Errors over held-out entries, comparing against each entry's value.
Metrics metrics(const MatrixEstimate& a_hat, const ObservationSet& test,
                double rank_rel_tol = kDefaultRankTolerance);

/// Number of singular values above rel_tol * sigma_1; 0 for the zero matrix.
int numeric_rank(const Eigen::VectorXd& singular_values, double rel_tol);
int numeric_rank(const Eigen::MatrixXd& a, double rel_tol = kDefaultRankTolerance);
int numeric_rank(const MatrixEstimate& a, double rel_tol = kDefaultRankTolerance);

/// Singular values of `a`, non-increasing.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& a);

/// Fills in `singular_values` from the dense values when missing.
void ensure_singular_values(MatrixEstimate& a);

}  // namespace dladmc
