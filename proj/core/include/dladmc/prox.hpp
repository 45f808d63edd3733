#pragma once

// Singular value thresholding and the nuclear-norm regularized least squares
// solver
//
//   minimize (1/N) sum_k (y_k - A(i_k, j_k))^2 + lambda ||A||_*
//   subject to max |A(i, j)| <= box_bound
//
// used for every refinement step and for the quadratic-loss baseline.

#include "dladmc/core.hpp"
#include "dladmc/svd.hpp"

#include <limits>
#include <span>
#include <vector>

namespace dladmc {

/// max(s_i - lambda, 0) elementwise. Throws InvalidInput for negative lambda.
std::vector<double> soft_threshold(std::span<const double> s, double lambda);

/// Proximal map of lambda ||.||_*: U diag(soft_threshold(sigma, lambda)) V^T.
Eigen::MatrixXd svt(const Eigen::MatrixXd& a, double lambda);

/// Per unique (row, col): observation count and mean response.
struct AggregatedEntries {
  struct Cell {
    Index row = 0;
    Index col = 0;
    int count = 0;
    double mean = 0.0;
  };
  Index n_rows = 0;
  Index n_cols = 0;
  std::size_t total = 0;  // N = sum of counts
  std::vector<Cell> cells;  // sorted by (col, row)

  int max_count() const;
};

AggregatedEntries aggregate_duplicates(const ObservationSet& obs, std::span<const double> responses);

/// Smooth part (1/N) sum_cells w (A - mean)^2; equals the raw quadratic loss up
/// to an additive constant.
double aggregated_quadratic_loss(const AggregatedEntries& agg, const Eigen::MatrixXd& a);

/// Gradient of aggregated_quadratic_loss: (2/N) w (A - mean) on observed cells.
Eigen::MatrixXd aggregated_quadratic_gradient(const AggregatedEntries& agg, const Eigen::MatrixXd& a);

/// Spectral norm of the quadratic loss gradient at zero; the smallest lambda
/// for which the solution is the zero matrix.
double quadratic_lambda_max(const ObservationSet& obs, std::span<const double> responses);

enum class StepRule { fixed, backtracking };

struct QuadSolverConfig {
  double lambda = 0.0;
  double box_bound = std::numeric_limits<double>::infinity();
  int max_iters = 500;
  double rel_tol = 1e-6;
  StepRule step_rule = StepRule::fixed;
  ThresholdSvd::Options svd{};

  void validate() const;
};

/// Monotone accelerated proximal gradient with step 1/L, L = 2 max(w)/N.
/// `objective_trace` records the objective after every iteration; it is
/// non-increasing since non-improving proximal points are rejected.
/// Throws NumericalError if the objective becomes non-finite.
MatrixEstimate fit_quadratic_nuclear(const ObservationSet& obs, std::span<const double> responses,
                                     const QuadSolverConfig& cfg,
                                     const Eigen::MatrixXd* warm_start = nullptr);

}  // namespace dladmc
