#pragma once

// ADMM for nuclear-norm regularized least absolute deviation completion
//
//   minimize (1/N) sum_k |y_k - A(i_k, j_k)| + lambda ||A||_*
//
// with the splitting r_k = y_k - A(i_k, j_k), Z = A. Internally the objective
// is multiplied by N, so `rho` is expressed on the summed-loss scale: the
// residual update soft-thresholds at 1/rho and the Z update applies svt with
// threshold N lambda / rho. Duals are kept in scaled form.

#include "dladmc/core.hpp"
#include "dladmc/svd.hpp"

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace dladmc {

struct AdmmConfig {
  double lambda = 0.0;
  double rho = 1.0;
  bool adaptive_rho = true;
  int max_iters = 2000;
  // Stopping thresholds are these factors times sqrt(n1 n2).
  double primal_tol = 1e-4;
  double dual_tol = 1e-4;
  double box_bound = std::numeric_limits<double>::infinity();
  ThresholdSvd::Options svd{};

  void validate() const;
};

struct AdmmState {
  Eigen::MatrixXd A;        // data-fit variable
  Eigen::MatrixXd Z;        // nuclear-norm variable
  Eigen::VectorXd r;        // residuals y - A(i_k, j_k), length N
  Eigen::MatrixXd dual_Z;   // scaled dual of A - Z = 0
  Eigen::VectorXd dual_r;   // scaled dual of A(i_k, j_k) + r_k - y_k = 0
  Eigen::VectorXd z_singular_values;  // singular values of Z after the last update
  double rho = 1.0;
  double primal_residual = std::numeric_limits<double>::infinity();
  double dual_residual = std::numeric_limits<double>::infinity();

  /// Zero primal and dual variables for an n1 x n2 problem with N entries.
  static AdmmState zeros(Index n1, Index n2, std::size_t n, double rho);
  /// State consistent with a given matrix: Z = A, r = y - A, zero duals.
  static AdmmState from_matrix(const Eigen::MatrixXd& a, const ObservationSet& obs,
                               std::span<const double> responses, double rho);
};

/// Precomputed problem data for repeated iterations.
class LadAdmmProblem {
 public:
  LadAdmmProblem(const ObservationSet& obs, std::span<const double> responses, const AdmmConfig& cfg);

  /// One cycle: A update, r update, Z update, dual ascent. Residual-balancing
  /// rho adaptation is applied only by `solve`.
  void step(AdmmState& state, ThresholdSvd& svd) const;

  /// (1/N) sum |y - Z| + lambda ||Z||_* given the singular values of Z.
  double objective(const Eigen::MatrixXd& z, const Eigen::VectorXd& z_singular_values) const;

  const ObservationSet& observations() const noexcept { return obs_; }

 private:
  const ObservationSet& obs_;
  std::span<const double> y_;
  AdmmConfig cfg_;
  std::vector<Index> flat_;      // column-major flat index per observation
  Eigen::VectorXd inv_weight_;   // 1 / (count + 1) per cell
};

/// One ADMM cycle with `cfg.rho` taken from `state.rho`.
AdmmState admm_iteration(const AdmmState& state, const ObservationSet& obs,
                         std::span<const double> responses, const AdmmConfig& cfg);

struct LadFitResult {
  MatrixEstimate estimate;
  AdmmState state;
};

/// Full solve. The returned estimate is the low-rank variable Z (clipped to the
/// box when finite). Non-convergence is reported via info.converged = false.
/// Throws NumericalError on non-finite iterates.
LadFitResult fit_lad_nuclear_full(const ObservationSet& obs, std::span<const double> responses,
                                  const AdmmConfig& cfg, const AdmmState* warm_start = nullptr);

MatrixEstimate fit_lad_nuclear(const ObservationSet& obs, std::span<const double> responses,
                               const AdmmConfig& cfg);

/// Spectral norm of (1/N) sum_k sign(y_k) e_i e_j^T, the subgradient scale at
/// zero; the solution is zero for lambda at or above it.
double lad_lambda_max(const ObservationSet& obs, std::span<const double> responses);

}  // namespace dladmc
