#pragma once

// Pseudo-data refinement of a median completion estimate.
//
// Each iteration estimates the noise density at zero with a bi-weight kernel,
// forms pseudo responses that take one Newton step of the absolute loss in
// expectation, and solves a nuclear-norm regularized least squares problem on
// them. Starting from the blocked LAD estimate this is the full distributed
// median completion pipeline.

#include "dladmc/core.hpp"
#include "dladmc/prox.hpp"
#include "dladmc/tuning.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace dladmc {

/// -(315/64)x^6 + (735/64)x^4 - (525/64)x^2 + 105/64 on [-1, 1], 0 outside.
double kernel_biweight(double x);

struct DensityEstimate {
  double value = 0.0;  // max(raw, floor)
  double raw = 0.0;
  bool floored = false;
};

/// (1/(N h)) sum_k K((y_k - A(i_k, j_k)) / h), floored at `f0_floor`.
/// Throws InvalidInput for h <= 0 or an empty observation set.
DensityEstimate estimate_f0(const ObservationSet& obs, std::span<const double> responses,
                            const Eigen::MatrixXd& a_prev, double h, double f0_floor = 1e-3);

/// fit_k - (1{y_k <= fit_k} - 1/2) / f0 with fit_k = A(i_k, j_k).
/// Throws InvalidInput for f0 <= 0.
std::vector<double> pseudo_data(const ObservationSet& obs, std::span<const double> responses,
                                const Eigen::MatrixXd& a_prev, double f0);

/// c1 sqrt((n1 n2)^2 max(m1, m2) log(m1 + m2) / (m1 m2 N)).
double initial_rate(Index n1, Index n2, Index m1, Index m2, std::size_t n_obs, double c1);

struct RateValue {
  double value = 0.0;
  bool clamped = false;  // contraction ratio was >= 1 and clamped to 0.99
};

/// sqrt(r n1 n2 n_max log(n_+) / N) + (n_min / sqrt(r)) (sqrt(r) a0 / n_min)^(2^t).
RateValue rate_schedule(double a_n0, int r_star, Index n1, Index n2, std::size_t n_obs, int t);

/// ||A_new - A_old||_F^2 / ||A_old||_F^2; +inf when only the denominator is 0,
/// 0 when both are.
double relative_change(const Eigen::MatrixXd& a_new, const Eigen::MatrixXd& a_old);

/// lambda_t = C (sqrt(log(n_+) / (n_min N)) + a_prev^2 / (n_min n1 n2)).
struct ScheduleLambda {
  double C = 1.0;
};

/// lambda_t chosen on a validation set from a logarithmic grid below the
/// spectral norm of the pseudo-data gradient at zero.
struct ValidationLambda {
  int grid_points = 20;
  double grid_low_ratio = 1e-4;
  int patience = 0;
};

using LambdaRule = std::variant<ScheduleLambda, ValidationLambda>;

struct RefinementConfig {
  double c1 = 0.1;
  double c2 = 0.1;
  int T_max = 5;
  double rel_change_tol = 1e-5;
  double f0_floor = 1e-3;
  double h_floor_constant = 1.0;   // h >= h_floor_constant * log(n_+) / N
  // Bandwidth from a_{N,t} instead of a_{N,t-1}.
  bool bandwidth_current_rate = false;
  LambdaRule lambda_rule = ScheduleLambda{};
  std::optional<int> r_star;       // known rank; estimated from the iterate when empty
  double rank_rel_tol = kDefaultRankTolerance;
  // Block shape that produced the initial estimate, for the initial rate.
  Index block_rows = 0;
  Index block_cols = 0;
  // Overrides the initial rate computed from the block shape when set.
  std::optional<double> initial_rate_override;

  void validate() const;
};

struct RefinementTraceRow {
  int t = 0;
  double f0_hat = 0.0;
  double f0_raw = 0.0;
  double h_t = 0.0;
  double a_Nt = 0.0;
  double lambda_t = 0.0;
  double e = 0.0;
  int r_star = 0;
  std::optional<Metrics> metrics;
};

using RefinementTrace = std::vector<RefinementTraceRow>;

/// Optional inputs shared by refine_once and dladmc.
struct RefineContext {
  const ObservationSet* validation = nullptr;     // required by ValidationLambda
  const Eigen::MatrixXd* ground_truth = nullptr;  // adds metrics to the trace
  // Density at zero to use instead of the kernel estimate.
  std::optional<double> f0_override;
};

struct RefineStep {
  MatrixEstimate estimate;
  RefinementTraceRow row;
};

/// Iteration t >= 1 given the previous iterate and the initial rate a_{N,0}.
/// The bandwidth and scheduled lambda use a_{N,t-1}; the trace row records
/// a_{N,t}.
RefineStep refine_once(const ObservationSet& obs, std::span<const double> responses,
                       const Eigen::MatrixXd& a_prev, int t, double a_n0,
                       const RefinementConfig& cfg, const QuadSolverConfig& quad_cfg,
                       const RefineContext& ctx = {});

struct DladmcResult {
  MatrixEstimate estimate;
  RefinementTrace trace;
  double initial_rate = 0.0;
};

/// Runs refine_once for t = 1..T_max, stopping once relative_change <=
/// rel_change_tol.
DladmcResult dladmc(const ObservationSet& obs, std::span<const double> responses,
                    const MatrixEstimate& initial, const RefinementConfig& cfg,
                    const QuadSolverConfig& quad_cfg, const RefineContext& ctx = {});

/// CSV with columns t,f0_hat,h_t,a_Nt,lambda_t,e and rmse,mae,rank when any
/// row carries metrics.
void write_trace_csv(std::ostream& out, const RefinementTrace& trace);

}  // namespace dladmc
