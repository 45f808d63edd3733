#pragma once

// Validation-based selection of a regularization parameter.

#include "dladmc/core.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dladmc {

/// `count` values spaced logarithmically over [low_ratio, 1] * lambda_max,
/// in decreasing order.
std::vector<double> log_lambda_grid(double lambda_max, int count = 20, double low_ratio = 1e-4);

struct TuneResult {
  double best_lambda = 0.0;
  std::size_t best_index = 0;
  std::vector<double> lambdas;            // as supplied
  std::vector<double> validation_losses;  // one per grid point; NaN if that fit failed or was skipped
  std::vector<std::string> failures;
  MatrixEstimate best_estimate;
};

/// Fits the model for one lambda. Grid points are visited in the supplied
/// order, so the callback may warm-start from the previous fit.
using LambdaFit = std::function<MatrixEstimate(double lambda)>;

struct TuneOptions {
  // Stop the path once the validation loss has failed to improve on the best
  // value for this many consecutive grid points; 0 visits the whole grid.
  int patience = 0;
};

/// Argmin over the grid of the absolute-deviation loss on the validation set;
/// ties resolve to the smallest lambda. Throws InvalidInput for an empty grid
/// and NumericalError listing every failure if no fit succeeds.
TuneResult tune_lambda(const LambdaFit& fit, std::span<const double> grid, const ObservationSet& validation,
                       const TuneOptions& opts = {});

}  // namespace dladmc
