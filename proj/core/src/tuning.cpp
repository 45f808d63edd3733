#include "dladmc/tuning.hpp"

#include "dladmc/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dladmc {

std::vector<double> log_lambda_grid(double lambda_max, int count, double low_ratio) {
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) throw InvalidInput("lambda_max must be finite and positive");
  if (count < 1) throw InvalidInput("grid needs at least one point");
  if (!(low_ratio > 0.0 && low_ratio <= 1.0)) throw InvalidInput("grid low ratio must lie in (0, 1]");
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = lambda_max;
    return grid;
  }
  const double span = std::log(low_ratio);
  for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = lambda_max * std::exp(span * i / (count - 1));
  return grid;
}

TuneResult tune_lambda(const LambdaFit& fit, std::span<const double> grid, const ObservationSet& validation,
                       const TuneOptions& opts) {
  if (grid.empty()) throw InvalidInput("tune_lambda: empty lambda grid");
  if (validation.empty()) throw InvalidInput("tune_lambda: empty validation set");
  const auto y = validation.values();

  TuneResult out;
  out.lambdas.assign(grid.begin(), grid.end());
  out.validation_losses.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  bool found = false;
  int since_best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    MatrixEstimate est;
    try {
      est = fit(grid[i]);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "lambda " << grid[i] << ": " << e.what();
      out.failures.push_back(msg.str());
      continue;
    }
    const double loss = eval_loss(validation, y, est.values, Loss::absolute);
    out.validation_losses[i] = loss;
    const double best = found ? out.validation_losses[out.best_index] : 0.0;
    const bool better = !found || loss < best || (loss == best && grid[i] < out.best_lambda);
    if (better) {
      if (found && loss < best) since_best = 0;
      found = true;
      out.best_index = i;
      out.best_lambda = grid[i];
      out.best_estimate = std::move(est);
    } else if (opts.patience > 0 && ++since_best >= opts.patience) {
      break;
    }
  }
  if (!found) {
    std::ostringstream msg;
    msg << "tune_lambda: every fit failed";
    for (const auto& f : out.failures) msg << "; " << f;
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace dladmc
