#include "dladmc/prox.hpp"

#include "dladmc/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dladmc {

namespace {

void check_aligned(const ObservationSet& obs, std::span<const double> responses) {
  if (obs.empty()) throw InvalidInput("empty observation set");
  if (responses.size() != obs.size()) throw InvalidInput("responses length does not match observations");
}

void clip(Eigen::MatrixXd& a, double bound) {
  if (std::isfinite(bound)) a = a.cwiseMax(-bound).cwiseMin(bound);
}

double spectral_norm(const Eigen::MatrixXd& a) {
  const Eigen::VectorXd s = singular_values(a);
  return s.size() ? s(0) : 0.0;
}

}  // namespace

std::vector<double> soft_threshold(std::span<const double> s, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidInput("soft_threshold: lambda must be non-negative");
  std::vector<double> out(s.size());
  std::transform(s.begin(), s.end(), out.begin(), [lambda](double v) { return std::max(v - lambda, 0.0); });
  return out;
}

Eigen::MatrixXd svt(const Eigen::MatrixXd& a, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidInput("svt: lambda must be non-negative");
  ThinSvd svd = full_svd(a);
  const Eigen::Index k = (svd.s.array() > lambda).count();
  if (k == 0) return Eigen::MatrixXd::Zero(a.rows(), a.cols());
  const Eigen::VectorXd shrunk = svd.s.head(k).array() - lambda;
  return svd.U.leftCols(k) * shrunk.asDiagonal() * svd.V.leftCols(k).transpose();
}

int AggregatedEntries::max_count() const {
  int m = 0;
  for (const auto& c : cells) m = std::max(m, c.count);
  return m;
}

AggregatedEntries aggregate_duplicates(const ObservationSet& obs, std::span<const double> responses) {
  check_aligned(obs, responses);
  const Index n1 = obs.rows();
  std::vector<std::pair<Index, std::size_t>> order;
  order.reserve(obs.size());
  for (std::size_t k = 0; k < obs.size(); ++k) order.emplace_back(obs[k].col * n1 + obs[k].row, k);
  std::sort(order.begin(), order.end());

  AggregatedEntries agg;
  agg.n_rows = obs.rows();
  agg.n_cols = obs.cols();
  agg.total = obs.size();
  for (std::size_t p = 0; p < order.size();) {
    std::size_t q = p;
    double sum = 0.0;
    while (q < order.size() && order[q].first == order[p].first) sum += responses[order[q++].second];
    const Index flat = order[p].first;
    const int count = static_cast<int>(q - p);
    agg.cells.push_back({flat % n1, flat / n1, count, sum / count});
    p = q;
  }
  return agg;
}

double aggregated_quadratic_loss(const AggregatedEntries& agg, const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (const auto& c : agg.cells) {
    const double u = a(c.row, c.col) - c.mean;
    sum += c.count * u * u;
  }
  return sum / static_cast<double>(agg.total);
}

Eigen::MatrixXd aggregated_quadratic_gradient(const AggregatedEntries& agg, const Eigen::MatrixXd& a) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  const double scale = 2.0 / static_cast<double>(agg.total);
  for (const auto& c : agg.cells) g(c.row, c.col) = scale * c.count * (a(c.row, c.col) - c.mean);
  return g;
}

double quadratic_lambda_max(const ObservationSet& obs, std::span<const double> responses) {
  check_aligned(obs, responses);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(obs.rows(), obs.cols());
  for (std::size_t k = 0; k < obs.size(); ++k) g(obs[k].row, obs[k].col) += responses[k];
  return 2.0 / static_cast<double>(obs.size()) * spectral_norm(g);
}

void QuadSolverConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be finite and non-negative");
  if (!(box_bound > 0.0)) throw InvalidInput("box_bound must be positive");
  if (max_iters < 1) throw InvalidInput("max_iters must be at least 1");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidInput("rel_tol must lie in (0, 1)");
}

MatrixEstimate fit_quadratic_nuclear(const ObservationSet& obs, std::span<const double> responses,
                                     const QuadSolverConfig& cfg, const Eigen::MatrixXd* warm_start) {
  cfg.validate();
  const AggregatedEntries agg = aggregate_duplicates(obs, responses);
  const double n = static_cast<double>(agg.total);
  const double lipschitz = 2.0 * agg.max_count() / n;
  const bool boxed = std::isfinite(cfg.box_bound);

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(obs.rows(), obs.cols());
  Eigen::VectorXd x_sv;
  if (warm_start) {
    if (warm_start->rows() != obs.rows() || warm_start->cols() != obs.cols()) {
      throw InvalidInput("warm start dimensions differ from observations");
    }
    x = *warm_start;
    clip(x, cfg.box_bound);
    if (cfg.lambda > 0.0 || boxed) x_sv = singular_values(x);
  }

  auto objective = [&](const Eigen::MatrixXd& m, const Eigen::VectorXd& sv) {
    return aggregated_quadratic_loss(agg, m) + cfg.lambda * sv.sum();
  };

  ThresholdSvd svd(cfg.svd);
  double f_x = objective(x, x_sv);
  MatrixEstimate est;
  est.objective_trace.reserve(static_cast<std::size_t>(cfg.max_iters));
  est.info.converged = false;

  Eigen::MatrixXd y = x, x_prev = x, z, v;
  double t = 1.0;
  double step_l = cfg.step_rule == StepRule::backtracking ? lipschitz / 8.0 : lipschitz;
  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    Eigen::VectorXd z_sv;
    double f_y_smooth = 0.0;
    if (cfg.step_rule == StepRule::backtracking) {
      f_y_smooth = aggregated_quadratic_loss(agg, y);
      step_l = std::max(step_l / 2.0, lipschitz / 64.0);
    }
    for (;;) {
      v = y;
      const double scale = 2.0 / (n * step_l);
      for (const auto& c : agg.cells) v(c.row, c.col) -= scale * c.count * (y(c.row, c.col) - c.mean);
      const ThinSvd part = svd.above(v, cfg.lambda / step_l);
      z_sv = part.s.array() - cfg.lambda / step_l;
      z = part.U * z_sv.asDiagonal() * part.V.transpose();
      if (boxed) {
        clip(z, cfg.box_bound);
        z_sv = singular_values(z);
      }
      if (cfg.step_rule == StepRule::fixed || step_l >= lipschitz) break;
      // Sufficient decrease of the quadratic model.
      const Eigen::MatrixXd d = z - y;
      double linear = 0.0;
      for (const auto& c : agg.cells) linear += 2.0 / n * c.count * (y(c.row, c.col) - c.mean) * d(c.row, c.col);
      const double model = f_y_smooth + linear + 0.5 * step_l * d.squaredNorm();
      if (aggregated_quadratic_loss(agg, z) <= model + 1e-15 * std::abs(model)) break;
      step_l = std::min(2.0 * step_l, lipschitz);
    }

    const double f_z = objective(z, z_sv);
    if (!std::isfinite(f_z)) {
      std::ostringstream msg;
      msg << "quadratic solver diverged at iteration " << iter + 1 << " with step size " << 1.0 / step_l;
      throw NumericalError(msg.str());
    }

    const double f_old = f_x;
    const bool accepted = f_z <= f_x;
    x_prev = x;
    if (accepted) {
      x = z;
      x_sv = z_sv;
      f_x = f_z;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x + (t / t_next) * (z - x) + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;
    est.objective_trace.push_back(f_x);

    if (accepted && (f_x == 0.0 || std::abs(f_old - f_x) <= cfg.rel_tol * std::max(std::abs(f_old), 1e-300))) {
      est.info.converged = true;
      ++iter;
      break;
    }
  }

  est.values = std::move(x);
  if (x_sv.size() == 0 && est.values.squaredNorm() > 0.0) x_sv = singular_values(est.values);
  est.singular_values = std::move(x_sv);
  est.iterations_used = iter;
  if (!est.info.converged) {
    est.info.warnings.push_back("quadratic solver reached max_iters=" + std::to_string(cfg.max_iters));
  }
  return est;
}

}  // namespace dladmc
