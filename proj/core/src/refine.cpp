#include "dladmc/refine.hpp"

#include "dladmc/error.hpp"
#include "dladmc/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace dladmc {

namespace {

void check_aligned(const ObservationSet& obs, std::span<const double> responses, const Eigen::MatrixXd& a) {
  if (obs.empty()) throw InvalidInput("empty observation set");
  if (responses.size() != obs.size()) throw InvalidInput("responses length does not match observations");
  if (a.rows() != obs.rows() || a.cols() != obs.cols()) throw InvalidInput("iterate dimensions differ from observations");
}

double lambda_schedule(double C, Index n1, Index n2, std::size_t n_obs, double a_prev) {
  const double n_min = static_cast<double>(std::min(n1, n2));
  const double n_plus = static_cast<double>(n1 + n2);
  const double cells = static_cast<double>(n1) * static_cast<double>(n2);
  return C * (std::sqrt(std::log(n_plus) / (n_min * static_cast<double>(n_obs))) + a_prev * a_prev / (n_min * cells));
}

}  // namespace

double kernel_biweight(double x) {
  if (!(std::abs(x) < 1.0)) return 0.0;
  const double x2 = x * x;
  return ((-315.0 * x2 + 735.0) * x2 - 525.0) * x2 / 64.0 + 105.0 / 64.0;
}

DensityEstimate estimate_f0(const ObservationSet& obs, std::span<const double> responses,
                            const Eigen::MatrixXd& a_prev, double h, double f0_floor) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("bandwidth must be finite and positive");
  if (!(f0_floor > 0.0)) throw InvalidInput("f0_floor must be positive");
  check_aligned(obs, responses, a_prev);
  double sum = 0.0;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    sum += kernel_biweight((responses[k] - a_prev(obs[k].row, obs[k].col)) / h);
  }
  DensityEstimate d;
  d.raw = sum / (static_cast<double>(obs.size()) * h);
  d.floored = d.raw < f0_floor;
  d.value = std::max(d.raw, f0_floor);
  return d;
}

std::vector<double> pseudo_data(const ObservationSet& obs, std::span<const double> responses,
                                const Eigen::MatrixXd& a_prev, double f0) {
  if (!(f0 > 0.0) || !std::isfinite(f0)) throw InvalidInput("f0 must be finite and positive");
  check_aligned(obs, responses, a_prev);
  const double step = 1.0 / f0;
  std::vector<double> out(obs.size());
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const double fit = a_prev(obs[k].row, obs[k].col);
    const double indicator = responses[k] <= fit ? 1.0 : 0.0;
    out[k] = fit - step * (indicator - 0.5);
  }
  return out;
}

double initial_rate(Index n1, Index n2, Index m1, Index m2, std::size_t n_obs, double c1) {
  if (n1 <= 0 || n2 <= 0 || m1 <= 0 || m2 <= 0 || n_obs == 0 || !(c1 > 0.0)) {
    throw InvalidInput("initial_rate: arguments must be positive");
  }
  const double cells = static_cast<double>(n1) * static_cast<double>(n2);
  const double m_max = static_cast<double>(std::max(m1, m2));
  const double m_plus = static_cast<double>(m1 + m2);
  const double block = static_cast<double>(m1) * static_cast<double>(m2);
  return c1 * std::sqrt(cells * cells * m_max * std::log(m_plus) / (block * static_cast<double>(n_obs)));
}

RateValue rate_schedule(double a_n0, int r_star, Index n1, Index n2, std::size_t n_obs, int t) {
  if (r_star < 1 || n1 <= 0 || n2 <= 0 || n_obs == 0 || t < 0 || !(a_n0 >= 0.0)) {
    throw InvalidInput("rate_schedule: invalid arguments");
  }
  const double r = static_cast<double>(r_star);
  const double n_min = static_cast<double>(std::min(n1, n2));
  const double n_max = static_cast<double>(std::max(n1, n2));
  const double n_plus = static_cast<double>(n1 + n2);
  const double cells = static_cast<double>(n1) * static_cast<double>(n2);

  RateValue out;
  double ratio = std::sqrt(r) * a_n0 / n_min;
  if (ratio >= 1.0) {
    ratio = 0.99;
    out.clamped = true;
  }
  const double first = std::sqrt(r * cells * n_max * std::log(n_plus) / static_cast<double>(n_obs));
  const double second = ratio > 0.0 ? (n_min / std::sqrt(r)) * std::exp(std::ldexp(1.0, t) * std::log(ratio)) : 0.0;
  out.value = first + second;
  return out;
}

double relative_change(const Eigen::MatrixXd& a_new, const Eigen::MatrixXd& a_old) {
  if (a_new.rows() != a_old.rows() || a_new.cols() != a_old.cols()) throw InvalidInput("relative_change: dimension mismatch");
  const double num = (a_new - a_old).squaredNorm();
  const double den = a_old.squaredNorm();
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

void RefinementConfig::validate() const {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw InvalidInput("c1 and c2 must be positive");
  if (T_max < 1) throw InvalidInput("T_max must be at least 1");
  if (!(rel_change_tol >= 0.0)) throw InvalidInput("rel_change_tol must be non-negative");
  if (!(f0_floor > 0.0) || !(h_floor_constant > 0.0)) throw InvalidInput("floors must be positive");
  if (r_star && *r_star < 1) throw InvalidInput("r_star must be positive");
  if (const auto* v = std::get_if<ValidationLambda>(&lambda_rule); v && v->grid_points < 1) {
    throw InvalidInput("validation grid needs at least one point");
  }
}

RefineStep refine_once(const ObservationSet& obs, std::span<const double> responses, const Eigen::MatrixXd& a_prev,
                       int t, double a_n0, const RefinementConfig& cfg, const QuadSolverConfig& quad_cfg,
                       const RefineContext& ctx) {
  cfg.validate();
  if (t < 1) throw InvalidInput("refinement iteration index starts at 1");
  check_aligned(obs, responses, a_prev);
  if (!a_prev.allFinite()) throw InvalidInput("previous iterate has non-finite entries");

  const Index n1 = obs.rows(), n2 = obs.cols();
  const std::size_t n_obs = obs.size();
  RefineStep out;
  auto& row = out.row;
  row.t = t;
  row.r_star = cfg.r_star ? *cfg.r_star : std::max(1, numeric_rank(a_prev, cfg.rank_rel_tol));

  const double a_prev_rate = t == 1 ? a_n0 : rate_schedule(a_n0, row.r_star, n1, n2, n_obs, t - 1).value;
  row.a_Nt = rate_schedule(a_n0, row.r_star, n1, n2, n_obs, t).value;

  const double h_floor = cfg.h_floor_constant * std::log(static_cast<double>(n1 + n2)) / static_cast<double>(n_obs);
  const double h_rate = cfg.bandwidth_current_rate ? row.a_Nt : a_prev_rate;
  row.h_t = std::max(cfg.c2 / std::sqrt(static_cast<double>(n1) * static_cast<double>(n2)) * h_rate, h_floor);

  if (ctx.f0_override) {
    row.f0_hat = row.f0_raw = *ctx.f0_override;
  } else {
    const auto f0 = estimate_f0(obs, responses, a_prev, row.h_t, cfg.f0_floor);
    row.f0_hat = f0.value;
    row.f0_raw = f0.raw;
  }
  const auto pseudo = pseudo_data(obs, responses, a_prev, row.f0_hat);

  if (const auto* sched = std::get_if<ScheduleLambda>(&cfg.lambda_rule)) {
    row.lambda_t = lambda_schedule(sched->C, n1, n2, n_obs, a_prev_rate);
    QuadSolverConfig qc = quad_cfg;
    qc.lambda = row.lambda_t;
    out.estimate = fit_quadratic_nuclear(obs, pseudo, qc, &a_prev);
  } else {
    const auto& rule = std::get<ValidationLambda>(cfg.lambda_rule);
    if (!ctx.validation) throw InvalidInput("validation lambda rule requires a validation set");
    const auto grid = log_lambda_grid(quadratic_lambda_max(obs, pseudo), rule.grid_points, rule.grid_low_ratio);
    Eigen::MatrixXd warm = a_prev;
    const LambdaFit fit = [&](double lambda) {
      QuadSolverConfig qc = quad_cfg;
      qc.lambda = lambda;
      auto est = fit_quadratic_nuclear(obs, pseudo, qc, &warm);
      warm = est.values;
      return est;
    };
    auto tuned = tune_lambda(fit, grid, *ctx.validation, {rule.patience});
    row.lambda_t = tuned.best_lambda;
    out.estimate = std::move(tuned.best_estimate);
  }

  if (row.f0_raw < cfg.f0_floor && !ctx.f0_override) {
    out.estimate.info.warnings.push_back("density estimate " + io::format_double(row.f0_raw) + " floored at " +
                                         io::format_double(cfg.f0_floor));
  }
  row.e = relative_change(out.estimate.values, a_prev);
  if (ctx.ground_truth) row.metrics = metrics(out.estimate, *ctx.ground_truth, cfg.rank_rel_tol);
  return out;
}

DladmcResult dladmc(const ObservationSet& obs, std::span<const double> responses, const MatrixEstimate& initial,
                    const RefinementConfig& cfg, const QuadSolverConfig& quad_cfg, const RefineContext& ctx) {
  cfg.validate();
  if (initial.rows() != obs.rows() || initial.cols() != obs.cols()) {
    throw InvalidInput("initial estimate dimensions differ from observations");
  }
  DladmcResult out;
  if (cfg.initial_rate_override) {
    out.initial_rate = *cfg.initial_rate_override;
  } else {
    const Index m1 = cfg.block_rows > 0 ? cfg.block_rows : obs.rows();
    const Index m2 = cfg.block_cols > 0 ? cfg.block_cols : obs.cols();
    out.initial_rate = initial_rate(obs.rows(), obs.cols(), m1, m2, obs.size(), cfg.c1);
  }

  Eigen::MatrixXd current = initial.values;
  out.estimate = initial;
  std::vector<std::string> warnings;
  for (int t = 1; t <= cfg.T_max; ++t) {
    auto step = refine_once(obs, responses, current, t, out.initial_rate, cfg, quad_cfg, ctx);
    for (auto& w : step.estimate.info.warnings) warnings.push_back("t=" + std::to_string(t) + ": " + w);
    out.trace.push_back(step.row);
    current = step.estimate.values;
    out.estimate = std::move(step.estimate);
    if (out.trace.back().e <= cfg.rel_change_tol) break;
  }
  out.estimate.iterations_used = static_cast<int>(out.trace.size());
  out.estimate.info.warnings = std::move(warnings);
  return out;
}

void write_trace_csv(std::ostream& out, const RefinementTrace& trace) {
  const bool with_metrics = std::any_of(trace.begin(), trace.end(), [](const auto& r) { return r.metrics.has_value(); });
  out << "t,f0_hat,h_t,a_Nt,lambda_t,e";
  if (with_metrics) out << ",rmse,mae,rank";
  out << '\n';
  for (const auto& r : trace) {
    out << r.t << ',' << io::format_double(r.f0_hat) << ',' << io::format_double(r.h_t) << ','
        << io::format_double(r.a_Nt) << ',' << io::format_double(r.lambda_t) << ',' << io::format_double(r.e);
    if (with_metrics) {
      out << ',';
      if (r.metrics) out << io::format_double(r.metrics->rmse) << ',' << io::format_double(r.metrics->mae) << ',' << r.metrics->rank;
      else out << ",,";
    }
    out << '\n';
  }
}

}  // namespace dladmc
