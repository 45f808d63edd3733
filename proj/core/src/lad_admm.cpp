#include "dladmc/lad_admm.hpp"

#include "dladmc/error.hpp"

#include <cmath>
#include <sstream>

namespace dladmc {

namespace {

void check_aligned(const ObservationSet& obs, std::span<const double> responses) {
  if (obs.empty()) throw InvalidInput("empty observation set");
  if (responses.size() != obs.size()) throw InvalidInput("responses length does not match observations");
}

double soft(double v, double tau) {
  if (v > tau) return v - tau;
  if (v < -tau) return v + tau;
  return 0.0;
}

}  // namespace

void AdmmConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be finite and non-negative");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidInput("rho must be finite and positive");
  if (max_iters < 1) throw InvalidInput("max_iters must be at least 1");
  if (!(primal_tol > 0.0 && primal_tol < 1.0) || !(dual_tol > 0.0 && dual_tol < 1.0)) {
    throw InvalidInput("ADMM tolerances must lie in (0, 1)");
  }
  if (!(box_bound > 0.0)) throw InvalidInput("box_bound must be positive");
}

AdmmState AdmmState::zeros(Index n1, Index n2, std::size_t n, double rho) {
  AdmmState s;
  s.A = Eigen::MatrixXd::Zero(n1, n2);
  s.Z = s.A;
  s.dual_Z = s.A;
  s.r = Eigen::VectorXd::Zero(static_cast<Index>(n));
  s.dual_r = s.r;
  s.rho = rho;
  return s;
}

AdmmState AdmmState::from_matrix(const Eigen::MatrixXd& a, const ObservationSet& obs,
                                 std::span<const double> responses, double rho) {
  check_aligned(obs, responses);
  AdmmState s = zeros(obs.rows(), obs.cols(), obs.size(), rho);
  s.A = a;
  s.Z = a;
  for (std::size_t k = 0; k < obs.size(); ++k) s.r(static_cast<Index>(k)) = responses[k] - a(obs[k].row, obs[k].col);
  return s;
}

LadAdmmProblem::LadAdmmProblem(const ObservationSet& obs, std::span<const double> responses, const AdmmConfig& cfg)
    : obs_(obs), y_(responses), cfg_(cfg) {
  check_aligned(obs, responses);
  cfg.validate();
  flat_.reserve(obs.size());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(obs.rows() * obs.cols());
  for (const auto& e : obs.entries()) {
    flat_.push_back(e.col * obs.rows() + e.row);
    count(flat_.back()) += 1.0;
  }
  inv_weight_ = (count.array() + 1.0).inverse();
}

void LadAdmmProblem::step(AdmmState& s, ThresholdSvd& svd) const {
  const double n = static_cast<double>(flat_.size());
  const std::size_t nk = flat_.size();

  // A: per-entry average of the data targets and the consensus target.
  s.A = s.Z - s.dual_Z;
  double* a = s.A.data();
  for (std::size_t k = 0; k < nk; ++k) {
    const Index ki = static_cast<Index>(k);
    a[flat_[k]] += y_[k] - s.r(ki) - s.dual_r(ki);
  }
  s.A.reshaped().array() *= inv_weight_.array();
  if (std::isfinite(cfg_.box_bound)) s.A = s.A.cwiseMax(-cfg_.box_bound).cwiseMin(cfg_.box_bound);

  // r: prox of |.| / rho.
  const double tau = 1.0 / s.rho;
  for (std::size_t k = 0; k < nk; ++k) {
    const Index ki = static_cast<Index>(k);
    s.r(ki) = soft(y_[k] - a[flat_[k]] - s.dual_r(ki), tau);
  }

  // Z: singular value thresholding.
  const Eigen::MatrixXd z_old = s.Z;
  const double z_tau = n * cfg_.lambda / s.rho;
  const ThinSvd part = svd.above(s.A + s.dual_Z, z_tau);
  s.z_singular_values = part.s.array() - z_tau;
  s.Z = part.U * s.z_singular_values.asDiagonal() * part.V.transpose();

  // Scaled dual ascent and residuals.
  double primal_sq = 0.0;
  for (std::size_t k = 0; k < nk; ++k) {
    const Index ki = static_cast<Index>(k);
    const double res = a[flat_[k]] + s.r(ki) - y_[k];
    s.dual_r(ki) += res;
    primal_sq += res * res;
  }
  const Eigen::MatrixXd gap = s.A - s.Z;
  s.dual_Z += gap;
  primal_sq += gap.squaredNorm();
  s.primal_residual = std::sqrt(primal_sq);
  s.dual_residual = s.rho * (s.Z - z_old).norm();
}

double LadAdmmProblem::objective(const Eigen::MatrixXd& z, const Eigen::VectorXd& sv) const {
  double sum = 0.0;
  const double* zp = z.data();
  for (std::size_t k = 0; k < flat_.size(); ++k) sum += std::abs(y_[k] - zp[flat_[k]]);
  return sum / static_cast<double>(flat_.size()) + cfg_.lambda * sv.sum();
}

AdmmState admm_iteration(const AdmmState& state, const ObservationSet& obs, std::span<const double> responses,
                         const AdmmConfig& cfg) {
  LadAdmmProblem problem(obs, responses, cfg);
  if (state.A.rows() != obs.rows() || state.A.cols() != obs.cols() ||
      state.r.size() != static_cast<Index>(obs.size())) {
    throw InvalidInput("ADMM state dimensions do not match the observations");
  }
  ThresholdSvd::Options svd_opts = cfg.svd;
  svd_opts.backend = SvdBackend::full;
  ThresholdSvd svd(svd_opts);
  AdmmState next = state;
  problem.step(next, svd);
  return next;
}

LadFitResult fit_lad_nuclear_full(const ObservationSet& obs, std::span<const double> responses,
                                  const AdmmConfig& cfg, const AdmmState* warm_start) {
  LadAdmmProblem problem(obs, responses, cfg);
  AdmmState s;
  if (warm_start) {
    if (warm_start->A.rows() != obs.rows() || warm_start->A.cols() != obs.cols() ||
        warm_start->r.size() != static_cast<Index>(obs.size())) {
      throw InvalidInput("ADMM warm start dimensions do not match the observations");
    }
    s = *warm_start;
  } else {
    s = AdmmState::from_matrix(Eigen::MatrixXd::Zero(obs.rows(), obs.cols()), obs, responses, cfg.rho);
  }

  const double scale = std::sqrt(static_cast<double>(obs.rows() * obs.cols()));
  const double eps_primal = cfg.primal_tol * scale;
  const double eps_dual = cfg.dual_tol * scale;
  ThresholdSvd svd(cfg.svd);

  LadFitResult out;
  auto& est = out.estimate;
  est.info.converged = false;
  // Balancing rho on every iteration can oscillate and stall convergence, so
  // it is only revisited periodically and a bounded number of times.
  constexpr int kRhoUpdateEvery = 10;
  constexpr int kMaxRhoUpdates = 30;
  int rho_updates = 0;
  int iter = 0;
  while (iter < cfg.max_iters) {
    problem.step(s, svd);
    ++iter;
    if (!s.Z.allFinite() || !s.A.allFinite() || !std::isfinite(s.primal_residual)) {
      std::ostringstream msg;
      msg << "ADMM produced non-finite iterates at iteration " << iter << " (rho " << s.rho << ")";
      throw NumericalError(msg.str());
    }
    est.objective_trace.push_back(problem.objective(s.Z, s.z_singular_values));
    if (s.primal_residual <= eps_primal && s.dual_residual <= eps_dual) {
      est.info.converged = true;
      break;
    }
    if (cfg.adaptive_rho && iter % kRhoUpdateEvery == 0 && rho_updates < kMaxRhoUpdates) {
      if (s.primal_residual > 10.0 * s.dual_residual) {
        ++rho_updates;
        s.rho *= 2.0;
        s.dual_r /= 2.0;
        s.dual_Z /= 2.0;
      } else if (s.dual_residual > 10.0 * s.primal_residual) {
        ++rho_updates;
        s.rho /= 2.0;
        s.dual_r *= 2.0;
        s.dual_Z *= 2.0;
      }
    }
  }

  est.values = s.Z;
  if (std::isfinite(cfg.box_bound)) {
    est.values = est.values.cwiseMax(-cfg.box_bound).cwiseMin(cfg.box_bound);
    est.singular_values = singular_values(est.values);
  } else {
    est.singular_values = s.z_singular_values;
  }
  est.iterations_used = iter;
  est.info.primal_residual = s.primal_residual;
  est.info.dual_residual = s.dual_residual;
  est.info.final_rho = s.rho;
  if (!est.info.converged) {
    std::ostringstream msg;
    msg << "ADMM stopped at max_iters=" << cfg.max_iters << " (primal " << s.primal_residual << ", dual "
        << s.dual_residual << ")";
    est.info.warnings.push_back(msg.str());
  }
  out.state = std::move(s);
  return out;
}

MatrixEstimate fit_lad_nuclear(const ObservationSet& obs, std::span<const double> responses, const AdmmConfig& cfg) {
  return fit_lad_nuclear_full(obs, responses, cfg).estimate;
}

double lad_lambda_max(const ObservationSet& obs, std::span<const double> responses) {
  check_aligned(obs, responses);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(obs.rows(), obs.cols());
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const double y = responses[k];
    g(obs[k].row, obs[k].col) += (y > 0.0) - (y < 0.0);
  }
  const Eigen::VectorXd s = singular_values(g);
  return s.size() ? s(0) / static_cast<double>(obs.size()) : 0.0;
}

}  // namespace dladmc
