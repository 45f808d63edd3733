#include "dladmc/svd.hpp"

#include "dladmc/error.hpp"

#include <algorithm>
#include <sstream>

namespace dladmc {

namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

ThinSvd keep_above(ThinSvd svd, double threshold) {
  Eigen::Index k = 0;
  while (k < svd.s.size() && svd.s(k) > threshold) ++k;
  return {svd.U.leftCols(k), svd.s.head(k), svd.V.leftCols(k)};
}

}  // namespace

Eigen::MatrixXd ThinSvd::reconstruct() const {
  return U * s.asDiagonal() * V.transpose();
}

ThinSvd full_svd(const Eigen::MatrixXd& a) {
  if (!a.allFinite()) {
    const auto bad = (!a.array().isFinite()).count();
    std::ostringstream msg;
    msg << "SVD of " << a.rows() << "x" << a.cols() << " matrix with " << bad << " non-finite entries";
    throw NumericalError(msg.str());
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    std::ostringstream msg;
    const auto& s = svd.singularValues();
    msg << "SVD failed for " << a.rows() << "x" << a.cols() << " matrix";
    if (s.size() > 0 && s(s.size() - 1) > 0) msg << ", condition estimate " << s(0) / s(s.size() - 1);
    msg << ", frobenius norm " << a.norm();
    throw NumericalError(msg.str());
  }
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

ThresholdSvd::ThresholdSvd(Options opts) : opts_(opts), rng_(opts.seed) {}

bool ThresholdSvd::use_truncated(const Eigen::MatrixXd& a) const {
  switch (opts_.backend) {
    case SvdBackend::full:
      return false;
    case SvdBackend::truncated:
      return true;
    case SvdBackend::automatic:
      break;
  }
  return std::min(a.rows(), a.cols()) > opts_.truncated_min_dim;
}

ThinSvd ThresholdSvd::above(const Eigen::MatrixXd& a, double threshold) {
  last_truncated_ = use_truncated(a);
  if (!last_truncated_) {
    auto svd = keep_above(full_svd(a), threshold);
    last_rank_ = svd.rank();
    return svd;
  }
  return truncated(a, threshold);
}

constexpr int kMaxExtraPowerIterations = 60;
constexpr double kPowerTolerance = 1e-10;

ThinSvd ThresholdSvd::truncated(const Eigen::MatrixXd& a, double threshold) {
  if (!a.allFinite()) return full_svd(a);  // reports the diagnostics
  const Eigen::Index min_dim = std::min(a.rows(), a.cols());
  Eigen::Index k = std::max<Eigen::Index>(last_rank_ + 5, 10);
  std::normal_distribution<double> gauss;
  for (;;) {
    const Eigen::Index width = k + opts_.oversampling;
    if (2 * width >= min_dim) {
      last_truncated_ = false;
      auto svd = keep_above(full_svd(a), threshold);
      last_rank_ = svd.rank();
      return svd;
    }
    Eigen::MatrixXd omega(a.cols(), width);
    Eigen::Index warm = 0;
    if (warm_v_.rows() == a.cols()) {
      warm = std::min(width, warm_v_.cols());
      omega.leftCols(warm) = warm_v_.leftCols(warm);
    }
    for (Eigen::Index j = warm; j < width; ++j)
      for (Eigen::Index i = 0; i < a.cols(); ++i) omega(i, j) = gauss(rng_);

    Eigen::MatrixXd q = orthonormalize(a * omega);
    for (int it = 0; it < opts_.power_iterations; ++it) {
      q = orthonormalize(a * orthonormalize(a.transpose() * q));
    }
    Eigen::BDCSVD<Eigen::MatrixXd> small(q.transpose() * a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    // Keep iterating until the values above the threshold settle.
    for (int it = 0; it < kMaxExtraPowerIterations; ++it) {
      const Eigen::VectorXd prev = small.singularValues();
      if (prev(width - 1) > threshold) break;
      q = orthonormalize(a * orthonormalize(a.transpose() * q));
      small.compute(q.transpose() * a, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::VectorXd& cur = small.singularValues();
      double change = 0.0;
      for (Eigen::Index i = 0; i < width && prev(i) > threshold; ++i) change = std::max(change, std::abs(cur(i) - prev(i)));
      if (change <= kPowerTolerance * cur(0)) break;
    }
    const Eigen::VectorXd& s = small.singularValues();
    if (s(width - 1) > threshold) {
      k *= 2;
      continue;
    }
    ThinSvd svd{q * small.matrixU(), s, small.matrixV()};
    warm_v_ = svd.V;
    svd = keep_above(std::move(svd), threshold);
    last_rank_ = svd.rank();
    return svd;
  }
}

}  // namespace dladmc
