#pragma once

// Singular value decompositions used by singular value thresholding.

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace dladmc {

struct ThinSvd {
  Eigen::MatrixXd U;  // n1 x k, orthonormal columns
  Eigen::VectorXd s;  // k, non-increasing
  Eigen::MatrixXd V;  // n2 x k, orthonormal columns

  Eigen::Index rank() const noexcept { return s.size(); }
  Eigen::MatrixXd reconstruct() const;
};

enum class SvdBackend {
  automatic,  // full below `truncated_min_dim`, truncated above
  full,
  truncated,
};

/// Full thin SVD (divide and conquer). Throws NumericalError on non-finite
/// input or failure, reporting a condition estimate when available.
ThinSvd full_svd(const Eigen::MatrixXd& a);

/// Computes the singular triplets of a matrix whose singular values exceed a
/// threshold. The truncated path runs warm-started subspace iteration and
/// grows the subspace until the smallest computed value drops below the
/// threshold, so every triplet above it is captured.
class ThresholdSvd {
 public:
  struct Options {
    SvdBackend backend = SvdBackend::automatic;
    Eigen::Index truncated_min_dim = 512;
    int power_iterations = 2;
    Eigen::Index oversampling = 10;
    std::uint64_t seed = 0x5eed;
  };

  ThresholdSvd() : ThresholdSvd(Options{}) {}
  explicit ThresholdSvd(Options opts);

  /// Triplets with singular value strictly greater than `threshold`.
  ThinSvd above(const Eigen::MatrixXd& a, double threshold);

  /// True when the last call used the truncated path.
  bool last_was_truncated() const noexcept { return last_truncated_; }

 private:
  bool use_truncated(const Eigen::MatrixXd& a) const;
  ThinSvd truncated(const Eigen::MatrixXd& a, double threshold);

  Options opts_;
  std::mt19937_64 rng_;
  Eigen::MatrixXd warm_v_;
  Eigen::Index last_rank_ = 0;
  bool last_truncated_ = false;
};

}  // namespace dladmc
