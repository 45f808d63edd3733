#pragma once

// Synthetic low-rank completion problems with the four noise settings used in
// the simulation study.

#include "dladmc/core.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace dladmc {

enum class NoiseKind { normal, cauchy, exponential, student_t };

std::string_view to_string(NoiseKind kind);
/// Accepts the names above and the scenario aliases s1..s4. Throws InvalidInput.
NoiseKind parse_noise_kind(std::string_view name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::normal;
  std::uint64_t seed = 0;
};

struct SyntheticScenario {
  std::string name = "S1";
  Index n1 = 400;
  Index n2 = 400;
  int rank = 3;
  double observe_rate = 0.2;
  NoiseSpec noise{};
  // Shift exponential noise by -log 2 so its median is zero.
  bool center_median = true;

  void validate() const;
  std::size_t sample_count() const;  // round(observe_rate * n1 * n2)
  /// Median of the noise as generated (log 2 for uncentered exponential).
  double noise_median() const;
};

/// U V^T with i.i.d. standard normal n1 x r and n2 x r factors.
Eigen::MatrixXd gen_lowrank(Index n1, Index n2, int r, std::uint64_t seed);

/// N = round(observe_rate n1 n2) uniform draws with replacement;
/// value = A_star(i, j) + noise. Deterministic per scenario.noise.seed.
ObservationSet sample_observations(const Eigen::MatrixXd& a_star, const SyntheticScenario& scenario);

/// Draws `count` noise values from `kind` (centered per `center_median`).
std::vector<double> draw_noise(NoiseKind kind, std::size_t count, std::uint64_t seed, bool center_median = true);

/// Derives an independent stream seed from a base seed and a stream label.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace dladmc
