#include "dladmc/synthetic.hpp"

#include "dladmc/error.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace dladmc {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::normal: return "normal";
    case NoiseKind::cauchy: return "cauchy";
    case NoiseKind::exponential: return "exponential";
    case NoiseKind::student_t: return "student_t";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "normal" || name == "s1" || name == "S1") return NoiseKind::normal;
  if (name == "cauchy" || name == "s2" || name == "S2") return NoiseKind::cauchy;
  if (name == "exponential" || name == "s3" || name == "S3") return NoiseKind::exponential;
  if (name == "student_t" || name == "t1" || name == "s4" || name == "S4") return NoiseKind::student_t;
  throw InvalidInput("unknown noise kind '" + std::string(name) + "'");
}

void SyntheticScenario::validate() const {
  if (n1 <= 0 || n2 <= 0) throw InvalidInput("scenario dimensions must be positive");
  if (rank < 1 || rank > std::min(n1, n2)) throw InvalidInput("scenario rank must lie in [1, min(n1, n2)]");
  if (!(observe_rate > 0.0 && observe_rate <= 1.0)) throw InvalidInput("observe_rate must lie in (0, 1]");
  if (sample_count() == 0) throw InvalidInput("scenario yields no observations");
}

std::size_t SyntheticScenario::sample_count() const {
  return static_cast<std::size_t>(std::llround(observe_rate * static_cast<double>(n1) * static_cast<double>(n2)));
}

double SyntheticScenario::noise_median() const {
  return noise.kind == NoiseKind::exponential && !center_median ? std::numbers::ln2 : 0.0;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer over the combined key.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Eigen::MatrixXd gen_lowrank(Index n1, Index n2, int r, std::uint64_t seed) {
  if (n1 <= 0 || n2 <= 0 || r < 1) throw InvalidInput("gen_lowrank: dimensions and rank must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd u(n1, r), v(n2, r);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < n1; ++i) u(i, j) = gauss(rng);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < n2; ++i) v(i, j) = gauss(rng);
  return u * v.transpose();
}

std::vector<double> draw_noise(NoiseKind kind, std::size_t count, std::uint64_t seed, bool center_median) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(count);
  switch (kind) {
    case NoiseKind::normal: {
      std::normal_distribution<double> d;
      for (auto& x : out) x = d(rng);
      break;
    }
    case NoiseKind::cauchy: {
      std::cauchy_distribution<double> d;
      for (auto& x : out) x = d(rng);
      break;
    }
    case NoiseKind::exponential: {
      std::exponential_distribution<double> d(1.0);
      const double shift = center_median ? std::numbers::ln2 : 0.0;
      for (auto& x : out) x = d(rng) - shift;
      break;
    }
    case NoiseKind::student_t: {
      std::student_t_distribution<double> d(1.0);
      for (auto& x : out) x = d(rng);
      break;
    }
  }
  return out;
}

ObservationSet sample_observations(const Eigen::MatrixXd& a_star, const SyntheticScenario& scenario) {
  scenario.validate();
  if (a_star.rows() != scenario.n1 || a_star.cols() != scenario.n2) {
    throw InvalidInput("sample_observations: matrix does not match scenario dimensions");
  }
  const std::size_t n = scenario.sample_count();
  std::mt19937_64 rng(derive_seed(scenario.noise.seed, 0));
  std::uniform_int_distribution<Index> cell(0, scenario.n1 * scenario.n2 - 1);
  const auto noise = draw_noise(scenario.noise.kind, n, derive_seed(scenario.noise.seed, 1), scenario.center_median);
  std::vector<Entry> entries(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Index flat = cell(rng);
    const Index i = flat % scenario.n1;
    const Index j = flat / scenario.n1;
    entries[k] = {i, j, a_star(i, j) + noise[k]};
  }
  return ObservationSet(scenario.n1, scenario.n2, std::move(entries));
}

}  // namespace dladmc
