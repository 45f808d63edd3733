#include "dladmc/core.hpp"

#include "dladmc/error.hpp"

#include <cmath>
#include <string>

namespace dladmc {

namespace {

void check_entry(Index n_rows, Index n_cols, const Entry& e) {
  if (e.row < 0 || e.row >= n_rows || e.col < 0 || e.col >= n_cols) {
    throw RangeError("entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                     ") outside " + std::to_string(n_rows) + "x" + std::to_string(n_cols));
  }
}

void check_aligned(const ObservationSet& obs, std::span<const double> responses) {
  if (obs.empty()) throw InvalidInput("empty observation set");
  if (responses.size() != obs.size()) {
    throw InvalidInput("responses length " + std::to_string(responses.size()) + " != N = " +
                       std::to_string(obs.size()));
  }
}

}  // namespace

ObservationSet::ObservationSet(Index n_rows, Index n_cols, std::vector<Entry> entries)
    : n_rows_(n_rows), n_cols_(n_cols), entries_(std::move(entries)) {
  if (n_rows <= 0 || n_cols <= 0) throw InvalidInput("observation set dimensions must be positive");
  for (const auto& e : entries_) check_entry(n_rows_, n_cols_, e);
}

std::vector<double> ObservationSet::values() const {
  std::vector<double> y;
  y.reserve(entries_.size());
  for (const auto& e : entries_) y.push_back(e.value);
  return y;
}

void ObservationSet::push_back(const Entry& e) {
  check_entry(n_rows_, n_cols_, e);
  entries_.push_back(e);
}

double entry_of(Index row, Index col, const Eigen::MatrixXd& a) {
  if (row < 0 || row >= a.rows() || col < 0 || col >= a.cols()) {
    throw RangeError("index (" + std::to_string(row) + ", " + std::to_string(col) + ") outside " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  return a(row, col);
}

double entry_of(Index row, Index col, const MatrixEstimate& a) { return entry_of(row, col, a.values); }

double eval_loss(const ObservationSet& obs, std::span<const double> responses, const Eigen::MatrixXd& a,
                 Loss loss) {
  check_aligned(obs, responses);
  if (a.rows() != obs.rows() || a.cols() != obs.cols()) throw InvalidInput("matrix dimensions differ from observations");
  double sum = 0.0;
  const auto& entries = obs.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const double u = responses[k] - a(entries[k].row, entries[k].col);
    sum += loss == Loss::absolute ? std::abs(u) : u * u;
  }
  return sum / static_cast<double>(entries.size());
}

double eval_loss(const ObservationSet& obs, std::span<const double> responses, const MatrixEstimate& a,
                 Loss loss) {
  return eval_loss(obs, responses, a.values, loss);
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return {};
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues();
}

void ensure_singular_values(MatrixEstimate& a) {
  if (!a.singular_values) a.singular_values = singular_values(a.values);
}

int numeric_rank(const Eigen::VectorXd& s, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidInput("rank tolerance must lie in (0, 1)");
  if (s.size() == 0 || !(s.maxCoeff() > 0.0)) return 0;
  const double cut = rel_tol * s.maxCoeff();
  return static_cast<int>((s.array() > cut).count());
}

int numeric_rank(const Eigen::MatrixXd& a, double rel_tol) { return numeric_rank(singular_values(a), rel_tol); }

int numeric_rank(const MatrixEstimate& a, double rel_tol) {
  if (a.singular_values) return numeric_rank(*a.singular_values, rel_tol);
  return numeric_rank(a.values, rel_tol);
}

Metrics metrics(const MatrixEstimate& a_hat, const Eigen::MatrixXd& reference, double rank_rel_tol) {
  if (a_hat.rows() != reference.rows() || a_hat.cols() != reference.cols()) {
    throw InvalidInput("estimate and reference dimensions differ");
  }
  if (reference.size() == 0) throw InvalidInput("empty reference matrix");
  const Eigen::ArrayXXd diff = (a_hat.values - reference).array();
  Metrics m;
  const double n = static_cast<double>(diff.size());
  m.rmse = std::sqrt(diff.square().sum() / n);
  m.mae = diff.abs().sum() / n;
  m.rank = numeric_rank(a_hat, rank_rel_tol);
  return m;
}

Metrics metrics(const MatrixEstimate& a_hat, const ObservationSet& test, double rank_rel_tol) {
  if (a_hat.rows() != test.rows() || a_hat.cols() != test.cols()) {
    throw InvalidInput("estimate and test set dimensions differ");
  }
  if (test.empty()) throw InvalidInput("empty test set");
  double sq = 0.0, ab = 0.0;
  for (const auto& e : test.entries()) {
    const double u = a_hat.values(e.row, e.col) - e.value;
    sq += u * u;
    ab += std::abs(u);
  }
  const double n = static_cast<double>(test.size());
  Metrics m;
  m.rmse = std::sqrt(sq / n);
  m.mae = ab / n;
  m.rank = numeric_rank(a_hat, rank_rel_tol);
  return m;
}

}  // namespace dladmc
