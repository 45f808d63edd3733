#include "dladmc/partition.hpp"

#include "dladmc/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace dladmc {

namespace {

std::vector<IndexRange> even_ranges(Index n, Index m) {
  std::vector<IndexRange> out;
  for (Index b = 0; b < n; b += m) out.push_back({b, std::min(b + m, n)});
  return out;
}

std::size_t find_range(const std::vector<IndexRange>& ranges, Index m, Index i) {
  const auto idx = static_cast<std::size_t>(i / m);
  return std::min(idx, ranges.size() - 1);
}

}  // namespace

Partition make_partition(Index n1, Index n2, Index m1, Index m2) {
  if (n1 <= 0 || n2 <= 0) throw InvalidInput("matrix dimensions must be positive");
  if (m1 < 1 || m2 < 1) throw InvalidInput("block dimensions must be positive");
  if (m1 > n1 || m2 > n2) throw InvalidInput("block dimensions exceed matrix dimensions");
  Partition p;
  p.n1_ = n1;
  p.n2_ = n2;
  p.m1_ = m1;
  p.m2_ = m2;
  p.row_ranges_ = even_ranges(n1, m1);
  p.col_ranges_ = even_ranges(n2, m2);
  return p;
}

BlockBounds Partition::block(std::size_t id) const {
  if (id >= block_count()) throw RangeError("block id " + std::to_string(id) + " out of range");
  BlockBounds b;
  b.id = id;
  b.row_block = id / col_blocks();
  b.col_block = id % col_blocks();
  b.rows = row_ranges_[b.row_block];
  b.cols = col_ranges_[b.col_block];
  return b;
}

std::size_t Partition::block_of(Index row, Index col) const {
  if (row < 0 || row >= n1_ || col < 0 || col >= n2_) throw RangeError("index outside partition");
  return find_range(row_ranges_, m1_, row) * col_blocks() + find_range(col_ranges_, m2_, col);
}

std::vector<BlockData> scatter(const ObservationSet& obs, std::span<const double> responses, const Partition& p) {
  if (obs.rows() != p.n_rows() || obs.cols() != p.n_cols()) {
    throw InvalidInput("partition does not match observation dimensions");
  }
  if (responses.size() != obs.size()) throw InvalidInput("responses length does not match observations");
  std::vector<BlockData> blocks;
  blocks.reserve(p.block_count());
  for (std::size_t l = 0; l < p.block_count(); ++l) {
    const auto b = p.block(l);
    blocks.push_back({b, ObservationSet(b.rows.size(), b.cols.size()), {}, {}});
  }
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const auto& e = obs[k];
    auto& blk = blocks[p.block_of(e.row, e.col)];
    blk.obs.push_back({e.row - blk.bounds.rows.begin, e.col - blk.bounds.cols.begin, e.value});
    blk.responses.push_back(responses[k]);
    blk.source_index.push_back(k);
  }
  return blocks;
}

MatrixEstimate gather(std::span<const MatrixEstimate> blocks, const Partition& p) {
  if (blocks.size() != p.block_count()) throw InvalidInput("gather: expected one estimate per block");
  MatrixEstimate out(Eigen::MatrixXd::Zero(p.n_rows(), p.n_cols()));
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    const auto b = p.block(l);
    const auto& v = blocks[l].values;
    if (v.rows() != b.rows.size() || v.cols() != b.cols.size()) {
      std::ostringstream msg;
      msg << "gather: block " << l << " is " << v.rows() << "x" << v.cols() << ", expected " << b.rows.size()
          << "x" << b.cols.size();
      throw InvalidInput(msg.str());
    }
    out.values.block(b.rows.begin, b.cols.begin, b.rows.size(), b.cols.size()) = v;
    out.iterations_used = std::max(out.iterations_used, blocks[l].iterations_used);
    out.info.converged = out.info.converged && blocks[l].info.converged;
  }
  return out;
}

double TheoryLambdaRule::operator()(Index m1, Index m2, std::size_t n_l) const {
  if (n_l == 0) return 0.0;
  return c * std::sqrt(std::log(static_cast<double>(m1 + m2)) /
                       (static_cast<double>(std::min(m1, m2)) * static_cast<double>(n_l)));
}

BlockedFit fit_bladmc(const ObservationSet& obs, std::span<const double> responses, const Partition& p,
                      const BlockLambda& lambda, const AdmmConfig& cfg, const BlockedFitOptions& opts) {
  cfg.validate();
  if (obs.empty()) throw InvalidInput("empty observation set");
  auto data = scatter(obs, responses, p);
  const std::size_t nb = data.size();
  if (!opts.warm_states.empty() && opts.warm_states.size() != nb) {
    throw InvalidInput("fit_bladmc: expected one warm start per block");
  }
  if (const auto* explicit_lambda = std::get_if<std::vector<double>>(&lambda)) {
    if (explicit_lambda->size() != nb && explicit_lambda->size() != 1) {
      throw InvalidInput("fit_bladmc: expected one lambda per block or a single shared lambda");
    }
  }

  BlockedFit out;
  out.blocks.resize(nb);
  out.states.resize(nb);
  std::vector<MatrixEstimate> estimates(nb);
  std::vector<std::exception_ptr> errors(nb);

  auto fit_block = [&](std::size_t l) {
    const auto& blk = data[l];
    auto& rep = out.blocks[l];
    rep.id = l;
    rep.n_obs = blk.obs.size();
    const Index rows = blk.bounds.rows.size();
    const Index cols = blk.bounds.cols.size();
    if (const auto* rule = std::get_if<TheoryLambdaRule>(&lambda)) {
      rep.lambda = (*rule)(rows, cols, rep.n_obs);
    } else {
      const auto& v = std::get<std::vector<double>>(lambda);
      rep.lambda = v.size() == 1 ? v[0] : v[l];
    }
    if (blk.obs.empty()) {
      rep.skipped = true;
      estimates[l] = MatrixEstimate(Eigen::MatrixXd::Zero(rows, cols));
      estimates[l].singular_values = Eigen::VectorXd();
      return;
    }
    AdmmConfig block_cfg = cfg;
    block_cfg.lambda = rep.lambda;
    const AdmmState* warm = opts.warm_states.empty() ? nullptr : &opts.warm_states[l];
    auto fit = fit_lad_nuclear_full(blk.obs, blk.responses, block_cfg, warm);
    rep.converged = fit.estimate.info.converged;
    rep.iterations = fit.estimate.iterations_used;
    estimates[l] = std::move(fit.estimate);
    out.states[l] = std::move(fit.state);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(nb)));
  if (workers == 1) {
    for (std::size_t l = 0; l < nb; ++l) {
      try {
        fit_block(l);
      } catch (...) {
        errors[l] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t l; (l = next.fetch_add(1)) < nb;) {
          try {
            fit_block(l);
          } catch (...) {
            errors[l] = std::current_exception();
          }
        }
      });
    }
  }

  for (std::size_t l = 0; l < nb; ++l) {
    if (!errors[l]) continue;
    try {
      std::rethrow_exception(errors[l]);
    } catch (const NumericalError& e) {
      throw NumericalError("block " + std::to_string(l) + ": " + e.what());
    }
  }

  out.estimate = gather(estimates, p);
  const double n = static_cast<double>(obs.size());
  const double cells = static_cast<double>(p.n_rows() * p.n_cols());
  for (std::size_t l = 0; l < nb; ++l) {
    const auto& b = data[l].bounds;
    const auto& rep = out.blocks[l];
    if (rep.skipped) {
      out.estimate.info.warnings.push_back("block " + std::to_string(l) + " has no observations; using zeros");
      continue;
    }
    const double expected = static_cast<double>(b.rows.size() * b.cols.size()) * n / cells;
    const double nl = static_cast<double>(rep.n_obs);
    if (nl > 5.0 * expected || 5.0 * nl < expected) {
      std::ostringstream msg;
      msg << "block " << l << " has " << rep.n_obs << " observations, expected about " << expected;
      out.estimate.info.warnings.push_back(msg.str());
    }
    for (const auto& w : estimates[l].info.warnings) out.estimate.info.warnings.push_back("block " + std::to_string(l) + ": " + w);
  }
  return out;
}

}  // namespace dladmc
