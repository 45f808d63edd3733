#pragma once

// Block decomposition of an n1 x n2 matrix into l1 x l2 contiguous blocks of
// (at most) m1 x m2 entries, and the blocked LAD initial estimator built from
// independent per-block fits.

#include "dladmc/core.hpp"
#include "dladmc/lad_admm.hpp"

#include <span>
#include <variant>
#include <vector>

namespace dladmc {

struct IndexRange {
  Index begin = 0;
  Index end = 0;
  Index size() const noexcept { return end - begin; }
  bool contains(Index i) const noexcept { return i >= begin && i < end; }
  bool operator==(const IndexRange&) const = default;
};

struct BlockBounds {
  std::size_t id = 0;
  std::size_t row_block = 0;
  std::size_t col_block = 0;
  IndexRange rows;
  IndexRange cols;
};

class Partition {
 public:
  Partition() = default;

  Index n_rows() const noexcept { return n1_; }
  Index n_cols() const noexcept { return n2_; }
  Index block_rows() const noexcept { return m1_; }
  Index block_cols() const noexcept { return m2_; }
  std::size_t row_blocks() const noexcept { return row_ranges_.size(); }
  std::size_t col_blocks() const noexcept { return col_ranges_.size(); }
  std::size_t block_count() const noexcept { return row_blocks() * col_blocks(); }

  const std::vector<IndexRange>& row_ranges() const noexcept { return row_ranges_; }
  const std::vector<IndexRange>& col_ranges() const noexcept { return col_ranges_; }

  /// Block id = row_block * l2 + col_block.
  BlockBounds block(std::size_t id) const;
  std::size_t block_of(Index row, Index col) const;

  friend Partition make_partition(Index n1, Index n2, Index m1, Index m2);

 private:
  Index n1_ = 0, n2_ = 0, m1_ = 0, m2_ = 0;
  std::vector<IndexRange> row_ranges_;
  std::vector<IndexRange> col_ranges_;
};

/// l1 = ceil(n1/m1) row ranges of size m1 with a smaller trailing range when
/// m1 does not divide n1; columns likewise.
Partition make_partition(Index n1, Index n2, Index m1, Index m2);

struct BlockData {
  BlockBounds bounds;
  ObservationSet obs;                    // block-local indices
  std::vector<double> responses;
  std::vector<std::size_t> source_index; // position in the global entry list
};

std::vector<BlockData> scatter(const ObservationSet& obs, std::span<const double> responses,
                               const Partition& p);

/// Throws InvalidInput when a block estimate has the wrong shape.
MatrixEstimate gather(std::span<const MatrixEstimate> blocks, const Partition& p);

/// lambda_l = c sqrt(log(m1 + m2) / (min(m1, m2) N_l)).
struct TheoryLambdaRule {
  double c = 1.0;
  double operator()(Index m1, Index m2, std::size_t n_l) const;
};
using BlockLambda = std::variant<TheoryLambdaRule, std::vector<double>>;

struct BlockFitReport {
  std::size_t id = 0;
  std::size_t n_obs = 0;
  double lambda = 0.0;
  bool converged = true;
  bool skipped = false;
  int iterations = 0;
};

struct BlockedFit {
  MatrixEstimate estimate;
  std::vector<BlockFitReport> blocks;
  std::vector<AdmmState> states;  // final per-block solver states for warm starts
};

struct BlockedFitOptions {
  unsigned threads = 1;
  // Per-block warm starts (one per block, in block id order) or empty.
  std::span<const AdmmState> warm_states{};
};

/// Fits every block with fit_lad_nuclear concurrently and gathers. Empty blocks
/// yield zero estimates and a warning. Warns when a block's N_l deviates from
/// m1 m2 N / (n1 n2) by more than a factor of 5. Per-block numerical errors
/// are rethrown as NumericalError naming the block.
BlockedFit fit_bladmc(const ObservationSet& obs, std::span<const double> responses, const Partition& p,
                      const BlockLambda& lambda, const AdmmConfig& cfg, const BlockedFitOptions& opts = {});

}  // namespace dladmc
