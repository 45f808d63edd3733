#pragma once

// MovieLens ratings: parsing, count filtering, outlier injection, bi-scaling
// and train/validation/test splits.

#include "dladmc/core.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace dladmc {

struct Rating {
  std::int64_t user = 0;
  std::int64_t item = 0;
  double rating = 0.0;
};

/// Raw ratings with compact index maps (original id -> 0-based index).
/// Indices are assigned in increasing id order.
class RatingsTable {
 public:
  RatingsTable() = default;
  explicit RatingsTable(std::vector<Rating> ratings);

  const std::vector<Rating>& ratings() const noexcept { return ratings_; }
  std::size_t size() const noexcept { return ratings_.size(); }
  Index n_users() const noexcept { return static_cast<Index>(user_index_.size()); }
  Index n_items() const noexcept { return static_cast<Index>(item_index_.size()); }
  const std::map<std::int64_t, Index>& user_index() const noexcept { return user_index_; }
  const std::map<std::int64_t, Index>& item_index() const noexcept { return item_index_; }

  /// Observation set over this table's index maps.
  ObservationSet to_observations() const;
  /// Observation set for `ratings` using this table's index maps; ratings whose
  /// user or item is unknown are dropped and counted in `dropped`.
  ObservationSet to_observations(std::span<const Rating> ratings, std::size_t* dropped = nullptr) const;

 private:
  std::vector<Rating> ratings_;
  std::map<std::int64_t, Index> user_index_;
  std::map<std::int64_t, Index> item_index_;
};

/// Lines `user item rating timestamp`, separated by tabs/spaces or `::`.
/// Throws ParseError with the line number on malformed lines and InvalidInput
/// for ratings outside [1, 5].
RatingsTable parse_movielens(std::istream& in);
RatingsTable parse_movielens(const std::filesystem::path& path);

enum class FilterMode { fixed_point, single_pass, rows_then_cols };

/// Keeps users and items with at least k ratings. fixed_point repeats the
/// removal until every remaining row and column satisfies the bound;
/// single_pass computes both count sets once on the input; rows_then_cols
/// drops sparse users first and then counts items on what remains. Throws
/// InvalidInput when nothing survives.
RatingsTable filter_min_counts(const RatingsTable& table, int k, FilterMode mode = FilterMode::fixed_point);

/// Exactly round(fraction * #{rating == 5}) uniformly chosen 5-ratings become 1.
RatingsTable inject_outliers(const RatingsTable& table, double fraction, std::uint64_t seed);

struct BiScaleParams {
  Eigen::VectorXd row_center, row_scale;
  Eigen::VectorXd col_center, col_scale;
  int iterations = 0;
  bool converged = false;

  /// (y - row_center_i - col_center_j) / (row_scale_i col_scale_j)
  double forward(Index row, Index col, double y) const;
  double inverse(Index row, Index col, double z) const;
  /// Applies `inverse` to every entry of a matrix on the scaled scale.
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& z) const;
};

struct BiScaleResult {
  std::vector<double> scaled;
  BiScaleParams params;
};

/// Alternating row/column centering and scaling on observed entries until
/// every parameter changes by less than `tol`. Every row and column must have
/// at least one observation (InvalidInput otherwise).
BiScaleResult biscale(const ObservationSet& train, std::span<const double> responses, int max_iters = 50,
                      double tol = 1e-6);

/// Disjoint covering folds of the entry positions [0, n), sizes differing by
/// at most one, shuffled deterministically by seed. Throws for n_folds < 2.
std::vector<std::vector<std::size_t>> split_folds(std::size_t n, int n_folds, std::uint64_t seed);

struct ProviderSplit {
  RatingsTable full;           // union of train and test
  std::vector<Rating> train;
  std::vector<Rating> test;
};

/// Loads predefined train/test files verbatim (e.g. ua.base / ua.test).
/// Throws InvalidInput if a (user, item) pair appears in both.
ProviderSplit load_provider_split(const std::filesystem::path& train_path, const std::filesystem::path& test_path);
ProviderSplit make_provider_split(std::vector<Rating> train, std::vector<Rating> test);

/// Restricts a provider split to the users and items kept in `filtered`.
ProviderSplit restrict_split(const ProviderSplit& split, const RatingsTable& filtered);

}  // namespace dladmc
