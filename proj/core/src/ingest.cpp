#include "dladmc/ingest.hpp"

#include "dladmc/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>

namespace dladmc {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  if (line.find("::") != std::string::npos) {
    std::size_t start = 0;
    for (;;) {
      const auto pos = line.find("::", start);
      out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 2;
    }
  } else {
    std::istringstream ls(line);
    for (std::string tok; ls >> tok;) out.push_back(tok);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    T v;
    if constexpr (std::is_same_v<T, double>) v = std::stod(s, &pos);
    else v = static_cast<T>(std::stoll(s, &pos));
    while (pos < s.size() && (s[pos] == '\r' || s[pos] == ' ')) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("malformed field '" + s + "'", line_no);
  }
}

std::vector<Rating> parse_ratings(std::istream& in) {
  std::vector<Rating> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto f = split_fields(line);
    if (f.size() < 3 || f.size() > 4) throw ParseError("expected 'user item rating timestamp'", line_no);
    Rating r{parse_number<std::int64_t>(f[0], line_no), parse_number<std::int64_t>(f[1], line_no),
             parse_number<double>(f[2], line_no)};
    if (f.size() == 4) (void)parse_number<std::int64_t>(f[3], line_no);
    if (!(r.rating >= 1.0 && r.rating <= 5.0)) {
      throw InvalidInput("line " + std::to_string(line_no) + ": rating " + f[2] + " outside [1, 5]");
    }
    out.push_back(r);
  }
  return out;
}

std::vector<Rating> read_ratings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return parse_ratings(in);
}

}  // namespace

RatingsTable::RatingsTable(std::vector<Rating> ratings) : ratings_(std::move(ratings)) {
  for (const auto& r : ratings_) {
    user_index_.emplace(r.user, 0);
    item_index_.emplace(r.item, 0);
  }
  Index i = 0;
  for (auto& [id, idx] : user_index_) idx = i++;
  i = 0;
  for (auto& [id, idx] : item_index_) idx = i++;
}

ObservationSet RatingsTable::to_observations() const { return to_observations(ratings_); }

ObservationSet RatingsTable::to_observations(std::span<const Rating> ratings, std::size_t* dropped) const {
  if (user_index_.empty() || item_index_.empty()) throw InvalidInput("empty ratings table");
  ObservationSet obs(n_users(), n_items());
  std::size_t lost = 0;
  for (const auto& r : ratings) {
    const auto u = user_index_.find(r.user);
    const auto it = item_index_.find(r.item);
    if (u == user_index_.end() || it == item_index_.end()) {
      ++lost;
      continue;
    }
    obs.push_back({u->second, it->second, r.rating});
  }
  if (dropped) *dropped = lost;
  return obs;
}

RatingsTable parse_movielens(std::istream& in) { return RatingsTable(parse_ratings(in)); }

RatingsTable parse_movielens(const std::filesystem::path& path) { return RatingsTable(read_ratings(path)); }

RatingsTable filter_min_counts(const RatingsTable& table, int k, FilterMode mode) {
  if (k < 0) throw InvalidInput("minimum count must be non-negative");
  std::vector<Rating> kept = table.ratings();
  auto count = [](const std::vector<Rating>& rs, auto key) {
    std::unordered_map<std::int64_t, int> c;
    for (const auto& r : rs) ++c[key(r)];
    return c;
  };
  auto by_user = [](const Rating& r) { return r.user; };
  auto by_item = [](const Rating& r) { return r.item; };

  if (mode == FilterMode::rows_then_cols) {
    auto uc = count(kept, by_user);
    std::erase_if(kept, [&](const Rating& r) { return uc[r.user] < k; });
    auto ic = count(kept, by_item);
    std::erase_if(kept, [&](const Rating& r) { return ic[r.item] < k; });
  } else {
    for (;;) {
      auto uc = count(kept, by_user);
      auto ic = count(kept, by_item);
      const auto before = kept.size();
      std::erase_if(kept, [&](const Rating& r) { return uc[r.user] < k || ic[r.item] < k; });
      if (mode == FilterMode::single_pass || kept.size() == before) break;
    }
  }
  if (kept.empty() && !table.ratings().empty()) throw InvalidInput("count filter removed every rating");
  return RatingsTable(std::move(kept));
}

RatingsTable inject_outliers(const RatingsTable& table, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidInput("outlier fraction must lie in [0, 1]");
  std::vector<Rating> ratings = table.ratings();
  std::vector<std::size_t> fives;
  for (std::size_t i = 0; i < ratings.size(); ++i)
    if (ratings[i].rating == 5.0) fives.push_back(i);
  const auto n_change = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(fives.size())));
  std::mt19937_64 rng(seed);
  std::shuffle(fives.begin(), fives.end(), rng);
  for (std::size_t i = 0; i < n_change; ++i) ratings[fives[i]].rating = 1.0;
  return RatingsTable(std::move(ratings));
}

double BiScaleParams::forward(Index row, Index col, double y) const {
  return (y - row_center(row) - col_center(col)) / (row_scale(row) * col_scale(col));
}

double BiScaleParams::inverse(Index row, Index col, double z) const {
  return row_center(row) + col_center(col) + row_scale(row) * col_scale(col) * z;
}

Eigen::MatrixXd BiScaleParams::inverse(const Eigen::MatrixXd& z) const {
  if (z.rows() != row_center.size() || z.cols() != col_center.size()) throw InvalidInput("biscale inverse: dimension mismatch");
  Eigen::MatrixXd out = (row_scale * col_scale.transpose()).cwiseProduct(z);
  out.colwise() += row_center;
  out.rowwise() += col_center.transpose();
  return out;
}

BiScaleResult biscale(const ObservationSet& train, std::span<const double> y, int max_iters, double tol) {
  if (train.empty()) throw InvalidInput("biscale: empty observation set");
  if (y.size() != train.size()) throw InvalidInput("biscale: responses length does not match observations");
  if (max_iters < 1 || !(tol > 0.0)) throw InvalidInput("biscale: invalid iteration settings");
  const Index n1 = train.rows(), n2 = train.cols();
  Eigen::VectorXd row_n = Eigen::VectorXd::Zero(n1), col_n = Eigen::VectorXd::Zero(n2);
  for (const auto& e : train.entries()) {
    row_n(e.row) += 1.0;
    col_n(e.col) += 1.0;
  }
  if (row_n.minCoeff() < 1.0 || col_n.minCoeff() < 1.0) {
    throw InvalidInput("biscale: every row and column needs at least one observation");
  }

  constexpr double kScaleFloor = 1e-8;
  BiScaleParams p;
  p.row_center = Eigen::VectorXd::Zero(n1);
  p.col_center = Eigen::VectorXd::Zero(n2);
  p.row_scale = Eigen::VectorXd::Ones(n1);
  p.col_scale = Eigen::VectorXd::Ones(n2);
  const auto& entries = train.entries();

  for (int it = 1; it <= max_iters; ++it) {
    const BiScaleParams old = p;
    Eigen::VectorXd num = Eigen::VectorXd::Zero(n1), den = Eigen::VectorXd::Zero(n1);
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& e = entries[k];
      const double w = 1.0 / p.col_scale(e.col);
      num(e.row) += (y[k] - p.col_center(e.col)) * w;
      den(e.row) += w;
    }
    p.row_center = num.cwiseQuotient(den);

    Eigen::VectorXd cnum = Eigen::VectorXd::Zero(n2), cden = Eigen::VectorXd::Zero(n2);
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& e = entries[k];
      const double w = 1.0 / p.row_scale(e.row);
      cnum(e.col) += (y[k] - p.row_center(e.row)) * w;
      cden(e.col) += w;
    }
    p.col_center = cnum.cwiseQuotient(cden);

    Eigen::VectorXd rs = Eigen::VectorXd::Zero(n1);
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& e = entries[k];
      const double u = (y[k] - p.row_center(e.row) - p.col_center(e.col)) / p.col_scale(e.col);
      rs(e.row) += u * u;
    }
    p.row_scale = rs.cwiseQuotient(row_n).cwiseSqrt().cwiseMax(kScaleFloor);

    Eigen::VectorXd cs = Eigen::VectorXd::Zero(n2);
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& e = entries[k];
      const double u = (y[k] - p.row_center(e.row) - p.col_center(e.col)) / p.row_scale(e.row);
      cs(e.col) += u * u;
    }
    p.col_scale = cs.cwiseQuotient(col_n).cwiseSqrt().cwiseMax(kScaleFloor);

    p.iterations = it;
    const double change = std::max({(p.row_center - old.row_center).lpNorm<Eigen::Infinity>(),
                                    (p.col_center - old.col_center).lpNorm<Eigen::Infinity>(),
                                    (p.row_scale - old.row_scale).lpNorm<Eigen::Infinity>(),
                                    (p.col_scale - old.col_scale).lpNorm<Eigen::Infinity>()});
    if (change < tol) {
      p.converged = true;
      break;
    }
  }

  BiScaleResult out;
  out.scaled.resize(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) out.scaled[k] = p.forward(entries[k].row, entries[k].col, y[k]);
  out.params = std::move(p);
  return out;
}

std::vector<std::vector<std::size_t>> split_folds(std::size_t n, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw InvalidInput("split_folds: need at least two folds");
  if (n < static_cast<std::size_t>(n_folds)) throw InvalidInput("split_folds: fewer entries than folds");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto k = static_cast<std::size_t>(n_folds);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos), perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(folds[f].begin(), folds[f].end());
    pos += size;
  }
  return folds;
}

ProviderSplit make_provider_split(std::vector<Rating> train, std::vector<Rating> test) {
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  for (const auto& r : train) seen.emplace(r.user, r.item);
  for (const auto& r : test) {
    if (seen.count({r.user, r.item})) {
      throw InvalidInput("provided splits overlap at user " + std::to_string(r.user) + ", item " + std::to_string(r.item));
    }
  }
  std::vector<Rating> all = train;
  all.insert(all.end(), test.begin(), test.end());
  return {RatingsTable(std::move(all)), std::move(train), std::move(test)};
}

ProviderSplit load_provider_split(const std::filesystem::path& train_path, const std::filesystem::path& test_path) {
  return make_provider_split(read_ratings(train_path), read_ratings(test_path));
}

ProviderSplit restrict_split(const ProviderSplit& split, const RatingsTable& filtered) {
  auto keep = [&](const std::vector<Rating>& rs) {
    std::vector<Rating> out;
    for (const auto& r : rs) {
      if (filtered.user_index().count(r.user) && filtered.item_index().count(r.item)) out.push_back(r);
    }
    return out;
  };
  ProviderSplit out;
  out.full = filtered;
  out.train = keep(split.train);
  out.test = keep(split.test);
  return out;
}

}  // namespace dladmc
