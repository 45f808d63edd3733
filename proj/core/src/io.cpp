#include "dladmc/io.hpp"

#include "dladmc/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dladmc::io {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw NumericalError("cannot format value");
  return std::string(buf, ptr);
}

ObservationSet read_observations(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  long long n1 = 0, n2 = 0, n = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] != '#') throw ParseError("expected header '# n1 n2 N'", line_no);
    std::istringstream hs(line.substr(1));
    if (!(hs >> n1 >> n2 >> n) || n1 <= 0 || n2 <= 0 || n < 0) {
      throw ParseError("malformed header '" + line + "'", line_no);
    }
    break;
  }
  if (n < 0) throw ParseError("missing header '# n1 n2 N'", line_no);
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(n));
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    long long row = 0, col = 0;
    double value = 0.0;
    std::string extra;
    if (!(ls >> row >> col >> value) || (ls >> extra)) throw ParseError("expected 'row col value'", line_no);
    if (row < 0 || row >= n1 || col < 0 || col >= n2) throw ParseError("index out of range", line_no);
    entries.push_back({row, col, value});
  }
  if (static_cast<long long>(entries.size()) != n) {
    throw ParseError("header declares " + std::to_string(n) + " entries, found " + std::to_string(entries.size()), 0);
  }
  return ObservationSet(n1, n2, std::move(entries));
}

ObservationSet read_observations(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_observations(in);
}

void write_observations(std::ostream& out, const ObservationSet& obs) {
  out << "# " << obs.rows() << ' ' << obs.cols() << ' ' << obs.size() << '\n';
  for (const auto& e : obs.entries()) out << e.row << ' ' << e.col << ' ' << format_double(e.value) << '\n';
}

void write_observations(const std::filesystem::path& path, const ObservationSet& obs) {
  auto out = open_out(path);
  write_observations(out, obs);
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  long long n1 = 0, n2 = 0;
  if (!(in >> n1 >> n2) || n1 <= 0 || n2 <= 0) throw ParseError("expected dimensions 'n1 n2'", 1);
  Eigen::MatrixXd a(n1, n2);
  for (long long i = 0; i < n1; ++i) {
    for (long long j = 0; j < n2; ++j) {
      if (!(in >> a(i, j))) throw ParseError("expected " + std::to_string(n2) + " values", static_cast<std::size_t>(i + 2));
    }
  }
  return a;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& a) {
  out << a.rows() << ' ' << a.cols() << '\n';
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& a) {
  auto out = open_out(path);
  write_matrix(out, a);
}

}  // namespace dladmc::io
