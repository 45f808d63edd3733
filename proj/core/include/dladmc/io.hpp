#pragma once

// Text formats.
//
// Observation file: header `# n1 n2 N`, then one `row col value` line per
// entry with 0-based indices separated by single spaces.
//
// Dense matrix file: first line `n1 n2`, then n1 lines of n2 space-separated
// decimals.
//
// Numbers are written with 17 significant digits so files round-trip exactly.

#include "dladmc/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace dladmc::io {

ObservationSet read_observations(std::istream& in);
ObservationSet read_observations(const std::filesystem::path& path);
void write_observations(std::ostream& out, const ObservationSet& obs);
void write_observations(const std::filesystem::path& path, const ObservationSet& obs);

Eigen::MatrixXd read_matrix(std::istream& in);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);
void write_matrix(std::ostream& out, const Eigen::MatrixXd& a);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& a);

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

}  // namespace dladmc::io
