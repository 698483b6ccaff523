#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "cri/linalg.hpp"

namespace cri::io {

// "%.17g".
std::string format_decimal(double value);

// Matrix CSV: "# n=<n> p=<p> seed=<seed>" then n rows of p comma-separated decimals.
void write_matrix_csv(std::ostream& out, const ColumnMatrix& x, std::uint64_t seed);
std::string matrix_csv(const ColumnMatrix& x, std::uint64_t seed);

// Parses the matrix CSV format; '#' lines are skipped. Throws FormatError on
// ragged rows, bad numbers, or columns that are not unit norm.
ColumnMatrix read_matrix_csv(std::istream& in);
ColumnMatrix load_matrix(const std::string& path);

// Whitespace- or comma-separated numbers, '#' lines skipped.
Vector read_vector(std::istream& in);
Vector load_vector(const std::string& path);

// Writes `contents` to `path`, throwing IoError on failure.
void write_file(const std::string& path, const std::string& contents);

}  // namespace cri::io
