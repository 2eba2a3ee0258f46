#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "cirs/linalg/errors.hpp"
#include "cirs/linalg/sparse.hpp"

namespace cirs {

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace detail

/// Reads a Matrix Market coordinate file from a stream.
///
/// Fields real, integer and pattern (values 1) are accepted; symmetric and
/// skew-symmetric storage is mirrored. Duplicates are summed.
inline SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty input, expected %%MatrixMarket header", 1);
  ++line_no;

  std::istringstream header(line);
  std::string banner, object, format, field, symmetry, extra;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || symmetry.empty() || (header >> extra))
    throw ParseError("malformed header: '" + line + "'", line_no);
  object = detail::lower(object);
  format = detail::lower(format);
  field = detail::lower(field);
  symmetry = detail::lower(symmetry);
  if (object != "matrix") throw ParseError("unsupported object '" + object + "'", line_no);
  if (format != "coordinate") throw ParseError("unsupported format '" + format + "'", line_no);
  if (field != "real" && field != "integer" && field != "pattern" && field != "double")
    throw ParseError("non-real field '" + field + "'", line_no);
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
    throw ParseError("unsupported symmetry '" + symmetry + "'", line_no);
  const bool pattern = field == "pattern";
  const bool mirror = symmetry != "general";
  const double mirror_sign = symmetry == "skew-symmetric" ? -1.0 : 1.0;

  std::size_t rows = 0, cols = 0, declared = 0;
  for (;;) {
    if (!std::getline(in, line)) throw ParseError("missing size line", line_no + 1);
    ++line_no;
    if (detail::blank_or_comment(line)) continue;
    std::istringstream sz(line);
    if (!(sz >> rows >> cols >> declared) || (sz >> extra))
      throw ParseError("malformed size line: '" + line + "'", line_no);
    break;
  }
  if (mirror && rows != cols) throw ParseError("symmetric storage needs a square matrix", line_no);

  std::vector<Triplet> entries;
  entries.reserve(mirror ? 2 * declared : declared);
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank_or_comment(line)) continue;
    if (seen == declared) throw ParseError("more entries than declared", line_no);
    std::istringstream es(line);
    long long i = 0, j = 0;
    double v = 1.0;
    if (!(es >> i >> j) || (!pattern && !(es >> v)) || (es >> extra))
      throw ParseError("malformed entry: '" + line + "'", line_no);
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > rows || static_cast<std::size_t>(j) > cols)
      throw ParseError("index (" + std::to_string(i) + ", " + std::to_string(j) +
                           ") outside declared " + std::to_string(rows) + "x" +
                           std::to_string(cols),
                       line_no);
    const auto r = static_cast<std::size_t>(i - 1);
    const auto c = static_cast<std::size_t>(j - 1);
    if (mirror && r < c) throw ParseError("entry above the diagonal in symmetric storage", line_no);
    entries.push_back({r, c, v});
    if (mirror && r != c) entries.push_back({c, r, mirror_sign * v});
    ++seen;
  }
  if (seen != declared)
    throw ParseError("expected " + std::to_string(declared) + " entries, found " +
                         std::to_string(seen),
                     line_no);
  return SparseMatrix::from_triplets(rows, cols, std::move(entries));
}

inline SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return read_matrix_market(in);
}

}  // namespace cirs
