#ifndef FSTAG_SRC_TEXTIO_HPP_
#define FSTAG_SRC_TEXTIO_HPP_

// Shared helpers for the deterministic text formats: round-trippable
// double formatting and strict, position-reporting line parsing.
// Internal to the library; not installed.

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "fstag/error.hpp"

namespace fstag::textio {

// %.17g renders any IEEE double so that strtod restores it exactly.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw DataError(where + ": malformed number \"" + s + "\"");
  return v;
}

inline std::size_t parse_size(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const auto v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw DataError(where + ": malformed count \"" + s + "\"");
  return static_cast<std::size_t>(v);
}

// Space-separated row of exactly `expected` doubles.
inline std::vector<double> parse_row(const std::string& text,
                                     std::size_t expected,
                                     const std::string& where) {
  std::vector<double> row;
  row.reserve(expected);
  const char* p = text.c_str();
  while (*p != '\0') {
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p) throw DataError(where + ": malformed number");
    row.push_back(v);
    p = end;
    while (*p == ' ') ++p;
  }
  if (row.size() != expected)
    throw DataError(where + ": expected " + std::to_string(expected) +
                    " values, found " + std::to_string(row.size()));
  return row;
}

inline std::string join_row(const double* row, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) out += ' ';
    out += format_double(row[i]);
  }
  return out;
}

// Splits a line into exactly `n` tab-separated fields.
inline std::vector<std::string> split_tabs(const std::string& line,
                                           std::size_t n,
                                           const std::string& where) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  if (fields.size() != n)
    throw DataError(where + ": expected " + std::to_string(n) +
                    " tab-separated fields, found " +
                    std::to_string(fields.size()));
  return fields;
}

// Line-oriented reader that tracks position for error messages and
// strips trailing carriage returns.
class LineReader {
 public:
  LineReader(std::istream& in, std::string source)
      : in_(in), source_(std::move(source)) {}

  std::string next(const std::string& what) {
    std::string line;
    if (!std::getline(in_, line))
      throw DataError(source_ + ": unexpected end of file, expected " + what);
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  bool done() {
    return in_.peek() == std::char_traits<char>::eof();
  }

  std::string where() const {
    return source_ + ":" + std::to_string(line_no_);
  }

  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

// `key<TAB>value` header line with a known key; returns the value.
inline std::string expect_kv(const std::string& line, const std::string& key,
                             const std::string& where) {
  const auto tab = line.find('\t');
  if (tab == std::string::npos || line.substr(0, tab) != key)
    throw DataError(where + ": expected \"" + key + "\" line");
  return line.substr(tab + 1);
}

}  // namespace fstag::textio

#endif  // FSTAG_SRC_TEXTIO_HPP_
