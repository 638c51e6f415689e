#pragma once

// Minimal comma-separated reader/writer helpers for the feeder file formats.
// Fields are never quoted in these formats.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "xfrisk/error.hpp"

namespace xfrisk::csv {

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Splits into `out`, reusing its storage.
inline void split(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

/// Row-by-row reader that checks the header and column count.
class Reader {
 public:
  Reader(std::istream& in, std::string source, std::vector<std::string_view> expected_header)
      : in_(in), source_(std::move(source)) {
    if (!next_line()) fail(ErrorKind::Data, source_ + ": missing header row");
    std::vector<std::string_view> header;
    split(line_, header);
    if (!header.empty() && header.front().starts_with("\xEF\xBB\xBF")) header.front().remove_prefix(3);
    if (header.size() != expected_header.size()) bad_header(expected_header);
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] != expected_header[i]) bad_header(expected_header);
    }
    columns_ = expected_header.size();
  }

  /// Next non-empty data row; false at end of input.
  bool next(std::vector<std::string_view>& fields) {
    while (next_line()) {
      if (trim(line_).empty()) continue;
      split(line_, fields);
      if (fields.size() != columns_) {
        error("expected " + std::to_string(columns_) + " fields, found " + std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  std::size_t line_number() const noexcept { return line_number_; }

  [[noreturn]] void error(const std::string& message) const {
    fail(ErrorKind::Data, source_ + ":" + std::to_string(line_number_) + ": " + message);
  }

 private:
  bool next_line() {
    if (!std::getline(in_, line_)) return false;
    ++line_number_;
    return true;
  }

  [[noreturn]] void bad_header(const std::vector<std::string_view>& expected) const {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) want += ',';
      want += expected[i];
    }
    fail(ErrorKind::Data, source_ + ": header must be '" + want + "'");
  }

  std::istream& in_;
  std::string source_;
  std::string line_;
  std::size_t line_number_ = 0;
  std::size_t columns_ = 0;
};

inline bool parse_double(std::string_view s, double& out) noexcept {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) noexcept {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

inline bool parse_bool(std::string_view s, bool& out) noexcept {
  if (s == "1" || s == "true" || s == "TRUE" || s == "True") {
    out = true;
    return true;
  }
  if (s == "0" || s == "false" || s == "FALSE" || s == "False") {
    out = false;
    return true;
  }
  return false;
}

/// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  return out;
}

}  // namespace xfrisk::csv
