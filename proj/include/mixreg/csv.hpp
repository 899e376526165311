#pragma once

#include <charconv>
#include <concepts>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mixreg {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);

/// Comma-separated writer: '.' decimals, LF line ends, header first.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names);

  template <class... Fields>
  void row(const Fields&... fields) {
    std::string line;
    bool first = true;
    (append(line, first, fields), ...);
    line.push_back('\n');
    write(line);
  }

 private:
  static void sep(std::string& line, bool& first) {
    if (!first) line.push_back(',');
    first = false;
  }
  static void append(std::string& line, bool& first, double x) {
    sep(line, first);
    line += format_double(x);
  }
  template <std::integral I>
  static void append(std::string& line, bool& first, I x) {
    sep(line, first);
    if constexpr (std::same_as<I, bool>) {
      line += x ? "1" : "0";
    } else {
      line += std::to_string(x);
    }
  }
  static void append(std::string& line, bool& first, std::string_view s) {
    sep(line, first);
    line += s;
  }
  static void append(std::string& line, bool& first, const std::string& s) {
    append(line, first, std::string_view(s));
  }
  static void append(std::string& line, bool& first, const char* s) {
    append(line, first, std::string_view(s));
  }
  static void append(std::string& line, bool& first, std::span<const double> xs) {
    for (double x : xs) append(line, first, x);
  }
  static void append(std::string& line, bool& first, const std::vector<double>& xs) {
    append(line, first, std::span<const double>(xs));
  }

  void write(const std::string& line);

  std::ostream& out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws ArgumentError when absent.
  std::size_t column(std::string_view name) const;
};

/// Reads a headed CSV (no quoting). Blank lines are skipped; CR before LF is
/// tolerated.
CsvTable read_csv(std::istream& in);

/// Strict double parse of a whole field; throws ArgumentError.
double parse_double(std::string_view text);

}  // namespace mixreg
