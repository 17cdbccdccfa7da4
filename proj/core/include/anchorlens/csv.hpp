#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace anchorlens {

/// Parse error carrying the 1-based line number of the offending row.
class CsvError : public std::runtime_error {
 public:
  CsvError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

std::vector<std::string> split_csv(const std::string& line);

int parse_int(const std::string& field, int line, const char* what);
double parse_double(const std::string& field, int line, const char* what);

/// Fixed 9-fractional-digit decimal, the format all score/weight columns use.
std::string format_fixed9(double value);

/// Shortest-round-trip formatting for warp factors and box coordinates where
/// full precision matters.
std::string format_g17(double value);

}  // namespace anchorlens
