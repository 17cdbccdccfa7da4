#include "anchorlens/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>

namespace anchorlens {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

int parse_int(const std::string& field, int line, const char* what) {
  if (field.empty()) throw CsvError(line, std::string(what) + ": empty field");
  errno = 0;
  char* end = nullptr;
  const long value = std::strtol(field.c_str(), &end, 10);
  if (errno != 0 || end != field.c_str() + field.size()) {
    throw CsvError(line, std::string(what) + ": not an integer: '" + field + "'");
  }
  return static_cast<int>(value);
}

double parse_double(const std::string& field, int line, const char* what) {
  if (field.empty()) throw CsvError(line, std::string(what) + ": empty field");
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(field.c_str(), &end);
  if (errno != 0 || end != field.c_str() + field.size()) {
    throw CsvError(line, std::string(what) + ": not a number: '" + field + "'");
  }
  return value;
}

std::string format_fixed9(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", value);
  return buf;
}

std::string format_g17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace anchorlens
