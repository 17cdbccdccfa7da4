#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "anchorlens/anchors.hpp"
#include "anchorlens/assignment.hpp"
#include "anchorlens/mmd.hpp"

namespace anchorlens {

/// The analysis thresholds in one place, defaulted to the reference values.
struct Thresholds {
  MmdThresholds mmd;
  double alpha = 0.1;
  double beta = 0.001;
  int switch_window = 5;

  SoftThresholdParams soft_params() const { return SoftThresholdParams(alpha, beta); }
  void validate() const;
};

struct RunConfig {
  std::optional<std::string> pyramid_path;
  Thresholds thresholds;
  std::string strategy = "soft";
  int jobs = 1;
  std::map<std::string, std::string> paths;  // optional per-command defaults
};

/// Loads and validates a JSON run config; referenced paths must resolve.
RunConfig load_run_config(const std::string& path);

/// Loads a pyramid config; errors carry field paths such as
/// "levels[0].stride_x".
PyramidConfig load_pyramid_config(const std::string& path);

/// FNV-1a 64-bit digest used to fingerprint config files in reports.
std::uint64_t fnv1a64(std::string_view bytes);

std::string digest_file(const std::string& path);  // hex digest of file bytes

}  // namespace anchorlens
