#pragma once

#include <string>
#include <vector>

#include "anchorlens/anchors.hpp"
#include "anchorlens/synthdet.hpp"

namespace anchorlens::cli {

/// A canonical synthetic-detector setup: a pyramid, a detector preset, and an
/// object trajectory whose middle frame sits where the scenario says it does
/// (on an anchor boundary or on an anchor optimum).
struct Scenario {
  std::string name;
  PyramidConfig pyramid;
  SynthParams detector;
  WarpFamily family = WarpFamily::Scaling;
  BBox base{0, 0, 1, 1};
  std::vector<int> track_steps;  // warp indices realized as video frames
  int class_id = 0;
};

const std::vector<std::string>& scenario_names();

/// Throws std::invalid_argument for unknown names.
Scenario scenario_by_name(const std::string& name);

}  // namespace anchorlens::cli
