#include "scenarios.hpp"

#include <cmath>
#include <stdexcept>

namespace anchorlens::cli {

namespace {

// Two-level pyramid: 3x3 cells of 100x100 templates plus one 125x125
// template over the whole 300x300 image. The center anchors (ids 4 and 9)
// are concentric, so a centered square of side sqrt(100 * 125) has IOU
// exactly 0.8 with both: the scale boundary between them.
PyramidConfig two_level_pyramid() {
  PyramidConfig config{ImageExtent(300, 300), {}};
  config.levels.push_back(PyramidLevel{3, 3, 100.0, 100.0, {TemplateSize{100, 100}}});
  config.levels.push_back(PyramidLevel{1, 1, 300.0, 300.0, {TemplateSize{125, 125}}});
  return config;
}

PyramidConfig single_level_pyramid() {
  PyramidConfig config{ImageExtent(300, 300), {}};
  config.levels.push_back(PyramidLevel{3, 3, 100.0, 100.0, {TemplateSize{100, 100}}});
  return config;
}

Scenario scale_boundary(const std::string& name, SynthParams detector) {
  Scenario s;
  s.name = name;
  s.pyramid = two_level_pyramid();
  s.detector = detector;
  s.family = WarpFamily::Scaling;
  const double w0 = std::sqrt(100.0 * 125.0);
  s.base = BBox::from_center(150.0, 150.0, w0, w0);
  s.track_steps = {-8, 0, 8};
  return s;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "scale-boundary-binary", "scale-boundary-soft", "grid-boundary-binary", "on-anchor"};
  return names;
}

Scenario scenario_by_name(const std::string& name) {
  if (name == "scale-boundary-binary") {
    return scale_boundary(name, SynthParams::binary_preset());
  }
  if (name == "scale-boundary-soft") {
    return scale_boundary(name, SynthParams::soft_preset());
  }
  if (name == "grid-boundary-binary") {
    // A 120x100 object sliding between two horizontally adjacent anchors;
    // midway neither anchor reaches IOU 0.5 and the response dies.
    Scenario s;
    s.name = name;
    s.pyramid = single_level_pyramid();
    s.detector = SynthParams::binary_preset();
    s.family = WarpFamily::ShiftX;
    s.base = BBox::from_center(200.0, 150.0, 120.0, 100.0);
    s.track_steps = {-17, 0, 17};
    return s;
  }
  if (name == "on-anchor") {
    // The trajectory's middle frame sits exactly on an anchor optimum; the
    // responsibility switch falls outside the probe window.
    Scenario s;
    s.name = name;
    s.pyramid = two_level_pyramid();
    s.detector = SynthParams::binary_preset();
    s.family = WarpFamily::Scaling;
    s.base = BBox::from_center(150.0, 150.0, 100.0, 100.0);
    s.track_steps = {-8, 0, 8};
    return s;
  }
  throw std::invalid_argument("unknown scenario '" + name +
                              "' (expected scale-boundary-binary, scale-boundary-soft, "
                              "grid-boundary-binary or on-anchor)");
}

}  // namespace anchorlens::cli
