#include "anchorlens/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace anchorlens {

namespace {

using nlohmann::json;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return doc;
}

}  // namespace

void Thresholds::validate() const {
  mmd.validate();
  SoftThresholdParams(alpha, beta);  // throws on bad alpha/beta
  if (switch_window < 0) throw std::invalid_argument("switch_window must be >= 0");
}

RunConfig load_run_config(const std::string& path) {
  const json doc = load_json_file(path);
  RunConfig config;
  try {
    if (doc.contains("pyramid")) config.pyramid_path = doc.at("pyramid").get<std::string>();
    if (doc.contains("strategy")) config.strategy = doc.at("strategy").get<std::string>();
    if (doc.contains("jobs")) config.jobs = doc.at("jobs").get<int>();
    if (doc.contains("thresholds")) {
      const json& th = doc.at("thresholds");
      if (th.contains("gamma_min")) config.thresholds.mmd.gamma_min = th.at("gamma_min").get<double>();
      if (th.contains("gamma_ratio")) config.thresholds.mmd.gamma_ratio = th.at("gamma_ratio").get<double>();
      if (th.contains("gamma_max")) config.thresholds.mmd.gamma_max = th.at("gamma_max").get<double>();
      if (th.contains("alpha")) config.thresholds.alpha = th.at("alpha").get<double>();
      if (th.contains("beta")) config.thresholds.beta = th.at("beta").get<double>();
      if (th.contains("switch_window")) config.thresholds.switch_window = th.at("switch_window").get<int>();
    }
    if (doc.contains("paths")) {
      for (const auto& [key, value] : doc.at("paths").items()) {
        config.paths[key] = value.get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  config.thresholds.validate();
  if (config.jobs < 1) throw std::runtime_error(path + ": jobs must be >= 1");
  strategy_preset(config.strategy);  // throws on unknown names

  if (config.pyramid_path) {
    // Relative pyramid paths resolve against the config file's directory.
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    std::filesystem::path pyramid(*config.pyramid_path);
    if (pyramid.is_relative()) pyramid = base / pyramid;
    if (!std::filesystem::exists(pyramid)) {
      throw std::runtime_error(path + ": pyramid: path '" + pyramid.string() +
                               "' does not resolve");
    }
    config.pyramid_path = pyramid.string();
  }
  return config;
}

PyramidConfig load_pyramid_config(const std::string& path) {
  const json doc = load_json_file(path);
  PyramidConfig config{ImageExtent(1, 1), {}};
  try {
    const json& extent = doc.at("extent");
    config.extent = ImageExtent(extent.at("width").get<int>(), extent.at("height").get<int>());
    std::size_t index = 0;
    for (const json& level : doc.at("levels")) {
      PyramidLevel lv;
      lv.grid_w = level.at("grid_w").get<int>();
      lv.grid_h = level.at("grid_h").get<int>();
      lv.stride_x = level.at("stride_x").get<double>();
      lv.stride_y = level.at("stride_y").get<double>();
      for (const json& tpl : level.at("templates")) {
        if (!tpl.is_array() || tpl.size() != 2) {
          throw std::runtime_error("levels[" + std::to_string(index) +
                                   "].templates: entries must be [width, height] pairs");
        }
        lv.templates.push_back(TemplateSize{tpl.at(0).get<double>(), tpl.at(1).get<double>()});
      }
      config.levels.push_back(std::move(lv));
      ++index;
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  try {
    validate(config);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return config;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::uint64_t hash = fnv1a64(buffer.str());
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

}  // namespace anchorlens
