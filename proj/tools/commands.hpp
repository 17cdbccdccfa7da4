#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anchorlens/config.hpp"

namespace anchorlens::cli {

struct GlobalOptions {
  RunConfig config;
  bool no_header = false;
  int jobs = 1;
  std::string config_digest = "none";
};

struct AnchorsArgs {
  std::string pyramid;
  std::string out;
};

struct AssignArgs {
  std::string pyramid;
  std::string gt;
  std::string out;
  std::string strategy;
};

struct MmdArgs {
  std::string pyramid;
  std::string dump;
  std::string gt;
  std::string out;
};

struct ProbeManifestArgs {
  std::vector<std::string> families;
  std::string pyramid;  // extent source when --extent is absent
  std::optional<std::pair<int, int>> extent;
  std::string out;  // file for one family, directory for several
};

struct ProbeAnalyzeArgs {
  std::string pyramid;
  std::string manifest;
  std::vector<std::string> scores;
  std::string out;
  std::optional<int> class_filter;
};

struct TallyArgs {
  std::string verdicts;
  std::string labels;
  std::string out;
  std::string svg;
};

struct SimulateArgs {
  std::string scenario;
  std::string out_dir;
};

int cmd_anchors(const GlobalOptions& g, const AnchorsArgs& args);
int cmd_assign(const GlobalOptions& g, const AssignArgs& args);
int cmd_mmd(const GlobalOptions& g, const MmdArgs& args);
int cmd_probe_manifest(const GlobalOptions& g, const ProbeManifestArgs& args);
int cmd_probe_analyze(const GlobalOptions& g, const ProbeAnalyzeArgs& args);
int cmd_tally(const GlobalOptions& g, const TallyArgs& args);
int cmd_simulate(const GlobalOptions& g, const SimulateArgs& args);

}  // namespace anchorlens::cli
