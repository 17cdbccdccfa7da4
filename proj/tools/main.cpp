#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "anchorlens/config.hpp"
#include "anchorlens/csv.hpp"
#include "anchorlens/version.hpp"
#include "commands.hpp"
#include "scenarios.hpp"

namespace {

using namespace anchorlens;
using namespace anchorlens::cli;

int run(int argc, char** argv) {
  CLI::App app{"anchorlens: anchor generation, sample assignment, MMD extraction and "
               "warp-probe analysis for anchor-based detectors"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  int jobs_flag = 0;
  bool no_header = false;
  double gamma_min = 0, gamma_ratio = 0, gamma_max = 0, alpha = 0, beta = 0;
  int switch_window = 0;
  auto* config_opt = app.add_option("--config", config_path,
                                    "Run-config JSON path (fallback: $ANCHORLENS_CONFIG)");
  app.add_option("--jobs", jobs_flag, "Max concurrent workers")->check(CLI::PositiveNumber);
  app.add_flag("--no-header", no_header, "Suppress the version/timestamp header line");
  auto* gmin_opt = app.add_option("--gamma-min", gamma_min, "Neighbor-frame score floor");
  auto* gratio_opt = app.add_option("--gamma-ratio", gamma_ratio, "Required score drop ratio");
  auto* gmax_opt = app.add_option("--gamma-max", gamma_max, "Dip score ceiling");
  auto* alpha_opt = app.add_option("--alpha", alpha, "Soft-threshold band half-width");
  auto* beta_opt = app.add_option("--beta", beta, "Soft-threshold edge value");
  auto* window_opt =
      app.add_option("--switch-window", switch_window, "Max |n| of an anchor switch");

  AnchorsArgs anchors_args;
  auto* anchors_cmd = app.add_subcommand("anchors", "Write the deterministic anchor enumeration");
  anchors_cmd->add_option("--pyramid", anchors_args.pyramid, "Pyramid config JSON");
  anchors_cmd->add_option("--out", anchors_args.out, "Output CSV")->required();

  AssignArgs assign_args;
  auto* assign_cmd = app.add_subcommand("assign", "Compute positive-sample assignment tables");
  assign_cmd->add_option("--pyramid", assign_args.pyramid, "Pyramid config JSON");
  assign_cmd->add_option("--gt", assign_args.gt, "Ground-truth box CSV")->required();
  assign_cmd->add_option("--out", assign_args.out, "Output CSV")->required();
  assign_cmd->add_option("--strategy", assign_args.strategy,
                         "Preset: faster-rcnn, ssd, retinanet, refinedet, m2det, yolov2, soft");

  MmdArgs mmd_args;
  auto* mmd_cmd = app.add_subcommand("mmd", "Extract momentarily-missed-detection frames");
  mmd_cmd->add_option("--pyramid", mmd_args.pyramid, "Pyramid config JSON");
  mmd_cmd->add_option("--dump", mmd_args.dump, "Detector score dump CSV")->required();
  mmd_cmd->add_option("--gt", mmd_args.gt, "Ground-truth box CSV")->required();
  mmd_cmd->add_option("--out", mmd_args.out, "Output CSV")->required();

  auto* probe_cmd = app.add_subcommand("probe", "Warp-probe manifests and profile analysis");
  probe_cmd->require_subcommand(1);

  ProbeManifestArgs manifest_args;
  std::vector<int> extent_flag;
  auto* manifest_cmd = probe_cmd->add_subcommand("manifest", "Write warp sweep manifests");
  manifest_cmd->add_option("--family", manifest_args.families,
                           "scaling, shiftx, aspectx or aspecty (repeatable)")->required();
  manifest_cmd->add_option("--pyramid", manifest_args.pyramid, "Pyramid config (extent source)");
  auto* extent_opt = manifest_cmd->add_option("--extent", extent_flag,
                                              "Image extent as WIDTH HEIGHT")->expected(2);
  manifest_cmd->add_option("--out", manifest_args.out, "Output CSV")->required();

  ProbeAnalyzeArgs analyze_args;
  int class_filter = 0;
  auto* analyze_cmd = probe_cmd->add_subcommand("analyze", "Classify score profiles");
  analyze_cmd->add_option("--pyramid", analyze_args.pyramid, "Pyramid config JSON");
  analyze_cmd->add_option("--manifest", analyze_args.manifest, "Manifest CSV")->required();
  analyze_cmd->add_option("--scores", analyze_args.scores, "Profile score CSV (repeatable)")
      ->required()
      ->take_all();
  analyze_cmd->add_option("--out", analyze_args.out, "Verdict CSV")->required();
  auto* class_opt = analyze_cmd->add_option("--class-id", class_filter, "Only this class's rows");

  TallyArgs tally_args;
  auto* tally_cmd = app.add_subcommand("tally", "Cause breakdown of MMD verdicts");
  tally_cmd->add_option("--verdicts", tally_args.verdicts, "Verdict CSV")->required();
  tally_cmd->add_option("--labels", tally_args.labels, "Human label CSV");
  tally_cmd->add_option("--out", tally_args.out, "Report CSV")->required();
  tally_cmd->add_option("--svg", tally_args.svg, "Bar-chart SVG path");

  SimulateArgs simulate_args;
  auto* simulate_cmd =
      app.add_subcommand("simulate", "Emit synthetic-detector fixtures for the pipeline");
  simulate_cmd->add_option("--scenario", simulate_args.scenario,
                           "scale-boundary-binary, scale-boundary-soft, grid-boundary-binary, "
                           "on-anchor")->required();
  simulate_cmd->add_option("--out-dir", simulate_args.out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    GlobalOptions g;
    if (config_opt->count() == 0) {
      if (const char* env = std::getenv("ANCHORLENS_CONFIG")) config_path = env;
    }
    if (!config_path.empty()) {
      g.config = load_run_config(config_path);
      g.config_digest = digest_file(config_path);
    }
    if (gmin_opt->count() > 0) g.config.thresholds.mmd.gamma_min = gamma_min;
    if (gratio_opt->count() > 0) g.config.thresholds.mmd.gamma_ratio = gamma_ratio;
    if (gmax_opt->count() > 0) g.config.thresholds.mmd.gamma_max = gamma_max;
    if (alpha_opt->count() > 0) g.config.thresholds.alpha = alpha;
    if (beta_opt->count() > 0) g.config.thresholds.beta = beta;
    if (window_opt->count() > 0) g.config.thresholds.switch_window = switch_window;
    g.config.thresholds.validate();
    g.jobs = jobs_flag > 0 ? jobs_flag : g.config.jobs;
    g.no_header = no_header;

    if (app.got_subcommand(anchors_cmd)) return cmd_anchors(g, anchors_args);
    if (app.got_subcommand(assign_cmd)) return cmd_assign(g, assign_args);
    if (app.got_subcommand(mmd_cmd)) return cmd_mmd(g, mmd_args);
    if (app.got_subcommand(probe_cmd)) {
      if (probe_cmd->got_subcommand(manifest_cmd)) {
        if (extent_opt->count() > 0) {
          manifest_args.extent = std::make_pair(extent_flag[0], extent_flag[1]);
        }
        return cmd_probe_manifest(g, manifest_args);
      }
      if (class_opt->count() > 0) analyze_args.class_filter = class_filter;
      return cmd_probe_analyze(g, analyze_args);
    }
    if (app.got_subcommand(tally_cmd)) return cmd_tally(g, tally_args);
    if (app.got_subcommand(simulate_cmd)) return cmd_simulate(g, simulate_args);
  } catch (const CsvError& e) {
    std::cerr << "anchorlens: error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "anchorlens: error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "anchorlens: error: " << e.what() << '\n';
    return 2;
  }
}
