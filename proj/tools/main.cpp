// Command line front end: synth, sct, link, eval and run subcommands over
// the pipeline library. Exit codes: 0 success, 2 configuration error,
// 3 data error, 4 internal invariant violation.

#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mtmc/errors.hpp"
#include "mtmc/io.hpp"
#include "mtmc/metrics.hpp"
#include "mtmc/pipeline.hpp"
#include "mtmc/synth.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

struct SctFlags {
  std::optional<double> det_threshold;
  std::optional<double> assoc_threshold;
  std::optional<double> ema_momentum;
  std::optional<int> max_frames_lost;
};

struct ClmFlags {
  std::optional<double> cross_threshold;
  std::optional<int> min_traj_len;
  std::optional<int> max_traj_len;
  bool no_temporal_mask = false;
  bool no_direction_mask = false;
  bool no_btt = false;
};

void add_sct_flags(CLI::App* sub, SctFlags& flags) {
  sub->add_option("--det-threshold", flags.det_threshold,
                  "Detection confidence floor");
  sub->add_option("--assoc-threshold", flags.assoc_threshold,
                  "Stage-1 association cost ceiling");
  sub->add_option("--ema-momentum", flags.ema_momentum,
                  "Appearance smoothing momentum");
  sub->add_option("--max-frames-lost", flags.max_frames_lost,
                  "Consecutive misses before a confirmed track retires");
}

void add_clm_flags(CLI::App* sub, ClmFlags& flags) {
  sub->add_option("--cross-threshold", flags.cross_threshold,
                  "Cross-camera cosine distance ceiling");
  sub->add_option("--min-traj-len", flags.min_traj_len,
                  "Minimum trajectory length kept for linking");
  sub->add_option("--max-traj-len", flags.max_traj_len,
                  "Maximum trajectory length kept for linking");
  sub->add_flag("--no-temporal-mask", flags.no_temporal_mask,
                "Disable the transition time window mask");
  sub->add_flag("--no-direction-mask", flags.no_direction_mask,
                "Disable the zone direction mask");
  sub->add_flag("--no-btt", flags.no_btt,
                "Replace per-direction windows with their union");
}

void apply_overrides(mtmc::pipeline::RunConfig& config, const SctFlags& s,
                     const ClmFlags& c,
                     const std::optional<double>& iou_threshold) {
  if (s.det_threshold) config.sct.detection_score_threshold = *s.det_threshold;
  if (s.assoc_threshold) config.sct.association_threshold = *s.assoc_threshold;
  if (s.ema_momentum) config.sct.ema_momentum = *s.ema_momentum;
  if (s.max_frames_lost) config.sct.max_frames_lost = *s.max_frames_lost;
  if (c.cross_threshold)
    config.clm.cross_camera_distance_threshold = *c.cross_threshold;
  if (c.min_traj_len) config.clm.min_traj_len = *c.min_traj_len;
  if (c.max_traj_len) config.clm.max_traj_len = *c.max_traj_len;
  if (c.no_temporal_mask) config.clm.enable_temporal_mask = false;
  if (c.no_direction_mask) config.clm.enable_direction_mask = false;
  if (c.no_btt) config.clm.enable_btt = false;
  if (iou_threshold) config.eval.iou_match_threshold = *iou_threshold;
  mtmc::pipeline::validate_run_config(config);
}

void print_scores(const mtmc::IdCounts& counts,
                  const mtmc::metrics::IdentityScores& scores, bool as_json) {
  if (as_json) {
    nlohmann::json j;
    j["idtp"] = counts.idtp;
    j["idfp"] = counts.idfp;
    j["idfn"] = counts.idfn;
    j["idf1"] = scores.idf1;
    j["idp"] = scores.idp;
    j["idr"] = scores.idr;
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::cout << std::fixed << std::setprecision(2) << "IDF1 "
            << scores.idf1 * 100.0 << "%  IDP " << scores.idp * 100.0
            << "%  IDR " << scores.idr * 100.0 << "%\n";
  std::cout << "IDTP " << counts.idtp << "  IDFP " << counts.idfp << "  IDFN "
            << counts.idfn << "\n";
}

void do_synth(const std::string& config_path, const std::string& out_dir,
              const std::optional<std::int64_t>& seed) {
  mtmc::synth::ScenarioConfig config =
      mtmc::synth::read_scenario_config(config_path);
  if (seed) {
    if (*seed < 0) throw mtmc::config_error("--seed must be >= 0");
    config.seed = static_cast<std::uint64_t>(*seed);
  }
  const mtmc::synth::ScenarioData data =
      config.confuser_groups > 0 ? mtmc::synth::make_confuser_scenario(config)
                                 : mtmc::synth::generate(config);
  mtmc::synth::write_scenario(data, out_dir);

  mtmc::pipeline::RunConfig rc;
  for (const auto& [cam_id, dets] : data.detections) {
    rc.cameras.push_back({cam_id, "det_" + cam_id + ".csv",
                          "det_" + cam_id + ".emb", 0});
  }
  rc.zones_path = "zones.json";
  rc.links_path = "links.json";
  rc.gt_path = "gt.csv";
  rc.out_dir = "out";
  mtmc::pipeline::write_run_config(
      (std::filesystem::path(out_dir) / "run.json").string(), rc);

  std::size_t total = 0;
  for (const auto& [cam_id, dets] : data.detections) total += dets.size();
  std::cerr << "wrote " << data.detections.size() << " cameras, "
            << config.n_vehicles << " vehicles, " << total
            << " detections to " << out_dir << "\n";
}

void do_sct(const std::string& config_path, const SctFlags& flags) {
  mtmc::pipeline::RunConfig config =
      mtmc::pipeline::read_run_config(config_path);
  apply_overrides(config, flags, {}, std::nullopt);
  const auto per_camera = mtmc::pipeline::run_sct(config);
  for (const auto& [cam_id, trajs] : per_camera) {
    std::cerr << cam_id << ": " << trajs.size() << " trajectories\n";
  }
}

void do_link(const std::string& config_path, const ClmFlags& flags) {
  mtmc::pipeline::RunConfig config =
      mtmc::pipeline::read_run_config(config_path);
  apply_overrides(config, {}, flags, std::nullopt);
  const auto outcome = mtmc::pipeline::run_link(config);
  std::cerr << outcome.global_tracks.size() << " global tracks over "
            << outcome.trajectories.size() << " trajectories\n";
}

void do_eval(const std::string& config_path, const std::string& gt_path,
             const std::string& pred_path,
             const std::optional<double>& iou_threshold, bool as_json) {
  const bool standalone = !gt_path.empty() || !pred_path.empty();
  if (!config_path.empty() && standalone) {
    throw mtmc::config_error("pass either --config or --gt/--pred, not both");
  }
  if (!config_path.empty()) {
    mtmc::pipeline::RunConfig config =
        mtmc::pipeline::read_run_config(config_path);
    apply_overrides(config, {}, {}, iou_threshold);
    const auto result = mtmc::pipeline::run_eval(config);
    print_scores(result.counts, result.scores, as_json);
    return;
  }
  if (gt_path.empty() || pred_path.empty()) {
    throw mtmc::config_error("eval needs --config or both --gt and --pred");
  }
  mtmc::metrics::EvalConfig eval;
  if (iou_threshold) eval.iou_match_threshold = *iou_threshold;
  mtmc::metrics::validate_eval_config(eval);
  const auto gt = mtmc::io::read_tracks(gt_path);
  const auto pred = mtmc::io::read_tracks(pred_path);
  const mtmc::IdCounts counts = mtmc::metrics::id_assignment(gt, pred, eval);
  print_scores(counts, mtmc::metrics::idf1_idp_idr(counts), as_json);
}

void do_run(const std::string& config_path, const SctFlags& sct_flags,
            const ClmFlags& clm_flags,
            const std::optional<double>& iou_threshold, bool as_json) {
  mtmc::pipeline::RunConfig config =
      mtmc::pipeline::read_run_config(config_path);
  apply_overrides(config, sct_flags, clm_flags, iou_threshold);
  const auto result = mtmc::pipeline::run(config);
  std::size_t n_trajs = 0;
  for (const auto& [cam_id, trajs] : result.per_camera)
    n_trajs += trajs.size();
  std::cerr << result.per_camera.size() << " cameras, " << n_trajs
            << " trajectories, " << result.linked.global_tracks.size()
            << " global tracks\n";
  if (result.eval) {
    print_scores(result.eval->counts, result.eval->scores, as_json);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-camera vehicle tracking pipeline"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic scenario");
  std::string synth_config;
  std::string synth_out;
  std::optional<std::int64_t> synth_seed;
  synth->add_option("--config", synth_config, "Scenario JSON file")
      ->required();
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Override the scenario seed");

  auto* sct = app.add_subcommand("sct", "Track every camera");
  std::string sct_config;
  SctFlags sct_flags;
  sct->add_option("--config", sct_config, "Run config JSON")->required();
  add_sct_flags(sct, sct_flags);

  auto* link = app.add_subcommand("link", "Associate tracks across cameras");
  std::string link_config;
  ClmFlags link_flags;
  link->add_option("--config", link_config, "Run config JSON")->required();
  add_clm_flags(link, link_flags);

  auto* eval = app.add_subcommand("eval", "Score identities against ground truth");
  std::string eval_config;
  std::string eval_gt;
  std::string eval_pred;
  std::optional<double> eval_iou;
  bool eval_json = false;
  eval->add_option("--config", eval_config, "Run config JSON");
  eval->add_option("--gt", eval_gt, "Ground truth tracks CSV");
  eval->add_option("--pred", eval_pred, "Predicted tracks CSV");
  eval->add_option("--iou-threshold", eval_iou, "Frame-level IoU match floor");
  eval->add_flag("--json", eval_json, "Print metrics as JSON");

  auto* run = app.add_subcommand("run", "Full pipeline: sct, link, eval");
  std::string run_config;
  SctFlags run_sct_flags;
  ClmFlags run_clm_flags;
  std::optional<double> run_iou;
  bool run_json = false;
  run->add_option("--config", run_config, "Run config JSON")->required();
  add_sct_flags(run, run_sct_flags);
  add_clm_flags(run, run_clm_flags);
  run->add_option("--iou-threshold", run_iou, "Frame-level IoU match floor");
  run->add_flag("--json", run_json, "Print metrics as JSON");

  synth->callback([&] { do_synth(synth_config, synth_out, synth_seed); });
  sct->callback([&] { do_sct(sct_config, sct_flags); });
  link->callback([&] { do_link(link_config, link_flags); });
  eval->callback(
      [&] { do_eval(eval_config, eval_gt, eval_pred, eval_iou, eval_json); });
  run->callback([&] {
    do_run(run_config, run_sct_flags, run_clm_flags, run_iou, run_json);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const mtmc::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mtmc::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const mtmc::invariant_error& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
