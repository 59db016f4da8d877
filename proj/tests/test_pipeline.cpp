#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "mtmc/errors.hpp"
#include "mtmc/io.hpp"
#include "mtmc/pipeline.hpp"
#include "mtmc/synth.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace mtmc;

namespace {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(static_cast<bool>(out));
  out << content;
}

// Two-camera corridor with mild sensor noise, written to its own temp dir.
std::string make_scenario(const std::string& name, std::uint64_t seed) {
  const std::string dir = testutil::temp_dir(name);
  synth::ScenarioConfig cfg;
  cfg.cameras = {{"c001"}, {"c002"}};
  CameraLink link;
  link.from_cam = "c001";
  link.to_cam = "c002";
  link.t_min = 60;
  link.t_max = 140;
  cfg.links = {link};
  cfg.n_vehicles = 3;
  cfg.embedding_dim = 8;
  cfg.frames_per_camera = 800;
  cfg.dwell_min = 80;
  cfg.dwell_max = 120;
  cfg.embedding_noise_sigma = 0.05;
  cfg.detection_dropout_rate = 0.02;
  cfg.bbox_jitter_sigma = 0.5;
  cfg.confidence_base = 0.85;
  cfg.confidence_noise = 0.1;
  cfg.seed = seed;
  synth::write_scenario(synth::generate(cfg), dir);
  return dir;
}

pipeline::RunConfig scenario_run_config(const std::string& dir,
                                        const std::string& out_dir) {
  pipeline::RunConfig cfg;
  for (const std::string cam : {"c001", "c002"}) {
    cfg.cameras.push_back({cam, dir + "/det_" + cam + ".csv",
                           dir + "/det_" + cam + ".emb", 0});
  }
  cfg.zones_path = dir + "/zones.json";
  cfg.links_path = dir + "/links.json";
  cfg.gt_path = dir + "/gt.csv";
  cfg.out_dir = out_dir;
  return cfg;
}

const char* kStageFiles[] = {"tracks_c001.csv", "tracks_c001.emb",
                             "tracks_c002.csv", "tracks_c002.emb",
                             "global_tracks.csv", "metrics.json"};

}  // namespace

TEST_CASE("pipeline: run matches chained stages byte for byte") {
  const std::string dir = make_scenario("pipeline_chain", 7);

  const auto full = scenario_run_config(dir, dir + "/out_full");
  const pipeline::RunResult result = pipeline::run(full);
  CHECK(result.per_camera.size() == 2);
  CHECK(!result.per_camera.at("c001").empty());
  CHECK(!result.per_camera.at("c002").empty());
  CHECK(!result.linked.global_tracks.empty());
  REQUIRE(result.eval.has_value());

  auto chained = scenario_run_config(dir, dir + "/out_chained");
  pipeline::run_sct(chained);
  pipeline::run_link(chained);
  pipeline::run_eval(chained);

  auto again = scenario_run_config(dir, dir + "/out_again");
  pipeline::run(again);

  for (const char* name : kStageFiles) {
    CAPTURE(name);
    const std::string bytes = testutil::slurp(full.out_dir + "/" + name);
    CHECK(!bytes.empty());
    CHECK(bytes == testutil::slurp(chained.out_dir + "/" + name));
    CHECK(bytes == testutil::slurp(again.out_dir + "/" + name));
  }
}

TEST_CASE("pipeline: metrics.json mirrors the returned eval result") {
  const std::string dir = make_scenario("pipeline_metrics", 11);
  const auto cfg = scenario_run_config(dir, dir + "/out");
  const pipeline::RunResult result = pipeline::run(cfg);
  REQUIRE(result.eval.has_value());

  const nlohmann::json j =
      nlohmann::json::parse(testutil::slurp(cfg.out_dir + "/metrics.json"));
  CHECK(j.at("idtp").get<std::int64_t>() == result.eval->counts.idtp);
  CHECK(j.at("idfp").get<std::int64_t>() == result.eval->counts.idfp);
  CHECK(j.at("idfn").get<std::int64_t>() == result.eval->counts.idfn);
  CHECK(j.at("idf1").get<double>() == result.eval->scores.idf1);
  CHECK(j.at("idp").get<double>() == result.eval->scores.idp);
  CHECK(j.at("idr").get<double>() == result.eval->scores.idr);

  // Every gt row lands in idtp or idfn, every pred row in idtp or idfp.
  const auto gt = io::read_tracks(cfg.gt_path);
  const auto pred = io::read_tracks(cfg.out_dir + "/global_tracks.csv");
  const IdCounts& c = result.eval->counts;
  CHECK(c.idtp + c.idfn == static_cast<std::int64_t>(gt.size()));
  CHECK(c.idtp + c.idfp == static_cast<std::int64_t>(pred.size()));
}

TEST_CASE("pipeline: run config survives a write/read round trip") {
  const std::string dir = testutil::temp_dir("pipeline_roundtrip");

  pipeline::RunConfig cfg;
  cfg.cameras.push_back(
      {"c001", dir + "/a.csv", dir + "/a.emb", 3});
  cfg.cameras.push_back(
      {"cam_B-2", dir + "/b.csv", dir + "/b.emb", -2});
  cfg.zones_path = dir + "/zones.json";
  cfg.links_path = dir + "/links.json";
  cfg.gt_path = dir + "/gt.csv";
  cfg.out_dir = dir + "/results";
  cfg.sct.detection_score_threshold = 0.2;
  cfg.sct.high_conf_threshold = 0.55;
  cfg.sct.association_threshold = 0.3;
  cfg.sct.ema_momentum = 0.85;
  cfg.sct.max_frames_lost = 12;
  cfg.sct.tentative_confirm_frames = 2;
  cfg.sct.iou_gate = 0.05;
  cfg.sct.appearance_weight = 0.6;
  cfg.clm.cross_camera_distance_threshold = 0.33;
  cfg.clm.min_traj_len = 3;
  cfg.clm.max_traj_len = 500;
  cfg.clm.enable_temporal_mask = false;
  cfg.clm.enable_direction_mask = true;
  cfg.clm.enable_btt = false;
  cfg.eval.iou_match_threshold = 0.4;

  const std::string path = dir + "/run.json";
  pipeline::write_run_config(path, cfg);
  const pipeline::RunConfig back = pipeline::read_run_config(path);

  REQUIRE(back.cameras.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.cameras[i].camera_id == cfg.cameras[i].camera_id);
    CHECK(back.cameras[i].detections_csv == cfg.cameras[i].detections_csv);
    CHECK(back.cameras[i].embeddings_blob == cfg.cameras[i].embeddings_blob);
    CHECK(back.cameras[i].frame_offset == cfg.cameras[i].frame_offset);
  }
  CHECK(back.zones_path == cfg.zones_path);
  CHECK(back.links_path == cfg.links_path);
  CHECK(back.gt_path == cfg.gt_path);
  CHECK(back.out_dir == cfg.out_dir);
  CHECK(back.sct.detection_score_threshold == cfg.sct.detection_score_threshold);
  CHECK(back.sct.high_conf_threshold == cfg.sct.high_conf_threshold);
  CHECK(back.sct.association_threshold == cfg.sct.association_threshold);
  CHECK(back.sct.ema_momentum == cfg.sct.ema_momentum);
  CHECK(back.sct.max_frames_lost == cfg.sct.max_frames_lost);
  CHECK(back.sct.tentative_confirm_frames == cfg.sct.tentative_confirm_frames);
  CHECK(back.sct.iou_gate == cfg.sct.iou_gate);
  CHECK(back.sct.appearance_weight == cfg.sct.appearance_weight);
  CHECK(back.clm.cross_camera_distance_threshold ==
        cfg.clm.cross_camera_distance_threshold);
  CHECK(back.clm.min_traj_len == cfg.clm.min_traj_len);
  CHECK(back.clm.max_traj_len == cfg.clm.max_traj_len);
  CHECK(back.clm.enable_temporal_mask == cfg.clm.enable_temporal_mask);
  CHECK(back.clm.enable_direction_mask == cfg.clm.enable_direction_mask);
  CHECK(back.clm.enable_btt == cfg.clm.enable_btt);
  CHECK(back.eval.iou_match_threshold == cfg.eval.iou_match_threshold);
}

TEST_CASE("pipeline: relative paths resolve against the config directory") {
  const std::string dir = make_scenario("pipeline_relative", 13);

  pipeline::RunConfig rel;
  rel.cameras.push_back({"c001", "det_c001.csv", "det_c001.emb", 0});
  rel.cameras.push_back({"c002", "det_c002.csv", "det_c002.emb", 0});
  rel.zones_path = "zones.json";
  rel.links_path = "links.json";
  rel.gt_path = "gt.csv";
  rel.out_dir = "out";
  const std::string path = dir + "/run.json";
  pipeline::write_run_config(path, rel);

  // write_run_config keeps the relative strings verbatim.
  const nlohmann::json raw = nlohmann::json::parse(testutil::slurp(path));
  CHECK(raw.at("zones").get<std::string>() == "zones.json");
  CHECK(raw.at("cameras")[0].at("detections").get<std::string>() ==
        "det_c001.csv");

  const pipeline::RunConfig cfg = pipeline::read_run_config(path);
  const auto resolved = [&](const std::string& leaf) {
    return (fs::path(dir) / leaf).lexically_normal().string();
  };
  CHECK(cfg.cameras[0].detections_csv == resolved("det_c001.csv"));
  CHECK(cfg.cameras[1].embeddings_blob == resolved("det_c002.emb"));
  CHECK(cfg.zones_path == resolved("zones.json"));
  CHECK(cfg.links_path == resolved("links.json"));
  CHECK(cfg.gt_path == resolved("gt.csv"));
  CHECK(cfg.out_dir == resolved("out"));

  // The resolved config is directly runnable.
  const pipeline::RunResult result = pipeline::run(cfg);
  CHECK(result.eval.has_value());
  CHECK(fs::exists(fs::path(dir) / "out" / "metrics.json"));
}

TEST_CASE("pipeline: gt is optional and gates the eval stage") {
  const std::string dir = make_scenario("pipeline_no_gt", 17);
  auto cfg = scenario_run_config(dir, dir + "/out");
  cfg.gt_path.clear();

  const pipeline::RunResult result = pipeline::run(cfg);
  CHECK(!result.eval.has_value());
  CHECK(!result.linked.global_tracks.empty());
  CHECK(fs::exists(fs::path(cfg.out_dir) / "global_tracks.csv"));
  CHECK(!fs::exists(fs::path(cfg.out_dir) / "metrics.json"));

  CHECK_THROWS_WITH_AS(pipeline::run_eval(cfg),
                       doctest::Contains("eval requires a gt path"),
                       config_error);
}

TEST_CASE("pipeline: unknown config keys are rejected at every level") {
  const std::string dir = testutil::temp_dir("pipeline_unknown_keys");
  const std::string path = dir + "/run.json";

  const auto config_with = [&](const std::string& splice) {
    return std::string(R"({
  "cameras": [{"camera_id": "c001", "detections": "d.csv",
               "embeddings": "d.emb"}],
  "zones": "zones.json",
  "links": "links.json")") +
           splice + "\n}\n";
  };

  SUBCASE("top level") {
    write_text(path, config_with(R"(, "extra": 1)"));
    CHECK_THROWS_WITH_AS(pipeline::read_run_config(path),
                         doctest::Contains("unknown key 'extra'"),
                         config_error);
  }
  SUBCASE("camera entry") {
    write_text(path, R"({
  "cameras": [{"camera_id": "c001", "detections": "d.csv",
               "embeddings": "d.emb", "offset": 1}],
  "zones": "zones.json",
  "links": "links.json"
})");
    CHECK_THROWS_WITH_AS(
        pipeline::read_run_config(path),
        doctest::Contains("camera entry: unknown key 'offset'"), config_error);
  }
  SUBCASE("sct block") {
    write_text(path, config_with(R"(, "sct": {"det_thresh": 0.1})"));
    CHECK_THROWS_WITH_AS(pipeline::read_run_config(path),
                         doctest::Contains("sct: unknown key 'det_thresh'"),
                         config_error);
  }
  SUBCASE("clm block") {
    write_text(path, config_with(R"(, "clm": {"btt": true})"));
    CHECK_THROWS_WITH_AS(pipeline::read_run_config(path),
                         doctest::Contains("clm: unknown key 'btt'"),
                         config_error);
  }
  SUBCASE("eval block") {
    write_text(path, config_with(R"(, "eval": {"iou": 0.5})"));
    CHECK_THROWS_WITH_AS(pipeline::read_run_config(path),
                         doctest::Contains("eval: unknown key 'iou'"),
                         config_error);
  }
}

TEST_CASE("pipeline: config type and structure errors") {
  const std::string dir = testutil::temp_dir("pipeline_bad_config");
  const std::string path = dir + "/run.json";

  SUBCASE("missing file") {
    CHECK_THROWS_WITH_AS(pipeline::read_run_config(dir + "/absent.json"),
                         doctest::Contains("cannot open config file"),
                         config_error);
  }
  SUBCASE("malformed json") {
    write_text(path, "{\n");
    CHECK_THROWS_AS(pipeline::read_run_config(path), config_error);
  }
  SUBCASE("root must be an object") {
    write_text(path, "[]\n");
    CHECK_THROWS_WITH_AS(pipeline::read_run_config(path),
                         doctest::Contains("not a JSON object"), config_error);
  }
  SUBCASE("cameras must be an array") {
    write_text(path, R"({"cameras": 3, "zones": "z", "links": "l"})");
    CHECK_THROWS_WITH_AS(pipeline::read_run_config(path),
                         doctest::Contains("'cameras' must be an array"),
                         config_error);
  }
  SUBCASE("missing required key") {
    write_text(path, R"({
  "cameras": [{"camera_id": "c001", "detections": "d.csv",
               "embeddings": "d.emb"}],
  "links": "links.json"
})");
    CHECK_THROWS_WITH_AS(pipeline::read_run_config(path),
                         doctest::Contains("missing required key 'zones'"),
                         config_error);
  }
  SUBCASE("frame_offset must be an integer") {
    write_text(path, R"({
  "cameras": [{"camera_id": "c001", "detections": "d.csv",
               "embeddings": "d.emb", "frame_offset": 1.5}],
  "zones": "zones.json",
  "links": "links.json"
})");
    CHECK_THROWS_WITH_AS(pipeline::read_run_config(path),
                         doctest::Contains("frame_offset must be an integer"),
                         config_error);
  }
  SUBCASE("sct integer field rejects a fraction") {
    write_text(path, R"({
  "cameras": [{"camera_id": "c001", "detections": "d.csv",
               "embeddings": "d.emb"}],
  "zones": "zones.json",
  "links": "links.json",
  "sct": {"max_frames_lost": 0.5}
})");
    CHECK_THROWS_WITH_AS(
        pipeline::read_run_config(path),
        doctest::Contains("max_frames_lost must be an integer"), config_error);
  }
  SUBCASE("clm flag rejects a non-boolean") {
    write_text(path, R"({
  "cameras": [{"camera_id": "c001", "detections": "d.csv",
               "embeddings": "d.emb"}],
  "zones": "zones.json",
  "links": "links.json",
  "clm": {"enable_btt": 1}
})");
    CHECK_THROWS_WITH_AS(pipeline::read_run_config(path),
                         doctest::Contains("enable_btt must be a boolean"),
                         config_error);
  }
  SUBCASE("stage validation runs on load") {
    write_text(path, R"({
  "cameras": [{"camera_id": "c001", "detections": "d.csv",
               "embeddings": "d.emb"}],
  "zones": "zones.json",
  "links": "links.json",
  "sct": {"association_threshold": 1.5}
})");
    CHECK_THROWS_WITH_AS(pipeline::read_run_config(path),
                         doctest::Contains("association_threshold"),
                         config_error);
  }
}

TEST_CASE("pipeline: validate_run_config structural errors") {
  const std::string dir = testutil::temp_dir("pipeline_validate");
  pipeline::RunConfig good = scenario_run_config(dir, dir + "/out");

  CHECK_NOTHROW(pipeline::validate_run_config(good));

  SUBCASE("no cameras") {
    auto cfg = good;
    cfg.cameras.clear();
    CHECK_THROWS_WITH_AS(pipeline::validate_run_config(cfg),
                         doctest::Contains("no cameras configured"),
                         config_error);
  }
  SUBCASE("camera id with unsafe characters") {
    auto cfg = good;
    cfg.cameras[0].camera_id = "c 01";
    CHECK_THROWS_WITH_AS(pipeline::validate_run_config(cfg),
                         doctest::Contains("must be non-empty [A-Za-z0-9_-]"),
                         config_error);
  }
  SUBCASE("duplicate camera id") {
    auto cfg = good;
    cfg.cameras[1].camera_id = cfg.cameras[0].camera_id;
    CHECK_THROWS_WITH_AS(pipeline::validate_run_config(cfg),
                         doctest::Contains("duplicate camera id"),
                         config_error);
  }
  SUBCASE("missing per-camera paths") {
    auto cfg = good;
    cfg.cameras[0].detections_csv.clear();
    CHECK_THROWS_WITH_AS(
        pipeline::validate_run_config(cfg),
        doctest::Contains("needs detections and embeddings paths"),
        config_error);
  }
  SUBCASE("missing shared paths") {
    auto cfg = good;
    cfg.zones_path.clear();
    CHECK_THROWS_WITH_AS(pipeline::validate_run_config(cfg),
                         doctest::Contains("zones path missing"), config_error);
    cfg = good;
    cfg.links_path.clear();
    CHECK_THROWS_WITH_AS(pipeline::validate_run_config(cfg),
                         doctest::Contains("links path missing"), config_error);
    cfg = good;
    cfg.out_dir.clear();
    CHECK_THROWS_WITH_AS(pipeline::validate_run_config(cfg),
                         doctest::Contains("out_dir missing"), config_error);
  }
}

TEST_CASE("pipeline: embedding dimension mismatch names both cameras") {
  const std::string dir = testutil::temp_dir("pipeline_dim_mismatch");

  synth::ScenarioConfig wide;
  wide.cameras = {{"c001"}};
  wide.n_vehicles = 2;
  wide.embedding_dim = 8;
  wide.frames_per_camera = 400;
  wide.dwell_min = 80;
  wide.dwell_max = 120;
  wide.seed = 3;
  synth::write_scenario(synth::generate(wide), dir + "/a");

  synth::ScenarioConfig narrow = wide;
  narrow.cameras = {{"c002"}};
  narrow.embedding_dim = 4;
  synth::write_scenario(synth::generate(narrow), dir + "/b");

  pipeline::RunConfig cfg;
  cfg.cameras.push_back(
      {"c001", dir + "/a/det_c001.csv", dir + "/a/det_c001.emb", 0});
  cfg.cameras.push_back(
      {"c002", dir + "/b/det_c002.csv", dir + "/b/det_c002.emb", 0});
  cfg.zones_path = dir + "/a/zones.json";
  cfg.links_path = dir + "/a/links.json";
  cfg.out_dir = dir + "/out";

  CHECK_THROWS_WITH_AS(
      pipeline::run_sct(cfg),
      doctest::Contains(
          "embedding dimension mismatch: camera c002 has 4, camera c001 has 8"),
      config_error);
}

TEST_CASE("pipeline: frame_offset shifts every stage by a constant") {
  const std::string dir = make_scenario("pipeline_offset", 19);

  auto plain = scenario_run_config(dir, dir + "/out_plain");
  plain.gt_path.clear();
  pipeline::run(plain);

  auto shifted = scenario_run_config(dir, dir + "/out_shifted");
  shifted.gt_path.clear();
  for (auto& cam : shifted.cameras) cam.frame_offset = 100;
  pipeline::run(shifted);

  for (const char* name : {"tracks_c001.csv", "global_tracks.csv"}) {
    CAPTURE(name);
    const auto a = io::read_tracks(plain.out_dir + "/" + std::string(name));
    const auto b = io::read_tracks(shifted.out_dir + "/" + std::string(name));
    REQUIRE(!a.empty());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      io::TrackRow expect = a[i];
      expect.frame += 100;
      CHECK(b[i] == expect);
    }
  }
}

TEST_CASE("pipeline: stage config overrides steer the run") {
  const std::string dir = make_scenario("pipeline_overrides", 23);

  SUBCASE("sct override through the config file") {
    // Tracks never reach confirmation, so every stage output is empty.
    pipeline::RunConfig cfg = scenario_run_config(dir, dir + "/out_sct");
    cfg.sct.tentative_confirm_frames = 9999;
    const std::string path = dir + "/run_sct_override.json";
    pipeline::write_run_config(path, cfg);

    const pipeline::RunConfig loaded = pipeline::read_run_config(path);
    CHECK(loaded.sct.tentative_confirm_frames == 9999);
    const pipeline::RunResult result = pipeline::run(loaded);
    for (const auto& [cam, trajs] : result.per_camera) {
      CAPTURE(cam);
      CHECK(trajs.empty());
    }
    CHECK(result.linked.global_tracks.empty());
    REQUIRE(result.eval.has_value());
    CHECK(result.eval->counts.idtp == 0);
    CHECK(result.eval->counts.idfp == 0);
    CHECK(result.eval->counts.idfn > 0);
    CHECK(result.eval->scores.idf1 == 0.0);
  }

  SUBCASE("clm length filter drops all trajectories") {
    pipeline::RunConfig cfg = scenario_run_config(dir, dir + "/out_clm");
    cfg.clm.min_traj_len = 100000;
    cfg.clm.max_traj_len = 200000;
    pipeline::run_sct(cfg);
    const clm::LinkOutcome outcome = pipeline::run_link(cfg);
    CHECK(outcome.trajectories.empty());
    CHECK(outcome.global_tracks.empty());
    const auto rows =
        io::read_tracks(std::string(cfg.out_dir) + "/global_tracks.csv");
    CHECK(rows.empty());
  }
}
