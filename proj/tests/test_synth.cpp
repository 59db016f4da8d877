#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "mtmc/errors.hpp"
#include "mtmc/synth.hpp"
#include "test_util.hpp"

using mtmc::CameraLink;
using mtmc::synth::ScenarioConfig;
using mtmc::synth::ScenarioData;
namespace synth = mtmc::synth;
namespace io = mtmc::io;

namespace {

std::string cam_name(int i) {
  return "c00" + std::to_string(i + 1);
}

CameraLink make_link(const std::string& from, const std::string& to,
                     std::int64_t t_min, std::int64_t t_max) {
  CameraLink link;
  link.from_cam = from;
  link.to_cam = to;
  link.t_min = t_min;
  link.t_max = t_max;
  return link;
}

// Corridor with forward windows (60, 140) and, optionally, backward
// windows (20, 380).
ScenarioConfig corridor(int n_cams, int n_vehicles, bool both_directions) {
  ScenarioConfig cfg;
  for (int c = 0; c < n_cams; ++c) {
    cfg.cameras.push_back({cam_name(c), 1920.0, 1080.0});
  }
  for (int c = 0; c + 1 < n_cams; ++c) {
    cfg.links.push_back(make_link(cam_name(c), cam_name(c + 1), 60, 140));
    if (both_directions) {
      cfg.links.push_back(make_link(cam_name(c + 1), cam_name(c), 20, 380));
    }
  }
  cfg.n_vehicles = n_vehicles;
  cfg.embedding_dim = 16;
  cfg.frames_per_camera = 1500;
  cfg.seed = 7;
  return cfg;
}

struct Interval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t count = 0;
};

// (vehicle id, camera) -> contiguous frame interval.
std::map<std::pair<std::int64_t, std::string>, Interval> intervals_of(
    const std::vector<io::TrackRow>& gt) {
  std::map<std::pair<std::int64_t, std::string>, Interval> out;
  for (const io::TrackRow& r : gt) {
    auto [it, fresh] = out.try_emplace({r.id, r.camera_id},
                                       Interval{r.frame, r.frame, 1});
    if (!fresh) {
      it->second.lo = std::min(it->second.lo, r.frame);
      it->second.hi = std::max(it->second.hi, r.frame);
      it->second.count += 1;
    }
  }
  return out;
}

bool same_detection(const mtmc::Detection& a, const mtmc::Detection& b) {
  return a.camera_id == b.camera_id && a.frame == b.frame &&
         a.bbox.x == b.bbox.x && a.bbox.y == b.bbox.y && a.bbox.w == b.bbox.w &&
         a.bbox.h == b.bbox.h && a.confidence == b.confidence &&
         a.embedding.size() == b.embedding.size() && a.embedding == b.embedding;
}

bool same_data(const ScenarioData& a, const ScenarioData& b) {
  if (a.ground_truth != b.ground_truth) return false;
  if (a.centroids.size() != b.centroids.size()) return false;
  for (std::size_t i = 0; i < a.centroids.size(); ++i) {
    if (!(a.centroids[i] == b.centroids[i])) return false;
  }
  if (a.detections.size() != b.detections.size()) return false;
  for (const auto& [cam, dets] : a.detections) {
    const auto it = b.detections.find(cam);
    if (it == b.detections.end() || it->second.size() != dets.size()) {
      return false;
    }
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (!same_detection(dets[i], it->second[i])) return false;
    }
  }
  return true;
}

double angle(const Eigen::VectorXf& a, const Eigen::VectorXf& b) {
  const double d = a.cast<double>().dot(b.cast<double>());
  return std::acos(std::clamp(d, -1.0, 1.0));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("equal configs generate identical data") {
  ScenarioConfig cfg = corridor(3, 6, true);
  cfg.alternate_directions = true;
  cfg.embedding_noise_sigma = 0.1;
  cfg.detection_dropout_rate = 0.05;
  cfg.bbox_jitter_sigma = 0.5;
  cfg.confidence_base = 0.8;
  cfg.confidence_noise = 0.2;

  const ScenarioData a = synth::generate(cfg);
  const ScenarioData b = synth::generate(cfg);
  CHECK(same_data(a, b));

  cfg.seed = 8;
  const ScenarioData c = synth::generate(cfg);
  CHECK_FALSE(same_data(a, c));
}

TEST_CASE("zero noise reproduces the ground truth boxes and centroids") {
  const ScenarioConfig cfg = corridor(2, 4, false);
  const ScenarioData data = synth::generate(cfg);

  std::map<std::string, std::size_t> gt_count;
  std::map<std::tuple<std::string, std::int64_t, double, double, double, double>,
           std::int64_t>
      vehicle_at;
  for (const io::TrackRow& r : data.ground_truth) {
    gt_count[r.camera_id] += 1;
    vehicle_at[{r.camera_id, r.frame, r.bbox.x, r.bbox.y, r.bbox.w,
                r.bbox.h}] = r.id;
  }

  REQUIRE(data.detections.size() == 2);
  for (const auto& [cam, dets] : data.detections) {
    CHECK(dets.size() == gt_count[cam]);
    for (const mtmc::Detection& d : dets) {
      const auto it = vehicle_at.find(
          {cam, d.frame, d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h});
      REQUIRE(it != vehicle_at.end());
      const std::int64_t id = it->second;
      CHECK(d.embedding ==
            data.centroids[static_cast<std::size_t>(id - 1)]);
      CHECK(d.confidence == 0.9);
    }
  }
}

TEST_CASE("built-in edge zones flank each camera") {
  const ScenarioConfig cfg = corridor(2, 2, false);
  const ScenarioData data = synth::generate(cfg);
  REQUIRE(data.zones.size() == 2);
  for (const auto& [cam, zones] : data.zones) {
    REQUIRE(zones.size() == 2);
    CHECK(zones[0].zone_id == 1);
    CHECK(zones[1].zone_id == 2);
    CHECK(zones[0].polygon[1].x == doctest::Approx(1920.0 / 8.0));
    CHECK(zones[1].polygon[0].x == doctest::Approx(1920.0 * 7.0 / 8.0));
  }
  REQUIRE(data.links.size() == 1);
  CHECK(data.links[0].zone_pairs ==
        std::set<std::pair<int, int>>{{2, 1}});
}

TEST_CASE("transit gaps sit strictly inside the advertised windows") {
  ScenarioConfig cfg = corridor(3, 8, true);
  cfg.alternate_directions = true;
  const ScenarioData data = synth::generate(cfg);

  std::map<std::pair<std::string, std::string>, CameraLink> link_of;
  for (const CameraLink& l : cfg.links) link_of[{l.from_cam, l.to_cam}] = l;
  const auto iv = intervals_of(data.ground_truth);

  for (std::int64_t id = 1; id <= cfg.n_vehicles; ++id) {
    // Every camera visited exactly once, contiguously.
    for (int c = 0; c < 3; ++c) {
      const auto it = iv.find({id, cam_name(c)});
      REQUIRE(it != iv.end());
      CHECK(it->second.hi - it->second.lo + 1 == it->second.count);
    }
    const bool eastbound =
        iv.at({id, cam_name(0)}).lo < iv.at({id, cam_name(2)}).lo;
    // Even vehicle indices (odd ids) run eastbound under alternation.
    CHECK(eastbound == (id % 2 == 1));

    const std::vector<int> route =
        eastbound ? std::vector<int>{0, 1, 2} : std::vector<int>{2, 1, 0};
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
      const Interval& from = iv.at({id, cam_name(route[i])});
      const Interval& to = iv.at({id, cam_name(route[i + 1])});
      const CameraLink& link =
          link_of.at({cam_name(route[i]), cam_name(route[i + 1])});
      CHECK(from.hi + link.t_min < to.lo);
      CHECK(to.lo < from.hi + link.t_max);
    }
  }
}

TEST_CASE("dwell times respect the configured bounds") {
  ScenarioConfig cfg = corridor(3, 8, true);
  cfg.alternate_directions = true;
  cfg.dwell_min = 40;
  cfg.dwell_max = 80;
  const ScenarioData data = synth::generate(cfg);
  for (const auto& [key, interval] : intervals_of(data.ground_truth)) {
    CHECK(interval.count >= 40);
    CHECK(interval.count <= 80);
  }
}

TEST_CASE("confuser groups plant twins and staggered shadows") {
  ScenarioConfig cfg = corridor(3, 8, true);
  cfg.confuser_groups = 2;
  cfg.confuser_twin_offset = 0.02;
  cfg.confuser_stagger = 62;
  const ScenarioData data = synth::make_confuser_scenario(cfg);
  const auto iv = intervals_of(data.ground_truth);

  // Vehicle index 4g+1 mirrors 4g's direction; ids are index + 1.
  for (std::int64_t base_id : {1, 5}) {
    const std::int64_t twin_id = base_id + 1;
    const bool base_east =
        iv.at({base_id, cam_name(0)}).lo < iv.at({base_id, cam_name(2)}).lo;
    const bool twin_east =
        iv.at({twin_id, cam_name(0)}).lo < iv.at({twin_id, cam_name(2)}).lo;
    CHECK(base_east);
    CHECK_FALSE(twin_east);
  }

  // Vehicle 4g+3 repeats 4g+2's schedule shifted by exactly the stagger.
  for (std::int64_t lead_id : {3, 7}) {
    const std::int64_t shadow_id = lead_id + 1;
    for (int c = 0; c < 3; ++c) {
      const Interval& lead = iv.at({lead_id, cam_name(c)});
      const Interval& shadow = iv.at({shadow_id, cam_name(c)});
      CHECK(shadow.lo == lead.lo + 62);
      CHECK(shadow.hi == lead.hi + 62);
    }
  }

  // Twin centroids sit at the configured offset from their base; the
  // remaining identities stay orthogonal.
  CHECK(angle(data.centroids[0], data.centroids[1]) ==
        doctest::Approx(0.02).epsilon(1e-2));
  CHECK(angle(data.centroids[2], data.centroids[3]) ==
        doctest::Approx(0.02).epsilon(1e-2));
  CHECK(angle(data.centroids[0], data.centroids[2]) ==
        doctest::Approx(1.5707963).epsilon(1e-3));

  // Zero groups degrade to the plain generator.
  cfg.confuser_groups = 0;
  CHECK(same_data(synth::make_confuser_scenario(cfg), synth::generate(cfg)));
}

TEST_CASE("clustered identities keep the minimum separation") {
  ScenarioConfig cfg = corridor(1, 12, false);
  cfg.embedding_dim = 24;
  cfg.cluster_spread = 0.6;
  cfg.identity_separation = 0.05;
  const ScenarioData data = synth::generate(cfg);
  REQUIRE(data.centroids.size() == 12);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(std::abs(data.centroids[i].norm() - 1.0f) < 1e-5f);
    for (std::size_t j = i + 1; j < 12; ++j) {
      const double a = angle(data.centroids[i], data.centroids[j]);
      CHECK(a >= 0.05 - 1e-4);
      // Clustered, so far from orthogonal.
      const double cos =
          data.centroids[i].cast<double>().dot(data.centroids[j].cast<double>());
      CHECK(cos > 0.3);
    }
  }
}

TEST_CASE("default identities are mutually orthogonal") {
  const ScenarioConfig cfg = corridor(1, 8, false);
  const ScenarioData data = synth::generate(cfg);
  REQUIRE(data.centroids.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(std::abs(data.centroids[i].norm() - 1.0f) < 1e-5f);
    for (std::size_t j = i + 1; j < 8; ++j) {
      const double cos =
          data.centroids[i].cast<double>().dot(data.centroids[j].cast<double>());
      CHECK(std::abs(cos) <= 1e-5);
    }
  }
}

TEST_CASE("scenario config file parsing") {
  const std::string dir = testutil::temp_dir("synth_config");
  const std::string path = dir + "/scenario.json";

  SUBCASE("minimal config fills defaults") {
    write_text(path, "{\"cameras\": [{\"camera_id\": \"a\"}]}");
    const ScenarioConfig cfg = synth::read_scenario_config(path);
    CHECK(cfg.cameras.size() == 1);
    CHECK(cfg.cameras[0].width == 1920.0);
    CHECK(cfg.n_vehicles == 8);
    CHECK(cfg.embedding_dim == 64);
    CHECK(cfg.frames_per_camera == 1000);
    CHECK(cfg.dwell_min == 40);
    CHECK(cfg.dwell_max == 80);
    CHECK(cfg.seed == 0);
  }
  SUBCASE("full config round trips every field") {
    write_text(path, R"({
      "cameras": [{"camera_id": "a", "width": 640, "height": 480},
                  {"camera_id": "b"}],
      "links": [{"from": "a", "to": "b", "t_min": 60, "t_max": 140},
                {"from": "b", "to": "a", "t_min": 20, "t_max": 380}],
      "n_vehicles": 5, "embedding_dim": 32,
      "identity_separation": 0.05, "cluster_spread": 0.8,
      "confuser_groups": 1, "confuser_twin_offset": 0.02,
      "confuser_stagger": 62,
      "embedding_noise_sigma": 0.125, "detection_dropout_rate": 0.03,
      "bbox_jitter_sigma": 1.0, "confidence_base": 0.8,
      "confidence_noise": 0.25, "frames_per_camera": 2200,
      "dwell_min": 40, "dwell_max": 80,
      "alternate_directions": true, "seed": 1000
    })");
    const ScenarioConfig cfg = synth::read_scenario_config(path);
    CHECK(cfg.cameras[0].width == 640.0);
    CHECK(cfg.links.size() == 2);
    CHECK(cfg.links[1].t_max == 380);
    CHECK(cfg.n_vehicles == 5);
    CHECK(cfg.embedding_dim == 32);
    CHECK(cfg.identity_separation == 0.05);
    CHECK(cfg.cluster_spread == 0.8);
    CHECK(cfg.confuser_groups == 1);
    CHECK(cfg.confuser_stagger == 62);
    CHECK(cfg.embedding_noise_sigma == 0.125);
    CHECK(cfg.detection_dropout_rate == 0.03);
    CHECK(cfg.confidence_noise == 0.25);
    CHECK(cfg.frames_per_camera == 2200);
    CHECK(cfg.alternate_directions);
    CHECK(cfg.seed == 1000);
  }
  SUBCASE("unknown keys are rejected") {
    write_text(path,
               "{\"cameras\": [{\"camera_id\": \"a\"}], \"vehicles\": 3}");
    CHECK_THROWS_WITH_AS(synth::read_scenario_config(path),
                         doctest::Contains("unknown key"), mtmc::config_error);
  }
  SUBCASE("type mismatches are rejected") {
    write_text(path,
               "{\"cameras\": [{\"camera_id\": \"a\"}], \"n_vehicles\": \"8\"}");
    CHECK_THROWS_WITH_AS(synth::read_scenario_config(path),
                         doctest::Contains("integer"), mtmc::config_error);
  }
  SUBCASE("missing cameras key") {
    write_text(path, "{}");
    CHECK_THROWS_WITH_AS(synth::read_scenario_config(path),
                         doctest::Contains("cameras"), mtmc::config_error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_WITH_AS(synth::read_scenario_config(dir + "/absent.json"),
                         doctest::Contains("cannot open"), mtmc::config_error);
  }
  SUBCASE("negative seed") {
    write_text(path, "{\"cameras\": [{\"camera_id\": \"a\"}], \"seed\": -1}");
    CHECK_THROWS_WITH_AS(synth::read_scenario_config(path),
                         doctest::Contains("seed"), mtmc::config_error);
  }
}

TEST_CASE("validate_scenario_config rejects inconsistent settings") {
  SUBCASE("non-adjacent link") {
    ScenarioConfig cfg = corridor(3, 4, false);
    cfg.links.push_back(make_link(cam_name(0), cam_name(2), 60, 140));
    CHECK_THROWS_WITH_AS(synth::validate_scenario_config(cfg),
                         doctest::Contains("adjacent"), mtmc::config_error);
  }
  SUBCASE("duplicate direction") {
    ScenarioConfig cfg = corridor(2, 4, false);
    cfg.links.push_back(make_link(cam_name(0), cam_name(1), 10, 20));
    CHECK_THROWS_WITH_AS(synth::validate_scenario_config(cfg),
                         doctest::Contains("duplicate link"),
                         mtmc::config_error);
  }
  SUBCASE("unknown endpoint") {
    ScenarioConfig cfg = corridor(2, 4, false);
    cfg.links.push_back(make_link(cam_name(1), "c999", 60, 140));
    CHECK_THROWS_WITH_AS(synth::validate_scenario_config(cfg),
                         doctest::Contains("unknown camera"),
                         mtmc::config_error);
  }
  SUBCASE("dwell bounds out of order") {
    ScenarioConfig cfg = corridor(2, 4, false);
    cfg.dwell_min = 80;
    cfg.dwell_max = 40;
    CHECK_THROWS_WITH_AS(synth::validate_scenario_config(cfg),
                         doctest::Contains("dwell"), mtmc::config_error);
  }
  SUBCASE("dropout of 1 would erase the scenario") {
    ScenarioConfig cfg = corridor(2, 4, false);
    cfg.detection_dropout_rate = 1.0;
    CHECK_THROWS_WITH_AS(synth::validate_scenario_config(cfg),
                         doctest::Contains("detection_dropout_rate"),
                         mtmc::config_error);
  }
}

TEST_CASE("generation fails loudly when the plan cannot fit") {
  SUBCASE("route longer than the camera timeline") {
    ScenarioConfig cfg = corridor(1, 2, false);
    cfg.frames_per_camera = 10;  // dwell alone needs at least 40
    CHECK_THROWS_WITH_AS(synth::generate(cfg),
                         doctest::Contains("does not fit"),
                         mtmc::config_error);
  }
  SUBCASE("window too narrow to draw gaps") {
    ScenarioConfig cfg = corridor(2, 2, false);
    cfg.links[0].t_min = 100;
    cfg.links[0].t_max = 101;
    CHECK_THROWS_WITH_AS(synth::generate(cfg), doctest::Contains("too narrow"),
                         mtmc::config_error);
  }
  SUBCASE("more orthogonal identities than dimensions") {
    ScenarioConfig cfg = corridor(1, 8, false);
    cfg.embedding_dim = 4;
    CHECK_THROWS_WITH_AS(synth::generate(cfg),
                         doctest::Contains("n_vehicles <= embedding_dim"),
                         mtmc::config_error);
  }
  SUBCASE("confuser groups need four vehicles each") {
    ScenarioConfig cfg = corridor(2, 8, true);
    cfg.confuser_groups = 3;
    CHECK_THROWS_WITH_AS(synth::make_confuser_scenario(cfg),
                         doctest::Contains("confuser_groups"),
                         mtmc::config_error);
  }
}

TEST_CASE("written scenario files read back identically") {
  ScenarioConfig cfg = corridor(2, 3, false);
  cfg.embedding_noise_sigma = 0.05;
  cfg.bbox_jitter_sigma = 0.5;
  const ScenarioData data = synth::generate(cfg);
  const std::string dir = testutil::temp_dir("synth_roundtrip");
  synth::write_scenario(data, dir);

  CHECK(io::read_tracks(dir + "/gt.csv") == data.ground_truth);

  const auto zones = io::read_zones(dir + "/zones.json");
  REQUIRE(zones.size() == data.zones.size());
  for (const auto& [cam, zs] : data.zones) {
    const auto it = zones.find(cam);
    REQUIRE(it != zones.end());
    REQUIRE(it->second.size() == zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
      CHECK(it->second[i].zone_id == zs[i].zone_id);
      REQUIRE(it->second[i].polygon.size() == zs[i].polygon.size());
      for (std::size_t k = 0; k < zs[i].polygon.size(); ++k) {
        CHECK(it->second[i].polygon[k].x == zs[i].polygon[k].x);
        CHECK(it->second[i].polygon[k].y == zs[i].polygon[k].y);
      }
    }
  }

  const auto links = io::read_links(dir + "/links.json");
  REQUIRE(links.size() == data.links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    CHECK(links[i].from_cam == data.links[i].from_cam);
    CHECK(links[i].to_cam == data.links[i].to_cam);
    CHECK(links[i].t_min == data.links[i].t_min);
    CHECK(links[i].t_max == data.links[i].t_max);
    CHECK(links[i].zone_pairs == data.links[i].zone_pairs);
  }

  for (const auto& [cam, dets] : data.detections) {
    const auto read = io::read_detections(dir + "/det_" + cam + ".csv",
                                          dir + "/det_" + cam + ".emb", cam, 0);
    REQUIRE(read.size() == dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
      CHECK(same_detection(read[i], dets[i]));
    }
  }
}
