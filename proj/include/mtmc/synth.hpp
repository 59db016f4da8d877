#pragma once

// Deterministic scenario generator used by the test suites and the `synth`
// CLI command. Cameras form a corridor in list order: eastbound vehicles
// traverse it head to tail, westbound vehicles tail to head. Every camera
// gets two built-in edge zones, id 1 covering the first eighth of the image
// width and id 2 the last eighth, both full height, so eastbound traffic
// enters through zone 1 and leaves through zone 2.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mtmc/io.hpp"
#include "mtmc/types.hpp"

namespace mtmc::synth {

struct CameraSpec {
  std::string camera_id;
  double width = 1920.0;
  double height = 1080.0;
};

struct ScenarioConfig {
  std::vector<CameraSpec> cameras;

  // True transition windows. Links must connect adjacent cameras in list
  // order; zone_pairs on input are ignored and rebuilt from the corridor
  // layout. Actual gaps are drawn uniformly from the window shrunk by a
  // safety margin of max(1, span/4) per side, so every gap sits strictly
  // inside its window even after detector dropout trims trajectory ends.
  std::vector<CameraLink> links;

  int n_vehicles = 8;
  int embedding_dim = 64;

  // Identity geometry. With separation >= pi/2 and zero spread the
  // centroids are mutually orthogonal (requires n_vehicles <= dim).
  // A positive cluster_spread instead packs every centroid around one
  // random direction at roughly acos(1/(1+spread^2)) pairwise angle,
  // with identity_separation enforced as the minimum pairwise angle.
  double identity_separation = 1.5707963267948966;
  double cluster_spread = 0.0;

  // Confuser plants, honored by make_confuser_scenario. Group g covers
  // vehicle indices 4g..4g+3: 4g+1 is an opposite-direction twin of 4g,
  // and 4g+3 shadows 4g+2 in the same direction with an identical
  // schedule shifted confuser_stagger frames later. Twin centroids sit
  // confuser_twin_offset radians from their base identity.
  int confuser_groups = 0;
  double confuser_twin_offset = 0.0;
  std::int64_t confuser_stagger = 0;

  double embedding_noise_sigma = 0.0;
  double detection_dropout_rate = 0.0;
  double bbox_jitter_sigma = 0.0;
  double confidence_base = 0.9;
  double confidence_noise = 0.0;

  std::int64_t frames_per_camera = 1000;
  std::int64_t dwell_min = 40;
  std::int64_t dwell_max = 80;

  // Odd-indexed non-confuser vehicles travel westbound when set.
  bool alternate_directions = false;

  std::uint64_t seed = 0;
};

// Throws config_error on inconsistent settings (unknown link endpoints,
// non-adjacent links, dwell bounds out of order, rates outside [0, 1], ...).
void validate_scenario_config(const ScenarioConfig& config);

// Parses a scenario JSON file. Every ScenarioConfig field is a same-named
// key; cameras are objects {camera_id, width, height} and links
// {from, to, t_min, t_max}. Only "cameras" is required. Unknown keys,
// type mismatches, a missing or malformed file all raise config_error.
ScenarioConfig read_scenario_config(const std::string& json_path);

struct ScenarioData {
  std::map<std::string, std::vector<Detection>> detections;
  std::vector<io::TrackRow> ground_truth;  // sorted by (camera, id, frame)
  std::map<std::string, std::vector<Zone>> zones;
  std::vector<CameraLink> links;            // zone_pairs filled in
  std::vector<Eigen::VectorXf> centroids;   // index = vehicle id - 1
};

// Pure function of the config: equal configs produce equal data, and the
// files written by write_scenario are byte-identical across runs.
// Ignores confuser_groups (plants none).
ScenarioData generate(const ScenarioConfig& config);

// generate() with the confuser plants enabled; with confuser_groups == 0
// the output is identical to generate().
ScenarioData make_confuser_scenario(const ScenarioConfig& config);

// Writes gt.csv, zones.json, links.json and det_<cam>.csv/.emb per camera.
void write_scenario(const ScenarioData& data, const std::string& out_dir);

}  // namespace mtmc::synth
