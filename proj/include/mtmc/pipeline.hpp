#pragma once

// Orchestration shared by the CLI subcommands. `run` simply executes the
// sct, link and eval stages in sequence through the same functions the
// standalone subcommands use, handing data between stages through the
// files in out_dir, so a chained invocation and one `run` produce
// byte-identical outputs.
//
// Run config JSON, paths resolved against the config file's directory:
// {
//   "cameras": [{"camera_id": "c001", "detections": "det_c001.csv",
//                "embeddings": "det_c001.emb", "frame_offset": 0}, ...],
//   "zones": "zones.json",
//   "links": "links.json",
//   "gt": "gt.csv",                // optional
//   "out_dir": "out",
//   "sct": {...}, "clm": {...}, "eval": {...}   // optional field overrides
// }
//
// Stage outputs inside out_dir:
//   tracks_<cam>.csv, tracks_<cam>.emb   per-camera trajectories (sct)
//   global_tracks.csv                    rows labeled by global id (link)
//   metrics.json                         identity scores, needs gt (eval)

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtmc/clm.hpp"
#include "mtmc/metrics.hpp"
#include "mtmc/sct.hpp"
#include "mtmc/types.hpp"

namespace mtmc::pipeline {

struct CameraInput {
  std::string camera_id;
  std::string detections_csv;
  std::string embeddings_blob;
  std::int64_t frame_offset = 0;
};

struct RunConfig {
  std::vector<CameraInput> cameras;
  std::string zones_path;
  std::string links_path;
  std::string gt_path;  // empty disables evaluation
  std::string out_dir = "out";
  sct::SctConfig sct;
  clm::ClmConfig clm;
  metrics::EvalConfig eval;
};

// Parses and resolves a run config. Unknown keys, type mismatches, a
// missing or malformed file all raise config_error.
RunConfig read_run_config(const std::string& json_path);

// Writes the config with paths exactly as given (callers pass paths
// relative to where the file will live).
void write_run_config(const std::string& json_path, const RunConfig& config);

// Structural checks plus the per-stage config validators.
void validate_run_config(const RunConfig& config);

// Tracks every camera and writes tracks_<cam>.csv/.emb. The embedding blob
// row k holds the feature of the k-th trajectory in track-id order.
// Detection streams with different embedding dimensions across cameras
// raise config_error.
std::map<std::string, std::vector<Trajectory>> run_sct(const RunConfig& config);

// Reads the per-camera track files back from out_dir, associates across
// cameras and writes global_tracks.csv (rows ordered by global id, then
// camera, then frame).
clm::LinkOutcome run_link(const RunConfig& config);

struct EvalResult {
  IdCounts counts;
  metrics::IdentityScores scores;
};

// Scores global_tracks.csv against the ground-truth file and writes
// metrics.json. Requires a gt path.
EvalResult run_eval(const RunConfig& config);

struct RunResult {
  std::map<std::string, std::vector<Trajectory>> per_camera;
  clm::LinkOutcome linked;
  std::optional<EvalResult> eval;
};

// All stages in sequence; eval runs only when gt_path is set.
RunResult run(const RunConfig& config);

}  // namespace mtmc::pipeline
