#include "mtmc/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mtmc/errors.hpp"
#include "mtmc/io.hpp"

namespace mtmc::pipeline {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

bool filename_safe(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& context) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) {
      throw config_error(context + ": unknown key '" + item.key() + "'");
    }
  }
}

const json& require(const json& obj, const char* key,
                    const std::string& context) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw config_error(context + ": missing required key '" + key + "'");
  }
  return *it;
}

std::string as_string(const json& v, const std::string& context) {
  if (!v.is_string()) throw config_error(context + " must be a string");
  return v.get<std::string>();
}

double as_number(const json& v, const std::string& context) {
  if (!v.is_number()) throw config_error(context + " must be a number");
  return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& context) {
  if (!v.is_number_integer()) {
    throw config_error(context + " must be an integer");
  }
  return v.get<std::int64_t>();
}

bool as_boolean(const json& v, const std::string& context) {
  if (!v.is_boolean()) throw config_error(context + " must be a boolean");
  return v.get<bool>();
}

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return p;
  fs::path q(p);
  if (q.is_absolute()) return q.lexically_normal().string();
  return (base / q).lexically_normal().string();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw data_error(path + ": cannot open file for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw data_error(path + ": write failed");
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw data_error(out_dir + ": cannot create directory (" + ec.message() +
                     ")");
  }
}

std::string tracks_csv_path(const RunConfig& config, const std::string& cam) {
  return (fs::path(config.out_dir) / ("tracks_" + cam + ".csv")).string();
}

std::string tracks_blob_path(const RunConfig& config, const std::string& cam) {
  return (fs::path(config.out_dir) / ("tracks_" + cam + ".emb")).string();
}

std::string global_tracks_path(const RunConfig& config) {
  return (fs::path(config.out_dir) / "global_tracks.csv").string();
}

}  // namespace

RunConfig read_run_config(const std::string& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) throw config_error(json_path + ": cannot open config file");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error(json_path + ": " + e.what());
  }
  if (!root.is_object()) throw config_error(json_path + ": not a JSON object");
  check_keys(root,
             {"cameras", "zones", "links", "gt", "out_dir", "sct", "clm",
              "eval"},
             json_path);

  RunConfig config;
  const fs::path base = fs::path(json_path).parent_path();

  const json& cams = require(root, "cameras", json_path);
  if (!cams.is_array()) {
    throw config_error(json_path + ": 'cameras' must be an array");
  }
  for (const json& entry : cams) {
    const std::string ctx = json_path + ": camera entry";
    if (!entry.is_object()) throw config_error(ctx + " must be an object");
    check_keys(entry, {"camera_id", "detections", "embeddings", "frame_offset"},
               ctx);
    CameraInput cam;
    cam.camera_id = as_string(require(entry, "camera_id", ctx), ctx + ".camera_id");
    cam.detections_csv =
        resolve(base, as_string(require(entry, "detections", ctx),
                                ctx + ".detections"));
    cam.embeddings_blob =
        resolve(base, as_string(require(entry, "embeddings", ctx),
                                ctx + ".embeddings"));
    if (entry.contains("frame_offset")) {
      cam.frame_offset =
          as_integer(entry["frame_offset"], ctx + ".frame_offset");
    }
    config.cameras.push_back(std::move(cam));
  }

  config.zones_path =
      resolve(base, as_string(require(root, "zones", json_path),
                              json_path + ".zones"));
  config.links_path =
      resolve(base, as_string(require(root, "links", json_path),
                              json_path + ".links"));
  if (root.contains("gt")) {
    config.gt_path = resolve(base, as_string(root["gt"], json_path + ".gt"));
  }
  if (root.contains("out_dir")) {
    config.out_dir =
        resolve(base, as_string(root["out_dir"], json_path + ".out_dir"));
  } else {
    config.out_dir = resolve(base, config.out_dir);
  }

  if (root.contains("sct")) {
    const json& block = root["sct"];
    const std::string ctx = json_path + ": sct";
    if (!block.is_object()) throw config_error(ctx + " must be an object");
    check_keys(block,
               {"detection_score_threshold", "high_conf_threshold",
                "association_threshold", "ema_momentum", "max_frames_lost",
                "tentative_confirm_frames", "iou_gate", "appearance_weight"},
               ctx);
    sct::SctConfig& s = config.sct;
    if (block.contains("detection_score_threshold"))
      s.detection_score_threshold =
          as_number(block["detection_score_threshold"],
                    ctx + ".detection_score_threshold");
    if (block.contains("high_conf_threshold"))
      s.high_conf_threshold =
          as_number(block["high_conf_threshold"], ctx + ".high_conf_threshold");
    if (block.contains("association_threshold"))
      s.association_threshold = as_number(block["association_threshold"],
                                          ctx + ".association_threshold");
    if (block.contains("ema_momentum"))
      s.ema_momentum = as_number(block["ema_momentum"], ctx + ".ema_momentum");
    if (block.contains("max_frames_lost"))
      s.max_frames_lost = static_cast<int>(
          as_integer(block["max_frames_lost"], ctx + ".max_frames_lost"));
    if (block.contains("tentative_confirm_frames"))
      s.tentative_confirm_frames =
          static_cast<int>(as_integer(block["tentative_confirm_frames"],
                                      ctx + ".tentative_confirm_frames"));
    if (block.contains("iou_gate"))
      s.iou_gate = as_number(block["iou_gate"], ctx + ".iou_gate");
    if (block.contains("appearance_weight"))
      s.appearance_weight =
          as_number(block["appearance_weight"], ctx + ".appearance_weight");
  }

  if (root.contains("clm")) {
    const json& block = root["clm"];
    const std::string ctx = json_path + ": clm";
    if (!block.is_object()) throw config_error(ctx + " must be an object");
    check_keys(block,
               {"cross_camera_distance_threshold", "min_traj_len",
                "max_traj_len", "enable_temporal_mask", "enable_direction_mask",
                "enable_btt"},
               ctx);
    clm::ClmConfig& c = config.clm;
    if (block.contains("cross_camera_distance_threshold"))
      c.cross_camera_distance_threshold =
          as_number(block["cross_camera_distance_threshold"],
                    ctx + ".cross_camera_distance_threshold");
    if (block.contains("min_traj_len"))
      c.min_traj_len = static_cast<int>(
          as_integer(block["min_traj_len"], ctx + ".min_traj_len"));
    if (block.contains("max_traj_len"))
      c.max_traj_len = static_cast<int>(
          as_integer(block["max_traj_len"], ctx + ".max_traj_len"));
    if (block.contains("enable_temporal_mask"))
      c.enable_temporal_mask = as_boolean(block["enable_temporal_mask"],
                                          ctx + ".enable_temporal_mask");
    if (block.contains("enable_direction_mask"))
      c.enable_direction_mask = as_boolean(block["enable_direction_mask"],
                                           ctx + ".enable_direction_mask");
    if (block.contains("enable_btt"))
      c.enable_btt = as_boolean(block["enable_btt"], ctx + ".enable_btt");
  }

  if (root.contains("eval")) {
    const json& block = root["eval"];
    const std::string ctx = json_path + ": eval";
    if (!block.is_object()) throw config_error(ctx + " must be an object");
    check_keys(block, {"iou_match_threshold"}, ctx);
    if (block.contains("iou_match_threshold"))
      config.eval.iou_match_threshold =
          as_number(block["iou_match_threshold"], ctx + ".iou_match_threshold");
  }

  validate_run_config(config);
  return config;
}

void write_run_config(const std::string& json_path, const RunConfig& config) {
  json root;
  root["cameras"] = json::array();
  for (const CameraInput& cam : config.cameras) {
    json entry;
    entry["camera_id"] = cam.camera_id;
    entry["detections"] = cam.detections_csv;
    entry["embeddings"] = cam.embeddings_blob;
    entry["frame_offset"] = cam.frame_offset;
    root["cameras"].push_back(std::move(entry));
  }
  root["zones"] = config.zones_path;
  root["links"] = config.links_path;
  if (!config.gt_path.empty()) root["gt"] = config.gt_path;
  root["out_dir"] = config.out_dir;
  root["sct"] = {
      {"detection_score_threshold", config.sct.detection_score_threshold},
      {"high_conf_threshold", config.sct.high_conf_threshold},
      {"association_threshold", config.sct.association_threshold},
      {"ema_momentum", config.sct.ema_momentum},
      {"max_frames_lost", config.sct.max_frames_lost},
      {"tentative_confirm_frames", config.sct.tentative_confirm_frames},
      {"iou_gate", config.sct.iou_gate},
      {"appearance_weight", config.sct.appearance_weight},
  };
  root["clm"] = {
      {"cross_camera_distance_threshold",
       config.clm.cross_camera_distance_threshold},
      {"min_traj_len", config.clm.min_traj_len},
      {"max_traj_len", config.clm.max_traj_len},
      {"enable_temporal_mask", config.clm.enable_temporal_mask},
      {"enable_direction_mask", config.clm.enable_direction_mask},
      {"enable_btt", config.clm.enable_btt},
  };
  root["eval"] = {{"iou_match_threshold", config.eval.iou_match_threshold}};
  write_text(json_path, root.dump(2) + "\n");
}

void validate_run_config(const RunConfig& config) {
  if (config.cameras.empty()) {
    throw config_error("run config: no cameras configured");
  }
  std::set<std::string> seen;
  for (const CameraInput& cam : config.cameras) {
    if (!filename_safe(cam.camera_id)) {
      throw config_error("run config: camera id '" + cam.camera_id +
                         "' must be non-empty [A-Za-z0-9_-]");
    }
    if (!seen.insert(cam.camera_id).second) {
      throw config_error("run config: duplicate camera id " + cam.camera_id);
    }
    if (cam.detections_csv.empty() || cam.embeddings_blob.empty()) {
      throw config_error("run config: camera " + cam.camera_id +
                         " needs detections and embeddings paths");
    }
  }
  if (config.zones_path.empty()) {
    throw config_error("run config: zones path missing");
  }
  if (config.links_path.empty()) {
    throw config_error("run config: links path missing");
  }
  if (config.out_dir.empty()) {
    throw config_error("run config: out_dir missing");
  }
  sct::validate_sct_config(config.sct);
  clm::validate_clm_config(config.clm);
  metrics::validate_eval_config(config.eval);
}

std::map<std::string, std::vector<Trajectory>> run_sct(
    const RunConfig& config) {
  validate_run_config(config);
  ensure_out_dir(config.out_dir);
  std::map<std::string, std::vector<Trajectory>> per_camera;
  int dim = -1;
  std::string dim_cam;
  for (const CameraInput& cam : config.cameras) {
    const std::vector<Detection> dets = io::read_detections(
        cam.detections_csv, cam.embeddings_blob, cam.camera_id,
        cam.frame_offset);
    if (!dets.empty()) {
      const int d = static_cast<int>(dets.front().embedding.size());
      if (dim < 0) {
        dim = d;
        dim_cam = cam.camera_id;
      } else if (d != dim) {
        throw config_error("embedding dimension mismatch: camera " +
                           cam.camera_id + " has " + std::to_string(d) +
                           ", camera " + dim_cam + " has " +
                           std::to_string(dim));
      }
    }
    std::vector<Trajectory> trajs = sct::track_camera(dets, config.sct);
    std::vector<io::TrackRow> rows;
    std::vector<Eigen::VectorXf> feats;
    feats.reserve(trajs.size());
    for (const Trajectory& traj : trajs) {
      feats.push_back(traj.feature);
      for (const Observation& obs : traj.observations) {
        rows.push_back(
            {cam.camera_id, traj.track_id, obs.frame, obs.bbox,
             obs.confidence});
      }
    }
    io::write_tracks(tracks_csv_path(config, cam.camera_id), rows);
    io::write_embedding_blob(tracks_blob_path(config, cam.camera_id), feats);
    per_camera[cam.camera_id] = std::move(trajs);
  }
  return per_camera;
}

clm::LinkOutcome run_link(const RunConfig& config) {
  validate_run_config(config);
  ensure_out_dir(config.out_dir);
  const auto zones = io::read_zones(config.zones_path);
  const auto links = io::read_links(config.links_path);
  io::validate_links_against_zones(links, zones);

  std::map<std::string, std::vector<Trajectory>> per_camera;
  int dim = -1;
  std::string dim_cam;
  for (const CameraInput& cam : config.cameras) {
    const std::string csv = tracks_csv_path(config, cam.camera_id);
    const std::string blob = tracks_blob_path(config, cam.camera_id);
    const std::vector<io::TrackRow> rows = io::read_tracks(csv);
    const std::vector<Eigen::VectorXf> feats = io::read_embedding_blob(blob);

    std::map<std::int64_t, Trajectory> by_id;
    for (const io::TrackRow& row : rows) {
      if (row.camera_id != cam.camera_id) {
        throw data_error(csv + ": row for camera " + row.camera_id +
                         " inside " + cam.camera_id + "'s track file");
      }
      Trajectory& traj = by_id[row.id];
      traj.track_id = row.id;
      traj.camera_id = cam.camera_id;
      traj.observations.push_back({row.frame, row.bbox, row.confidence});
    }
    if (by_id.size() != feats.size()) {
      throw data_error(blob + ": " + std::to_string(feats.size()) +
                       " features for " + std::to_string(by_id.size()) +
                       " track ids in " + csv);
    }
    if (!feats.empty()) {
      const int d = static_cast<int>(feats.front().size());
      if (dim < 0) {
        dim = d;
        dim_cam = cam.camera_id;
      } else if (d != dim) {
        throw config_error("embedding dimension mismatch: camera " +
                           cam.camera_id + " has " + std::to_string(d) +
                           ", camera " + dim_cam + " has " +
                           std::to_string(dim));
      }
    }

    std::vector<Trajectory> trajs;
    trajs.reserve(by_id.size());
    std::size_t index = 0;
    for (auto& [id, traj] : by_id) {
      std::sort(traj.observations.begin(), traj.observations.end(),
                [](const Observation& a, const Observation& b) {
                  return a.frame < b.frame;
                });
      for (std::size_t i = 1; i < traj.observations.size(); ++i) {
        if (traj.observations[i].frame == traj.observations[i - 1].frame) {
          throw data_error(csv + ": track " + std::to_string(id) +
                           ": duplicate frame " +
                           std::to_string(traj.observations[i].frame));
        }
      }
      traj.t_start = traj.observations.front().frame;
      traj.t_end = traj.observations.back().frame;
      traj.feature =
          normalize_embedding(feats[index], blob + ": track feature");
      trajs.push_back(std::move(traj));
      ++index;
    }
    per_camera[cam.camera_id] = std::move(trajs);
  }

  clm::LinkOutcome outcome =
      clm::link_cameras(per_camera, zones, links, config.clm);

  std::map<clm::TrackKey, const Trajectory*> traj_of;
  for (const Trajectory& traj : outcome.trajectories) {
    traj_of[{traj.camera_id, traj.track_id}] = &traj;
  }
  std::vector<io::TrackRow> rows;
  for (const GlobalTrack& track : outcome.global_tracks) {
    for (const auto& member : track.members) {
      const Trajectory* traj = traj_of.at(member);
      for (const Observation& obs : traj->observations) {
        rows.push_back({member.first, track.global_id, obs.frame, obs.bbox,
                        obs.confidence});
      }
    }
  }
  io::write_tracks(global_tracks_path(config), rows);
  return outcome;
}

EvalResult run_eval(const RunConfig& config) {
  validate_run_config(config);
  ensure_out_dir(config.out_dir);
  if (config.gt_path.empty()) {
    throw config_error("eval requires a gt path in the run config");
  }
  const std::vector<io::TrackRow> gt = io::read_tracks(config.gt_path);
  const std::vector<io::TrackRow> pred =
      io::read_tracks(global_tracks_path(config));
  EvalResult result;
  result.counts = metrics::id_assignment(gt, pred, config.eval);
  result.scores = metrics::idf1_idp_idr(result.counts);
  json j;
  j["idtp"] = result.counts.idtp;
  j["idfp"] = result.counts.idfp;
  j["idfn"] = result.counts.idfn;
  j["idf1"] = result.scores.idf1;
  j["idp"] = result.scores.idp;
  j["idr"] = result.scores.idr;
  write_text((fs::path(config.out_dir) / "metrics.json").string(),
             j.dump(2) + "\n");
  return result;
}

RunResult run(const RunConfig& config) {
  RunResult result;
  result.per_camera = run_sct(config);
  result.linked = run_link(config);
  if (!config.gt_path.empty()) result.eval = run_eval(config);
  return result;
}

}  // namespace mtmc::pipeline
