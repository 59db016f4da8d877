#include "mtmc/synth.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "mtmc/errors.hpp"
#include "mtmc/rng.hpp"

namespace mtmc::synth {

namespace {

constexpr double kHalfPi = 1.5707963267948966;
constexpr double kPi = 3.14159265358979323846;

// Vehicle geometry model: lane anchored by the box bottom-center at a fixed
// image-height fraction, box height and aspect fixed per vehicle.
constexpr double kLaneLow = 0.45;
constexpr double kLaneHigh = 0.9;
constexpr double kHeightLow = 56.0;
constexpr double kHeightHigh = 96.0;
constexpr double kAspectLow = 1.3;
constexpr double kAspectHigh = 1.9;

bool filename_safe(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

Eigen::VectorXd random_gaussian(SplitMix64& rng, int dim) {
  Eigen::VectorXd v(dim);
  for (int d = 0; d < dim; ++d) v(d) = rng.gaussian();
  return v;
}

Eigen::VectorXd random_unit(SplitMix64& rng, int dim) {
  for (;;) {
    Eigen::VectorXd v = random_gaussian(rng, dim);
    const double n = v.norm();
    if (n > 0.0) return v / n;
  }
}

double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}

// Unit vector at `angle` radians from unit `base`, along a random
// orthogonal direction.
Eigen::VectorXd rotate_away(const Eigen::VectorXd& base, double angle,
                            SplitMix64& rng) {
  for (;;) {
    Eigen::VectorXd g = random_gaussian(rng, static_cast<int>(base.size()));
    Eigen::VectorXd perp = g - base * base.dot(g);
    const double n = perp.norm();
    if (n == 0.0) continue;
    perp /= n;
    return base * std::cos(angle) + perp * std::sin(angle);
  }
}

struct EdgeLinks {
  const CameraLink* forward = nullptr;   // cameras[i] -> cameras[i+1]
  const CameraLink* backward = nullptr;  // cameras[i+1] -> cameras[i]
};

struct GapRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

// Shrinks the advertised window by max(1, span/4) per side so drawn gaps
// survive strict window checks even after dropout trims trajectory ends.
GapRange gap_range(const CameraLink& link) {
  const std::int64_t span = link.t_max - link.t_min;
  const std::int64_t margin = std::max<std::int64_t>(1, span / 4);
  const GapRange r{link.t_min + margin, link.t_max - margin};
  if (r.lo > r.hi) {
    throw config_error("transition window [" + std::to_string(link.t_min) +
                       ", " + std::to_string(link.t_max) + "] from " +
                       link.from_cam + " to " + link.to_cam +
                       " is too narrow to draw gaps from");
  }
  return r;
}

struct VehiclePlan {
  bool eastbound = true;
  std::vector<int> route;           // camera indices, visit order
  std::vector<std::int64_t> dwell;  // frames per visit
  std::vector<std::int64_t> gap;    // frames between consecutive visits
  std::int64_t t0 = 0;
  double lane_frac = 0.0;
  double height = 0.0;
  double aspect = 0.0;
};

struct GtBox {
  std::int64_t frame = 0;
  int vehicle = 0;  // zero-based
  BBox bbox;
};

bool is_confuser(int v, int groups) { return v < 4 * groups; }
bool is_x_twin(int v, int groups) { return is_confuser(v, groups) && v % 4 == 1; }
bool is_y_partner(int v, int groups) { return is_confuser(v, groups) && v % 4 == 2; }
bool is_y_twin(int v, int groups) { return is_confuser(v, groups) && v % 4 == 3; }

std::vector<Eigen::VectorXd> build_centroids(const ScenarioConfig& config,
                                             int groups, SplitMix64& rng) {
  const int n = config.n_vehicles;
  const int dim = config.embedding_dim;
  std::vector<Eigen::VectorXd> centroids(n);

  const bool orthogonal = config.cluster_spread == 0.0 &&
                          config.identity_separation >= kHalfPi - 1e-9;
  if (orthogonal) {
    if (n > dim) {
      throw config_error(
          "orthogonal identities need n_vehicles <= embedding_dim (" +
          std::to_string(n) + " > " + std::to_string(dim) + ")");
    }
    Eigen::MatrixXd a(dim, n);
    for (int v = 0; v < n; ++v)
      for (int d = 0; d < dim; ++d) a(d, v) = rng.gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, n);
    const Eigen::MatrixXd& packed = qr.matrixQR();
    for (int v = 0; v < n; ++v)
      if (packed(v, v) < 0.0) q.col(v) = -q.col(v);
    for (int v = 0; v < n; ++v) centroids[v] = q.col(v);
  } else {
    const Eigen::VectorXd hub = random_unit(rng, dim);
    for (int v = 0; v < n; ++v) {
      if (is_x_twin(v, groups) || is_y_twin(v, groups)) continue;  // below
      bool placed = false;
      for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
        Eigen::VectorXd cand = hub + config.cluster_spread * random_unit(rng, dim);
        cand /= cand.norm();
        bool ok = true;
        for (int u = 0; u < v && ok; ++u) {
          if (centroids[u].size() == 0) continue;
          ok = angle_between(cand, centroids[u]) >= config.identity_separation;
        }
        if (ok) {
          centroids[v] = std::move(cand);
          placed = true;
        }
      }
      if (!placed) {
        throw config_error(
            "identity_separation " +
            std::to_string(config.identity_separation) +
            " cannot be met after 1000 draws; lower it or raise "
            "cluster_spread");
      }
    }
  }

  // Twin slots shadow their base identity at a fixed angular offset.
  for (int g = 0; g < groups; ++g) {
    centroids[4 * g + 1] =
        rotate_away(centroids[4 * g], config.confuser_twin_offset, rng);
    centroids[4 * g + 3] =
        rotate_away(centroids[4 * g + 2], config.confuser_twin_offset, rng);
  }
  return centroids;
}

ScenarioData run_generator(const ScenarioConfig& config, int groups) {
  validate_scenario_config(config);
  if (4 * groups > config.n_vehicles) {
    throw config_error("confuser_groups " + std::to_string(groups) +
                       " needs at least " + std::to_string(4 * groups) +
                       " vehicles, have " +
                       std::to_string(config.n_vehicles));
  }

  const int n_cams = static_cast<int>(config.cameras.size());
  const int n = config.n_vehicles;
  SplitMix64 rng(config.seed);

  // Edge table: links are only valid between adjacent cameras.
  std::map<std::string, int> cam_index;
  for (int c = 0; c < n_cams; ++c) cam_index[config.cameras[c].camera_id] = c;
  std::vector<EdgeLinks> edges(n_cams > 0 ? n_cams - 1 : 0);
  for (const CameraLink& link : config.links) {
    const int a = cam_index.at(link.from_cam);
    const int b = cam_index.at(link.to_cam);
    EdgeLinks& e = edges[std::min(a, b)];
    const CameraLink*& slot = (b == a + 1) ? e.forward : e.backward;
    if (slot != nullptr) {
      throw config_error("duplicate link from " + link.from_cam + " to " +
                         link.to_cam);
    }
    slot = &link;
  }

  ScenarioData data;

  // Built-in edge zones: id 1 is the western eighth, id 2 the eastern one.
  for (const CameraSpec& cam : config.cameras) {
    const double zw = cam.width / 8.0;
    Zone west;
    west.zone_id = 1;
    west.camera_id = cam.camera_id;
    west.polygon = {{0.0, 0.0}, {zw, 0.0}, {zw, cam.height}, {0.0, cam.height}};
    Zone east;
    east.zone_id = 2;
    east.camera_id = cam.camera_id;
    east.polygon = {{cam.width - zw, 0.0},
                    {cam.width, 0.0},
                    {cam.width, cam.height},
                    {cam.width - zw, cam.height}};
    data.zones[cam.camera_id] = {west, east};
  }

  for (int i = 0; i + 1 < n_cams; ++i) {
    if (edges[i].forward != nullptr) {
      CameraLink link = *edges[i].forward;
      link.zone_pairs = {{2, 1}};
      data.links.push_back(std::move(link));
    }
    if (edges[i].backward != nullptr) {
      CameraLink link = *edges[i].backward;
      link.zone_pairs = {{1, 2}};
      data.links.push_back(std::move(link));
    }
  }

  const std::vector<Eigen::VectorXd> centroids =
      build_centroids(config, groups, rng);
  data.centroids.reserve(n);
  for (const Eigen::VectorXd& c : centroids)
    data.centroids.push_back(c.cast<float>());

  // Travel plans. Y-twins copy their partner's dwell and gap draws so the
  // pair stays exactly confuser_stagger frames apart at every camera.
  std::vector<VehiclePlan> plans(n);
  for (int v = 0; v < n; ++v) {
    VehiclePlan& plan = plans[v];
    if (is_x_twin(v, groups)) {
      plan.eastbound = false;
    } else if (!is_confuser(v, groups) && config.alternate_directions) {
      plan.eastbound = (v % 2 == 0);
    }
    plan.route.resize(n_cams);
    for (int i = 0; i < n_cams; ++i)
      plan.route[i] = plan.eastbound ? i : n_cams - 1 - i;

    plan.lane_frac = rng.uniform(kLaneLow, kLaneHigh);
    plan.height = rng.uniform(kHeightLow, kHeightHigh);
    plan.aspect = rng.uniform(kAspectLow, kAspectHigh);

    if (is_y_twin(v, groups)) {
      plan.dwell = plans[v - 1].dwell;
      plan.gap = plans[v - 1].gap;
      plan.t0 = plans[v - 1].t0 + config.confuser_stagger;
      continue;
    }

    for (int i = 0; i < n_cams; ++i)
      plan.dwell.push_back(rng.uniform_int(config.dwell_min, config.dwell_max));
    for (int i = 0; i + 1 < n_cams; ++i) {
      const int from = plan.route[i];
      const int to = plan.route[i + 1];
      const EdgeLinks& e = edges[std::min(from, to)];
      const CameraLink* link = (to == from + 1) ? e.forward : e.backward;
      if (link == nullptr) {
        throw config_error("no transition link from " +
                           config.cameras[from].camera_id + " to " +
                           config.cameras[to].camera_id);
      }
      const GapRange r = gap_range(*link);
      plan.gap.push_back(rng.uniform_int(r.lo, r.hi));
    }

    std::int64_t length = 0;
    for (std::int64_t d : plan.dwell) length += d;
    for (std::int64_t g : plan.gap) length += g;

    std::int64_t lo = 0;
    std::int64_t hi = config.frames_per_camera - length;
    if (is_y_partner(v, groups)) {
      lo = std::max<std::int64_t>(0, -config.confuser_stagger);
      hi -= std::max<std::int64_t>(0, config.confuser_stagger);
    }
    if (hi < lo) {
      throw config_error("route of " + std::to_string(length) +
                         " frames does not fit in frames_per_camera " +
                         std::to_string(config.frames_per_camera));
    }
    plan.t0 = rng.uniform_int(lo, hi);
  }

  // Ground truth walk.
  std::vector<std::vector<GtBox>> boxes(n_cams);
  for (int v = 0; v < n; ++v) {
    const VehiclePlan& plan = plans[v];
    std::int64_t t = plan.t0;
    for (int i = 0; i < n_cams; ++i) {
      const int c = plan.route[i];
      const CameraSpec& cam = config.cameras[c];
      const double near_edge = cam.width / 16.0;
      const double x_enter = plan.eastbound ? near_edge : cam.width - near_edge;
      const double x_exit = plan.eastbound ? cam.width - near_edge : near_edge;
      const double y_bc = plan.lane_frac * cam.height;
      const double h = plan.height;
      const double w = plan.aspect * h;
      const std::int64_t dwell = plan.dwell[i];
      for (std::int64_t k = 0; k < dwell; ++k) {
        const double progress =
            dwell > 1 ? static_cast<double>(k) / static_cast<double>(dwell - 1)
                      : 0.5;
        const double x_bc = x_enter + (x_exit - x_enter) * progress;
        boxes[c].push_back(
            {t + k, v, BBox{x_bc - w / 2.0, y_bc - h, w, h}});
      }
      t += dwell;
      if (i + 1 < n_cams) t += plan.gap[i];
    }
  }

  for (int c = 0; c < n_cams; ++c) {
    std::sort(boxes[c].begin(), boxes[c].end(),
              [](const GtBox& a, const GtBox& b) {
                return std::tie(a.frame, a.vehicle) <
                       std::tie(b.frame, b.vehicle);
              });
    const std::string& cam_id = config.cameras[c].camera_id;
    for (const GtBox& box : boxes[c]) {
      data.ground_truth.push_back(
          {cam_id, box.vehicle + 1, box.frame, box.bbox, 1.0});
    }
  }
  std::sort(data.ground_truth.begin(), data.ground_truth.end(),
            [](const io::TrackRow& a, const io::TrackRow& b) {
              return std::tie(a.camera_id, a.id, a.frame) <
                     std::tie(b.camera_id, b.id, b.frame);
            });

  // Detector model: independent dropout, positional jitter, confidence
  // noise, embedding noise around the identity centroid.
  for (int c = 0; c < n_cams; ++c) {
    const std::string& cam_id = config.cameras[c].camera_id;
    std::vector<Detection>& dets = data.detections[cam_id];
    for (const GtBox& box : boxes[c]) {
      if (rng.next_double() < config.detection_dropout_rate) continue;
      Detection det;
      det.camera_id = cam_id;
      det.frame = box.frame;
      det.bbox = box.bbox;
      det.bbox.x += config.bbox_jitter_sigma * rng.gaussian();
      det.bbox.y += config.bbox_jitter_sigma * rng.gaussian();
      det.confidence =
          std::clamp(config.confidence_base +
                         config.confidence_noise * (2.0 * rng.next_double() - 1.0),
                     0.01, 1.0);
      Eigen::VectorXd e = centroids[box.vehicle];
      for (int d = 0; d < config.embedding_dim; ++d)
        e(d) += config.embedding_noise_sigma * rng.gaussian();
      Eigen::VectorXf ef = e.cast<float>();
      det.embedding = normalize_embedding(ef, "synthetic embedding");
      dets.push_back(std::move(det));
    }
    // Same order read_detections would produce, so in-memory use and a
    // write/read round trip see identical streams.
    std::stable_sort(dets.begin(), dets.end(),
                     [](const Detection& a, const Detection& b) {
                       return std::tie(a.frame, a.bbox.x, a.bbox.y, a.bbox.w,
                                       a.bbox.h, a.confidence) <
                              std::tie(b.frame, b.bbox.x, b.bbox.y, b.bbox.w,
                                       b.bbox.h, b.confidence);
                     });
  }

  return data;
}

}  // namespace

void validate_scenario_config(const ScenarioConfig& config) {
  if (config.cameras.empty()) throw config_error("no cameras configured");
  std::set<std::string> seen;
  for (const CameraSpec& cam : config.cameras) {
    if (!filename_safe(cam.camera_id)) {
      throw config_error("camera id '" + cam.camera_id +
                         "' must be non-empty [A-Za-z0-9_-]");
    }
    if (!seen.insert(cam.camera_id).second) {
      throw config_error("duplicate camera id " + cam.camera_id);
    }
    if (!(cam.width > 0.0) || !std::isfinite(cam.width) ||
        !(cam.height > 0.0) || !std::isfinite(cam.height)) {
      throw config_error("camera " + cam.camera_id +
                         ": width/height must be positive and finite");
    }
  }
  std::set<std::pair<std::string, std::string>> link_dirs;
  std::map<std::string, int> cam_index;
  for (std::size_t c = 0; c < config.cameras.size(); ++c)
    cam_index[config.cameras[c].camera_id] = static_cast<int>(c);
  for (const CameraLink& link : config.links) {
    validate_camera_link(link);
    const auto a = cam_index.find(link.from_cam);
    const auto b = cam_index.find(link.to_cam);
    if (a == cam_index.end() || b == cam_index.end()) {
      throw config_error("link " + link.from_cam + " -> " + link.to_cam +
                         " names an unknown camera");
    }
    if (std::abs(a->second - b->second) != 1) {
      throw config_error("link " + link.from_cam + " -> " + link.to_cam +
                         " must connect adjacent cameras");
    }
    if (!link_dirs.insert({link.from_cam, link.to_cam}).second) {
      throw config_error("duplicate link from " + link.from_cam + " to " +
                         link.to_cam);
    }
  }
  if (config.n_vehicles < 1) throw config_error("n_vehicles must be >= 1");
  if (config.embedding_dim < 2) throw config_error("embedding_dim must be >= 2");
  if (config.frames_per_camera < 1) {
    throw config_error("frames_per_camera must be >= 1");
  }
  if (config.dwell_min < 1 || config.dwell_min > config.dwell_max) {
    throw config_error("dwell bounds must satisfy 1 <= dwell_min <= dwell_max");
  }
  if (!(config.identity_separation >= 0.0) ||
      !(config.identity_separation <= kPi)) {
    throw config_error("identity_separation out of range [0, pi]");
  }
  if (!(config.cluster_spread >= 0.0) || !std::isfinite(config.cluster_spread)) {
    throw config_error("cluster_spread must be finite and >= 0");
  }
  if (config.confuser_groups < 0) {
    throw config_error("confuser_groups must be >= 0");
  }
  if (!(config.confuser_twin_offset >= 0.0) ||
      !(config.confuser_twin_offset <= kPi)) {
    throw config_error("confuser_twin_offset out of range [0, pi]");
  }
  if (!(config.embedding_noise_sigma >= 0.0) ||
      !std::isfinite(config.embedding_noise_sigma)) {
    throw config_error("embedding_noise_sigma must be finite and >= 0");
  }
  if (!(config.detection_dropout_rate >= 0.0) ||
      !(config.detection_dropout_rate < 1.0)) {
    throw config_error("detection_dropout_rate out of range [0, 1)");
  }
  if (!(config.bbox_jitter_sigma >= 0.0) ||
      !std::isfinite(config.bbox_jitter_sigma)) {
    throw config_error("bbox_jitter_sigma must be finite and >= 0");
  }
  if (!(config.confidence_base >= 0.0) || !(config.confidence_base <= 1.0)) {
    throw config_error("confidence_base out of range [0, 1]");
  }
  if (!(config.confidence_noise >= 0.0) ||
      !std::isfinite(config.confidence_noise)) {
    throw config_error("confidence_noise must be finite and >= 0");
  }
}

ScenarioData generate(const ScenarioConfig& config) {
  return run_generator(config, 0);
}

ScenarioData make_confuser_scenario(const ScenarioConfig& config) {
  return run_generator(config, config.confuser_groups);
}

namespace {

using nlohmann::json;

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

}  // namespace

ScenarioConfig read_scenario_config(const std::string& json_path) {
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
             {"cameras", "links", "n_vehicles", "embedding_dim",
              "identity_separation", "cluster_spread", "confuser_groups",
              "confuser_twin_offset", "confuser_stagger",
              "embedding_noise_sigma", "detection_dropout_rate",
              "bbox_jitter_sigma", "confidence_base", "confidence_noise",
              "frames_per_camera", "dwell_min", "dwell_max",
              "alternate_directions", "seed"},
             json_path);

  ScenarioConfig config;
  const json& cams = require(root, "cameras", json_path);
  if (!cams.is_array()) {
    throw config_error(json_path + ": 'cameras' must be an array");
  }
  for (const json& entry : cams) {
    const std::string ctx = json_path + ": camera entry";
    if (!entry.is_object()) throw config_error(ctx + " must be an object");
    check_keys(entry, {"camera_id", "width", "height"}, ctx);
    CameraSpec cam;
    cam.camera_id =
        as_string(require(entry, "camera_id", ctx), ctx + ".camera_id");
    if (entry.contains("width"))
      cam.width = as_number(entry["width"], ctx + ".width");
    if (entry.contains("height"))
      cam.height = as_number(entry["height"], ctx + ".height");
    config.cameras.push_back(std::move(cam));
  }
  if (root.contains("links")) {
    const json& links = root["links"];
    if (!links.is_array()) {
      throw config_error(json_path + ": 'links' must be an array");
    }
    for (const json& entry : links) {
      const std::string ctx = json_path + ": link entry";
      if (!entry.is_object()) throw config_error(ctx + " must be an object");
      check_keys(entry, {"from", "to", "t_min", "t_max"}, ctx);
      CameraLink link;
      link.from_cam = as_string(require(entry, "from", ctx), ctx + ".from");
      link.to_cam = as_string(require(entry, "to", ctx), ctx + ".to");
      link.t_min = as_integer(require(entry, "t_min", ctx), ctx + ".t_min");
      link.t_max = as_integer(require(entry, "t_max", ctx), ctx + ".t_max");
      config.links.push_back(std::move(link));
    }
  }

  const auto set_int = [&](const char* key, auto& field) {
    if (root.contains(key)) {
      field = static_cast<std::remove_reference_t<decltype(field)>>(
          as_integer(root[key], json_path + std::string(".") + key));
    }
  };
  const auto set_num = [&](const char* key, double& field) {
    if (root.contains(key))
      field = as_number(root[key], json_path + std::string(".") + key);
  };
  set_int("n_vehicles", config.n_vehicles);
  set_int("embedding_dim", config.embedding_dim);
  set_num("identity_separation", config.identity_separation);
  set_num("cluster_spread", config.cluster_spread);
  set_int("confuser_groups", config.confuser_groups);
  set_num("confuser_twin_offset", config.confuser_twin_offset);
  set_int("confuser_stagger", config.confuser_stagger);
  set_num("embedding_noise_sigma", config.embedding_noise_sigma);
  set_num("detection_dropout_rate", config.detection_dropout_rate);
  set_num("bbox_jitter_sigma", config.bbox_jitter_sigma);
  set_num("confidence_base", config.confidence_base);
  set_num("confidence_noise", config.confidence_noise);
  set_int("frames_per_camera", config.frames_per_camera);
  set_int("dwell_min", config.dwell_min);
  set_int("dwell_max", config.dwell_max);
  if (root.contains("alternate_directions")) {
    config.alternate_directions = as_boolean(
        root["alternate_directions"], json_path + ".alternate_directions");
  }
  if (root.contains("seed")) {
    const std::int64_t seed = as_integer(root["seed"], json_path + ".seed");
    if (seed < 0) throw config_error(json_path + ".seed must be >= 0");
    config.seed = static_cast<std::uint64_t>(seed);
  }

  validate_scenario_config(config);
  return config;
}

void write_scenario(const ScenarioData& data, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw data_error(out_dir + ": cannot create directory (" + ec.message() +
                     ")");
  }
  const fs::path root(out_dir);
  io::write_tracks((root / "gt.csv").string(), data.ground_truth);
  io::write_zones((root / "zones.json").string(), data.zones);
  io::write_links((root / "links.json").string(), data.links);
  for (const auto& [cam_id, dets] : data.detections) {
    io::write_detections((root / ("det_" + cam_id + ".csv")).string(),
                         (root / ("det_" + cam_id + ".emb")).string(), dets);
  }
}

}  // namespace mtmc::synth
