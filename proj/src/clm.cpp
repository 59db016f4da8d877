#include "mtmc/clm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "mtmc/errors.hpp"
#include "mtmc/geometry.hpp"

namespace mtmc::clm {

namespace {

double raw_cosine(const Eigen::VectorXf& a, const Eigen::VectorXf& b) {
  if (a.size() != b.size()) {
    throw data_error("trajectory feature dimension mismatch");
  }
  return std::clamp(a.cast<double>().dot(b.cast<double>()), -1.0, 1.0);
}

// Union-find with path halving.
struct DisjointSet {
  std::vector<int> parent;

  explicit DisjointSet(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace

void validate_clm_config(const ClmConfig& config) {
  if (!(config.cross_camera_distance_threshold >= 0.0 &&
        config.cross_camera_distance_threshold <= 2.0)) {
    throw config_error("cross_camera_distance_threshold out of range [0,2]");
  }
  if (config.min_traj_len < 1) {
    throw config_error("min_traj_len out of range (must be >= 1)");
  }
  if (config.min_traj_len > config.max_traj_len) {
    throw config_error("min_traj_len greater than max_traj_len");
  }
}

std::pair<std::optional<int>, std::optional<int>> classify_direction(
    const Trajectory& traj, const std::vector<Zone>& zones) {
  std::vector<const Zone*> ordered;
  ordered.reserve(zones.size());
  for (const Zone& z : zones) ordered.push_back(&z);
  std::sort(ordered.begin(), ordered.end(),
            [](const Zone* a, const Zone* b) { return a->zone_id < b->zone_id; });

  const auto zone_at = [&](const Observation& obs) -> std::optional<int> {
    const geom::Point p = obs.bbox.bottom_center();
    for (const Zone* z : ordered) {
      if (geom::point_in_polygon(p, z->polygon)) return z->zone_id;
    }
    return std::nullopt;
  };

  std::optional<int> entry, exit;
  for (const Observation& obs : traj.observations) {
    const std::optional<int> z = zone_at(obs);
    if (!z) continue;
    if (!entry) entry = z;
    exit = z;
  }
  return {entry, exit};
}

int temporal_mask(std::int64_t t_exit_source, std::int64_t t_appear_dest,
                  const CameraLink& link) {
  return (t_exit_source + link.t_min < t_appear_dest &&
          t_appear_dest < t_exit_source + link.t_max)
             ? 1
             : 0;
}

int direction_mask(const Trajectory& source, const Trajectory& dest,
                   const CameraLink& link) {
  if (!source.exit_zone || !dest.entry_zone) return 1;
  return link.zone_pairs.count({*source.exit_zone, *dest.entry_zone}) ? 1 : 0;
}

double pair_similarity(const Trajectory& source, const Trajectory& dest,
                       const CameraLink& link, const ClmConfig& config) {
  double s = (1.0 + raw_cosine(source.feature, dest.feature)) / 2.0;
  if (config.enable_temporal_mask) {
    s *= temporal_mask(source.t_end, dest.t_start, link);
  }
  if (config.enable_direction_mask) {
    s *= direction_mask(source, dest, link);
  }
  return s;
}

std::vector<std::pair<int, int>> hungarian_max(
    const assign::CostMatrix& values) {
  return assign::assignment_pairs(assign::solve_max_value(values));
}

bool passes_length_filter(const Trajectory& traj, const ClmConfig& config) {
  const std::size_t len = traj.observations.size();
  return len >= static_cast<std::size_t>(config.min_traj_len) &&
         len <= static_cast<std::size_t>(config.max_traj_len);
}

std::vector<std::pair<std::int64_t, std::int64_t>> link_camera_pair(
    const std::vector<Trajectory>& trajs_from,
    const std::vector<Trajectory>& trajs_to, const CameraLink& link,
    const ClmConfig& config) {
  validate_clm_config(config);
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  if (trajs_from.empty() || trajs_to.empty()) return out;

  assign::CostMatrix sim(trajs_from.size(), trajs_to.size());
  for (std::size_t i = 0; i < trajs_from.size(); ++i) {
    for (std::size_t j = 0; j < trajs_to.size(); ++j) {
      sim.at(i, j) = pair_similarity(trajs_from[i], trajs_to[j], link, config);
    }
  }

  for (const auto& [i, j] : hungarian_max(sim)) {
    if (sim.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) ==
        0.0) {
      continue;  // masked out or fully dissimilar
    }
    const double distance =
        1.0 - raw_cosine(trajs_from[static_cast<std::size_t>(i)].feature,
                         trajs_to[static_cast<std::size_t>(j)].feature);
    if (distance > config.cross_camera_distance_threshold) continue;
    out.emplace_back(trajs_from[static_cast<std::size_t>(i)].track_id,
                     trajs_to[static_cast<std::size_t>(j)].track_id);
  }
  return out;
}

std::vector<CameraLink> effective_links(const std::vector<CameraLink>& links,
                                        bool enable_btt) {
  if (enable_btt) return links;
  std::vector<CameraLink> out = links;
  for (CameraLink& link : out) {
    for (const CameraLink& rev : links) {
      if (rev.from_cam == link.to_cam && rev.to_cam == link.from_cam) {
        link.t_min = std::min(link.t_min, rev.t_min);
        link.t_max = std::max(link.t_max, rev.t_max);
        break;
      }
    }
  }
  return out;
}

std::vector<GlobalTrack> assign_global_ids(
    const std::vector<std::pair<TrackKey, TrackKey>>& matches,
    const std::vector<Trajectory>& trajectories) {
  std::map<TrackKey, int> index_of;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const TrackKey key{trajectories[i].camera_id, trajectories[i].track_id};
    if (!index_of.emplace(key, static_cast<int>(i)).second) {
      throw data_error("assign_global_ids: duplicate trajectory " +
                       key.first + "/" + std::to_string(key.second));
    }
  }

  DisjointSet ds(trajectories.size());
  for (const auto& [a, b] : matches) {
    const auto ia = index_of.find(a);
    const auto ib = index_of.find(b);
    if (ia == index_of.end() || ib == index_of.end()) {
      const TrackKey& missing = ia == index_of.end() ? a : b;
      throw data_error("assign_global_ids: match references unknown " +
                       missing.first + "/" + std::to_string(missing.second));
    }
    ds.unite(ia->second, ib->second);
  }

  std::map<int, std::vector<int>> components;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    components[ds.find(static_cast<int>(i))].push_back(static_cast<int>(i));
  }

  // Deterministic numbering: components ordered by the minimum
  // (t_start, camera_id, track_id) over their members.
  using OrderKey = std::tuple<std::int64_t, std::string, std::int64_t>;
  std::vector<std::pair<OrderKey, const std::vector<int>*>> ordered;
  ordered.reserve(components.size());
  for (const auto& [root, members] : components) {
    OrderKey best{std::numeric_limits<std::int64_t>::max(), "", 0};
    for (int i : members) {
      const Trajectory& t = trajectories[static_cast<std::size_t>(i)];
      best = std::min(best, OrderKey{t.t_start, t.camera_id, t.track_id});
    }
    ordered.emplace_back(std::move(best), &members);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<GlobalTrack> out;
  out.reserve(ordered.size());
  std::int64_t next_id = 1;
  for (const auto& [key, members] : ordered) {
    GlobalTrack gt;
    gt.global_id = next_id++;
    std::set<std::string> cameras;
    for (int i : *members) {
      const Trajectory& t = trajectories[static_cast<std::size_t>(i)];
      if (!cameras.insert(t.camera_id).second) {
        throw data_error(
            "assign_global_ids: component holds two trajectories from "
            "camera " +
            t.camera_id);
      }
      gt.members.emplace_back(t.camera_id, t.track_id);
    }
    std::sort(gt.members.begin(), gt.members.end());
    out.push_back(std::move(gt));
  }
  return out;
}

LinkOutcome link_cameras(
    const std::map<std::string, std::vector<Trajectory>>& per_camera,
    const std::map<std::string, std::vector<Zone>>& zones,
    const std::vector<CameraLink>& links, const ClmConfig& config) {
  validate_clm_config(config);
  static const std::vector<Zone> no_zones;

  LinkOutcome outcome;
  std::map<std::string, std::vector<Trajectory>> filtered;
  for (const auto& [camera_id, trajs] : per_camera) {
    const auto zit = zones.find(camera_id);
    const std::vector<Zone>& cam_zones =
        zit == zones.end() ? no_zones : zit->second;
    std::vector<Trajectory> keep;
    for (const Trajectory& traj : trajs) {
      if (!passes_length_filter(traj, config)) continue;
      Trajectory annotated = traj;
      std::tie(annotated.entry_zone, annotated.exit_zone) =
          classify_direction(annotated, cam_zones);
      keep.push_back(std::move(annotated));
    }
    std::sort(keep.begin(), keep.end(),
              [](const Trajectory& a, const Trajectory& b) {
                return a.track_id < b.track_id;
              });
    filtered.emplace(camera_id, std::move(keep));
  }

  std::vector<CameraLink> active = effective_links(links, config.enable_btt);
  std::sort(active.begin(), active.end(),
            [](const CameraLink& a, const CameraLink& b) {
              return std::tie(a.from_cam, a.to_cam) <
                     std::tie(b.from_cam, b.to_cam);
            });

  std::vector<std::pair<TrackKey, TrackKey>> matches;
  for (const CameraLink& link : active) {
    const auto fit = filtered.find(link.from_cam);
    const auto tit = filtered.find(link.to_cam);
    if (fit == filtered.end() || tit == filtered.end()) continue;
    for (const auto& [from_id, to_id] :
         link_camera_pair(fit->second, tit->second, link, config)) {
      matches.push_back(
          {{link.from_cam, from_id}, {link.to_cam, to_id}});
    }
  }

  for (auto& [camera_id, trajs] : filtered) {
    for (Trajectory& t : trajs) outcome.trajectories.push_back(std::move(t));
  }
  std::sort(outcome.trajectories.begin(), outcome.trajectories.end(),
            [](const Trajectory& a, const Trajectory& b) {
              return std::tie(a.camera_id, a.track_id) <
                     std::tie(b.camera_id, b.track_id);
            });

  outcome.global_tracks = assign_global_ids(matches, outcome.trajectories);
  return outcome;
}

}  // namespace mtmc::clm
