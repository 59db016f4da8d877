#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtmc/assignment.hpp"
#include "mtmc/types.hpp"

namespace mtmc::clm {

// Cross-camera association settings. The three enable flags exist for
// ablation: with enable_btt off, every link uses the union of its own and
// its reverse link's window for both directions instead of
// direction-specific windows.
struct ClmConfig {
  double cross_camera_distance_threshold = 0.45;  // cosine distance
  int min_traj_len = 2;     // observation-count filter, inclusive
  int max_traj_len = 2000;  // observation-count filter, inclusive
  bool enable_temporal_mask = true;
  bool enable_direction_mask = true;
  bool enable_btt = true;
};

// Throws config_error naming any field out of range.
void validate_clm_config(const ClmConfig& config);

// (entry, exit) zone ids for the trajectory: the zone containing the
// earliest / latest observation whose bbox bottom-center lies inside any
// zone. Absent when no observation touches a zone. When several zones
// contain a point the smallest zone id wins.
std::pair<std::optional<int>, std::optional<int>> classify_direction(
    const Trajectory& traj, const std::vector<Zone>& zones);

// 1 iff t_exit_source + link.t_min < t_appear_dest < t_exit_source +
// link.t_max; strict on both ends.
int temporal_mask(std::int64_t t_exit_source, std::int64_t t_appear_dest,
                  const CameraLink& link);

// 1 iff (source exit zone, dest entry zone) is a compatible pair of the
// link. An absent zone on either side never vetoes (returns 1): missing
// evidence is not a direction conflict.
int direction_mask(const Trajectory& source, const Trajectory& dest,
                   const CameraLink& link);

// Masked similarity in [0,1]: cosine similarity of the trajectory
// features mapped to [0,1] via (1 + cos)/2, times the temporal and
// direction masks. Disabled masks count as 1. `source` must live in
// link.from_cam, `dest` in link.to_cam.
double pair_similarity(const Trajectory& source, const Trajectory& dest,
                       const CameraLink& link, const ClmConfig& config);

// Assignment maximizing total similarity; rows/columns used at most once,
// the smaller dimension fully assigned. Pairs ascending by row.
std::vector<std::pair<int, int>> hungarian_max(
    const assign::CostMatrix& values);

bool passes_length_filter(const Trajectory& traj, const ClmConfig& config);

// Matches one directed link: builds the masked similarity matrix, runs
// hungarian_max, then drops pairs whose masked similarity is 0 or whose
// raw cosine distance exceeds the threshold. Inputs must already be
// length-filtered and zone-annotated. Returns (from track_id, to
// track_id) pairs in row order.
std::vector<std::pair<std::int64_t, std::int64_t>> link_camera_pair(
    const std::vector<Trajectory>& trajs_from,
    const std::vector<Trajectory>& trajs_to, const CameraLink& link,
    const ClmConfig& config);

// The link windows actually used for matching. With enable_btt they pass
// through untouched; without it each link's window widens to the union
// with its reverse link (when present), making both directions share one
// symmetric window.
std::vector<CameraLink> effective_links(const std::vector<CameraLink>& links,
                                        bool enable_btt);

using TrackKey = std::pair<std::string, std::int64_t>;  // (camera, track id)

// Connected components over the match graph. Every trajectory lands in
// exactly one GlobalTrack; ids are dense from 1, components ordered by
// their minimum (t_start, camera_id, track_id). Throws data_error when a
// component would hold two trajectories of one camera (inconsistent
// matches) or when a match references an unknown trajectory.
std::vector<GlobalTrack> assign_global_ids(
    const std::vector<std::pair<TrackKey, TrackKey>>& matches,
    const std::vector<Trajectory>& trajectories);

struct LinkOutcome {
  // Zone-annotated survivors of the length filter, ordered by
  // (camera_id, track_id).
  std::vector<Trajectory> trajectories;
  std::vector<GlobalTrack> global_tracks;
};

// Full cross-camera stage: annotate directions, length-filter, match
// every configured link in lexicographic (from, to) order, then assign
// global ids over the union of matches.
LinkOutcome link_cameras(
    const std::map<std::string, std::vector<Trajectory>>& per_camera,
    const std::map<std::string, std::vector<Zone>>& zones,
    const std::vector<CameraLink>& links, const ClmConfig& config);

}  // namespace mtmc::clm
