#include "mtmc/sct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "mtmc/assignment.hpp"
#include "mtmc/errors.hpp"
#include "mtmc/kalman.hpp"

namespace mtmc::sct {

namespace {

// Large enough to dominate any sum of feasible costs (each <= 2), small
// enough that mixed sums keep ~1e-10 absolute precision, so equal-cost
// detection in the solver stays exact for realistic cost gaps.
constexpr double kForbidden = 1e6;

void check_unit_range(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw config_error(std::string(name) + " out of range [0,1]");
  }
}

double cosine_distance(const Eigen::VectorXf& a, const Eigen::VectorXf& b) {
  if (a.size() != b.size()) {
    throw data_error("embedding dimension mismatch between track and detection");
  }
  return 1.0 - a.cast<double>().dot(b.cast<double>());
}

struct StageOutcome {
  std::vector<Match> matches;
  std::vector<int> leftover_tracks;
  std::vector<int> leftover_detections;
};

// Maximum-cardinality feasible matching of minimum cost: infeasible pairs
// carry kForbidden, so the min-cost solve first minimizes how many
// forbidden cells are used, then the feasible total.
StageOutcome solve_stage(const std::vector<int>& track_idx,
                         const std::vector<int>& det_idx,
                         const std::vector<std::vector<double>>& cost,
                         const std::vector<std::vector<char>>& feasible) {
  StageOutcome out;
  if (track_idx.empty() || det_idx.empty()) {
    out.leftover_tracks = track_idx;
    out.leftover_detections = det_idx;
    return out;
  }
  assign::CostMatrix m(track_idx.size(), det_idx.size());
  for (std::size_t r = 0; r < track_idx.size(); ++r) {
    for (std::size_t c = 0; c < det_idx.size(); ++c) {
      m.at(r, c) = feasible[r][c] ? cost[r][c] : kForbidden;
    }
  }
  const std::vector<int> row_to_col = assign::solve_min_cost(m);
  std::vector<char> det_taken(det_idx.size(), 0);
  for (std::size_t r = 0; r < track_idx.size(); ++r) {
    const int c = row_to_col[r];
    if (c >= 0 && feasible[r][static_cast<std::size_t>(c)]) {
      out.matches.push_back({track_idx[r], det_idx[static_cast<std::size_t>(c)]});
      det_taken[static_cast<std::size_t>(c)] = 1;
    } else {
      out.leftover_tracks.push_back(track_idx[r]);
    }
  }
  for (std::size_t c = 0; c < det_idx.size(); ++c) {
    if (!det_taken[c]) out.leftover_detections.push_back(det_idx[c]);
  }
  return out;
}

}  // namespace

void validate_sct_config(const SctConfig& config) {
  check_unit_range(config.detection_score_threshold,
                   "detection_score_threshold");
  check_unit_range(config.high_conf_threshold, "high_conf_threshold");
  check_unit_range(config.association_threshold, "association_threshold");
  check_unit_range(config.ema_momentum, "ema_momentum");
  check_unit_range(config.iou_gate, "iou_gate");
  check_unit_range(config.appearance_weight, "appearance_weight");
  if (config.max_frames_lost < 1) {
    throw config_error("max_frames_lost out of range (must be >= 1)");
  }
  if (config.tentative_confirm_frames < 1) {
    throw config_error("tentative_confirm_frames out of range (must be >= 1)");
  }
}

Eigen::VectorXf ema_update(const Eigen::VectorXf& smoothed,
                           const Eigen::VectorXf& fresh, double momentum) {
  if (!(momentum >= 0.0 && momentum <= 1.0)) {
    throw config_error("ema_momentum out of range [0,1]");
  }
  if (smoothed.size() != fresh.size()) {
    throw data_error("ema update: embedding dimension mismatch");
  }
  const Eigen::VectorXf blended =
      (momentum * smoothed.cast<double>() +
       (1.0 - momentum) * fresh.cast<double>())
          .cast<float>();
  return normalize_embedding(blended, "ema update");
}

CascadeResult associate_cascade(const std::vector<Tracklet>& tracks,
                                const std::vector<Detection>& detections,
                                const SctConfig& config) {
  validate_sct_config(config);

  std::vector<int> high, low;
  for (std::size_t d = 0; d < detections.size(); ++d) {
    const double conf = detections[d].confidence;
    if (conf < config.detection_score_threshold) continue;
    if (conf >= config.high_conf_threshold) {
      high.push_back(static_cast<int>(d));
    } else {
      low.push_back(static_cast<int>(d));
    }
  }

  std::vector<int> all_tracks(tracks.size());
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    all_tracks[t] = static_cast<int>(t);
  }

  const double lambda = config.appearance_weight;
  std::vector<std::vector<double>> cost1(all_tracks.size(),
                                         std::vector<double>(high.size()));
  std::vector<std::vector<char>> feas1(all_tracks.size(),
                                       std::vector<char>(high.size()));
  for (std::size_t r = 0; r < all_tracks.size(); ++r) {
    const Tracklet& track = tracks[static_cast<std::size_t>(all_tracks[r])];
    const BBox predicted = track.predicted_bbox();
    for (std::size_t c = 0; c < high.size(); ++c) {
      const Detection& det = detections[static_cast<std::size_t>(high[c])];
      const double overlap = geom::iou(predicted, det.bbox);
      const double combined =
          lambda * cosine_distance(track.smoothed_feature, det.embedding) +
          (1.0 - lambda) * (1.0 - overlap);
      cost1[r][c] = combined;
      feas1[r][c] = combined <= config.association_threshold &&
                    overlap >= config.iou_gate;
    }
  }
  const StageOutcome s1 = solve_stage(all_tracks, high, cost1, feas1);

  // Stage 2 candidates: low-confidence plus whatever stage 1 left on the
  // table, in detection order.
  std::vector<int> pool = low;
  pool.insert(pool.end(), s1.leftover_detections.begin(),
              s1.leftover_detections.end());
  std::sort(pool.begin(), pool.end());

  std::vector<std::vector<double>> cost2(s1.leftover_tracks.size(),
                                         std::vector<double>(pool.size()));
  std::vector<std::vector<char>> feas2(s1.leftover_tracks.size(),
                                       std::vector<char>(pool.size()));
  for (std::size_t r = 0; r < s1.leftover_tracks.size(); ++r) {
    const Tracklet& track =
        tracks[static_cast<std::size_t>(s1.leftover_tracks[r])];
    const BBox predicted = track.predicted_bbox();
    for (std::size_t c = 0; c < pool.size(); ++c) {
      const Detection& det = detections[static_cast<std::size_t>(pool[c])];
      const double overlap = geom::iou(predicted, det.bbox);
      cost2[r][c] = 1.0 - overlap;
      feas2[r][c] = overlap >= config.iou_gate;
    }
  }
  const StageOutcome s2 = solve_stage(s1.leftover_tracks, pool, cost2, feas2);

  CascadeResult result;
  result.stage1 = s1.matches;
  result.stage2 = s2.matches;
  result.unmatched_tracks = s2.leftover_tracks;
  result.unmatched_detections = s2.leftover_detections;
  std::sort(result.unmatched_tracks.begin(), result.unmatched_tracks.end());
  std::sort(result.unmatched_detections.begin(),
            result.unmatched_detections.end());
  return result;
}

std::vector<Trajectory> track_camera(const std::vector<Detection>& detections,
                                     const SctConfig& config) {
  validate_sct_config(config);
  if (detections.empty()) return {};

  const std::string camera_id = detections.front().camera_id;
  for (const Detection& d : detections) {
    if (d.camera_id != camera_id) {
      throw data_error("track_camera: detections span multiple cameras");
    }
  }

  // Group by frame, keeping input order inside a frame.
  std::map<std::int64_t, std::vector<Detection>> by_frame;
  for (const Detection& d : detections) by_frame[d.frame].push_back(d);
  const std::int64_t first_frame = by_frame.begin()->first;
  const std::int64_t last_frame = by_frame.rbegin()->first;

  std::vector<Tracklet> live;
  std::vector<Tracklet> done;
  std::int64_t next_track_id = 1;
  const std::vector<Detection> empty_frame;

  const auto record_hit = [&](Tracklet& track, std::int64_t frame,
                              const Detection& det) {
    track.kalman = KalmanFilter::update(track.kalman, det.bbox);
    track.observations.push_back({frame, det.bbox, det.confidence});
    track.smoothed_feature =
        ema_update(track.smoothed_feature, det.embedding, config.ema_momentum);
    track.feature_sum += det.embedding.cast<double>();
    track.frames_since_update = 0;
    track.consecutive_hits += 1;
    if (track.status == TrackStatus::tentative &&
        track.consecutive_hits >= config.tentative_confirm_frames) {
      track.status = TrackStatus::active;
    } else if (track.status == TrackStatus::lost) {
      track.status = TrackStatus::active;
    }
  };

  for (std::int64_t frame = first_frame; frame <= last_frame; ++frame) {
    for (Tracklet& track : live) {
      track.kalman = KalmanFilter::predict(track.kalman);
    }
    const auto it = by_frame.find(frame);
    const std::vector<Detection>& frame_dets =
        it == by_frame.end() ? empty_frame : it->second;

    const CascadeResult cascade = associate_cascade(live, frame_dets, config);
    for (const Match& m : cascade.stage1) {
      record_hit(live[static_cast<std::size_t>(m.track)], frame,
                 frame_dets[static_cast<std::size_t>(m.detection)]);
    }
    for (const Match& m : cascade.stage2) {
      record_hit(live[static_cast<std::size_t>(m.track)], frame,
                 frame_dets[static_cast<std::size_t>(m.detection)]);
    }

    std::vector<char> drop(live.size(), 0);
    for (int t : cascade.unmatched_tracks) {
      Tracklet& track = live[static_cast<std::size_t>(t)];
      track.consecutive_hits = 0;
      track.frames_since_update += 1;
      if (track.status == TrackStatus::tentative) {
        drop[static_cast<std::size_t>(t)] = 1;  // never confirmed: discard
      } else {
        track.status = TrackStatus::lost;
        if (track.frames_since_update > config.max_frames_lost) {
          track.status = TrackStatus::finished;
          done.push_back(std::move(track));
          drop[static_cast<std::size_t>(t)] = 1;
        }
      }
    }

    std::vector<Tracklet> survivors;
    survivors.reserve(live.size());
    for (std::size_t t = 0; t < live.size(); ++t) {
      if (!drop[t]) survivors.push_back(std::move(live[t]));
    }
    live = std::move(survivors);

    for (int d : cascade.unmatched_detections) {
      const Detection& det = frame_dets[static_cast<std::size_t>(d)];
      Tracklet track;
      track.track_id = next_track_id++;
      track.camera_id = camera_id;
      track.kalman = KalmanFilter::init(det.bbox);
      track.observations.push_back({frame, det.bbox, det.confidence});
      track.smoothed_feature = det.embedding;
      track.feature_sum = det.embedding.cast<double>();
      track.status = config.tentative_confirm_frames <= 1
                         ? TrackStatus::active
                         : TrackStatus::tentative;
      track.consecutive_hits = 1;
      live.push_back(std::move(track));
    }
  }

  for (Tracklet& track : live) {
    if (track.status == TrackStatus::tentative) continue;  // unconfirmed
    track.status = TrackStatus::finished;
    done.push_back(std::move(track));
  }

  std::sort(done.begin(), done.end(),
            [](const Tracklet& a, const Tracklet& b) {
              return a.track_id < b.track_id;
            });

  std::vector<Trajectory> out;
  out.reserve(done.size());
  for (Tracklet& track : done) {
    Trajectory traj;
    traj.track_id = track.track_id;
    traj.camera_id = track.camera_id;
    traj.t_start = track.observations.front().frame;
    traj.t_end = track.observations.back().frame;
    const Eigen::VectorXd mean =
        track.feature_sum /
        static_cast<double>(track.observations.size());
    const double norm = mean.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw data_error("track_camera: degenerate pooled feature for track " +
                       std::to_string(track.track_id));
    }
    traj.feature = (mean / norm).cast<float>();
    traj.observations = std::move(track.observations);
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace mtmc::sct
