#pragma once

#include <vector>

#include "mtmc/types.hpp"

namespace mtmc::sct {

// Tracker thresholds. Association runs as a two-stage confidence cascade:
// high-confidence detections are matched first on blended appearance +
// IoU cost, the leftovers and low-confidence detections then match on IoU
// alone.
struct SctConfig {
  double detection_score_threshold = 0.1;  // below this a detection is ignored
  double high_conf_threshold = 0.6;        // cascade stage split
  double association_threshold = 0.45;     // stage-1 combined-cost acceptance
  double ema_momentum = 0.9;               // feature smoothing weight
  int max_frames_lost = 30;      // retire after this many consecutive misses
  int tentative_confirm_frames = 3;  // consecutive hits before confirmation
  double iou_gate = 0.3;             // hard overlap gate, both stages
  double appearance_weight = 0.7;    // lambda blending appearance vs IoU
};

// Throws config_error naming any field out of range.
void validate_sct_config(const SctConfig& config);

// normalize(momentum * smoothed + (1 - momentum) * fresh). Both inputs
// unit-norm. Throws data_error when the blend cancels to zero norm.
Eigen::VectorXf ema_update(const Eigen::VectorXf& smoothed,
                           const Eigen::VectorXf& fresh, double momentum);

struct Match {
  int track = 0;      // index into the tracks argument
  int detection = 0;  // index into the detections argument
};

struct CascadeResult {
  std::vector<Match> stage1;
  std::vector<Match> stage2;
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

// Two-stage association for one frame. Detections below
// detection_score_threshold are dropped entirely and appear in no output
// set. Stage 1 matches every track against high-confidence detections on
// cost lambda * cosine_distance(track feature, embedding) +
// (1 - lambda) * (1 - IoU(predicted box, box)); a pair is feasible only
// when the cost is within association_threshold and IoU reaches iou_gate.
// Stage 2 matches the remaining tracks against low-confidence plus
// stage-1-unmatched detections on IoU alone. Each stage picks the
// maximum-cardinality feasible matching of minimum total cost; equal-cost
// ties resolve toward the lowest (track index, detection index).
CascadeResult associate_cascade(const std::vector<Tracklet>& tracks,
                                const std::vector<Detection>& detections,
                                const SctConfig& config);

// Runs the full per-camera lifecycle over a detection stream: predict,
// cascade-associate, Kalman + EMA update on matches, age the unmatched,
// spawn tentative tracklets from leftover detections. A tentative track
// dies on its first miss; a confirmed track is retired after missing more
// than max_frames_lost consecutive frames. Every frame between the first
// and last detection is processed, so tracks age across empty frames.
// Returns confirmed trajectories ordered by track id; observations keep
// the raw detection boxes and the feature is the renormalized mean of the
// matched embeddings.
std::vector<Trajectory> track_camera(const std::vector<Detection>& detections,
                                     const SctConfig& config);

}  // namespace mtmc::sct
