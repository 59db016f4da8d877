#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mtmc/geometry.hpp"

namespace mtmc {

using geom::BBox;

// One bounding box observation in one camera frame. Embeddings are
// renormalized to unit L2 at ingestion so cosine similarity equals the
// dot product everywhere downstream.
struct Detection {
  std::string camera_id;
  std::int64_t frame = 0;  // global synchronized clock
  BBox bbox;
  double confidence = 0.0;
  Eigen::VectorXf embedding;
};

// 8-dim constant-velocity state: (cx, cy, aspect, height) and velocities.
struct KalmanState {
  Eigen::Matrix<double, 8, 1> mean = Eigen::Matrix<double, 8, 1>::Zero();
  Eigen::Matrix<double, 8, 8> covariance = Eigen::Matrix<double, 8, 8>::Zero();
};

struct Observation {
  std::int64_t frame = 0;
  BBox bbox;
  double confidence = 0.0;
};

enum class TrackStatus { tentative, active, lost, finished };

// In-progress single-camera track.
struct Tracklet {
  std::int64_t track_id = 0;  // positive, unique within camera
  std::string camera_id;
  std::vector<Observation> observations;  // strictly increasing frames
  Eigen::VectorXf smoothed_feature;       // unit-norm EMA of embeddings
  KalmanState kalman;
  TrackStatus status = TrackStatus::tentative;
  int frames_since_update = 0;

  // bookkeeping
  int consecutive_hits = 0;
  Eigen::VectorXd feature_sum;  // running sum of matched raw embeddings

  BBox predicted_bbox() const {
    const double h = kalman.mean(3);
    const double w = kalman.mean(2) * h;
    return {kalman.mean(0) - w / 2.0, kalman.mean(1) - h / 2.0, w, h};
  }
};

// Finalized single-camera track; the unit of cross-camera association.
struct Trajectory {
  std::int64_t track_id = 0;
  std::string camera_id;
  std::vector<Observation> observations;
  Eigen::VectorXf feature;  // renormalized mean of constituent embeddings
  std::optional<int> entry_zone;
  std::optional<int> exit_zone;
  std::int64_t t_start = 0;
  std::int64_t t_end = 0;
};

// Labeled image polygon used for direction classification.
struct Zone {
  int zone_id = 0;
  std::string camera_id;
  std::vector<geom::Point> polygon;  // simple, >= 3 vertices
};

// Directed camera pair with its own transition window; the reverse
// direction is a distinct record.
struct CameraLink {
  std::string from_cam;
  std::string to_cam;
  std::int64_t t_min = 0;
  std::int64_t t_max = 0;
  std::set<std::pair<int, int>> zone_pairs;  // (exit in from, entry in to)
};

// Equivalence class of per-camera trajectories sharing one identity.
struct GlobalTrack {
  std::int64_t global_id = 0;
  std::vector<std::pair<std::string, std::int64_t>> members;  // sorted
};

// Frame-level counts under the optimal identity assignment.
struct IdCounts {
  std::int64_t idtp = 0;
  std::int64_t idfp = 0;
  std::int64_t idfn = 0;
};

struct TripletSample {
  Eigen::VectorXd anchor;
  Eigen::VectorXd positive;
  Eigen::VectorXd negative;
  double margin = 0.0;
};

struct ClassificationSample {
  std::vector<double> probabilities;  // sums to 1 within 1e-6
  int label = 0;                      // index into probabilities
};

// Validation passes. Each throws data_error naming the offending field.
void validate_detection(const Detection& det);
void validate_zone(const Zone& zone);
void validate_camera_link(const CameraLink& link);
void validate_triplet_sample(const TripletSample& sample);
void validate_classification_sample(const ClassificationSample& sample);

// Renormalizes to unit L2. Throws data_error on non-finite or zero-norm
// input.
Eigen::VectorXf normalize_embedding(const Eigen::VectorXf& v,
                                    const std::string& context);

}  // namespace mtmc
