#include "mtmc/types.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "mtmc/errors.hpp"

namespace mtmc {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

Eigen::VectorXf normalize_embedding(const Eigen::VectorXf& v,
                                    const std::string& context) {
  if (v.size() == 0) throw data_error(context + ": embedding is empty");
  double sq = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double x = v(i);
    if (!finite(x)) throw data_error(context + ": non-finite embedding value");
    sq += x * x;
  }
  const double norm = std::sqrt(sq);
  if (norm <= 0.0) throw data_error(context + ": zero-norm embedding");
  // Already-unit vectors pass through unchanged, which makes ingestion
  // idempotent: re-reading a written artifact is bit-exact. One
  // normalization pass lands within ~1e-7 of unit, well inside this gate.
  if (std::abs(norm - 1.0) <= 1e-6) return v;
  return (v.cast<double>() / norm).cast<float>();
}

void validate_detection(const Detection& det) {
  if (det.camera_id.empty()) throw data_error("detection: empty camera_id");
  if (det.frame < 0) throw data_error("detection: negative frame");
  if (!finite(det.bbox.x) || !finite(det.bbox.y) || !finite(det.bbox.w) ||
      !finite(det.bbox.h)) {
    throw data_error("detection: non-finite bbox");
  }
  if (det.bbox.w <= 0.0 || det.bbox.h <= 0.0) {
    throw data_error("detection: bbox w/h must be positive");
  }
  if (!finite(det.confidence) || det.confidence < 0.0 ||
      det.confidence > 1.0) {
    throw data_error("detection: confidence out of [0,1]");
  }
  const double norm = det.embedding.cast<double>().norm();
  if (std::abs(norm - 1.0) > 1e-4) {
    throw data_error("detection: embedding not unit-norm");
  }
}

void validate_zone(const Zone& zone) {
  std::ostringstream where;
  where << "zone " << zone.zone_id << " in camera " << zone.camera_id;
  if (zone.polygon.size() < 3) {
    throw data_error(where.str() + ": polygon has fewer than 3 vertices");
  }
  for (const auto& p : zone.polygon) {
    if (!finite(p.x) || !finite(p.y)) {
      throw data_error(where.str() + ": non-finite polygon vertex");
    }
  }
  if (geom::polygon_signed_area2(zone.polygon) == 0.0) {
    throw data_error(where.str() + ": polygon has zero area");
  }
  if (!geom::polygon_is_simple(zone.polygon)) {
    throw data_error(where.str() + ": polygon is self-intersecting");
  }
}

void validate_camera_link(const CameraLink& link) {
  std::ostringstream where;
  where << "link " << link.from_cam << "->" << link.to_cam;
  if (link.from_cam.empty() || link.to_cam.empty()) {
    throw data_error(where.str() + ": empty camera id");
  }
  if (link.from_cam == link.to_cam) {
    throw data_error(where.str() + ": from and to cameras are equal");
  }
  if (link.t_min > link.t_max) {
    throw data_error(where.str() + ": t_min greater than t_max");
  }
}

void validate_triplet_sample(const TripletSample& sample) {
  if (sample.anchor.size() == 0 ||
      sample.anchor.size() != sample.positive.size() ||
      sample.anchor.size() != sample.negative.size()) {
    throw data_error("triplet sample: dimension mismatch");
  }
  if (!finite(sample.margin) || sample.margin < 0.0) {
    throw data_error("triplet sample: margin must be non-negative");
  }
}

void validate_classification_sample(const ClassificationSample& sample) {
  const auto& p = sample.probabilities;
  if (p.empty()) throw data_error("classification sample: empty distribution");
  if (sample.label < 0 || sample.label >= static_cast<int>(p.size())) {
    throw data_error("classification sample: label out of range");
  }
  double sum = 0.0;
  for (double v : p) {
    if (!finite(v) || v < 0.0 || v > 1.0) {
      throw data_error("classification sample: probability out of [0,1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw data_error("classification sample: probabilities do not sum to 1");
  }
}

}  // namespace mtmc
