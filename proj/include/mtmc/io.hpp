#pragma once

// File formats:
//  - detections CSV: header `frame,x,y,w,h,conf,emb_index`, one row per box,
//    embeddings in a sidecar blob addressed by emb_index
//  - embedding blob: magic "EMB1", u32 LE count, u32 LE dim, then count*dim
//    little-endian float32 values row-major (file length exactly 12+4*N*D)
//  - zones JSON: {"cameras":[{"camera_id":...,"zones":[{"id":...,"polygon":
//    [[x,y],...]}]}]}
//  - links JSON: {"links":[{"from":...,"to":...,"t_min":...,"t_max":...,
//    "zone_pairs":[[exit,entry],...]}]}
//  - tracks CSV: header `camera_id,id,frame,x,y,w,h,conf`; serves tracker
//    output, global-id output, and ground truth alike
// All numeric text uses shortest round-trip formatting, so write/read is
// lossless.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mtmc/types.hpp"

namespace mtmc::io {

// Shortest decimal string that parses back to exactly v.
std::string format_double(double v);

void write_embedding_blob(const std::string& path,
                          const std::vector<Eigen::VectorXf>& rows);
std::vector<Eigen::VectorXf> read_embedding_blob(const std::string& path);

// Parses one camera's detection stream. Rows may arrive in any order; the
// result is sorted by (frame, x, y, w, h, conf, emb_index) so shuffled
// inputs ingest identically. frame_offset shifts every frame onto the
// shared clock; embeddings come back unit L2.
std::vector<Detection> read_detections(const std::string& csv_path,
                                       const std::string& blob_path,
                                       const std::string& camera_id,
                                       std::int64_t frame_offset);

// Writes detections in list order; row i references blob row i.
void write_detections(const std::string& csv_path,
                      const std::string& blob_path,
                      const std::vector<Detection>& detections);

std::map<std::string, std::vector<Zone>> read_zones(
    const std::string& json_path);
void write_zones(const std::string& json_path,
                 const std::map<std::string, std::vector<Zone>>& zones);

std::vector<CameraLink> read_links(const std::string& json_path);
void write_links(const std::string& json_path,
                 const std::vector<CameraLink>& links);

// Every zone id named by a link's zone_pairs must exist in the referenced
// camera's zone list.
void validate_links_against_zones(
    const std::vector<CameraLink>& links,
    const std::map<std::string, std::vector<Zone>>& zones);

struct TrackRow {
  std::string camera_id;
  std::int64_t id = 0;
  std::int64_t frame = 0;
  BBox bbox;
  double confidence = 0.0;

  friend bool operator==(const TrackRow&, const TrackRow&) = default;
};

// Preserves list/file order; round-trip is lossless.
void write_tracks(const std::string& path, const std::vector<TrackRow>& rows);
std::vector<TrackRow> read_tracks(const std::string& path);

}  // namespace mtmc::io
