#include "mtmc/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>
#include <sstream>

#include "mtmc/errors.hpp"

namespace mtmc::io {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw data_error(path + ": read failed");
  return std::move(buf).str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw data_error(path + ": cannot open file for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw data_error(path + ": write failed");
}

[[noreturn]] void row_error(const std::string& path, std::size_t line,
                            const std::string& msg) {
  throw data_error(path + ":" + std::to_string(line) + ": " + msg);
}

// Splits one CSV line; no quoting, fields may not contain commas.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::int64_t parse_int(std::string_view tok, const std::string& path,
                       std::size_t line, const char* field) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.begin(), tok.end(), v);
  if (ec != std::errc() || ptr != tok.end()) {
    row_error(path, line,
              std::string(field) + ": not an integer: '" + std::string(tok) +
                  "'");
  }
  return v;
}

double parse_double(std::string_view tok, const std::string& path,
                    std::size_t line, const char* field) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.begin(), tok.end(), v);
  if (ec != std::errc() || ptr != tok.end()) {
    row_error(path, line,
              std::string(field) + ": not a number: '" + std::string(tok) +
                  "'");
  }
  if (!std::isfinite(v)) {
    row_error(path, line, std::string(field) + ": non-finite value");
  }
  return v;
}

// Lines of `text` without terminators; accepts LF and CRLF, tolerates a
// missing final newline.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    if (start == text.size()) {
      break;
    }
    std::size_t pos = text.find('\n', start);
    std::string_view line;
    if (pos == std::string_view::npos) {
      line = text.substr(start);
      start = text.size();
    } else {
      line = text.substr(start, pos - start);
      start = pos + 1;
    }
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
  }
  return lines;
}

std::string format_int(std::int64_t v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void append_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void check_camera_id(const std::string& id, const std::string& path) {
  if (id.empty()) throw data_error(path + ": empty camera_id");
  if (id.find_first_of(",\r\n") != std::string::npos) {
    throw data_error(path + ": camera_id contains a delimiter: '" + id + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_embedding_blob(const std::string& path,
                          const std::vector<Eigen::VectorXf>& rows) {
  const std::size_t count = rows.size();
  const std::size_t dim = rows.empty() ? 0 : static_cast<std::size_t>(
                                                 rows.front().size());
  for (const auto& r : rows) {
    if (static_cast<std::size_t>(r.size()) != dim) {
      throw data_error(path + ": embedding rows have mixed dimensions");
    }
  }
  if (count > 0xffffffffull || dim > 0xffffffffull) {
    throw data_error(path + ": blob too large for the format");
  }
  std::string out;
  out.reserve(12 + 4 * count * dim);
  out += "EMB1";
  append_u32_le(out, static_cast<std::uint32_t>(count));
  append_u32_le(out, static_cast<std::uint32_t>(dim));
  for (const auto& r : rows) {
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      append_u32_le(out, std::bit_cast<std::uint32_t>(r(i)));
    }
  }
  write_file(path, out);
}

std::vector<Eigen::VectorXf> read_embedding_blob(const std::string& path) {
  const std::string raw = read_file(path);
  if (raw.size() < 12) throw data_error(path + ": blob shorter than header");
  if (raw.compare(0, 4, "EMB1") != 0) {
    throw data_error(path + ": bad blob magic");
  }
  const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());
  const std::uint64_t count = read_u32_le(bytes + 4);
  const std::uint64_t dim = read_u32_le(bytes + 8);
  const std::uint64_t expected = 12 + 4 * count * dim;
  if (raw.size() != expected) {
    throw data_error(path + ": blob length mismatch: expected " +
                     std::to_string(expected) + " bytes, got " +
                     std::to_string(raw.size()));
  }
  std::vector<Eigen::VectorXf> rows(count);
  const unsigned char* p = bytes + 12;
  for (std::uint64_t r = 0; r < count; ++r) {
    Eigen::VectorXf v(static_cast<Eigen::Index>(dim));
    for (std::uint64_t i = 0; i < dim; ++i, p += 4) {
      const float x = std::bit_cast<float>(read_u32_le(p));
      if (!std::isfinite(x)) {
        throw data_error(path + ": non-finite float in blob row " +
                         std::to_string(r));
      }
      v(static_cast<Eigen::Index>(i)) = x;
    }
    rows[r] = std::move(v);
  }
  return rows;
}

std::vector<Detection> read_detections(const std::string& csv_path,
                                       const std::string& blob_path,
                                       const std::string& camera_id,
                                       std::int64_t frame_offset) {
  check_camera_id(camera_id, csv_path);
  std::vector<Eigen::VectorXf> embeddings = read_embedding_blob(blob_path);
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    embeddings[i] = normalize_embedding(
        embeddings[i], blob_path + ": blob row " + std::to_string(i));
  }

  const std::string text = read_file(csv_path);
  const auto lines = split_lines(text);
  if (lines.empty()) throw data_error(csv_path + ": missing header line");
  if (lines[0] != "frame,x,y,w,h,conf,emb_index") {
    throw data_error(csv_path +
                     ": bad header, expected 'frame,x,y,w,h,conf,emb_index'");
  }

  struct Row {
    std::int64_t frame;
    BBox bbox;
    double conf;
    std::int64_t emb_index;
  };
  std::vector<Row> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split_fields(lines[li]);
    const std::size_t line_no = li + 1;
    if (fields.size() != 7) {
      row_error(csv_path, line_no,
                "expected 7 fields, got " + std::to_string(fields.size()));
    }
    Row row;
    row.frame = parse_int(fields[0], csv_path, line_no, "frame");
    row.bbox.x = parse_double(fields[1], csv_path, line_no, "x");
    row.bbox.y = parse_double(fields[2], csv_path, line_no, "y");
    row.bbox.w = parse_double(fields[3], csv_path, line_no, "w");
    row.bbox.h = parse_double(fields[4], csv_path, line_no, "h");
    row.conf = parse_double(fields[5], csv_path, line_no, "conf");
    row.emb_index = parse_int(fields[6], csv_path, line_no, "emb_index");
    if (row.emb_index < 0 ||
        row.emb_index >= static_cast<std::int64_t>(embeddings.size())) {
      row_error(csv_path, line_no,
                "emb_index " + std::to_string(row.emb_index) +
                    " out of range (blob has " +
                    std::to_string(embeddings.size()) + " rows)");
    }
    rows.push_back(row);
  }

  // Total order over every CSV field makes ingestion insensitive to row
  // order in the file.
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.frame, a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h, a.conf,
                    a.emb_index) < std::tie(b.frame, b.bbox.x, b.bbox.y,
                                            b.bbox.w, b.bbox.h, b.conf,
                                            b.emb_index);
  });

  std::vector<Detection> out;
  out.reserve(rows.size());
  for (const Row& row : rows) {
    Detection det;
    det.camera_id = camera_id;
    det.frame = row.frame + frame_offset;
    if (det.frame < 0) {
      throw data_error(csv_path + ": frame " + std::to_string(row.frame) +
                       " with offset " + std::to_string(frame_offset) +
                       " is negative");
    }
    det.bbox = row.bbox;
    det.confidence = row.conf;
    det.embedding = embeddings[static_cast<std::size_t>(row.emb_index)];
    try {
      validate_detection(det);
    } catch (const data_error& e) {
      throw data_error(csv_path + ": " + e.what());
    }
    out.push_back(std::move(det));
  }
  return out;
}

void write_detections(const std::string& csv_path,
                      const std::string& blob_path,
                      const std::vector<Detection>& detections) {
  std::string csv = "frame,x,y,w,h,conf,emb_index\n";
  std::vector<Eigen::VectorXf> rows;
  rows.reserve(detections.size());
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const Detection& d = detections[i];
    csv += format_int(d.frame);
    csv += ',';
    csv += format_double(d.bbox.x);
    csv += ',';
    csv += format_double(d.bbox.y);
    csv += ',';
    csv += format_double(d.bbox.w);
    csv += ',';
    csv += format_double(d.bbox.h);
    csv += ',';
    csv += format_double(d.confidence);
    csv += ',';
    csv += format_int(static_cast<std::int64_t>(i));
    csv += '\n';
    rows.push_back(d.embedding);
  }
  write_embedding_blob(blob_path, rows);
  write_file(csv_path, csv);
}

namespace {

[[noreturn]] void json_shape_error(const std::string& path,
                                   const std::string& msg) {
  throw data_error(path + ": " + msg);
}

const json& require_field(const json& obj, const char* key,
                          const std::string& path,
                          const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    json_shape_error(path, where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

std::string require_string(const json& obj, const char* key,
                           const std::string& path,
                           const std::string& where) {
  const json& v = require_field(obj, key, path, where);
  if (!v.is_string()) {
    json_shape_error(path, where + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::int64_t require_integer(const json& obj, const char* key,
                             const std::string& path,
                             const std::string& where) {
  const json& v = require_field(obj, key, path, where);
  if (!v.is_number_integer()) {
    json_shape_error(path,
                     where + ": field '" + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

json parse_json(const std::string& path) {
  const std::string text = read_file(path);
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw data_error(path + ": invalid JSON");
  return doc;
}

}  // namespace

std::map<std::string, std::vector<Zone>> read_zones(
    const std::string& json_path) {
  const json doc = parse_json(json_path);
  const json& cameras = require_field(doc, "cameras", json_path, "document");
  if (!cameras.is_array()) {
    json_shape_error(json_path, "'cameras' must be an array");
  }
  std::map<std::string, std::vector<Zone>> out;
  for (const json& cam : cameras) {
    const std::string camera_id =
        require_string(cam, "camera_id", json_path, "camera entry");
    if (out.count(camera_id)) {
      json_shape_error(json_path, "duplicate camera entry '" + camera_id + "'");
    }
    const json& zones = require_field(cam, "zones", json_path, camera_id);
    if (!zones.is_array()) {
      json_shape_error(json_path, camera_id + ": 'zones' must be an array");
    }
    std::vector<Zone> list;
    std::set<int> seen_ids;
    for (const json& z : zones) {
      Zone zone;
      zone.camera_id = camera_id;
      zone.zone_id = static_cast<int>(
          require_integer(z, "id", json_path, camera_id + " zone"));
      if (!seen_ids.insert(zone.zone_id).second) {
        json_shape_error(json_path, camera_id + ": duplicate zone id " +
                                        std::to_string(zone.zone_id));
      }
      const json& poly = require_field(z, "polygon", json_path,
                                       camera_id + " zone " +
                                           std::to_string(zone.zone_id));
      if (!poly.is_array()) {
        json_shape_error(json_path, camera_id + ": 'polygon' must be an array");
      }
      for (const json& pt : poly) {
        if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() ||
            !pt[1].is_number()) {
          json_shape_error(json_path,
                           camera_id + ": polygon vertices must be [x, y]");
        }
        zone.polygon.push_back({pt[0].get<double>(), pt[1].get<double>()});
      }
      validate_zone(zone);
      list.push_back(std::move(zone));
    }
    out.emplace(camera_id, std::move(list));
  }
  return out;
}

void write_zones(const std::string& json_path,
                 const std::map<std::string, std::vector<Zone>>& zones) {
  json cameras = json::array();
  for (const auto& [camera_id, list] : zones) {
    json zs = json::array();
    for (const Zone& z : list) {
      json poly = json::array();
      for (const auto& p : z.polygon) poly.push_back({p.x, p.y});
      zs.push_back({{"id", z.zone_id}, {"polygon", poly}});
    }
    cameras.push_back({{"camera_id", camera_id}, {"zones", zs}});
  }
  const json doc = {{"cameras", cameras}};
  write_file(json_path, doc.dump(2) + "\n");
}

std::vector<CameraLink> read_links(const std::string& json_path) {
  const json doc = parse_json(json_path);
  const json& links = require_field(doc, "links", json_path, "document");
  if (!links.is_array()) {
    json_shape_error(json_path, "'links' must be an array");
  }
  std::vector<CameraLink> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const json& l : links) {
    CameraLink link;
    link.from_cam = require_string(l, "from", json_path, "link entry");
    link.to_cam = require_string(l, "to", json_path, "link entry");
    const std::string where = "link " + link.from_cam + "->" + link.to_cam;
    link.t_min = require_integer(l, "t_min", json_path, where);
    link.t_max = require_integer(l, "t_max", json_path, where);
    if (l.contains("zone_pairs")) {
      const json& pairs = l.at("zone_pairs");
      if (!pairs.is_array()) {
        json_shape_error(json_path, where + ": 'zone_pairs' must be an array");
      }
      for (const json& pr : pairs) {
        if (!pr.is_array() || pr.size() != 2 ||
            !pr[0].is_number_integer() || !pr[1].is_number_integer()) {
          json_shape_error(
              json_path, where + ": zone_pairs entries must be [exit, entry]");
        }
        link.zone_pairs.insert({pr[0].get<int>(), pr[1].get<int>()});
      }
    }
    validate_camera_link(link);
    if (!seen.insert({link.from_cam, link.to_cam}).second) {
      json_shape_error(json_path, where + ": duplicate link direction");
    }
    out.push_back(std::move(link));
  }
  return out;
}

void write_links(const std::string& json_path,
                 const std::vector<CameraLink>& links) {
  json arr = json::array();
  for (const CameraLink& l : links) {
    json pairs = json::array();
    for (const auto& [exit_zone, entry_zone] : l.zone_pairs) {
      pairs.push_back({exit_zone, entry_zone});
    }
    arr.push_back({{"from", l.from_cam},
                   {"to", l.to_cam},
                   {"t_min", l.t_min},
                   {"t_max", l.t_max},
                   {"zone_pairs", pairs}});
  }
  const json doc = {{"links", arr}};
  write_file(json_path, doc.dump(2) + "\n");
}

void validate_links_against_zones(
    const std::vector<CameraLink>& links,
    const std::map<std::string, std::vector<Zone>>& zones) {
  const auto zone_exists = [&](const std::string& cam, int zone_id) {
    const auto it = zones.find(cam);
    if (it == zones.end()) return false;
    for (const Zone& z : it->second) {
      if (z.zone_id == zone_id) return true;
    }
    return false;
  };
  for (const CameraLink& l : links) {
    const std::string where = "link " + l.from_cam + "->" + l.to_cam;
    for (const auto& [exit_zone, entry_zone] : l.zone_pairs) {
      if (!zone_exists(l.from_cam, exit_zone)) {
        throw data_error(where + ": unknown exit zone " +
                         std::to_string(exit_zone) + " in camera " +
                         l.from_cam);
      }
      if (!zone_exists(l.to_cam, entry_zone)) {
        throw data_error(where + ": unknown entry zone " +
                         std::to_string(entry_zone) + " in camera " +
                         l.to_cam);
      }
    }
  }
}

void write_tracks(const std::string& path,
                  const std::vector<TrackRow>& rows) {
  std::string csv = "camera_id,id,frame,x,y,w,h,conf\n";
  for (const TrackRow& r : rows) {
    check_camera_id(r.camera_id, path);
    csv += r.camera_id;
    csv += ',';
    csv += format_int(r.id);
    csv += ',';
    csv += format_int(r.frame);
    csv += ',';
    csv += format_double(r.bbox.x);
    csv += ',';
    csv += format_double(r.bbox.y);
    csv += ',';
    csv += format_double(r.bbox.w);
    csv += ',';
    csv += format_double(r.bbox.h);
    csv += ',';
    csv += format_double(r.confidence);
    csv += '\n';
  }
  write_file(path, csv);
}

std::vector<TrackRow> read_tracks(const std::string& path) {
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  if (lines.empty()) throw data_error(path + ": missing header line");
  if (lines[0] != "camera_id,id,frame,x,y,w,h,conf") {
    throw data_error(path +
                     ": bad header, expected 'camera_id,id,frame,x,y,w,h,conf'");
  }
  std::vector<TrackRow> out;
  out.reserve(lines.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split_fields(lines[li]);
    const std::size_t line_no = li + 1;
    if (fields.size() != 8) {
      row_error(path, line_no,
                "expected 8 fields, got " + std::to_string(fields.size()));
    }
    TrackRow r;
    r.camera_id = std::string(fields[0]);
    if (r.camera_id.empty()) row_error(path, line_no, "empty camera_id");
    r.id = parse_int(fields[1], path, line_no, "id");
    if (r.id <= 0) row_error(path, line_no, "id must be positive");
    r.frame = parse_int(fields[2], path, line_no, "frame");
    if (r.frame < 0) row_error(path, line_no, "negative frame");
    r.bbox.x = parse_double(fields[3], path, line_no, "x");
    r.bbox.y = parse_double(fields[4], path, line_no, "y");
    r.bbox.w = parse_double(fields[5], path, line_no, "w");
    r.bbox.h = parse_double(fields[6], path, line_no, "h");
    if (r.bbox.w <= 0.0 || r.bbox.h <= 0.0) {
      row_error(path, line_no, "w/h must be positive");
    }
    r.confidence = parse_double(fields[7], path, line_no, "conf");
    if (r.confidence < 0.0 || r.confidence > 1.0) {
      row_error(path, line_no, "confidence out of [0,1]");
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mtmc::io
