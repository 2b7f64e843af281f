#pragma once

// JSON dataset and run-configuration files.
//
// Dataset layout (distances in meters, angles in radians, scores unitless):
//   {
//     "schema": "safedet-dataset", "version": "1",
//     "class_map": {"car": "car-like", "cyclist": "bicycle-like", "pedestrian": "pedestrian", "cone": "ignore"},
//     "frames": [{
//       "frame_id": "0001",
//       "ego_pose": {"rotation": [9 row-major], "translation": [3]},            world -> ego, optional
//       "camera": {"focal": 1.0, "ego_to_cam": {"rotation": [...], "translation": [...]},
//                  "fov": {"horizontal": 0.785, "vertical": 0.5}},            optional
//       "ground_truths": [{"label": "car", "center": [x, y, z], "size": [w, l, h], "yaw": 0.0,
//                          "visibility": "full" | "partial" | "occluded" | "out_of_fov"}],
//       "detections": [{"label": "car", "center": [...], "size": [...], "yaw": 0.0, "score": 0.9}]
//     }]
//   }
// Unknown keys are rejected.

#include <array>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <set>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "safedet/core.hpp"
#include "safedet/eval.hpp"
#include "safedet/geometry.hpp"
#include "safedet/impact.hpp"

namespace safedet::io {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kDatasetSchema = "safedet-dataset";
inline constexpr std::string_view kDatasetVersion = "1";

enum class ReportFormat { Json, Csv, Markdown };

struct RunConfig {
  eval::MatchConfig match;
  impact::ImpactParams impact;
  ReportFormat format = ReportFormat::Json;
  unsigned workers = 0;  // 0 = hardware concurrency

  eciou::EcIouParams eciou() const { return match.eciou_params(); }
};

// ---------------------------------------------------------------------------
// Enum spellings

inline std::string_view to_string(eval::Family f) {
  switch (f) {
    case eval::Family::CarLike: return "car-like";
    case eval::Family::BicycleLike: return "bicycle-like";
    case eval::Family::Pedestrian: return "pedestrian";
    case eval::Family::Ignore: return "ignore";
  }
  return "ignore";
}

inline std::string_view to_string(eval::Visibility v) {
  switch (v) {
    case eval::Visibility::Full: return "full";
    case eval::Visibility::Partial: return "partial";
    case eval::Visibility::Occluded: return "occluded";
    case eval::Visibility::OutOfFov: return "out_of_fov";
  }
  return "full";
}

inline std::string_view to_string(eval::Affinity a) {
  switch (a) {
    case eval::Affinity::CenterDistance: return "center_distance";
    case eval::Affinity::IouBev: return "iou_bev";
    case eval::Affinity::EcIou: return "ec_iou";
  }
  return "center_distance";
}

inline std::string_view to_string(eval::View v) { return v == eval::View::Ego ? "ego" : "roadside"; }

inline std::string_view to_string(ReportFormat f) {
  switch (f) {
    case ReportFormat::Json: return "json";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Markdown: return "markdown";
  }
  return "json";
}

inline std::optional<eval::Family> parse_family(std::string_view s) {
  if (s == "car-like") return eval::Family::CarLike;
  if (s == "bicycle-like") return eval::Family::BicycleLike;
  if (s == "pedestrian") return eval::Family::Pedestrian;
  if (s == "ignore") return eval::Family::Ignore;
  return std::nullopt;
}

inline std::optional<eval::Visibility> parse_visibility(std::string_view s) {
  if (s == "full") return eval::Visibility::Full;
  if (s == "partial") return eval::Visibility::Partial;
  if (s == "occluded") return eval::Visibility::Occluded;
  if (s == "out_of_fov") return eval::Visibility::OutOfFov;
  return std::nullopt;
}

// Accepts the long names and the short CLI spellings dist / iou / eciou.
inline std::optional<eval::Affinity> parse_affinity(std::string_view s) {
  if (s == "center_distance" || s == "dist") return eval::Affinity::CenterDistance;
  if (s == "iou_bev" || s == "iou") return eval::Affinity::IouBev;
  if (s == "ec_iou" || s == "eciou") return eval::Affinity::EcIou;
  return std::nullopt;
}

inline std::optional<eval::View> parse_view(std::string_view s) {
  if (s == "roadside") return eval::View::Roadside;
  if (s == "ego") return eval::View::Ego;
  return std::nullopt;
}

inline std::optional<ReportFormat> parse_format(std::string_view s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "markdown" || s == "md") return ReportFormat::Markdown;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Checked field access. `kind` selects SchemaError (datasets) or ConfigError.

class Reader {
 public:
  explicit Reader(ErrorKind kind) : kind_(kind) {}

  [[noreturn]] void error(const std::string& path, const std::string& what) const { fail(kind_, path + ": " + what); }

  const Json& object(const Json& j, const std::string& path) const {
    if (!j.is_object()) error(path, "expected an object");
    return j;
  }

  void only_keys(const Json& j, const std::string& path, std::initializer_list<std::string_view> keys) const {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool known = false;
      for (auto k : keys) known = known || it.key() == k;
      if (!known) error(path + "." + it.key(), "unknown field");
    }
  }

  const Json& field(const Json& j, const std::string& path, const char* key) const {
    const auto it = j.find(key);
    if (it == j.end()) error(path + "." + key, "missing required field");
    return *it;
  }

  double number(const Json& j, const std::string& path) const {
    if (!j.is_number()) error(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) error(path, "expected a finite number");
    return v;
  }

  bool boolean(const Json& j, const std::string& path) const {
    if (!j.is_boolean()) error(path, "expected true or false");
    return j.get<bool>();
  }

  std::string string(const Json& j, const std::string& path) const {
    if (!j.is_string()) error(path, "expected a string");
    return j.get<std::string>();
  }

  template <std::size_t N>
  std::array<double, N> numbers(const Json& j, const std::string& path) const {
    if (!j.is_array() || j.size() != N) error(path, "expected an array of " + std::to_string(N) + " numbers");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = number(j[i], path + "[" + std::to_string(i) + "]");
    return out;
  }

  const Json& array(const Json& j, const std::string& path) const {
    if (!j.is_array()) error(path, "expected an array");
    return j;
  }

 private:
  ErrorKind kind_;
};

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline Json parse_json(const std::string& text, ErrorKind kind, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    fail(kind, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

inline std::string read_file(const std::string& path, ErrorKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kind, path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Dataset

namespace detail {

inline RigidTransform read_transform(const Reader& r, const Json& j, const std::string& path) {
  r.object(j, path);
  r.only_keys(j, path, {"rotation", "translation"});
  RigidTransform t;
  t.rotation = r.numbers<9>(r.field(j, path, "rotation"), path + ".rotation");
  const auto tr = r.numbers<3>(r.field(j, path, "translation"), path + ".translation");
  t.translation = {tr[0], tr[1], tr[2]};
  if (!t.is_rigid()) r.error(path, "rotation is not a proper rotation matrix");
  return t;
}

inline Json write_transform(const RigidTransform& t) {
  return Json{{"rotation", t.rotation}, {"translation", {t.translation.x, t.translation.y, t.translation.z}}};
}

inline CameraModel read_camera(const Reader& r, const Json& j, const std::string& path) {
  r.object(j, path);
  r.only_keys(j, path, {"focal", "ego_to_cam", "fov"});
  CameraModel cam;
  cam.focal = r.number(r.field(j, path, "focal"), path + ".focal");
  if (!(cam.focal > 0.0)) r.error(path + ".focal", "must be > 0");
  cam.ego_to_cam = read_transform(r, r.field(j, path, "ego_to_cam"), path + ".ego_to_cam");
  if (j.contains("fov")) {
    const std::string fp = path + ".fov";
    const Json& f = r.object(j["fov"], fp);
    r.only_keys(f, fp, {"horizontal", "vertical"});
    FieldOfView fov;
    fov.horizontal = r.number(r.field(f, fp, "horizontal"), fp + ".horizontal");
    fov.vertical = r.number(r.field(f, fp, "vertical"), fp + ".vertical");
    if (!(fov.horizontal > 0.0 && fov.vertical > 0.0)) r.error(fp, "half-angles must be > 0");
    cam.fov = fov;
  }
  return cam;
}

inline Json write_camera(const CameraModel& cam) {
  Json j{{"focal", cam.focal}, {"ego_to_cam", write_transform(cam.ego_to_cam)}};
  if (cam.fov) j["fov"] = Json{{"horizontal", cam.fov->horizontal}, {"vertical", cam.fov->vertical}};
  return j;
}

inline Box3D read_box(const Reader& r, const Json& j, const std::string& path, bool detection) {
  r.object(j, path);
  if (detection)
    r.only_keys(j, path, {"label", "center", "size", "yaw", "score"});
  else
    r.only_keys(j, path, {"label", "center", "size", "yaw", "visibility"});
  Box3D b;
  b.label = r.string(r.field(j, path, "label"), path + ".label");
  const auto c = r.numbers<3>(r.field(j, path, "center"), path + ".center");
  b.center = {c[0], c[1], c[2]};
  const auto s = r.numbers<3>(r.field(j, path, "size"), path + ".size");
  b.width = s[0];
  b.length = s[1];
  b.height = s[2];
  if (!(b.width > 0.0 && b.length > 0.0 && b.height > 0.0)) r.error(path + ".size", "dimensions must be > 0");
  b.yaw = r.number(r.field(j, path, "yaw"), path + ".yaw");
  if (!(std::abs(b.yaw) <= std::numbers::pi + 1e-12)) r.error(path + ".yaw", "must lie in [-pi, pi]");
  if (detection) {
    b.score = r.number(r.field(j, path, "score"), path + ".score");
    if (!(*b.score >= 0.0 && *b.score <= 1.0)) r.error(path + ".score", "must lie in [0, 1]");
  }
  return b;
}

inline Json write_box(const Box3D& b) {
  Json j{{"label", b.label},
         {"center", {b.center.x, b.center.y, b.center.z}},
         {"size", {b.width, b.length, b.height}},
         {"yaw", b.yaw}};
  if (b.score) j["score"] = *b.score;
  return j;
}

}  // namespace detail

inline eval::Dataset dataset_from_json(const Json& root) {
  const Reader r(ErrorKind::SchemaError);
  r.object(root, "$");
  r.only_keys(root, "$", {"schema", "version", "class_map", "frames"});
  if (root.contains("schema") && r.string(root["schema"], "$.schema") != kDatasetSchema)
    r.error("$.schema", "expected \"" + std::string(kDatasetSchema) + "\"");
  eval::Dataset ds;
  ds.version = r.string(r.field(root, "$", "version"), "$.version");
  if (ds.version != kDatasetVersion) r.error("$.version", "unsupported version \"" + ds.version + "\"");

  const Json& cm = r.object(r.field(root, "$", "class_map"), "$.class_map");
  for (auto it = cm.begin(); it != cm.end(); ++it) {
    const std::string path = "$.class_map." + it.key();
    const auto fam = parse_family(r.string(it.value(), path));
    if (!fam) r.error(path, "expected car-like, bicycle-like, pedestrian or ignore");
    ds.class_map[it.key()] = *fam;
  }

  const Json& frames = r.array(r.field(root, "$", "frames"), "$.frames");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string fp = "$.frames[" + std::to_string(i) + "]";
    const Json& fj = r.object(frames[i], fp);
    r.only_keys(fj, fp, {"frame_id", "ego_pose", "camera", "ground_truths", "detections"});
    eval::FrameAnnotations f;
    f.frame_id = r.string(r.field(fj, fp, "frame_id"), fp + ".frame_id");
    if (!ids.insert(f.frame_id).second) r.error(fp + ".frame_id", "duplicate frame_id \"" + f.frame_id + "\"");
    if (fj.contains("ego_pose")) f.ego_pose = detail::read_transform(r, fj["ego_pose"], fp + ".ego_pose");
    if (fj.contains("camera")) f.camera = detail::read_camera(r, fj["camera"], fp + ".camera");

    const Json& gts = r.array(r.field(fj, fp, "ground_truths"), fp + ".ground_truths");
    for (std::size_t k = 0; k < gts.size(); ++k) {
      const std::string bp = fp + ".ground_truths[" + std::to_string(k) + "]";
      eval::GroundTruth g;
      g.box = detail::read_box(r, gts[k], bp, false);
      if (gts[k].contains("visibility")) {
        const auto vis = parse_visibility(r.string(gts[k]["visibility"], bp + ".visibility"));
        if (!vis) r.error(bp + ".visibility", "expected full, partial, occluded or out_of_fov");
        g.visibility = *vis;
      }
      f.ground_truths.push_back(std::move(g));
    }
    const Json& dets = r.array(r.field(fj, fp, "detections"), fp + ".detections");
    for (std::size_t k = 0; k < dets.size(); ++k)
      f.detections.push_back(detail::read_box(r, dets[k], fp + ".detections[" + std::to_string(k) + "]", true));
    ds.frames.push_back(std::move(f));
  }

  for (const auto& f : ds.frames) {
    for (const auto& g : f.ground_truths) eval::family_of(ds.class_map, g.box.label);
    for (const auto& d : f.detections) eval::family_of(ds.class_map, d.label);
  }
  return ds;
}

inline Json dataset_to_json(const eval::Dataset& ds) {
  Json root{{"schema", kDatasetSchema}, {"version", ds.version}};
  Json cm = Json::object();
  for (const auto& [label, fam] : ds.class_map) cm[label] = to_string(fam);
  root["class_map"] = cm;
  Json frames = Json::array();
  for (const auto& f : ds.frames) {
    Json fj{{"frame_id", f.frame_id}};
    if (f.ego_pose) fj["ego_pose"] = detail::write_transform(*f.ego_pose);
    if (f.camera) fj["camera"] = detail::write_camera(*f.camera);
    Json gts = Json::array();
    for (const auto& g : f.ground_truths) {
      Json b = detail::write_box(g.box);
      b["visibility"] = to_string(g.visibility);
      gts.push_back(std::move(b));
    }
    Json dets = Json::array();
    for (const auto& d : f.detections) dets.push_back(detail::write_box(d));
    fj["ground_truths"] = std::move(gts);
    fj["detections"] = std::move(dets);
    frames.push_back(std::move(fj));
  }
  root["frames"] = std::move(frames);
  return root;
}

inline eval::Dataset parse_dataset(const std::string& text, const std::string& source = "<dataset>") {
  return dataset_from_json(parse_json(text, ErrorKind::SchemaError, source));
}

inline eval::Dataset load_dataset(const std::string& path) {
  return parse_dataset(read_file(path, ErrorKind::SchemaError), path);
}

inline std::string emit_dataset(const eval::Dataset& ds) { return dataset_to_json(ds).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Run configuration. Every key is optional; defaults come from the types.
//   {
//     "match": {"affinity": "center_distance", "thresholds": {"car-like": 0.7, ...},
//               "distance_thresholds": [0.5, 1, 2, 4], "tp_distance_threshold": 2,
//               "view": "roadside", "score_floor": 0.05, "secondary_metrics": true,
//               "ap": {"interpolate_101": true, "min_recall": 0, "min_precision": 0},
//               "nds": {"ap_weight": 5, "ate_weight": 1, "zero_tp_worst_case": true}},
//     "eciou": {"alpha": 2, "eps_dist": 1e-6, "clamp_output": true},
//     "impact": {"rate_per_million": 1.5, "daily_volume": 20000, "av_reduction": 0.5,
//                "rho": -0.8, "sigma_ecmap": 5, "delta_ecmap": 7.5},
//     "format": "json", "workers": 0
//   }

inline RunConfig config_from_json(const Json& root) {
  const Reader r(ErrorKind::ConfigError);
  RunConfig cfg;
  r.object(root, "$");
  r.only_keys(root, "$", {"match", "eciou", "impact", "format", "workers"});
  auto num = [&](const Json& obj, const std::string& path, const char* key, double& out) {
    if (obj.contains(key)) out = r.number(obj[key], path + "." + key);
  };
  auto flag = [&](const Json& obj, const std::string& path, const char* key, bool& out) {
    if (obj.contains(key)) out = r.boolean(obj[key], path + "." + key);
  };

  if (root.contains("match")) {
    const Json& m = r.object(root["match"], "$.match");
    r.only_keys(m, "$.match",
                {"affinity", "thresholds", "distance_thresholds", "tp_distance_threshold", "view", "score_floor",
                 "secondary_metrics", "ap", "nds"});
    auto& mc = cfg.match;
    if (m.contains("affinity")) {
      const auto a = parse_affinity(r.string(m["affinity"], "$.match.affinity"));
      if (!a) r.error("$.match.affinity", "expected center_distance, iou_bev or ec_iou");
      mc.affinity = *a;
    }
    if (m.contains("thresholds")) {
      const Json& t = r.object(m["thresholds"], "$.match.thresholds");
      for (auto it = t.begin(); it != t.end(); ++it) {
        const std::string path = "$.match.thresholds." + it.key();
        const auto fam = parse_family(it.key());
        if (!fam || *fam == eval::Family::Ignore) r.error(path, "expected car-like, bicycle-like or pedestrian");
        mc.thresholds[*fam] = r.number(it.value(), path);
      }
    }
    if (m.contains("distance_thresholds")) {
      const Json& d = r.array(m["distance_thresholds"], "$.match.distance_thresholds");
      mc.distance_thresholds.clear();
      for (std::size_t i = 0; i < d.size(); ++i)
        mc.distance_thresholds.push_back(r.number(d[i], "$.match.distance_thresholds[" + std::to_string(i) + "]"));
    }
    num(m, "$.match", "tp_distance_threshold", mc.tp_distance_threshold);
    if (m.contains("view")) {
      const auto v = parse_view(r.string(m["view"], "$.match.view"));
      if (!v) r.error("$.match.view", "expected roadside or ego");
      mc.view = *v;
    }
    num(m, "$.match", "score_floor", mc.score_floor);
    flag(m, "$.match", "secondary_metrics", mc.secondary_metrics);
    if (m.contains("ap")) {
      const Json& a = r.object(m["ap"], "$.match.ap");
      r.only_keys(a, "$.match.ap", {"interpolate_101", "min_recall", "min_precision"});
      flag(a, "$.match.ap", "interpolate_101", mc.ap.interpolate_101);
      num(a, "$.match.ap", "min_recall", mc.ap.min_recall);
      num(a, "$.match.ap", "min_precision", mc.ap.min_precision);
    }
    if (m.contains("nds")) {
      const Json& n = r.object(m["nds"], "$.match.nds");
      r.only_keys(n, "$.match.nds", {"ap_weight", "ate_weight", "zero_tp_worst_case"});
      num(n, "$.match.nds", "ap_weight", mc.nds.ap_weight);
      num(n, "$.match.nds", "ate_weight", mc.nds.ate_weight);
      flag(n, "$.match.nds", "zero_tp_worst_case", mc.nds.zero_tp_worst_case);
    }
  }
  if (root.contains("eciou")) {
    const Json& e = r.object(root["eciou"], "$.eciou");
    r.only_keys(e, "$.eciou", {"alpha", "eps_dist", "clamp_output"});
    num(e, "$.eciou", "alpha", cfg.match.alpha);
    num(e, "$.eciou", "eps_dist", cfg.match.eps_dist);
    flag(e, "$.eciou", "clamp_output", cfg.match.clamp_output);
  }
  if (root.contains("impact")) {
    const Json& i = r.object(root["impact"], "$.impact");
    r.only_keys(i, "$.impact", {"rate_per_million", "daily_volume", "av_reduction", "rho", "sigma_ecmap", "delta_ecmap"});
    auto& p = cfg.impact;
    num(i, "$.impact", "rate_per_million", p.rate_per_million);
    num(i, "$.impact", "daily_volume", p.daily_volume);
    num(i, "$.impact", "av_reduction", p.av_reduction);
    num(i, "$.impact", "rho", p.rho);
    num(i, "$.impact", "sigma_ecmap", p.sigma_ecmap);
    num(i, "$.impact", "delta_ecmap", p.delta_ecmap);
  }
  if (root.contains("format")) {
    const auto f = parse_format(r.string(root["format"], "$.format"));
    if (!f) r.error("$.format", "expected json, csv or markdown");
    cfg.format = *f;
  }
  if (root.contains("workers")) {
    const Json& w = root["workers"];
    if (!w.is_number_unsigned()) r.error("$.workers", "expected a non-negative integer (0 = auto)");
    cfg.workers = w.get<unsigned>();
  }
  return cfg;
}

inline void validate(const RunConfig& cfg) {
  eval::validate(cfg.match);
  impact::validate(cfg.impact);
}

inline Json config_to_json(const RunConfig& cfg) {
  const auto& m = cfg.match;
  Json thresholds = Json::object();
  for (const auto& [fam, tau] : m.thresholds) thresholds[std::string(to_string(fam))] = tau;
  return Json{
      {"match",
       {{"affinity", to_string(m.affinity)},
        {"thresholds", thresholds},
        {"distance_thresholds", m.distance_thresholds},
        {"tp_distance_threshold", m.tp_distance_threshold},
        {"view", to_string(m.view)},
        {"score_floor", m.score_floor},
        {"secondary_metrics", m.secondary_metrics},
        {"ap", {{"interpolate_101", m.ap.interpolate_101}, {"min_recall", m.ap.min_recall}, {"min_precision", m.ap.min_precision}}},
        {"nds", {{"ap_weight", m.nds.ap_weight}, {"ate_weight", m.nds.ate_weight}, {"zero_tp_worst_case", m.nds.zero_tp_worst_case}}}}},
      {"eciou", {{"alpha", m.alpha}, {"eps_dist", m.eps_dist}, {"clamp_output", m.clamp_output}}},
      {"impact",
       {{"rate_per_million", cfg.impact.rate_per_million},
        {"daily_volume", cfg.impact.daily_volume},
        {"av_reduction", cfg.impact.av_reduction},
        {"rho", cfg.impact.rho},
        {"sigma_ecmap", cfg.impact.sigma_ecmap},
        {"delta_ecmap", cfg.impact.delta_ecmap}}},
      {"format", to_string(cfg.format)},
      {"workers", cfg.workers}};
}

inline RunConfig parse_config(const std::string& text, const std::string& source = "<config>") {
  return config_from_json(parse_json(text, ErrorKind::ConfigError, source));
}

inline RunConfig load_config(const std::string& path) { return parse_config(read_file(path, ErrorKind::ConfigError), path); }

// Human-readable schema reference printed by `safedet schema`.
inline constexpr std::string_view kSchemaReference = R"(safedet dataset schema, version 1

Units: distances in meters, angles in radians, scores unitless in [0, 1].
Ego frame: x forward, y left, z up. Camera frame: z forward, +a right, +b down.

{
  "schema": "safedet-dataset",              optional tag
  "version": "1",                           required
  "class_map": {"<label>": "car-like" | "bicycle-like" | "pedestrian" | "ignore"},
  "frames": [
    {
      "frame_id": "<unique string>",
      "ego_pose": {                          optional; world -> ego. When present, boxes are in world coordinates
        "rotation": [r00, r01, r02, r10, r11, r12, r20, r21, r22],
        "translation": [tx, ty, tz]
      },
      "camera": {                            optional; required for USC and ego-view evaluation
        "focal": 1.0,
        "ego_to_cam": {"rotation": [...9], "translation": [...3]},
        "fov": {"horizontal": <half-angle>, "vertical": <half-angle>}   optional
      },
      "ground_truths": [
        {"label": "car", "center": [x, y, z], "size": [width, length, height], "yaw": 0.0,
         "visibility": "full" | "partial" | "occluded" | "out_of_fov"}          visibility defaults to full
      ],
      "detections": [
        {"label": "car", "center": [x, y, z], "size": [width, length, height], "yaw": 0.0, "score": 0.9}
      ]
    }
  ]
}

Box corners: center + R(yaw) (+-length/2, +-width/2, +-height/2); length runs along the heading.
Corner order: bottom face then top face, each counter-clockwise from front-left.
Unknown fields are rejected. Every label must appear in class_map.
)";

}  // namespace safedet::io
