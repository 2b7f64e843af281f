#pragma once

// Dataset-level evaluation: greedy score-ordered matching, average precision,
// true-positive statistics (USC, IoU, EC-IoU, translation error) and their
// composition into mAP, NDS, mAUSC, NDS-USC and EC-mAP.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "safedet/core.hpp"
#include "safedet/eciou.hpp"
#include "safedet/geometry.hpp"
#include "safedet/usc.hpp"

namespace safedet::eval {

enum class Visibility { Full, Partial, Occluded, OutOfFov };

struct GroundTruth {
  Box3D box;
  Visibility visibility = Visibility::Full;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct FrameAnnotations {
  std::string frame_id;
  // World -> ego. When present, boxes are given in the world frame.
  std::optional<RigidTransform> ego_pose;
  std::optional<CameraModel> camera;
  std::vector<GroundTruth> ground_truths;
  std::vector<Box3D> detections;

  friend bool operator==(const FrameAnnotations&, const FrameAnnotations&) = default;
};

enum class Family { CarLike, BicycleLike, Pedestrian, Ignore };

struct Dataset {
  std::string version = "1";
  std::map<std::string, Family> class_map;
  std::vector<FrameAnnotations> frames;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

enum class Affinity { CenterDistance, IouBev, EcIou };
enum class View { Roadside, Ego };

struct ApConfig {
  // 101-point recall interpolation; all-point (exact area) otherwise.
  bool interpolate_101 = true;
  double min_recall = 0.0;
  double min_precision = 0.0;
};

struct NdsConfig {
  double ap_weight = 5.0;
  double ate_weight = 1.0;
  // Classes without true positives score the worst TP values (USC/IoU/EC-IoU 0, ATE 1).
  bool zero_tp_worst_case = true;
};

struct MatchConfig {
  Affinity affinity = Affinity::CenterDistance;
  std::map<Family, double> thresholds{{Family::CarLike, 0.7}, {Family::BicycleLike, 0.5}, {Family::Pedestrian, 0.3}};
  std::vector<double> distance_thresholds{0.5, 1.0, 2.0, 4.0};
  // Center-distance threshold whose matching defines the TP pairs for TP statistics.
  double tp_distance_threshold = 2.0;
  double alpha = 2.0;
  View view = View::Roadside;
  double score_floor = 0.05;
  double eps_dist = kDefaultEpsDist;
  bool clamp_output = true;
  ApConfig ap;
  NdsConfig nds;
  // Also report EC-mAP, EV-mAP and RV-mAP.
  bool secondary_metrics = true;

  eciou::EcIouParams eciou_params() const { return {alpha, eps_dist, clamp_output}; }
};

inline void validate(const MatchConfig& cfg) {
  eciou::validate(cfg.eciou_params());
  for (const auto& [family, tau] : cfg.thresholds)
    if (!(tau > 0.0 && tau <= 1.0)) fail(ErrorKind::ConfigError, "overlap thresholds must lie in (0, 1]");
  if (cfg.affinity == Affinity::CenterDistance && cfg.distance_thresholds.empty())
    fail(ErrorKind::ConfigError, "center-distance matching needs at least one distance threshold");
  for (double d : cfg.distance_thresholds)
    if (!(d > 0.0)) fail(ErrorKind::ConfigError, "distance thresholds must be > 0");
  if (!(cfg.tp_distance_threshold > 0.0)) fail(ErrorKind::ConfigError, "tp_distance_threshold must be > 0");
  if (!(cfg.score_floor >= 0.0 && cfg.score_floor <= 1.0)) fail(ErrorKind::ConfigError, "score_floor must lie in [0, 1]");
  if (!(cfg.ap.min_recall >= 0.0 && cfg.ap.min_recall < 1.0) ||
      !(cfg.ap.min_precision >= 0.0 && cfg.ap.min_precision < 1.0))
    fail(ErrorKind::ConfigError, "min_recall and min_precision must lie in [0, 1)");
  if (!(cfg.nds.ap_weight >= 0.0 && cfg.nds.ate_weight >= 0.0) || cfg.nds.ap_weight + cfg.nds.ate_weight <= 0.0)
    fail(ErrorKind::ConfigError, "NDS weights must be non-negative and not all zero");
}

// ---------------------------------------------------------------------------
// Frame preparation

inline Box3D to_ego(const Box3D& b, const RigidTransform& world_to_ego) {
  Box3D out = b;
  out.center = world_to_ego.apply(b.center);
  out.yaw = normalize_angle(b.yaw + world_to_ego.yaw());
  return out;
}

inline FrameAnnotations to_ego_frame(const FrameAnnotations& frame) {
  if (!frame.ego_pose) return frame;
  FrameAnnotations out = frame;
  out.ego_pose.reset();
  for (auto& gt : out.ground_truths) gt.box = to_ego(gt.box, *frame.ego_pose);
  for (auto& det : out.detections) det = to_ego(det, *frame.ego_pose);
  return out;
}

// Horizontal bearing test of an ego-frame point against the camera FOV.
inline bool in_camera_fov(const CameraModel& cam, const Vec3& point) {
  const Vec3 c = cam.ego_to_cam.apply(point);
  if (!(c.z > kDefaultEpsDepth)) return false;
  if (!cam.fov) return true;
  return std::atan2(std::abs(c.x), c.z) <= cam.fov->horizontal + 1e-12;
}

// Keeps ground truths whose BEV centroid lies inside the camera FOV and that
// are not fully occluded; detections are filtered by the same FOV test.
inline FrameAnnotations ego_view_filter(const FrameAnnotations& frame) {
  if (!frame.camera) fail(ErrorKind::MissingCamera, "frame '" + frame.frame_id + "' has no camera for ego-view filtering");
  const FrameAnnotations ego = to_ego_frame(frame);
  const CameraModel& cam = *ego.camera;
  FrameAnnotations out = ego;
  out.ground_truths.clear();
  out.detections.clear();
  for (const auto& gt : ego.ground_truths) {
    if (gt.visibility == Visibility::Occluded || gt.visibility == Visibility::OutOfFov) continue;
    if (in_camera_fov(cam, gt.box.center)) out.ground_truths.push_back(gt);
  }
  for (const auto& det : ego.detections)
    if (in_camera_fov(cam, det.center)) out.detections.push_back(det);
  return out;
}

inline Family family_of(const std::map<std::string, Family>& class_map, const std::string& label) {
  const auto it = class_map.find(label);
  if (it == class_map.end()) fail(ErrorKind::UnmappedLabel, "label '" + label + "' is not in class_map");
  return it->second;
}

// Sorts frames by id, moves boxes to the ego frame, drops ignored labels and
// low-score detections, and applies the ego-view filter when requested.
inline std::vector<FrameAnnotations> prepare_frames(const Dataset& ds, const MatchConfig& cfg, View view) {
  std::vector<FrameAnnotations> frames;
  frames.reserve(ds.frames.size());
  for (const auto& f : ds.frames) {
    FrameAnnotations ego = view == View::Ego ? ego_view_filter(f) : to_ego_frame(f);
    std::erase_if(ego.ground_truths,
                  [&](const GroundTruth& g) { return family_of(ds.class_map, g.box.label) == Family::Ignore; });
    std::erase_if(ego.detections, [&](const Box3D& d) {
      if (!d.score) fail(ErrorKind::InvalidBox, "detection without score in frame '" + f.frame_id + "'");
      return family_of(ds.class_map, d.label) == Family::Ignore || *d.score < cfg.score_floor;
    });
    frames.push_back(std::move(ego));
  }
  std::stable_sort(frames.begin(), frames.end(),
                   [](const FrameAnnotations& a, const FrameAnnotations& b) { return a.frame_id < b.frame_id; });
  for (std::size_t i = 1; i < frames.size(); ++i)
    if (frames[i].frame_id == frames[i - 1].frame_id)
      fail(ErrorKind::SchemaError, "duplicate frame_id '" + frames[i].frame_id + "'");
  return frames;
}

// ---------------------------------------------------------------------------
// Matching

struct TpPair {
  std::size_t frame = 0;
  std::size_t det = 0;
  std::size_t gt = 0;
  double affinity = 0.0;
};

struct SkippedPair {
  std::size_t frame = 0;
  std::size_t det = 0;
  std::size_t gt = 0;
  std::string reason;
};

struct ScoredDetection {
  double score = 0.0;
  bool tp = false;
};

struct ClassMatchSet {
  std::size_t num_gt = 0;
  std::vector<TpPair> tps;
  std::vector<std::pair<std::size_t, std::size_t>> fps;  // (frame, det)
  std::vector<std::pair<std::size_t, std::size_t>> fns;  // (frame, gt)
  // Every detection of the class, ranked by descending score (stable in frame/detection order).
  std::vector<ScoredDetection> ranked;
};

struct MatchSet {
  std::map<std::string, ClassMatchSet> classes;
  std::vector<SkippedPair> skipped;
};

struct MatchSpec {
  Affinity affinity = Affinity::IouBev;
  // Overlap affinities: per-label threshold; a pair matches when affinity > threshold.
  std::map<std::string, double> overlap_thresholds;
  // Center distance: a pair matches when distance < distance_threshold.
  double distance_threshold = 2.0;
  eciou::EcIouParams eciou;
  Vec2 origin{};
};

// Candidate affinity; NaN marks a pair that could not be scored.
struct AffinityMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col)
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;
};

// Rows (detections) in descending score order, ties by row index; each claims
// the unclaimed column with the highest affinity above `threshold`, ties by
// the lower column index.
inline Assignment greedy_assign(std::span<const double> scores, const AffinityMatrix& aff, double threshold) {
  std::vector<std::size_t> order(aff.rows);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<bool> claimed(aff.cols, false);
  Assignment out;
  for (std::size_t r : order) {
    std::size_t best = aff.cols;
    double best_aff = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < aff.cols; ++c) {
      if (claimed[c]) continue;
      const double a = aff.at(r, c);
      if (std::isnan(a) || !(a > threshold)) continue;
      if (a > best_aff) {
        best_aff = a;
        best = c;
      }
    }
    if (best == aff.cols) {
      out.unmatched_rows.push_back(r);
    } else {
      claimed[best] = true;
      out.pairs.emplace_back(r, best);
    }
  }
  for (std::size_t c = 0; c < aff.cols; ++c)
    if (!claimed[c]) out.unmatched_cols.push_back(c);
  return out;
}

namespace detail {

struct FrameClassResult {
  std::size_t num_gt = 0;
  std::vector<TpPair> tps;
  std::vector<std::pair<std::size_t, std::size_t>> fps;
  std::vector<std::pair<std::size_t, std::size_t>> fns;
  std::vector<std::pair<std::size_t, ScoredDetection>> dets;  // (det index, scored)
};

struct FrameResult {
  std::map<std::string, FrameClassResult> classes;
  std::vector<SkippedPair> skipped;
};

inline FrameResult match_frame(const FrameAnnotations& frame, std::size_t frame_index, const MatchSpec& spec) {
  std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> by_label;
  for (std::size_t i = 0; i < frame.detections.size(); ++i) by_label[frame.detections[i].label].first.push_back(i);
  for (std::size_t j = 0; j < frame.ground_truths.size(); ++j) by_label[frame.ground_truths[j].box.label].second.push_back(j);

  FrameResult out;
  for (const auto& [label, idx] : by_label) {
    const auto& [dets, gts] = idx;
    AffinityMatrix aff{dets.size(), gts.size(), std::vector<double>(dets.size() * gts.size())};
    std::vector<double> scores(dets.size());
    for (std::size_t r = 0; r < dets.size(); ++r) {
      const Box3D& d = frame.detections[dets[r]];
      scores[r] = d.score.value_or(0.0);
      for (std::size_t c = 0; c < gts.size(); ++c) {
        const Box3D& g = frame.ground_truths[gts[c]].box;
        double a = std::numeric_limits<double>::quiet_NaN();
        try {
          switch (spec.affinity) {
            case Affinity::CenterDistance: a = -norm(d.bev_center() - g.bev_center()); break;
            case Affinity::IouBev: a = eciou::bev_iou(d, g); break;
            case Affinity::EcIou: a = eciou::ec_iou(d, g, spec.origin, spec.eciou); break;
          }
        } catch (const Error& e) {
          out.skipped.push_back({frame_index, dets[r], gts[c], std::string(to_string(e.kind()))});
        }
        aff.values[r * gts.size() + c] = a;
      }
    }
    double threshold = 0.0;
    if (spec.affinity == Affinity::CenterDistance) {
      threshold = -spec.distance_threshold;
    } else {
      const auto it = spec.overlap_thresholds.find(label);
      if (it == spec.overlap_thresholds.end()) fail(ErrorKind::ConfigError, "no matching threshold for label '" + label + "'");
      threshold = it->second;
    }
    const Assignment asg = greedy_assign(scores, aff, threshold);
    FrameClassResult& res = out.classes[label];
    res.num_gt = gts.size();
    std::vector<bool> is_tp(dets.size(), false);
    for (const auto& [r, c] : asg.pairs) {
      res.tps.push_back({frame_index, dets[r], gts[c], aff.at(r, c)});
      is_tp[r] = true;
    }
    for (std::size_t r : asg.unmatched_rows) res.fps.emplace_back(frame_index, dets[r]);
    for (std::size_t c : asg.unmatched_cols) res.fns.emplace_back(frame_index, gts[c]);
    for (std::size_t r = 0; r < dets.size(); ++r) res.dets.push_back({dets[r], {scores[r], is_tp[r]}});
  }
  return out;
}

}  // namespace detail

// Matches every frame independently (in parallel) and merges the per-frame
// results in frame order.
inline MatchSet greedy_match(const std::vector<FrameAnnotations>& frames, const MatchSpec& spec, unsigned workers = 1) {
  std::vector<detail::FrameResult> per_frame(frames.size());
  parallel_for(frames.size(), workers, [&](std::size_t i) { per_frame[i] = detail::match_frame(frames[i], i, spec); });

  MatchSet out;
  for (auto& fr : per_frame) {
    for (auto& [label, res] : fr.classes) {
      ClassMatchSet& cls = out.classes[label];
      cls.num_gt += res.num_gt;
      cls.tps.insert(cls.tps.end(), res.tps.begin(), res.tps.end());
      cls.fps.insert(cls.fps.end(), res.fps.begin(), res.fps.end());
      cls.fns.insert(cls.fns.end(), res.fns.begin(), res.fns.end());
      std::sort(res.dets.begin(), res.dets.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [idx, sd] : res.dets) cls.ranked.push_back(sd);
    }
    out.skipped.insert(out.skipped.end(), fr.skipped.begin(), fr.skipped.end());
  }
  for (auto& [label, cls] : out.classes)
    std::stable_sort(cls.ranked.begin(), cls.ranked.end(),
                     [](const ScoredDetection& a, const ScoredDetection& b) { return a.score > b.score; });
  return out;
}

// ---------------------------------------------------------------------------
// Average precision

// `ranked` must be sorted by descending score. num_gt must be > 0.
inline double average_precision(std::span<const ScoredDetection> ranked, std::size_t num_gt, const ApConfig& cfg = {}) {
  if (num_gt == 0) fail(ErrorKind::InvariantViolation, "average precision of a class without ground truth");
  const std::size_t n = ranked.size();
  if (n == 0) return 0.0;
  std::vector<double> precision(n);
  std::vector<double> recall(n);
  std::size_t tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (ranked[k].tp) ++tp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(tp) / static_cast<double>(num_gt);
  }
  // Precision envelope: best precision at this or any higher recall.
  std::vector<double> envelope(precision);
  for (std::size_t k = n - 1; k-- > 0;) envelope[k] = std::max(envelope[k], envelope[k + 1]);

  if (!cfg.interpolate_101) {
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      ap += (recall[k] - prev_recall) * envelope[k];
      prev_recall = recall[k];
    }
    return ap;
  }

  std::array<double, 101> interp{};
  std::size_t k = 0;
  for (std::size_t i = 0; i <= 100; ++i) {
    const double r = static_cast<double>(i) / 100.0;
    while (k < n && recall[k] < r) ++k;
    interp[i] = k < n ? envelope[k] : 0.0;
  }
  if (cfg.min_recall <= 0.0 && cfg.min_precision <= 0.0) {
    double sum = 0.0;
    for (double p : interp) sum += p;
    return sum / 101.0;
  }
  const auto first = static_cast<std::size_t>(std::lround(100.0 * cfg.min_recall)) + 1;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = first; i <= 100; ++i, ++count) sum += std::max(0.0, interp[i] - cfg.min_precision);
  if (count == 0) return 0.0;
  return sum / static_cast<double>(count) / (1.0 - cfg.min_precision);
}

// Mean AP of one class over several matchings (e.g. center-distance thresholds).
inline double class_average_precision(std::span<const MatchSet> per_threshold, const std::string& label,
                                      const ApConfig& cfg = {}) {
  if (per_threshold.empty()) return 0.0;
  double sum = 0.0;
  for (const MatchSet& ms : per_threshold) {
    const auto it = ms.classes.find(label);
    if (it == ms.classes.end() || it->second.num_gt == 0)
      fail(ErrorKind::InvariantViolation, "class '" + label + "' has no ground truth");
    sum += average_precision(it->second.ranked, it->second.num_gt, cfg);
  }
  return sum / static_cast<double>(per_threshold.size());
}

// ---------------------------------------------------------------------------
// True-positive statistics

struct TpStats {
  double ausc = 0.0;
  double aiou = 0.0;
  double aeciou = 0.0;
  double ate = 0.0;
  std::size_t tp = 0;
  std::size_t usc_samples = 0;
  std::size_t eciou_samples = 0;
  std::map<std::string, std::size_t> skipped;
};

inline std::map<std::string, TpStats> tp_error_stats(const MatchSet& ms, const std::vector<FrameAnnotations>& frames,
                                                     const eciou::EcIouParams& params, bool zero_tp_worst_case = true,
                                                     const Vec2& origin = {}) {
  std::map<std::string, TpStats> out;
  for (const auto& [label, cls] : ms.classes) {
    TpStats s;
    double usc_sum = 0.0;
    double iou_sum = 0.0;
    double ec_sum = 0.0;
    double te_sum = 0.0;
    for (const TpPair& tp : cls.tps) {
      const FrameAnnotations& f = frames[tp.frame];
      const Box3D& d = f.detections[tp.det];
      const Box3D& g = f.ground_truths[tp.gt].box;
      iou_sum += eciou::bev_iou(d, g);
      te_sum += norm(d.bev_center() - g.bev_center());
      try {
        ec_sum += eciou::ec_iou(d, g, origin, params);
        ++s.eciou_samples;
      } catch (const Error& e) {
        ++s.skipped[std::string("eciou:") + std::string(to_string(e.kind()))];
      }
      if (!f.camera) {
        ++s.skipped["usc:MissingCamera"];
        continue;
      }
      try {
        usc_sum += usc::usc_pair(d, g, *f.camera, origin, kDefaultEpsDepth, params.eps_dist).usc;
        ++s.usc_samples;
      } catch (const Error& e) {
        ++s.skipped[std::string("usc:") + std::string(to_string(e.kind()))];
      }
    }
    s.tp = cls.tps.size();
    auto mean = [&](double sum, std::size_t n, double worst) {
      if (n == 0) return zero_tp_worst_case ? worst : 0.0;
      return sum / static_cast<double>(n);
    };
    s.ausc = mean(usc_sum, s.usc_samples, 0.0);
    s.aiou = mean(iou_sum, s.tp, 0.0);
    s.aeciou = mean(ec_sum, s.eciou_samples, 0.0);
    s.ate = mean(te_sum, s.tp, 1.0);
    out[label] = std::move(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Composition

struct TpTerm {
  double error = 0.0;
  double weight = 1.0;
};

// (w_AP mAP + sum_k w_k (1 - min(1, err_k))) / (w_AP + sum_k w_k)
inline double compose_nds(double map, std::span<const TpTerm> terms, double ap_weight = 5.0) {
  double num = ap_weight * map;
  double den = ap_weight;
  for (const TpTerm& t : terms) {
    num += t.weight * (1.0 - std::min(1.0, std::max(0.0, t.error)));
    den += t.weight;
  }
  if (!(den > 0.0)) fail(ErrorKind::ConfigError, "NDS weights sum to zero");
  return num / den;
}

inline double compose_nds_usc(double nds, double mausc) { return 0.5 * (nds + mausc); }

// ---------------------------------------------------------------------------
// Full evaluation

struct ClassReport {
  std::string label;
  Family family = Family::CarLike;
  std::size_t num_gt = 0;
  std::size_t num_det = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double ap = 0.0;
  double ausc = 0.0;
  double aiou = 0.0;
  double aeciou = 0.0;
  double ate = 0.0;
  std::optional<double> ec_ap;
};

struct MetricReport {
  std::vector<ClassReport> classes;          // classes with ground truth, sorted by label
  std::vector<std::string> excluded_classes; // detections only, no ground truth
  std::size_t frames = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::size_t> skipped_reasons;
  double map = 0.0;
  double mausc = 0.0;
  double maiou = 0.0;
  double maeciou = 0.0;
  double mate = 0.0;
  double mate_prime = 0.0;
  double nds = 0.0;
  double nds_usc = 0.0;
  std::optional<double> ec_map;
  std::optional<double> ev_map;
  std::optional<double> rv_map;
  std::vector<std::string> notes;
};

inline std::map<std::string, double> overlap_thresholds(const std::map<std::string, Family>& class_map,
                                                        const MatchConfig& cfg) {
  std::map<std::string, double> out;
  for (const auto& [label, family] : class_map) {
    if (family == Family::Ignore) continue;
    const auto it = cfg.thresholds.find(family);
    if (it == cfg.thresholds.end()) fail(ErrorKind::ConfigError, "no threshold configured for the family of '" + label + "'");
    out[label] = it->second;
  }
  return out;
}

namespace detail {

// Per-class mean AP over the given matchings, restricted to classes with GT.
inline std::map<std::string, double> per_class_ap(std::span<const MatchSet> runs, const ApConfig& ap) {
  std::map<std::string, double> out;
  if (runs.empty()) return out;
  for (const auto& [label, cls] : runs.front().classes)
    if (cls.num_gt > 0) out[label] = class_average_precision(runs, label, ap);
  return out;
}

inline double mean_of(const std::map<std::string, double>& values) {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (const auto& [k, v] : values) s += v;
  return s / static_cast<double>(values.size());
}

}  // namespace detail

// mAP over non-empty classes with the given overlap affinity and class thresholds.
inline double overlap_map(const Dataset& ds, const MatchConfig& cfg, Affinity affinity, View view, unsigned workers = 1,
                          std::map<std::string, double>* per_class = nullptr) {
  const std::vector<FrameAnnotations> frames = prepare_frames(ds, cfg, view);
  MatchSpec spec;
  spec.affinity = affinity;
  spec.overlap_thresholds = overlap_thresholds(ds.class_map, cfg);
  spec.eciou = cfg.eciou_params();
  const MatchSet ms = greedy_match(frames, spec, workers);
  const auto aps = detail::per_class_ap(std::span<const MatchSet>(&ms, 1), cfg.ap);
  if (per_class) *per_class = aps;
  return detail::mean_of(aps);
}

// Mean AP under EC-IoU matching with class-dependent thresholds.
inline double ec_map(const Dataset& ds, const MatchConfig& cfg, unsigned workers = 1,
                     std::map<std::string, double>* per_class = nullptr) {
  return overlap_map(ds, cfg, Affinity::EcIou, cfg.view, workers, per_class);
}

inline MetricReport evaluate(const Dataset& ds, const MatchConfig& cfg, unsigned workers = 1) {
  validate(cfg);
  const std::vector<FrameAnnotations> frames = prepare_frames(ds, cfg, cfg.view);

  std::vector<MatchSet> ap_runs;
  MatchSet tp_run;
  MatchSpec spec;
  spec.affinity = cfg.affinity;
  spec.eciou = cfg.eciou_params();
  if (cfg.affinity == Affinity::CenterDistance) {
    bool tp_run_found = false;
    for (double d : cfg.distance_thresholds) {
      spec.distance_threshold = d;
      ap_runs.push_back(greedy_match(frames, spec, workers));
      if (d == cfg.tp_distance_threshold) {
        tp_run = ap_runs.back();
        tp_run_found = true;
      }
    }
    if (!tp_run_found) {
      spec.distance_threshold = cfg.tp_distance_threshold;
      tp_run = greedy_match(frames, spec, workers);
    }
  } else {
    spec.overlap_thresholds = overlap_thresholds(ds.class_map, cfg);
    ap_runs.push_back(greedy_match(frames, spec, workers));
    tp_run = ap_runs.front();
  }

  const auto aps = detail::per_class_ap(ap_runs, cfg.ap);
  const auto stats = tp_error_stats(tp_run, frames, cfg.eciou_params(), cfg.nds.zero_tp_worst_case);

  MetricReport rep;
  rep.frames = frames.size();
  for (const auto& [label, cls] : tp_run.classes) {
    if (cls.num_gt == 0) {
      rep.excluded_classes.push_back(label);
      continue;
    }
    const TpStats& s = stats.at(label);
    ClassReport c;
    c.label = label;
    c.family = family_of(ds.class_map, label);
    c.num_gt = cls.num_gt;
    c.num_det = cls.ranked.size();
    c.tp = cls.tps.size();
    c.fp = cls.fps.size();
    c.fn = cls.fns.size();
    c.ap = aps.at(label);
    c.ausc = s.ausc;
    c.aiou = s.aiou;
    c.aeciou = s.aeciou;
    c.ate = s.ate;
    for (const auto& [reason, n] : s.skipped) rep.skipped_reasons[reason] += n;
    rep.tp += c.tp;
    rep.fp += c.fp;
    rep.fn += c.fn;
    if (c.tp != s.tp || c.tp + c.fn != c.num_gt)
      fail(ErrorKind::InvariantViolation, "inconsistent match counts for class '" + label + "'");
    rep.classes.push_back(std::move(c));
  }
  for (const auto& sp : tp_run.skipped) ++rep.skipped_reasons["match:" + sp.reason];
  for (const auto& [reason, n] : rep.skipped_reasons) rep.skipped += n;

  if (!rep.classes.empty()) {
    const double k = static_cast<double>(rep.classes.size());
    for (const auto& c : rep.classes) {
      rep.map += c.ap;
      rep.mausc += c.ausc;
      rep.maiou += c.aiou;
      rep.maeciou += c.aeciou;
      rep.mate += c.ate;
    }
    rep.map /= k;
    rep.mausc /= k;
    rep.maiou /= k;
    rep.maeciou /= k;
    rep.mate /= k;
  }
  rep.mate_prime = 1.0 - std::min(1.0, rep.mate);
  const TpTerm terms[] = {{rep.mate, cfg.nds.ate_weight}};
  rep.nds = compose_nds(rep.map, terms, cfg.nds.ap_weight);
  rep.nds_usc = compose_nds_usc(rep.nds, rep.mausc);

  if (cfg.secondary_metrics) {
    std::map<std::string, double> ec_per_class;
    rep.ec_map = overlap_map(ds, cfg, Affinity::EcIou, cfg.view, workers, &ec_per_class);
    for (auto& c : rep.classes) {
      const auto it = ec_per_class.find(c.label);
      if (it != ec_per_class.end()) c.ec_ap = it->second;
    }
    rep.rv_map = overlap_map(ds, cfg, Affinity::IouBev, View::Roadside, workers);
    const bool cameras = std::all_of(ds.frames.begin(), ds.frames.end(),
                                     [](const FrameAnnotations& f) { return f.camera.has_value(); });
    if (cameras)
      rep.ev_map = overlap_map(ds, cfg, Affinity::IouBev, View::Ego, workers);
    else
      rep.notes.push_back("EV-mAP not computed: at least one frame has no camera");
  }
  return rep;
}

}  // namespace safedet::eval
