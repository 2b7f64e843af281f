#pragma once

// Ego-centric IoU. Ground-truth area is reweighted by
//   w(x, y) = (rho(center of G) / rho(x, y))^alpha
// where rho is the distance to the ego origin. Weighted areas of convex
// polygons use the area times the geometric mean of the vertex weights.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "safedet/core.hpp"
#include "safedet/dual.hpp"
#include "safedet/geometry.hpp"

namespace safedet::eciou {

struct EcIouParams {
  double alpha = 2.0;
  double eps_dist = kDefaultEpsDist;
  bool clamp_output = true;
};

inline void validate(const EcIouParams& params) {
  if (!(params.alpha >= 0.0) || !std::isfinite(params.alpha)) fail(ErrorKind::ConfigError, "alpha must be >= 0");
  if (!(params.eps_dist > 0.0)) fail(ErrorKind::ConfigError, "eps_dist must be > 0");
}

// Partial derivatives of EC-IoU with respect to the prediction footprint.
struct EcIouGrad {
  double d_cx = 0.0;
  double d_cy = 0.0;
  double d_w = 0.0;
  double d_l = 0.0;
  double d_yaw = 0.0;

  friend bool operator==(const EcIouGrad&, const EcIouGrad&) = default;
};

enum class GradStatus : std::uint8_t {
  Smooth = 0,
  NonOverlapping = 1,
  // The intersection vertex set changes within `topology_tol` of this
  // configuration; the gradient is the one-sided derivative of the branch taken.
  TopologyBoundary = 2,
};

struct GradResult {
  double value = 0.0;
  EcIouGrad grad;
  GradStatus status = GradStatus::Smooth;
  // Smallest distance (m) of any clipped vertex to a clip line.
  double clip_margin = std::numeric_limits<double>::infinity();
};

inline double weight(const Vec2& point, const Vec2& g_center, const Vec2& origin, const EcIouParams& params) {
  const double rp = norm(point - origin);
  const double rc = norm(g_center - origin);
  if (!(rp > params.eps_dist) || !(rc > params.eps_dist))
    fail(ErrorKind::DegenerateDistance, "distance to the ego origin below eps_dist");
  return std::pow(rc / rp, params.alpha);
}

namespace detail {

// log of the geometric-mean vertex weight of `poly`.
template <class T>
T log_mean_weight(const BasicPolygon<T>& poly, const T& log_center_dist, const Vec2& origin, double alpha) {
  using std::log;
  T acc(0.0);
  const BasicVec2<T> o{T(origin.x), T(origin.y)};
  for (const auto& v : poly) {
    const BasicVec2<T> r = v - o;
    acc += log(r.x * r.x + r.y * r.y);
  }
  const double m = static_cast<double>(poly.size());
  return (log_center_dist - acc * (0.5 / m)) * alpha;
}

template <class T>
struct CoreResult {
  T value;
  T raw;
  T inter_area;
  bool empty = true;
  bool clamped = false;
};

template <class T>
CoreResult<T> ec_iou_core(const BasicPolygon<T>& p, const BasicPolygon<T>& g, const BasicVec2<T>& g_center,
                          const Vec2& origin, const EcIouParams& params, ClipTrace* trace) {
  using std::exp;
  using std::log;
  const T area_g = polygon_area(g);
  if (value_of(area_g) < kMinArea) fail(ErrorKind::EmptyGroundTruth, "ground-truth footprint has zero area");

  BevPolygon g_val;
  g_val.reserve(g.size());
  for (const auto& v : g) g_val.push_back(value_of(v));
  if (norm(closest_point(g_val, origin) - origin) <= params.eps_dist)
    fail(ErrorKind::DegenerateDistance, "ground-truth footprint contains or touches the ego origin");

  CoreResult<T> r{T(0.0), T(0.0), T(0.0)};
  const BasicPolygon<T> inter = convex_intersection(p, g, trace);
  if (inter.empty()) return r;
  r.empty = false;

  const BasicVec2<T> c = g_center - BasicVec2<T>{T(origin.x), T(origin.y)};
  const T log_center = log(c.x * c.x + c.y * c.y) * 0.5;
  const T area_i = polygon_area(inter);
  const T area_p = polygon_area(p);
  const T wa_i = area_i * exp(log_mean_weight(inter, log_center, origin, params.alpha));
  const T wa_g = area_g * exp(log_mean_weight(g, log_center, origin, params.alpha));
  r.inter_area = area_i;
  r.raw = wa_i / (wa_g + (area_p - area_i));
  r.value = r.raw;
  if (params.clamp_output) {
    if (r.raw > 1.0) {
      r.value = T(1.0);
      r.clamped = true;
    } else if (r.raw < 0.0) {
      r.value = T(0.0);
      r.clamped = true;
    }
  }
  return r;
}

}  // namespace detail

// Area(d) times the geometric mean of the vertex weights of d.
inline double weighted_area(const BevPolygon& d, double g_center_dist, const Vec2& origin,
                            const EcIouParams& params) {
  if (!(g_center_dist > params.eps_dist))
    fail(ErrorKind::DegenerateDistance, "ground-truth center within eps_dist of the ego origin");
  if (d.size() < 3) return 0.0;
  for (const auto& v : d)
    if (!(norm(v - origin) > params.eps_dist))
      fail(ErrorKind::DegenerateDistance, "polygon vertex within eps_dist of the ego origin");
  return polygon_area(d) * std::exp(detail::log_mean_weight(d, std::log(g_center_dist), origin, params.alpha));
}

// EC-IoU of two convex polygons; the weighting center is the centroid of g.
inline double ec_iou(BevPolygon p, BevPolygon g, const Vec2& origin, const EcIouParams& params) {
  make_ccw(p);
  make_ccw(g);
  if (polygon_area(g) < kMinArea) fail(ErrorKind::EmptyGroundTruth, "ground-truth footprint has zero area");
  return detail::ec_iou_core<double>(p, g, polygon_centroid(g), origin, params, nullptr).value;
}

// Footprint form; the weighting center is the box center of g.
inline double ec_iou(const Footprint& p, const Footprint& g, const Vec2& origin, const EcIouParams& params) {
  return detail::ec_iou_core<double>(footprint_polygon(p), footprint_polygon(g), Vec2{g.cx, g.cy}, origin, params,
                                     nullptr)
      .value;
}

inline double ec_iou(const Box3D& p, const Box3D& g, const Vec2& origin, const EcIouParams& params) {
  return ec_iou(p.footprint(), g.footprint(), origin, params);
}

// 1 - EC-IoU.
inline double ec_iou_loss(const Box3D& p, const Box3D& g, const Vec2& origin, const EcIouParams& params) {
  return 1.0 - ec_iou(p, g, origin, params);
}

inline double bev_iou(const BevPolygon& p, const BevPolygon& g) {
  const BevPolygon inter = convex_intersection(p, g);
  if (inter.empty()) return 0.0;
  const double ai = polygon_area(inter);
  return ai / (polygon_area(p) + polygon_area(g) - ai);
}

inline double bev_iou(const Box3D& p, const Box3D& g) { return bev_iou(bev_polygon(p), bev_polygon(g)); }

// Gradient of EC-IoU with respect to (cx, cy, w, l, yaw) of the prediction,
// propagated exactly through the clipping and weighting with forward-mode
// dual numbers.
inline GradResult ec_iou_grad(const Footprint& p, const Footprint& g, const Vec2& origin, const EcIouParams& params,
                              double topology_tol = 1e-7) {
  using D = Dual<5>;
  const BasicFootprint<D> pd{D::variable(p.cx, 0), D::variable(p.cy, 1), D::variable(p.width, 2),
                             D::variable(p.length, 3), D::variable(p.yaw, 4)};
  const BasicFootprint<D> gd{D(g.cx), D(g.cy), D(g.width), D(g.length), D(g.yaw)};

  ClipTrace trace;
  const auto core = detail::ec_iou_core<D>(footprint_polygon(pd), footprint_polygon(gd), BasicVec2<D>{gd.cx, gd.cy},
                                           origin, params, &trace);
  GradResult out;
  out.value = core.value.v;
  out.clip_margin = trace.min_margin;
  if (core.empty || core.inter_area.v <= 1e-9) {
    out.status = GradStatus::NonOverlapping;
    return out;
  }
  const auto& d = core.value.d;
  out.grad = {d[0], d[1], d[2], d[3], d[4]};
  const bool near_clamp = params.clamp_output && std::abs(core.raw.v - 1.0) <= topology_tol;
  if (trace.min_margin <= topology_tol || trace.merged_vertices || near_clamp)
    out.status = GradStatus::TopologyBoundary;
  return out;
}

inline GradResult ec_iou_grad(const Box3D& p, const Box3D& g, const Vec2& origin, const EcIouParams& params) {
  return ec_iou_grad(p.footprint(), g.footprint(), origin, params);
}

// Row-major batch kernel: N rows of (cx, cy, w, l, yaw) for predictions and
// ground truths, one shared origin (2 values) or one per row (2N values).
// Outputs are positionally aligned with the inputs.
struct BatchResult {
  std::vector<double> values;      // N
  std::vector<double> grads;       // N x 5
  std::vector<std::uint8_t> flags; // N, GradStatus
};

inline BatchResult ec_iou_batch(std::span<const double> pred, std::span<const double> gt,
                                std::span<const double> origin, double alpha, EcIouParams params = {},
                                unsigned workers = 1) {
  params.alpha = alpha;
  validate(params);
  if (pred.size() % 5 != 0) fail(ErrorKind::ValidationError, "pred must hold N x 5 values");
  if (gt.size() != pred.size()) fail(ErrorKind::ValidationError, "pred and gt row counts differ");
  const std::size_t n = pred.size() / 5;
  if (origin.size() != 2 && origin.size() != 2 * n)
    fail(ErrorKind::ValidationError, "origin must hold 2 or 2N values");

  auto row_error = [](std::size_t row, const std::string& what) {
    fail(ErrorKind::ValidationError, "row " + std::to_string(row) + ": " + what);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < 5; ++k)
      if (!std::isfinite(pred[5 * i + k]) || !std::isfinite(gt[5 * i + k])) row_error(i, "non-finite entry");
    if (!(pred[5 * i + 2] > 0.0 && pred[5 * i + 3] > 0.0)) row_error(i, "prediction width/length must be > 0");
    if (!(gt[5 * i + 2] > 0.0 && gt[5 * i + 3] > 0.0)) row_error(i, "ground-truth width/length must be > 0");
  }

  BatchResult out;
  out.values.assign(n, 0.0);
  out.grads.assign(5 * n, 0.0);
  out.flags.assign(n, 0);
  std::vector<std::string> errors(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const Footprint p{pred[5 * i], pred[5 * i + 1], pred[5 * i + 2], pred[5 * i + 3], pred[5 * i + 4]};
    const Footprint g{gt[5 * i], gt[5 * i + 1], gt[5 * i + 2], gt[5 * i + 3], gt[5 * i + 4]};
    const Vec2 o = origin.size() == 2 ? Vec2{origin[0], origin[1]} : Vec2{origin[2 * i], origin[2 * i + 1]};
    try {
      const GradResult r = ec_iou_grad(p, g, o, params);
      out.values[i] = ec_iou(p, g, o, params);
      out.flags[i] = static_cast<std::uint8_t>(r.status);
      const double gr[5] = {r.grad.d_cx, r.grad.d_cy, r.grad.d_w, r.grad.d_l, r.grad.d_yaw};
      for (int k = 0; k < 5; ++k) out.grads[5 * i + k] = gr[k];
    } catch (const Error& e) {
      errors[i] = e.detail();
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    if (!errors[i].empty()) row_error(i, errors[i]);
  return out;
}

}  // namespace safedet::eciou
