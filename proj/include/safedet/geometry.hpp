#pragma once

// Coordinate conventions
//   ego frame:    x forward, y left, z up (meters); yaw about +z, radians.
//   camera frame: z along the optical axis, +a (x) right, +b (y) down.
//
// Box corner ordering (box_corners): the bottom face (z = -h/2) first, then
// the top face, each counter-clockwise seen from above, starting at the
// front-left corner. In box-local (length, width) coordinates:
//   0 (+l/2, +w/2)  1 (-l/2, +w/2)  2 (-l/2, -w/2)  3 (+l/2, -w/2)
//   4..7 same footprint at z = +h/2.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "safedet/core.hpp"
#include "safedet/dual.hpp"

namespace safedet {

template <class T>
struct BasicVec2 {
  T x{};
  T y{};

  friend BasicVec2 operator+(const BasicVec2& a, const BasicVec2& b) { return {a.x + b.x, a.y + b.y}; }
  friend BasicVec2 operator-(const BasicVec2& a, const BasicVec2& b) { return {a.x - b.x, a.y - b.y}; }
  friend BasicVec2 operator*(const BasicVec2& a, const T& s) { return {a.x * s, a.y * s}; }
  friend bool operator==(const BasicVec2&, const BasicVec2&) = default;
};

using Vec2 = BasicVec2<double>;

template <class T>
T dot(const BasicVec2<T>& a, const BasicVec2<T>& b) {
  return a.x * b.x + a.y * b.y;
}

template <class T>
T cross(const BasicVec2<T>& a, const BasicVec2<T>& b) {
  return a.x * b.y - a.y * b.x;
}

template <class T>
T norm(const BasicVec2<T>& a) {
  using std::sqrt;
  return sqrt(a.x * a.x + a.y * a.y);
}

template <class T>
Vec2 value_of(const BasicVec2<T>& p) {
  return {value_of(p.x), value_of(p.y)};
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double normalize_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

// p' = rotation * p + translation, rotation stored row-major.
struct RigidTransform {
  std::array<double, 9> rotation{1, 0, 0, 0, 1, 0, 0, 0, 1};
  Vec3 translation{};

  Vec3 apply(const Vec3& p) const {
    const auto& r = rotation;
    return {r[0] * p.x + r[1] * p.y + r[2] * p.z + translation.x,
            r[3] * p.x + r[4] * p.y + r[5] * p.z + translation.y,
            r[6] * p.x + r[7] * p.y + r[8] * p.z + translation.z};
  }

  Vec3 rotate(const Vec3& p) const {
    const auto& r = rotation;
    return {r[0] * p.x + r[1] * p.y + r[2] * p.z, r[3] * p.x + r[4] * p.y + r[5] * p.z,
            r[6] * p.x + r[7] * p.y + r[8] * p.z};
  }

  RigidTransform inverse() const {
    RigidTransform inv;
    const auto& r = rotation;
    inv.rotation = {r[0], r[3], r[6], r[1], r[4], r[7], r[2], r[5], r[8]};
    const Vec3 t = inv.rotate(translation);
    inv.translation = {-t.x, -t.y, -t.z};
    return inv;
  }

  // Returns the transform applying *this first, then `next`.
  RigidTransform then(const RigidTransform& next) const {
    RigidTransform out;
    const auto& a = next.rotation;
    const auto& b = rotation;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        out.rotation[3 * i + j] = a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
    out.translation = next.apply(translation);
    return out;
  }

  // Heading change this transform applies to a box lying in the ground plane.
  double yaw() const { return std::atan2(rotation[3], rotation[0]); }

  bool is_rigid(double tol = 1e-6) const {
    const auto& r = rotation;
    for (double v : r)
      if (!std::isfinite(v)) return false;
    if (!std::isfinite(translation.x) || !std::isfinite(translation.y) || !std::isfinite(translation.z))
      return false;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double d = r[3 * i] * r[3 * j] + r[3 * i + 1] * r[3 * j + 1] + r[3 * i + 2] * r[3 * j + 2];
        if (std::abs(d - (i == j ? 1.0 : 0.0)) > tol) return false;
      }
    }
    const double det = r[0] * (r[4] * r[8] - r[5] * r[7]) - r[1] * (r[3] * r[8] - r[5] * r[6]) +
                       r[2] * (r[3] * r[7] - r[4] * r[6]);
    return std::abs(det - 1.0) <= tol;
  }

  static RigidTransform about_z(double yaw, const Vec3& translation = {}) {
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    return {{c, -s, 0, s, c, 0, 0, 0, 1}, translation};
  }

  friend bool operator==(const RigidTransform&, const RigidTransform&) = default;
};

// Half-angles in radians.
struct FieldOfView {
  double horizontal = std::numbers::pi / 4;
  double vertical = std::numbers::pi / 4;

  friend bool operator==(const FieldOfView&, const FieldOfView&) = default;
};

struct CameraModel {
  double focal = 1.0;
  RigidTransform ego_to_cam{{0, -1, 0, 0, 0, -1, 1, 0, 0}, {}};
  std::optional<FieldOfView> fov;

  // Camera looking along ego +x, mounted at `mount` (ego frame).
  static CameraModel front_facing(double focal = 1.0, const Vec3& mount = {},
                                  std::optional<FieldOfView> fov = std::nullopt) {
    CameraModel cam;
    cam.focal = focal;
    const Vec3 t = cam.ego_to_cam.rotate(mount);
    cam.ego_to_cam.translation = {-t.x, -t.y, -t.z};
    cam.fov = fov;
    return cam;
  }

  void validate() const {
    if (!(focal > 0.0) || !std::isfinite(focal)) fail(ErrorKind::InvalidBox, "camera focal must be > 0");
    if (!ego_to_cam.is_rigid()) fail(ErrorKind::InvalidBox, "camera ego_to_cam is not a rigid transform");
    if (fov && !(fov->horizontal > 0.0 && fov->vertical > 0.0))
      fail(ErrorKind::InvalidBox, "camera field-of-view half-angles must be > 0");
  }

  friend bool operator==(const CameraModel&, const CameraModel&) = default;
};

// Five-parameter BEV footprint; width is measured along the box-local y axis.
template <class T>
struct BasicFootprint {
  T cx{};
  T cy{};
  T width{};
  T length{};
  T yaw{};
};

using Footprint = BasicFootprint<double>;

struct Box3D {
  Vec3 center{};
  double width = 1.0;
  double length = 1.0;
  double height = 1.0;
  double yaw = 0.0;
  std::string label;
  std::optional<double> score;

  Vec2 bev_center() const { return {center.x, center.y}; }
  Footprint footprint() const { return {center.x, center.y, width, length, yaw}; }

  friend bool operator==(const Box3D&, const Box3D&) = default;
};

inline void validate(const Box3D& box) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(box.center.x) || !finite(box.center.y) || !finite(box.center.z))
    fail(ErrorKind::InvalidBox, "box center must be finite");
  if (!(box.width > 0.0 && box.length > 0.0 && box.height > 0.0) || !finite(box.width) ||
      !finite(box.length) || !finite(box.height))
    fail(ErrorKind::InvalidBox, "box size must be positive");
  if (!(std::abs(box.yaw) <= std::numbers::pi + 1e-12)) fail(ErrorKind::InvalidBox, "box yaw must lie in [-pi, pi]");
  if (box.score && !(*box.score >= 0.0 && *box.score <= 1.0))
    fail(ErrorKind::InvalidBox, "box score must lie in [0, 1]");
}

template <class T>
using BasicPolygon = std::vector<BasicVec2<T>>;

// Convex polygon, counter-clockwise.
using BevPolygon = BasicPolygon<double>;

struct PvRect {
  double a_min = 0.0;
  double b_min = 0.0;
  double a_max = 0.0;
  double b_max = 0.0;

  double area() const { return std::max(0.0, a_max - a_min) * std::max(0.0, b_max - b_min); }

  friend bool operator==(const PvRect&, const PvRect&) = default;
};

struct Segment {
  Vec2 a;
  Vec2 b;
};

inline Vec2 project_pv(const Vec3& point, double focal, double eps_depth = kDefaultEpsDepth) {
  if (!(point.z > eps_depth)) fail(ErrorKind::NonPositiveDepth, "point depth must exceed eps_depth");
  const double s = focal / point.z;
  return {point.x * s, point.y * s};
}

inline std::array<Vec3, 8> box_corners(const Box3D& box) {
  static constexpr double kSigns[4][2] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  std::array<Vec3, 8> out{};
  for (int face = 0; face < 2; ++face) {
    const double dz = (face == 0 ? -0.5 : 0.5) * box.height;
    for (int k = 0; k < 4; ++k) {
      const double lx = 0.5 * box.length * kSigns[k][0];
      const double ly = 0.5 * box.width * kSigns[k][1];
      out[4 * face + k] = {box.center.x + c * lx - s * ly, box.center.y + s * lx + c * ly, box.center.z + dz};
    }
  }
  return out;
}

template <class T>
BasicPolygon<T> footprint_polygon(const BasicFootprint<T>& f) {
  using std::cos;
  using std::sin;
  static constexpr double kSigns[4][2] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  const T c = cos(f.yaw);
  const T s = sin(f.yaw);
  const T hl = f.length * 0.5;
  const T hw = f.width * 0.5;
  BasicPolygon<T> poly;
  poly.reserve(4);
  for (const auto& sign : kSigns) {
    const T lx = hl * sign[0];
    const T ly = hw * sign[1];
    poly.push_back({f.cx + c * lx - s * ly, f.cy + s * lx + c * ly});
  }
  return poly;
}

inline BevPolygon bev_polygon(const Box3D& box) { return footprint_polygon(box.footprint()); }

template <class T>
T signed_area(const BasicPolygon<T>& p) {
  // Fan from the lowest vertex: cancellation scales with the polygon's size,
  // not its distance from the origin, and the sum does not depend on where
  // the vertex cycle starts.
  const std::size_t n = p.size();
  if (n < 3) return T(0.0);
  std::size_t k = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const double xi = value_of(p[i].x), yi = value_of(p[i].y), xk = value_of(p[k].x), yk = value_of(p[k].y);
    if (yi < yk || (yi == yk && xi < xk)) k = i;
  }
  T acc(0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) acc += cross(p[(k + j) % n] - p[k], p[(k + j + 1) % n] - p[k]);
  return acc * 0.5;
}

template <class T>
T polygon_area(const BasicPolygon<T>& p) {
  using std::abs;
  if (p.size() < 3) return T(0.0);
  return abs(signed_area(p));
}

inline void make_ccw(BevPolygon& p) {
  if (signed_area(p) < 0.0) std::reverse(p.begin(), p.end());
}

inline Vec2 polygon_centroid(const BevPolygon& p) {
  const double a = signed_area(p);
  if (std::abs(a) < kMinArea) {
    Vec2 m{};
    for (const auto& v : p) m = m + v;
    return m * (1.0 / static_cast<double>(p.size()));
  }
  double cx = 0.0;
  double cy = 0.0;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& u = p[i];
    const Vec2& w = p[(i + 1) % n];
    const double k = cross(u, w);
    cx += (u.x + w.x) * k;
    cy += (u.y + w.y) * k;
  }
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

// Records how close the clipping came to a decision boundary: the smallest
// |signed distance| of any subject vertex to any clip line.
struct ClipTrace {
  double min_margin = std::numeric_limits<double>::infinity();
  bool merged_vertices = false;
};

// Sutherland-Hodgman clipping of convex `subject` by convex `clip` (both CCW).
// Returns an empty polygon when the overlap is below kMinArea.
template <class T>
BasicPolygon<T> convex_intersection(const BasicPolygon<T>& subject, const BasicPolygon<T>& clip,
                                    ClipTrace* trace = nullptr) {
  BasicPolygon<T> out = subject;
  BasicPolygon<T> in;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const BasicVec2<T>& a = clip[e];
    const BasicVec2<T> edge = clip[(e + 1) % m] - a;
    const double edge_len = norm(value_of(edge));
    in.swap(out);
    out.clear();
    const std::size_t n = in.size();
    std::vector<T> side(n);
    for (std::size_t i = 0; i < n; ++i) {
      side[i] = cross(edge, in[i] - a);
      if (trace && edge_len > 0.0)
        trace->min_margin = std::min(trace->min_margin, std::abs(value_of(side[i])) / edge_len);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t prev = (i + n - 1) % n;
      const bool cur_in = side[i] >= 0.0;
      const bool prev_in = side[prev] >= 0.0;
      if (cur_in != prev_in) {
        const T t = side[prev] / (side[prev] - side[i]);
        out.push_back(in[prev] + (in[i] - in[prev]) * t);
      }
      if (cur_in) out.push_back(in[i]);
    }
  }
  // Merge vertices closer than the geometric tolerance.
  BasicPolygon<T> merged;
  merged.reserve(out.size());
  for (const auto& v : out) {
    if (!merged.empty() && norm(value_of(v) - value_of(merged.back())) <= kGeomTol) {
      if (trace) trace->merged_vertices = true;
      continue;
    }
    merged.push_back(v);
  }
  while (merged.size() > 1 && norm(value_of(merged.front()) - value_of(merged.back())) <= kGeomTol) {
    if (trace) trace->merged_vertices = true;
    merged.pop_back();
  }
  if (merged.size() < 3 || value_of(polygon_area(merged)) < kMinArea) return {};
  return merged;
}

// True when `pt` lies inside or on the boundary (within tol) of convex CCW `poly`.
inline bool contains(const BevPolygon& poly, const Vec2& pt, double tol = kGeomTol) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 edge = poly[(i + 1) % n] - poly[i];
    const double len = norm(edge);
    if (len <= 0.0) continue;
    if (cross(edge, pt - poly[i]) / len < -tol) return false;
  }
  return true;
}

inline Vec2 closest_point_on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return a;
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + ab * t;
}

inline Vec2 closest_point(const BevPolygon& poly, const Vec2& origin) {
  if (contains(poly, origin)) return origin;
  Vec2 best = poly.front();
  double best_d = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 c = closest_point_on_segment(poly[i], poly[(i + 1) % n], origin);
    const double d = norm(c - origin);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

struct ExtremeCorners {
  Vec2 left;
  Vec2 right;
};

// Vertices with the largest (left) and smallest (right) bearing seen from
// `origin`. Bearings are measured relative to the direction of the centroid,
// which keeps them inside (-pi/2, pi/2) for any convex polygon not containing
// the origin. Ties go to the vertex nearer the origin.
inline ExtremeCorners visible_extreme_corners(const BevPolygon& poly, const Vec2& origin) {
  if (poly.size() < 3 || contains(poly, origin))
    fail(ErrorKind::OriginInsidePolygon, "visible extreme corners are undefined for an origin inside the polygon");
  constexpr double kAngleTol = 1e-12;
  const Vec2 ref = polygon_centroid(poly) - origin;
  std::size_t left = 0;
  std::size_t right = 0;
  double left_ang = -std::numeric_limits<double>::infinity();
  double right_ang = std::numeric_limits<double>::infinity();
  double left_d = 0.0;
  double right_d = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 rel = poly[i] - origin;
    const double ang = std::atan2(cross(ref, rel), dot(ref, rel));
    const double d = norm(rel);
    if (ang > left_ang + kAngleTol || (std::abs(ang - left_ang) <= kAngleTol && d < left_d)) {
      left = i;
      left_ang = ang;
      left_d = d;
    }
    if (ang < right_ang - kAngleTol || (std::abs(ang - right_ang) <= kAngleTol && d < right_d)) {
      right = i;
      right_ang = ang;
      right_d = d;
    }
  }
  return {poly[left], poly[right]};
}

namespace detail {

inline int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a;
  const double len = norm(ab);
  const double d = len > 0.0 ? cross(ab, c - a) / len : 0.0;
  if (d > kGeomTol) return 1;
  if (d < -kGeomTol) return -1;
  return 0;
}

inline bool same_point(const Vec2& a, const Vec2& b) { return norm(a - b) <= kGeomTol; }

// p is collinear with segment (a, b); tests whether it lies within its extent.
inline bool within_extent(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len = norm(ab);
  if (len <= 0.0) return same_point(a, p);
  const double t = dot(p - a, ab) / len;
  return t >= -kGeomTol && t <= len + kGeomTol;
}

}  // namespace detail

// True iff the segments share a point other than an endpoint common to both.
inline bool segments_intersect(const Segment& s1, const Segment& s2) {
  using detail::orientation;
  using detail::same_point;
  using detail::within_extent;
  const int o1 = orientation(s1.a, s1.b, s2.a);
  const int o2 = orientation(s1.a, s1.b, s2.b);
  const int o3 = orientation(s2.a, s2.b, s1.a);
  const int o4 = orientation(s2.a, s2.b, s1.b);

  auto is_endpoint_of = [&](const Vec2& p, const Segment& s) { return same_point(p, s.a) || same_point(p, s.b); };

  if (o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0) {
    // Collinear: measure the overlap along s1's direction.
    const Vec2 dir = s1.b - s1.a;
    const double len = norm(dir);
    if (len <= 0.0) return false;
    auto proj = [&](const Vec2& p) { return dot(p - s1.a, dir) / len; };
    const double lo = std::max(std::min(0.0, len), std::min(proj(s2.a), proj(s2.b)));
    const double hi = std::min(std::max(0.0, len), std::max(proj(s2.a), proj(s2.b)));
    if (hi - lo > kGeomTol) return true;
    if (hi - lo < -kGeomTol) return false;
    // Touching at a single point; it is an endpoint of both segments.
    const Vec2 touch = s1.a + dir * (0.5 * (lo + hi) / len);
    return !(is_endpoint_of(touch, s1) && is_endpoint_of(touch, s2));
  }

  if (o1 * o2 < 0 && o3 * o4 < 0) return true;

  // Touching configurations: an endpoint of one segment lies on the other.
  const std::pair<Vec2, const Segment*> probes[4] = {{s2.a, &s1}, {s2.b, &s1}, {s1.a, &s2}, {s1.b, &s2}};
  const int orients[4] = {o1, o2, o3, o4};
  for (int k = 0; k < 4; ++k) {
    const auto& [p, seg] = probes[k];
    if (orients[k] != 0 || !within_extent(seg->a, seg->b, p)) continue;
    if (!is_endpoint_of(p, *seg)) return true;
  }
  return false;
}

}  // namespace safedet
