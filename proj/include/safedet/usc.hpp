#pragma once

// Uncompromising Spatial Constraints over one matched prediction/ground-truth
// pair: perspective-view enclosure (IoGT) and bird's-eye-view distance
// underestimation (closest point + ego-visible extremes, ADR).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "safedet/core.hpp"
#include "safedet/geometry.hpp"

namespace safedet::usc {

struct UscResult {
  double iogt = 0.0;
  double adr = 0.0;
  double usc = 0.0;
  bool pv_ok = false;
  bool bev_ok = false;
  bool usc_ok = false;
};

// Closest point and the two ego-visible extreme corners of a BEV polygon.
struct RepresentativePoints {
  Vec2 closest;
  Vec2 right;
  Vec2 left;
};

inline PvRect pv_rect(const Box3D& box, const CameraModel& cam, double eps_depth = kDefaultEpsDepth) {
  PvRect r{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  bool any = false;
  for (const Vec3& corner : box_corners(box)) {
    const Vec3 c = cam.ego_to_cam.apply(corner);
    if (!(c.z > eps_depth)) continue;
    const Vec2 ab = project_pv(c, cam.focal, eps_depth);
    r.a_min = std::min(r.a_min, ab.x);
    r.b_min = std::min(r.b_min, ab.y);
    r.a_max = std::max(r.a_max, ab.x);
    r.b_max = std::max(r.b_max, ab.y);
    any = true;
  }
  if (!any) fail(ErrorKind::BehindCamera, "all box corners lie behind the projection plane");
  return r;
}

// g is contained in p (closed containment, tolerance kGeomTol).
inline bool pv_enclosure(const PvRect& p, const PvRect& g) {
  return p.a_min <= g.a_min + kGeomTol && p.b_min <= g.b_min + kGeomTol && p.a_max >= g.a_max - kGeomTol &&
         p.b_max >= g.b_max - kGeomTol;
}

// Intersection over ground truth. Exactly 1 iff pv_enclosure(p, g).
inline double iogt(const PvRect& p, const PvRect& g) {
  const double ga = g.area();
  if (!(ga > 0.0)) fail(ErrorKind::EmptyGroundTruth, "ground-truth perspective rectangle has zero area");
  if (pv_enclosure(p, g)) return 1.0;
  const PvRect inter{std::max(p.a_min, g.a_min), std::max(p.b_min, g.b_min), std::min(p.a_max, g.a_max),
                     std::min(p.b_max, g.b_max)};
  const double ratio = std::clamp(inter.area() / ga, 0.0, 1.0);
  return std::min(ratio, std::nextafter(1.0, 0.0));
}

inline RepresentativePoints representative_points(const BevPolygon& poly, const Vec2& origin) {
  const ExtremeCorners ex = visible_extreme_corners(poly, origin);  // throws when origin is inside
  return {closest_point(poly, origin), ex.right, ex.left};
}

namespace detail {

inline bool same_segment(const Segment& s, const Segment& t) {
  auto eq = [](const Vec2& a, const Vec2& b) { return norm(a - b) <= kGeomTol; };
  return (eq(s.a, t.a) && eq(s.b, t.b)) || (eq(s.a, t.b) && eq(s.b, t.a));
}

}  // namespace detail

// The closest-point constraint alone: the prediction is no farther than the
// ground truth at its closest point.
inline bool bev_closest_ok(const RepresentativePoints& p, const RepresentativePoints& g, const Vec2& origin) {
  return norm(p.closest - origin) <= norm(g.closest - origin) + kGeomTol;
}

// The four segments from the closest point to each extreme corner form a set:
// identical segments collapse and zero-length segments carry no extent. The
// remaining segments must be pairwise free of intersections other than
// shared endpoints.
inline bool visible_segments_consistent(const RepresentativePoints& p, const RepresentativePoints& g) {
  const std::array<Segment, 4> candidates{Segment{p.closest, p.right}, Segment{p.closest, p.left},
                                          Segment{g.closest, g.right}, Segment{g.closest, g.left}};
  std::vector<Segment> segs;
  for (const Segment& s : candidates) {
    if (norm(s.b - s.a) <= kGeomTol) continue;
    const bool dup = std::any_of(segs.begin(), segs.end(), [&](const Segment& t) { return detail::same_segment(s, t); });
    if (!dup) segs.push_back(s);
  }
  for (std::size_t i = 0; i < segs.size(); ++i)
    for (std::size_t j = i + 1; j < segs.size(); ++j)
      if (segments_intersect(segs[i], segs[j])) return false;
  return true;
}

inline bool bev_predicate(const BevPolygon& p, const BevPolygon& g, const Vec2& origin = {}) {
  const RepresentativePoints rp = representative_points(p, origin);
  const RepresentativePoints rg = representative_points(g, origin);
  return bev_closest_ok(rp, rg, origin) && visible_segments_consistent(rp, rg);
}

// Average distance ratio: geometric mean over (closest, right, left) of
// min(1, |v_G| / |v_P|). Equals 1 iff no prediction point is farther.
inline double adr(const RepresentativePoints& p, const RepresentativePoints& g, const Vec2& origin = {},
                  double eps_dist = kDefaultEpsDist) {
  const std::array<std::pair<Vec2, Vec2>, 3> pairs{{{p.closest, g.closest}, {p.right, g.right}, {p.left, g.left}}};
  double product = 1.0;
  for (const auto& [vp, vg] : pairs) {
    const double dp = norm(vp - origin);
    const double dg = norm(vg - origin);
    if (!(dp > eps_dist) || !(dg > eps_dist))
      fail(ErrorKind::DegenerateDistance, "representative point within eps_dist of the ego origin");
    product *= std::min(1.0, dg / dp);
  }
  if (product == 1.0) return 1.0;
  return std::min(std::cbrt(product), std::nextafter(1.0, 0.0));
}

inline double adr(const BevPolygon& p, const BevPolygon& g, const Vec2& origin = {},
                  double eps_dist = kDefaultEpsDist) {
  return adr(representative_points(p, origin), representative_points(g, origin), origin, eps_dist);
}

// Full USC evaluation of one pair. Throws BehindCamera when either box is
// entirely behind the camera; callers treat that pair as skipped.
inline UscResult usc_pair(const Box3D& p, const Box3D& g, const CameraModel& cam, const Vec2& origin = {},
                          double eps_depth = kDefaultEpsDepth, double eps_dist = kDefaultEpsDist) {
  UscResult r;
  const PvRect gp = pv_rect(g, cam, eps_depth);
  const PvRect pp = pv_rect(p, cam, eps_depth);
  r.iogt = iogt(pp, gp);
  r.pv_ok = pv_enclosure(pp, gp);

  const BevPolygon pb = bev_polygon(p);
  const BevPolygon gb = bev_polygon(g);
  const RepresentativePoints rp = representative_points(pb, origin);
  const RepresentativePoints rg = representative_points(gb, origin);
  r.bev_ok = bev_closest_ok(rp, rg, origin) && visible_segments_consistent(rp, rg);
  r.adr = adr(rp, rg, origin, eps_dist);
  r.usc = r.iogt * r.adr;
  r.usc_ok = r.pv_ok && r.bev_ok;
  return r;
}

}  // namespace safedet::usc
