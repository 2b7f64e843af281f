// Acceptance suite: one PASS/FAIL line per top-level requirement.
// Exit status is the number of failed checks (capped at 255).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "safedet/safedet.hpp"

using namespace safedet;

namespace {

int g_failed = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failed;
}

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

Footprint fp(double cx, double cy, double w, double l, double yaw) { return {cx, cy, w, l, yaw}; }

// GT somewhere around the ego, prediction perturbed so that the two overlap.
struct PairGen {
  std::mt19937_64 rng;
  explicit PairGen(std::uint64_t seed) : rng(seed) {}

  double u(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

  Footprint gt(double min_dist, double max_dist) {
    const double w = u(0.5, 3.0), l = u(0.5, 6.0);
    const double a = u(-std::numbers::pi, std::numbers::pi), d = u(min_dist, max_dist);
    return fp(d * std::cos(a), d * std::sin(a), w, l, u(-std::numbers::pi, std::numbers::pi));
  }

  Footprint around(const Footprint& g) {
    const double reach = 0.5 * std::min(g.width, g.length);
    return fp(g.cx + u(-reach, reach), g.cy + u(-reach, reach), g.width * u(0.7, 1.3), g.length * u(0.7, 1.3),
              normalize_angle(g.yaw + u(-0.6, 0.6)));
  }
};

double diagonal(const Footprint& f) { return std::hypot(f.width, f.length); }

// ---------------------------------------------------------------------------

void table_v() {
  const impact::ImpactParams params;  // 1.5 / 20000 / 50% / -0.8 / 5 / 7.5
  const auto t0 = std::chrono::steady_clock::now();
  const impact::ImpactResult r = impact::run(params);
  const double us = seconds_since(t0) * 1e6;
  const bool ok = near(r.stage1, 10.95, 0.01) && near(r.stage2, 5.48, 0.01) && near(r.stage3, 2.67, 0.01) && us < 1000;
  report(ok, "impact-table", fmt("stages %.4f / %.4f / %.4f, %.1f us", r.stage1, r.stage2, r.stage3, us));
}

void sensitivity() {
  impact::ImpactParams p;
  p.av_reduction = 0.7;
  const auto r70 = impact::run(p);
  p.av_reduction = 0.3;
  const auto r30 = impact::run(p);
  // Independent recomputation of the 30% case from the stage formulas.
  const double s2 = 10.95 * 0.7, s3 = s2 - 0.8 * std::sqrt(s2) / 5.0 * 7.5;
  const double mu = impact::vision_zero_threshold(p.rho, p.sigma_ecmap, p.delta_ecmap);
  const double avr = impact::vision_zero_av_reduction(p);
  const bool ok = near(r70.stage2, 3.29, 0.01) && near(r70.stage3, 1.11, 0.01) &&
                  near(100 * r70.further_reduction, 66.2, 0.2) && near(mu, 1.44, 0.001) && near(100 * avr, 86.8, 0.1) &&
                  near(r30.stage2, s2, 1e-12) && near(r30.stage3, s3, 1e-12) && near(r30.stage2, 7.67, 0.01) &&
                  near(r30.stage3, 4.34, 0.01);
  report(ok, "impact-sensitivity",
         fmt("70%%: %.3f / %.3f (%.2f%%); mu* %.4f at %.3f%%; 30%%: %.3f / %.3f", r70.stage2, r70.stage3,
             100 * r70.further_reduction, mu, 100 * avr, r30.stage2, r30.stage3));
}

void nds_usc_recomposition() {
  struct Row {
    const char* name;
    double nds, usc, published;
  };
  const Row rows[] = {{"PGD", 48.29, 0.801, 64.19}, {"PETR", 52.07, 0.761, 64.10}};
  bool ok = true;
  std::string detail;
  for (const Row& r : rows) {
    const double v = 100 * eval::compose_nds_usc(r.nds / 100, r.usc);
    ok = ok && near(v, r.published, 0.15);
    detail += fmt("%s %.3f (published %.2f)  ", r.name, v, r.published);
  }
  report(ok, "nds-usc-recomposition", detail);
}

// Weighted-area approximation against rasterized integration, both alphas in
// one pass over a 500 x 500 grid laid over G.
void approximation_quality() {
  constexpr int kPairs = 10'000, kGrid = 500;
  PairGen gen(20240601);
  std::vector<std::pair<Footprint, Footprint>> pairs;
  while (pairs.size() < kPairs) {
    Footprint g = gen.gt(0.0, 1.0);
    const Footprint p = gen.around(g);
    const double need = 2.0 * std::max(diagonal(g), diagonal(p));
    const double scale = gen.u(need, need + 40.0) / std::hypot(g.cx, g.cy);
    const double dx = g.cx * (scale - 1), dy = g.cy * (scale - 1);
    g.cx += dx;
    g.cy += dy;
    const Footprint ps = fp(p.cx + dx, p.cy + dy, p.width, p.length, p.yaw);
    if (std::hypot(g.cx, g.cy) < 2 * diagonal(g) || std::hypot(ps.cx, ps.cy) < 2 * diagonal(ps)) continue;
    if (convex_intersection(footprint_polygon(ps), footprint_polygon(g)).empty()) continue;
    pairs.emplace_back(ps, g);
  }

  // Library side, timed single-threaded.
  std::vector<double> raw2(kPairs), raw4(kPairs);
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < kPairs; ++i) {
    raw2[i] = eciou::ec_iou(pairs[i].first, pairs[i].second, {0, 0}, {2.0, kDefaultEpsDist, false});
    raw4[i] = eciou::ec_iou(pairs[i].first, pairs[i].second, {0, 0}, {4.0, kDefaultEpsDist, false});
  }
  const double lib_s = seconds_since(t0);

  std::vector<double> grid2(kPairs), grid4(kPairs);
  parallel_for(kPairs, resolve_workers(0), [&](std::size_t i) {
    const auto& [p, g] = pairs[i];
    const auto pr = oracle::rect(p.cx, p.cy, p.width, p.length, p.yaw);
    const std::vector<oracle::P2> pv = oracle::ccw({pr.begin(), pr.end()});
    const auto gr = oracle::rect(g.cx, g.cy, g.width, g.length, g.yaw);
    const double rc2 = g.cx * g.cx + g.cy * g.cy;
    const double c = std::cos(g.yaw), s = std::sin(g.yaw);
    const double dl = g.length / kGrid, dw = g.width / kGrid;
    double wi2 = 0, wg2 = 0, wi4 = 0, wg4 = 0;
    for (int a = 0; a < kGrid; ++a) {
      const double uu = -g.length / 2 + (a + 0.5) * dl;
      for (int b = 0; b < kGrid; ++b) {
        const double vv = -g.width / 2 + (b + 0.5) * dw;
        const oracle::P2 q{g.cx + c * uu - s * vv, g.cy + s * uu + c * vv};
        const double w2 = rc2 / (q.x * q.x + q.y * q.y), w4 = w2 * w2;
        wg2 += w2;
        wg4 += w4;
        if (oracle::inside_convex(pv, q, 0.0)) {
          wi2 += w2;
          wi4 += w4;
        }
      }
    }
    const double cell = dl * dw;
    const double rest = p.width * p.length - oracle::intersection_area(pv, {gr.begin(), gr.end()});
    grid2[i] = wi2 * cell / (wg2 * cell + rest);
    grid4[i] = wi4 * cell / (wg4 * cell + rest);
  });

  double worst = 0, max_raw = 0;
  int within = 0, worst_i = 0, worst_alpha = 2;
  std::vector<double> rel2, rel4;
  for (int i = 0; i < kPairs; ++i) {
    for (auto [approx, exact, alpha] : {std::tuple{raw2[i], grid2[i], 2}, std::tuple{raw4[i], grid4[i], 4}}) {
      const double rel = std::abs(approx - exact) / exact;
      (alpha == 2 ? rel2 : rel4).push_back(rel);
      if (rel <= 0.02) ++within;
      if (rel > worst) {
        worst = rel;
        worst_i = i;
        worst_alpha = alpha;
      }
      max_raw = std::max(max_raw, approx);
    }
  }
  // Refine the worst case: a rasterization artifact would shrink with the grid.
  const auto& [wp, wg] = pairs[worst_i];
  const double fine = oracle::grid_ec_iou(wp.cx, wp.cy, wp.width, wp.length, wp.yaw, wg.cx, wg.cy, wg.width, wg.length,
                                          wg.yaw, worst_alpha, 1500)
                          .value;
  const double worst_fine =
      std::abs(eciou::ec_iou(wp, wg, {0, 0}, {double(worst_alpha), kDefaultEpsDist, false}) - fine) / fine;
  auto quantile = [](std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    return v[static_cast<std::size_t>(q * static_cast<double>(v.size() - 1))];
  };
  const bool ok = worst <= 0.02 && max_raw <= 1.05 && lib_s < 30.0;
  report(ok, "eciou-approximation",
         fmt("max rel err %.4f (alpha %d; %.4f at 1500^2 grid), median/p99 alpha 2: %.4f/%.4f, alpha 4: %.4f/%.4f, "
             "%.2f%% of %d within 2%%, max raw %.4f, %.3f s",
             worst, worst_alpha, worst_fine, quantile(rel2, 0.5), quantile(rel2, 0.99), quantile(rel4, 0.5),
             quantile(rel4, 0.99), 100.0 * within / (2 * kPairs), 2 * kPairs, max_raw, lib_s));
}

void alpha_zero_reduction() {
  constexpr int kPairs = 100'000;
  PairGen gen(4242);
  double worst = 0;
  int n = 0;
  while (n < kPairs) {
    const Footprint g = gen.gt(3.0, 60.0);
    const Footprint p = gen.around(g);
    const double iou = oracle::iou(oracle::rect(p.cx, p.cy, p.width, p.length, p.yaw),
                                   oracle::rect(g.cx, g.cy, g.width, g.length, g.yaw));
    if (!(iou > 0)) continue;
    const double v = eciou::ec_iou(p, g, {0, 0}, {0.0});
    worst = std::max(worst, std::abs(v - iou) / iou);
    ++n;
  }
  report(worst <= 1e-12, "eciou-alpha-zero", fmt("%d pairs, max rel diff %.3e", kPairs, worst));
}

void valuation_sweep() {
  const Footprint g = fp(10, 0, 2, 4.5, 0);
  bool ok = true;
  std::string why;
  int points = 0;
  for (double alpha : {0.0, 1.0, 2.0, 4.0}) {
    const eciou::EcIouParams params{alpha};
    for (int k = -500; k <= 500; ++k) {
      const double d = k * 0.01;  // negative: toward the ego
      const Footprint p = fp(10 + d, 0, 2, 4.5, 0);
      const double iou = oracle::iou(oracle::rect(p.cx, p.cy, 2, 4.5, 0), oracle::rect(10, 0, 2, 4.5, 0));
      const double v = eciou::ec_iou(p, g, {0, 0}, params);
      const double mirrored = eciou::ec_iou(fp(10 - d, 0, 2, 4.5, 0), g, {0, 0}, params);
      const bool partial = iou > 0 && iou < 1;
      ++points;
      bool good = true;
      if (k == 0) good = v == 1.0;
      else if (v >= 1.0) good = false;
      if (alpha == 0.0) {
        good = good && near(v, iou, 1e-12) && near(v, mirrored, 1e-12);
      } else if (partial) {
        good = good && (d < 0 ? v > iou : v < iou);
      } else {
        good = good && near(v, iou, 1e-12);
      }
      if (!good && why.empty()) why = fmt(" first violation alpha %.0f offset %+.2f: ec %.6f iou %.6f", alpha, d, v, iou);
      ok = ok && good;
    }
  }
  report(ok, "eciou-valuation-sweep", fmt("%d points over alpha {0,1,2,4}, offsets -5..5 m%s", points, why.c_str()));
}

void gradient_parity() {
  constexpr int kConfigs = 10'000;
  constexpr double h = 1e-5;
  PairGen gen(99);
  int checked = 0, rejected = 0;
  double worst = 0;
  while (checked < kConfigs) {
    const Footprint g = gen.gt(4.0, 40.0);
    const Footprint p = gen.around(g);
    const double alpha = std::array<double, 4>{0.0, 1.0, 2.0, 4.0}[checked % 4];
    const eciou::EcIouParams params{alpha};
    const eciou::GradResult r = eciou::ec_iou_grad(p, g, {0, 0}, params);
    const double raw = eciou::ec_iou(p, g, {0, 0}, {alpha, kDefaultEpsDist, false});
    if (r.status != eciou::GradStatus::Smooth || r.clip_margin < 1e-3 || std::abs(raw - 1.0) < 1e-3) {
      ++rejected;
      continue;
    }
    const std::function<double(const std::array<double, 5>&)> f = [&](const std::array<double, 5>& x) {
      return eciou::ec_iou(fp(x[0], x[1], x[2], x[3], x[4]), g, {0, 0}, params);
    };
    const auto fd = oracle::central_difference<5>(f, {p.cx, p.cy, p.width, p.length, p.yaw}, h);
    const std::array<double, 5> an{r.grad.d_cx, r.grad.d_cy, r.grad.d_w, r.grad.d_l, r.grad.d_yaw};
    double num = 0, den = 0;
    for (int k = 0; k < 5; ++k) {
      num += (an[k] - fd[k]) * (an[k] - fd[k]);
      den += fd[k] * fd[k];
    }
    worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1e-12));
    ++checked;
  }
  int nonzero = 0;
  for (int i = 0; i < 1000; ++i) {
    const Footprint g = gen.gt(4.0, 40.0);
    const Footprint p = fp(g.cx + 20, g.cy - 20, g.width, g.length, g.yaw);
    const eciou::GradResult r = eciou::ec_iou_grad(p, g, {0, 0}, {2.0});
    if (r.status != eciou::GradStatus::NonOverlapping || !(r.grad == eciou::EcIouGrad{}) || r.value != 0.0) ++nonzero;
  }
  report(worst <= 1e-4 && nonzero == 0, "eciou-gradient-parity",
         fmt("%d smooth configs (%d near kinks skipped), max rel err %.3e; %d/1000 disjoint pairs non-zero", checked,
             rejected, worst, nonzero));
}

// Pinhole projection of the eight corners for a forward camera at the origin:
// camera (x, y, z) = (-y, -z, x) in ego coordinates.
PvRect oracle_pv(const Box3D& b) {
  PvRect r{1e300, 1e300, -1e300, -1e300};
  const auto corners = oracle::rect(b.center.x, b.center.y, b.width, b.length, b.yaw);
  for (const auto& c : corners)
    for (double z : {b.center.z - b.height / 2, b.center.z + b.height / 2}) {
      const double depth = c.x;
      if (!(depth > 1e-6)) continue;
      const double a = -c.y / depth, bb = -z / depth;
      r.a_min = std::min(r.a_min, a);
      r.a_max = std::max(r.a_max, a);
      r.b_min = std::min(r.b_min, bb);
      r.b_max = std::max(r.b_max, bb);
    }
  return r;
}

struct OraclePoints {
  double closest, right, left;
};

// Distances of the closest boundary point and the two bearing-extreme corners.
OraclePoints oracle_points(const Box3D& b) {
  const auto c = oracle::rect(b.center.x, b.center.y, b.width, b.length, b.yaw);
  const double ref = std::atan2(b.center.y, b.center.x);
  double closest = 1e300, lo = 1e300, hi = -1e300, dlo = 0, dhi = 0;
  for (int i = 0; i < 4; ++i) {
    const oracle::P2 a = c[i], e = c[(i + 1) % 4];
    const double ex = e.x - a.x, ey = e.y - a.y;
    const double t = std::clamp(-(a.x * ex + a.y * ey) / (ex * ex + ey * ey), 0.0, 1.0);
    closest = std::min(closest, std::hypot(a.x + t * ex, a.y + t * ey));
    const double ang = std::remainder(std::atan2(a.y, a.x) - ref, 2 * std::numbers::pi);
    const double d = std::hypot(a.x, a.y);
    if (ang < lo) lo = ang, dlo = d;
    if (ang > hi) hi = ang, dhi = d;
  }
  return {closest, dlo, dhi};
}

void usc_properties() {
  constexpr int kPairs = 100'000;
  std::mt19937_64 rng(555);
  auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  const CameraModel cam = CameraModel::front_facing();
  int range = 0, iogt_mismatch = 0, adr_mismatch = 0, self = 0, n = 0, enclosed = 0, adr_one = 0;
  while (n < kPairs) {
    const Box3D g{{u(6, 50), u(-15, 15), u(-0.5, 0.5)}, u(0.5, 3), u(0.5, 6), u(0.5, 3), u(-3.14, 3.14), "car", {}};
    const double grow = u(-0.3, 0.5);
    const Box3D p{{g.center.x + u(-1, 1), g.center.y + u(-1, 1), g.center.z + u(-0.3, 0.3)},
                  g.width + grow * u(0, 1.5), g.length + grow * u(0, 1.5), g.height + grow * u(0, 1.5),
                  g.yaw + u(-0.3, 0.3), "car", {}};
    if (std::hypot(p.center.x, p.center.y) < diagonal(p.footprint()) + 1 || p.center.x - diagonal(p.footprint()) < 1)
      continue;
    ++n;
    const usc::UscResult r = usc::usc_pair(p, g, cam);
    if (!(r.usc >= 0 && r.usc <= 1)) ++range;

    const PvRect pp = oracle_pv(p), gp = oracle_pv(g);
    const bool encl = pp.a_min <= gp.a_min && pp.b_min <= gp.b_min && pp.a_max >= gp.a_max && pp.b_max >= gp.b_max;
    enclosed += encl;
    if ((r.iogt == 1.0) != encl) ++iogt_mismatch;

    const OraclePoints op = oracle_points(p), og = oracle_points(g);
    const bool nearer = op.closest <= og.closest && op.right <= og.right && op.left <= og.left;
    adr_one += nearer;
    if ((r.adr == 1.0) != nearer) ++adr_mismatch;

    const usc::UscResult s = usc::usc_pair(g, g, cam);
    if (!(s.iogt == 1 && s.adr == 1 && s.usc == 1 && s.pv_ok && s.bev_ok && s.usc_ok)) ++self;
  }
  report(range + iogt_mismatch + adr_mismatch + self == 0, "usc-properties",
         fmt("%d pairs (%d enclosed, %d adr=1): range %d, iogt<=>enclosure %d, adr<=>nearer %d, self %d violations",
             kPairs, enclosed, adr_one, range, iogt_mismatch, adr_mismatch, self));
}

eval::Dataset class_dataset() {
  eval::Dataset ds;
  ds.class_map = {{"car", eval::Family::CarLike},
                  {"cyclist", eval::Family::BicycleLike},
                  {"pedestrian", eval::Family::Pedestrian}};
  return ds;
}

void matching_oracle() {
  std::mt19937_64 rng(31337);
  auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  std::uniform_int_distribution<int> count(0, 5);
  const char* labels[] = {"car", "cyclist", "pedestrian"};
  const double taus[] = {0.7, 0.5, 0.3};
  int scenes = 0, match_bad = 0, ap_bad = 0;
  for (int scene = 0; scene < 500; ++scene) {
    eval::Dataset ds = class_dataset();
    for (int f = 0; f < 3; ++f) {
      eval::FrameAnnotations fr;
      fr.frame_id = fmt("%03d", f);
      for (const char* label : labels) {
        const int ng = count(rng), nd = count(rng);
        std::vector<Box3D> gts;
        for (int j = 0; j < ng; ++j) {
          const Box3D b{{u(5, 12), u(-3, 3), 0}, u(1, 2.5), u(1.5, 4.5), 1.5, u(-0.5, 0.5), label, {}};
          fr.ground_truths.push_back({b, eval::Visibility::Full});
          gts.push_back(b);
        }
        for (int d = 0; d < nd; ++d) {
          Box3D b = gts.empty() || u(0, 1) < 0.2
                        ? Box3D{{u(5, 12), u(-3, 3), 0}, u(1, 2.5), u(1.5, 4.5), 1.5, u(-0.5, 0.5), label, {}}
                        : gts[std::uniform_int_distribution<std::size_t>(0, gts.size() - 1)(rng)];
          b.center.x += u(-0.5, 0.5);
          b.center.y += u(-0.5, 0.5);
          b.yaw += u(-0.2, 0.2);
          b.score = u(0.1, 1.0);
          fr.detections.push_back(b);
        }
      }
      ds.frames.push_back(std::move(fr));
    }
    ++scenes;

    eval::MatchConfig cfg;
    cfg.affinity = eval::Affinity::IouBev;
    const auto frames = eval::prepare_frames(ds, cfg, eval::View::Roadside);
    eval::MatchSpec spec;
    spec.affinity = eval::Affinity::IouBev;
    spec.overlap_thresholds = eval::overlap_thresholds(ds.class_map, cfg);
    const eval::MatchSet ms = eval::greedy_match(frames, spec);

    for (int li = 0; li < 3; ++li) {
      const std::string label = labels[li];
      // Brute force per frame, then rank every detection of the class by score.
      std::vector<std::tuple<double, std::size_t, std::size_t, bool>> ranked;  // score, frame, det, tp
      std::size_t num_gt = 0, tps = 0;
      for (std::size_t fi = 0; fi < frames.size(); ++fi) {
        std::vector<std::size_t> di, gi;
        for (std::size_t i = 0; i < frames[fi].detections.size(); ++i)
          if (frames[fi].detections[i].label == label) di.push_back(i);
        for (std::size_t j = 0; j < frames[fi].ground_truths.size(); ++j)
          if (frames[fi].ground_truths[j].box.label == label) gi.push_back(j);
        num_gt += gi.size();
        std::vector<double> scores;
        std::vector<std::vector<double>> aff;
        for (std::size_t i : di) {
          const Box3D& d = frames[fi].detections[i];
          scores.push_back(*d.score);
          aff.emplace_back();
          for (std::size_t j : gi) {
            const Box3D& g = frames[fi].ground_truths[j].box;
            aff.back().push_back(oracle::iou(oracle::rect(d.center.x, d.center.y, d.width, d.length, d.yaw),
                                             oracle::rect(g.center.x, g.center.y, g.width, g.length, g.yaw)));
          }
        }
        const auto bm = oracle::brute_force_match(scores, aff, taus[li]);
        for (std::size_t k = 0; k < di.size(); ++k) {
          ranked.emplace_back(scores[k], fi, di[k], bm.gt_of_det[k] >= 0);
          tps += bm.gt_of_det[k] >= 0;
        }
      }
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
      const auto it = ms.classes.find(label);
      const std::size_t got_tp = it == ms.classes.end() ? 0 : it->second.tps.size();
      if (got_tp != tps || (it != ms.classes.end() && it->second.num_gt != num_gt)) ++match_bad;
      if (num_gt == 0 || it == ms.classes.end()) continue;
      std::vector<bool> tp;
      for (std::size_t k = 0; k < ranked.size(); ++k) {
        tp.push_back(std::get<3>(ranked[k]));
        if (it->second.ranked[k].tp != tp.back() || it->second.ranked[k].score != std::get<0>(ranked[k])) ++match_bad;
      }
      if (eval::average_precision(it->second.ranked, num_gt) != oracle::ap_101(tp, num_gt)) ++ap_bad;
    }
  }

  // Borderline detection: BEV IoU 0.6 (shift along the 4 m length by 1 m)
  // passes the bicycle-like and pedestrian thresholds, not the car-like one.
  bool flip_ok = true;
  std::string flips;
  for (const char* label : labels) {
    eval::Dataset ds = class_dataset();
    eval::FrameAnnotations fr;
    fr.frame_id = "0";
    fr.ground_truths.push_back({Box3D{{10, 0, 0}, 2, 4, 1.5, 0, label, {}}, eval::Visibility::Full});
    fr.detections.push_back(Box3D{{11, 0, 0}, 2, 4, 1.5, 0, label, 0.9});
    ds.frames.push_back(fr);
    eval::MatchConfig cfg;
    cfg.affinity = eval::Affinity::IouBev;
    const eval::MetricReport rep = eval::evaluate(ds, cfg);
    const bool want_tp = std::string(label) != "car";
    flip_ok = flip_ok && rep.tp == (want_tp ? 1u : 0u) && rep.fp == (want_tp ? 0u : 1u);
    flips += fmt("%s:%s ", label, rep.tp ? "TP" : "FP");
  }
  report(match_bad == 0 && ap_bad == 0 && flip_ok, "matching-oracle",
         fmt("%d scenes: %d match / %d AP mismatches; IoU 0.6 -> %s", scenes, match_bad, ap_bad, flips.c_str()));
}

eval::Dataset shifted_dataset(double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  eval::Dataset ds = class_dataset();
  const struct {
    const char* label;
    double w, l;
  } kinds[] = {{"car", 1.9, 4.5}, {"cyclist", 0.7, 1.8}, {"pedestrian", 0.7, 0.7}};
  for (int f = 0; f < 100; ++f) {
    eval::FrameAnnotations fr;
    fr.frame_id = fmt("%04d", f);
    for (const auto& k : kinds)
      for (int n = 0; n < 3; ++n) {
        const double a = u(-1.2, 1.2), d = u(6, 45);
        const Box3D g{{d * std::cos(a), d * std::sin(a), 0}, k.w * u(0.9, 1.1), k.l * u(0.9, 1.1), 1.6,
                      u(-3.14, 3.14), k.label, {}};
        Box3D p = g;
        p.center.x += shift * std::cos(a);  // radial: positive moves away from the ego
        p.center.y += shift * std::sin(a);
        p.score = u(0.2, 1.0);
        fr.ground_truths.push_back({g, eval::Visibility::Full});
        fr.detections.push_back(p);
      }
    ds.frames.push_back(std::move(fr));
  }
  return ds;
}

void ec_map_direction() {
  eval::MatchConfig cfg;
  const eval::Dataset away = shifted_dataset(0.5, 8), toward = shifted_dataset(-0.5, 8);
  const double map_away = eval::overlap_map(away, cfg, eval::Affinity::IouBev, eval::View::Roadside);
  const double ec_away = eval::ec_map(away, cfg);
  const double map_toward = eval::overlap_map(toward, cfg, eval::Affinity::IouBev, eval::View::Roadside);
  const double ec_toward = eval::ec_map(toward, cfg);
  report(ec_away < map_away && ec_toward >= map_toward, "ec-map-direction",
         fmt("away: EC-mAP %.4f vs mAP %.4f; toward: EC-mAP %.4f vs mAP %.4f", ec_away, map_away, ec_toward,
             map_toward));
}

eval::Dataset large_dataset() {
  std::mt19937_64 rng(1000);
  auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  eval::Dataset ds = class_dataset();
  const char* labels[] = {"car", "cyclist", "pedestrian"};
  for (int f = 0; f < 1000; ++f) {
    eval::FrameAnnotations fr;
    fr.frame_id = fmt("%05d", f);
    fr.camera = CameraModel::front_facing(1.0, {0, 0, 1.5}, FieldOfView{1.0, 0.6});
    for (int n = 0; n < 8; ++n) {
      const char* label = labels[n % 3];
      const Box3D g{{u(5, 60), u(-20, 20), 0.8}, u(0.6, 2.2), u(0.6, 5), 1.6, u(-3.14, 3.14), label, {}};
      fr.ground_truths.push_back({g, u(0, 1) < 0.15 ? eval::Visibility::Occluded : eval::Visibility::Full});
      if (u(0, 1) < 0.8) {
        Box3D p = g;
        p.center.x += u(-0.8, 0.8);
        p.center.y += u(-0.8, 0.8);
        p.yaw += u(-0.2, 0.2);
        p.score = u(0.05, 1.0);
        fr.detections.push_back(p);
      }
    }
    for (int n = 0; n < 2; ++n)
      fr.detections.push_back(Box3D{{u(5, 60), u(-20, 20), 0.8}, 1.8, 4.4, 1.6, u(-3.14, 3.14), labels[n], u(0.05, 0.6)});
    ds.frames.push_back(std::move(fr));
  }
  return ds;
}

void determinism_and_throughput() {
  const eval::Dataset ds = large_dataset();
  io::RunConfig cfg;
  std::vector<std::string> outputs;
  for (unsigned w : {1u, 4u, 16u}) {
    cfg.workers = w;
    outputs.push_back(report::render(eval::evaluate(ds, cfg.match, w), cfg));
  }
  // The echoed config carries the worker count; compare everything else.
  for (auto& out : outputs) {
    io::Json j = io::Json::parse(out);
    j["config"].erase("workers");
    out = j.dump(2);
  }
  const bool same = outputs[0] == outputs[1] && outputs[1] == outputs[2];

  std::vector<std::pair<Box3D, Box3D>> pairs;
  for (const auto& fr : ds.frames)
    for (std::size_t i = 0; i < fr.detections.size() && i < fr.ground_truths.size(); ++i)
      pairs.emplace_back(fr.detections[i], fr.ground_truths[i].box);
  const CameraModel cam = CameraModel::front_facing();
  double sink = 0;
  std::size_t done = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int rep = 0; rep < 20; ++rep)
    for (const auto& [p, g] : pairs) {
      try {
        sink += usc::usc_pair(p, g, cam).usc;
      } catch (const Error&) {
      }
      sink += eciou::ec_iou(p, g, {0, 0}, {2.0});
      ++done;
    }
  const double rate = static_cast<double>(done) / seconds_since(t0);
  report(same && rate >= 1e5, "determinism-throughput",
         fmt("1000 frames, workers {1,4,16} %s (%zu bytes); %.3g pairs/s single-threaded (checksum %.6g)",
             same ? "identical" : "DIFFER", outputs[0].size(), rate, sink));
}

}  // namespace

int main() {
  std::printf("safedet acceptance suite\n");
  const auto t0 = std::chrono::steady_clock::now();
  table_v();
  sensitivity();
  nds_usc_recomposition();
  approximation_quality();
  alpha_zero_reduction();
  valuation_sweep();
  gradient_parity();
  usc_properties();
  matching_oracle();
  ec_map_direction();
  determinism_and_throughput();
  std::printf("%d check(s) failed, %.1f s\n", g_failed, seconds_since(t0));
  return std::min(g_failed, 255);
}
