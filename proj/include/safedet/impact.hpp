#pragma once

// Intersection safety-impact model. Three traffic stages:
//   stage1  human-driven vehicles only: rate x volume x 365 / 1e6
//   stage2  mixed traffic with AVs:     stage1 x (1 - av_reduction)
//   stage3  AVs + cooperative perception: stage2 - |beta x delta_ecmap|,
// where beta = rho x sqrt(stage2) / sigma_ecmap treats the stage-2 collision
// count as Poisson (sigma = sqrt(mu)). EC-mAP quantities are in percentage
// points throughout.

#include <algorithm>
#include <cmath>
#include <vector>

#include "safedet/core.hpp"

namespace safedet::impact {

inline constexpr double kDaysPerYear = 365.0;

struct ImpactParams {
  double rate_per_million = 1.5;   // collisions per 1e6 entering vehicles
  double daily_volume = 20000.0;   // vehicles/day
  double av_reduction = 0.5;       // fraction
  double rho = -0.8;               // correlation, perception vs. collisions
  double sigma_ecmap = 5.0;        // percentage points
  double delta_ecmap = 7.5;        // percentage points

  friend bool operator==(const ImpactParams&, const ImpactParams&) = default;
};

struct ImpactResult {
  double av_reduction = 0.0;
  double stage1 = 0.0;
  double stage2 = 0.0;
  double stage3 = 0.0;
  double beta = 0.0;
  double delta_col = 0.0;
  double further_reduction = 0.0;  // (stage2 - stage3) / stage2
};

inline void validate(const ImpactParams& p) {
  if (!(p.rate_per_million >= 0.0)) fail(ErrorKind::ConfigError, "rate_per_million must be >= 0");
  if (!(p.daily_volume >= 0.0)) fail(ErrorKind::ConfigError, "daily_volume must be >= 0");
  if (!(p.av_reduction >= 0.0 && p.av_reduction <= 1.0)) fail(ErrorKind::ConfigError, "av_reduction must lie in [0, 1]");
  if (!(std::abs(p.rho) <= 1.0)) fail(ErrorKind::ConfigError, "|rho| must be <= 1");
  if (!(p.sigma_ecmap > 0.0)) fail(ErrorKind::ConfigError, "sigma_ecmap must be > 0");
  if (!std::isfinite(p.delta_ecmap)) fail(ErrorKind::ConfigError, "delta_ecmap must be finite");
}

inline double annual_collisions(double rate_per_million, double daily_volume) {
  return rate_per_million * daily_volume * kDaysPerYear / 1e6;
}

inline double apply_av_reduction(double base, double av_reduction) { return base * (1.0 - av_reduction); }

inline double slope_beta(double rho, double mu_stage2, double sigma_ecmap) {
  return rho * std::sqrt(mu_stage2) / sigma_ecmap;
}

inline double delta_collisions(double beta, double delta_ecmap) { return beta * delta_ecmap; }

// Residual collision count mu* that the cooperative-perception stage removes
// entirely: |rho| sqrt(mu) / sigma x delta = mu.
inline double vision_zero_threshold(double rho, double sigma_ecmap, double delta_ecmap) {
  const double k = std::abs(rho) * delta_ecmap / sigma_ecmap;
  return k * k;
}

// AV reduction ratio that brings stage2 down to mu*.
inline double vision_zero_av_reduction(const ImpactParams& p) {
  const double base = annual_collisions(p.rate_per_million, p.daily_volume);
  if (!(base > 0.0)) return 0.0;
  return 1.0 - vision_zero_threshold(p.rho, p.sigma_ecmap, p.delta_ecmap) / base;
}

inline ImpactResult run(const ImpactParams& p) {
  validate(p);
  ImpactResult r;
  r.av_reduction = p.av_reduction;
  r.stage1 = annual_collisions(p.rate_per_million, p.daily_volume);
  r.stage2 = apply_av_reduction(r.stage1, p.av_reduction);
  r.beta = slope_beta(p.rho, r.stage2, p.sigma_ecmap);
  r.delta_col = delta_collisions(r.beta, p.delta_ecmap);
  r.stage3 = std::max(0.0, r.stage2 - std::abs(r.delta_col));
  r.further_reduction = r.stage2 > 0.0 ? (r.stage2 - r.stage3) / r.stage2 : 0.0;
  return r;
}

inline std::vector<ImpactResult> sensitivity_sweep(ImpactParams p, const std::vector<double>& av_reductions) {
  std::vector<ImpactResult> table;
  table.reserve(av_reductions.size());
  for (double a : av_reductions) {
    p.av_reduction = a;
    table.push_back(run(p));
  }
  return table;
}

}  // namespace safedet::impact
