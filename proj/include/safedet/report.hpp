#pragma once

// Report rendering (JSON, CSV, Markdown) for evaluation, impact and compare
// output. All renderers are deterministic functions of their inputs.

#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "safedet/eval.hpp"
#include "safedet/impact.hpp"
#include "safedet/io.hpp"

namespace safedet::report {

using io::Json;
using io::ReportFormat;

inline constexpr std::string_view kReportSchema = "safedet-report";

inline std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Shortest round-trip spelling, identical to the JSON output.
inline std::string exact(double v) { return Json(v).dump(); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// ---------------------------------------------------------------------------
// Evaluation report

inline Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json summary_json(const eval::MetricReport& r) {
  return Json{{"frames", r.frames},
              {"tp", r.tp},
              {"fp", r.fp},
              {"fn", r.fn},
              {"skipped", r.skipped},
              {"mAP", r.map},
              {"mAUSC", r.mausc},
              {"mAIoU", r.maiou},
              {"mAEC-IoU", r.maeciou},
              {"mATE", r.mate},
              {"mATE'", r.mate_prime},
              {"NDS", r.nds},
              {"NDS-USC", r.nds_usc},
              {"EC-mAP", optional_number(r.ec_map)},
              {"EV-mAP", optional_number(r.ev_map)},
              {"RV-mAP", optional_number(r.rv_map)}};
}

inline Json to_json(const eval::MetricReport& r, const io::RunConfig& cfg) {
  Json classes = Json::array();
  for (const auto& c : r.classes) {
    classes.push_back(Json{{"label", c.label},
                           {"family", io::to_string(c.family)},
                           {"num_gt", c.num_gt},
                           {"num_det", c.num_det},
                           {"tp", c.tp},
                           {"fp", c.fp},
                           {"fn", c.fn},
                           {"AP", c.ap},
                           {"AUSC", c.ausc},
                           {"AIoU", c.aiou},
                           {"AEC-IoU", c.aeciou},
                           {"ATE", c.ate},
                           {"EC-AP", optional_number(c.ec_ap)}});
  }
  Json skipped = Json::object();
  for (const auto& [reason, n] : r.skipped_reasons) skipped[reason] = n;
  return Json{{"schema", kReportSchema},
              {"version", "1"},
              {"summary", summary_json(r)},
              {"classes", classes},
              {"excluded_classes", r.excluded_classes},
              {"skipped_reasons", skipped},
              {"notes", r.notes},
              {"config", io::config_to_json(cfg)}};
}

inline std::string to_csv(const eval::MetricReport& r) {
  std::string out = "scope,metric,value\n";
  const Json s = summary_json(r);
  for (auto it = s.begin(); it != s.end(); ++it)
    out += "summary," + csv_field(it.key()) + "," + (it->is_null() ? std::string() : it->dump()) + "\n";
  for (const auto& c : r.classes) {
    const std::string scope = csv_field(c.label);
    const std::pair<const char*, double> rows[] = {{"AP", c.ap},     {"AUSC", c.ausc}, {"AIoU", c.aiou},
                                                   {"AEC-IoU", c.aeciou}, {"ATE", c.ate}};
    out += scope + ",num_gt," + std::to_string(c.num_gt) + "\n";
    out += scope + ",tp," + std::to_string(c.tp) + "\n";
    out += scope + ",fp," + std::to_string(c.fp) + "\n";
    out += scope + ",fn," + std::to_string(c.fn) + "\n";
    for (const auto& [name, v] : rows) out += scope + "," + name + "," + exact(v) + "\n";
    if (c.ec_ap) out += scope + ",EC-AP," + exact(*c.ec_ap) + "\n";
  }
  return out;
}

inline std::string to_markdown(const eval::MetricReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? fixed(*v) : std::string("n/a"); };
  std::string out = "## Summary\n\n| metric | value |\n|---|---|\n";
  out += "| frames | " + std::to_string(r.frames) + " |\n";
  out += "| TP / FP / FN | " + std::to_string(r.tp) + " / " + std::to_string(r.fp) + " / " + std::to_string(r.fn) + " |\n";
  out += "| skipped | " + std::to_string(r.skipped) + " |\n";
  out += "| mAP | " + fixed(r.map) + " |\n";
  out += "| mAUSC | " + fixed(r.mausc) + " |\n";
  out += "| mAIoU | " + fixed(r.maiou) + " |\n";
  out += "| mAEC-IoU | " + fixed(r.maeciou) + " |\n";
  out += "| mATE (m) | " + fixed(r.mate) + " |\n";
  out += "| NDS | " + fixed(r.nds) + " |\n";
  out += "| NDS-USC | " + fixed(r.nds_usc) + " |\n";
  out += "| EC-mAP | " + opt(r.ec_map) + " |\n";
  out += "| EV-mAP | " + opt(r.ev_map) + " |\n";
  out += "| RV-mAP | " + opt(r.rv_map) + " |\n";
  out += "\n## Classes\n\n| class | GT | TP | FP | FN | AP | AUSC | AIoU | AEC-IoU | ATE | EC-AP |\n";
  out += "|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& c : r.classes) {
    out += "| " + c.label + " | " + std::to_string(c.num_gt) + " | " + std::to_string(c.tp) + " | " +
           std::to_string(c.fp) + " | " + std::to_string(c.fn) + " | " + fixed(c.ap) + " | " + fixed(c.ausc) + " | " +
           fixed(c.aiou) + " | " + fixed(c.aeciou) + " | " + fixed(c.ate) + " | " + opt(c.ec_ap) + " |\n";
  }
  if (!r.excluded_classes.empty()) {
    out += "\nExcluded (no ground truth):";
    for (const auto& l : r.excluded_classes) out += " " + l;
    out += "\n";
  }
  for (const auto& n : r.notes) out += "\nNote: " + n + "\n";
  return out;
}

inline std::string render(const eval::MetricReport& r, const io::RunConfig& cfg) {
  switch (cfg.format) {
    case ReportFormat::Json: return to_json(r, cfg).dump(2) + "\n";
    case ReportFormat::Csv: return to_csv(r);
    case ReportFormat::Markdown: return to_markdown(r);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Impact

inline Json to_json(const impact::ImpactResult& r) {
  return Json{{"av_reduction", r.av_reduction}, {"stage1", r.stage1},       {"stage2", r.stage2},
              {"beta", r.beta},                 {"delta_col", r.delta_col}, {"stage3", r.stage3},
              {"further_reduction", r.further_reduction}};
}

struct VisionZero {
  double mu_star = 0.0;
  double av_reduction = 0.0;
};

inline std::string render_impact(const std::vector<impact::ImpactResult>& rows, const impact::ImpactParams& params,
                                 const std::optional<VisionZero>& vz, ReportFormat format) {
  if (format == ReportFormat::Json) {
    Json table = Json::array();
    for (const auto& r : rows) table.push_back(to_json(r));
    Json out{{"params",
              {{"rate_per_million", params.rate_per_million},
               {"daily_volume", params.daily_volume},
               {"rho", params.rho},
               {"sigma_ecmap", params.sigma_ecmap},
               {"delta_ecmap", params.delta_ecmap}}},
             {"stages", table}};
    if (vz) out["vision_zero"] = Json{{"mu_star", vz->mu_star}, {"av_reduction", vz->av_reduction}};
    return out.dump(2) + "\n";
  }
  if (format == ReportFormat::Csv) {
    std::string out = "av_reduction,stage1,stage2,beta,delta_col,stage3,further_reduction\n";
    for (const auto& r : rows)
      out += exact(r.av_reduction) + "," + exact(r.stage1) + "," + exact(r.stage2) + "," + exact(r.beta) + "," +
             exact(r.delta_col) + "," + exact(r.stage3) + "," + exact(r.further_reduction) + "\n";
    if (vz) out += "# vision_zero mu_star=" + exact(vz->mu_star) + " av_reduction=" + exact(vz->av_reduction) + "\n";
    return out;
  }
  std::string out =
      "| AV reduction | stage 1 (/yr) | stage 2 (/yr) | beta | dCol | stage 3 (/yr) | further reduction |\n"
      "|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows)
    out += "| " + fixed(100.0 * r.av_reduction, 1) + "% | " + fixed(r.stage1, 3) + " | " + fixed(r.stage2, 3) + " | " +
           fixed(r.beta, 4) + " | " + fixed(r.delta_col, 3) + " | " + fixed(r.stage3, 3) + " | " +
           fixed(100.0 * r.further_reduction, 1) + "% |\n";
  if (vz)
    out += "\nVision Zero: mu* = " + fixed(vz->mu_star, 3) + " collisions/yr, required AV reduction " +
           fixed(100.0 * vz->av_reduction, 2) + "%\n";
  return out;
}

// ---------------------------------------------------------------------------
// Compare: per-metric deltas (b - a) between two JSON reports.

inline Json compare(const Json& a, const Json& b) {
  auto check = [](const Json& r, const char* which) {
    if (!r.is_object() || !r.contains("summary") || !r["summary"].is_object())
      fail(ErrorKind::SchemaError, std::string(which) + ": not a safedet JSON report");
  };
  check(a, "baseline");
  check(b, "candidate");
  auto delta = [](const Json& x, const Json& y) {
    Json d{{"baseline", x}, {"candidate", y}};
    d["delta"] = (x.is_number() && y.is_number()) ? Json(y.get<double>() - x.get<double>()) : Json(nullptr);
    return d;
  };
  Json summary = Json::object();
  const Json& sa = a["summary"];
  const Json& sb = b["summary"];
  for (auto it = sa.begin(); it != sa.end(); ++it)
    if (sb.contains(it.key())) summary[it.key()] = delta(it.value(), sb[it.key()]);

  Json classes = Json::object();
  if (a.contains("classes") && b.contains("classes") && a["classes"].is_array() && b["classes"].is_array()) {
    for (const auto& ca : a["classes"]) {
      if (!ca.is_object() || !ca.contains("label")) continue;
      for (const auto& cb : b["classes"]) {
        if (!cb.is_object() || cb.value("label", Json()) != ca["label"]) continue;
        Json m = Json::object();
        for (const char* key : {"AP", "AUSC", "AIoU", "AEC-IoU", "ATE", "EC-AP"})
          if (ca.contains(key) && cb.contains(key)) m[key] = delta(ca[key], cb[key]);
        classes[ca["label"].get<std::string>()] = m;
      }
    }
  }
  return Json{{"summary", summary}, {"classes", classes}};
}

inline std::string render_compare(const Json& cmp, ReportFormat format) {
  auto num = [](const Json& v) { return v.is_number() ? exact(v.get<double>()) : std::string(); };
  auto pretty = [](const Json& v) { return v.is_number() ? fixed(v.get<double>()) : std::string("n/a"); };
  if (format == ReportFormat::Json) return cmp.dump(2) + "\n";
  if (format == ReportFormat::Csv) {
    std::string out = "scope,metric,baseline,candidate,delta\n";
    for (auto it = cmp["summary"].begin(); it != cmp["summary"].end(); ++it)
      out += "summary," + csv_field(it.key()) + "," + num((*it)["baseline"]) + "," + num((*it)["candidate"]) + "," +
             num((*it)["delta"]) + "\n";
    for (auto c = cmp["classes"].begin(); c != cmp["classes"].end(); ++c)
      for (auto it = c->begin(); it != c->end(); ++it)
        out += csv_field(c.key()) + "," + it.key() + "," + num((*it)["baseline"]) + "," + num((*it)["candidate"]) +
               "," + num((*it)["delta"]) + "\n";
    return out;
  }
  std::string out = "| scope | metric | baseline | candidate | delta |\n|---|---|---|---|---|\n";
  for (auto it = cmp["summary"].begin(); it != cmp["summary"].end(); ++it)
    out += "| summary | " + it.key() + " | " + pretty((*it)["baseline"]) + " | " + pretty((*it)["candidate"]) + " | " +
           pretty((*it)["delta"]) + " |\n";
  for (auto c = cmp["classes"].begin(); c != cmp["classes"].end(); ++c)
    for (auto it = c->begin(); it != c->end(); ++it)
      out += "| " + c.key() + " | " + it.key() + " | " + pretty((*it)["baseline"]) + " | " +
             pretty((*it)["candidate"]) + " | " + pretty((*it)["delta"]) + " |\n";
  return out;
}

}  // namespace safedet::report
