// safedet command-line interface: eval, pair, impact, compare, schema.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "safedet/safedet.hpp"

namespace {

using safedet::Error;
using safedet::ErrorKind;
using safedet::io::Json;

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    double v = 0.0;
    const char* first = text.data() + pos;
    const char* last = text.data() + end;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) safedet::fail(ErrorKind::ConfigError, what + ": cannot parse '" + text + "'");
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

// START:STOP:STEP, inclusive of STOP up to rounding.
std::vector<double> parse_sweep(const std::string& spec) {
  std::vector<double> parts;
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t end = k < 2 ? spec.find(':', pos) : spec.size();
    if (end == std::string::npos) safedet::fail(ErrorKind::ConfigError, "--sweep expects START:STOP:STEP");
    const auto v = parse_numbers(spec.substr(pos, end - pos), "--sweep");
    parts.push_back(v.front());
    pos = end + 1;
  }
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0) || !(stop >= start)) safedet::fail(ErrorKind::ConfigError, "--sweep needs STEP > 0 and STOP >= START");
  std::vector<double> values;
  const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
  if (n > 10'000'000) safedet::fail(ErrorKind::ConfigError, "--sweep produces too many points");
  for (long long i = 0; i <= n; ++i) values.push_back(start + static_cast<double>(i) * step);
  return values;
}

safedet::Box3D parse_box(const std::string& text, const std::string& what) {
  const auto v = parse_numbers(text, what);
  if (v.size() != 7) safedet::fail(ErrorKind::ConfigError, what + " expects x,y,z,width,length,height,yaw");
  safedet::Box3D b{{v[0], v[1], v[2]}, v[3], v[4], v[5], v[6], "object", std::nullopt};
  safedet::validate(b);
  return b;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) safedet::fail(ErrorKind::ConfigError, path + ": cannot open for writing");
  out << text;
}

int report_error(std::string_view kind, const std::string& message, int code) {
  const Json err{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  std::cerr << err.dump() << "\n";
  return code;
}

struct CommonOptions {
  std::string config;
  std::string format;
  std::string out;
  std::optional<unsigned> workers;
};

safedet::io::RunConfig base_config(const CommonOptions& o) {
  safedet::io::RunConfig cfg = o.config.empty() ? safedet::io::RunConfig{} : safedet::io::load_config(o.config);
  if (!o.format.empty()) {
    const auto f = safedet::io::parse_format(o.format);
    if (!f) safedet::fail(ErrorKind::ConfigError, "--format expects json, csv or markdown");
    cfg.format = *f;
  }
  if (o.workers) cfg.workers = *o.workers;
  return cfg;
}

std::string pair_report(const safedet::Box3D& p, const safedet::Box3D& g, const safedet::CameraModel& cam,
                        const std::vector<double>& alphas, const safedet::io::RunConfig& cfg) {
  namespace usc = safedet::usc;
  namespace eciou = safedet::eciou;
  Json j = Json::object();
  try {
    const usc::UscResult r = usc::usc_pair(p, g, cam, {}, safedet::kDefaultEpsDepth, cfg.match.eps_dist);
    j["iogt"] = r.iogt;
    j["adr"] = r.adr;
    j["usc"] = r.usc;
    j["pv_ok"] = r.pv_ok;
    j["bev_ok"] = r.bev_ok;
    j["usc_ok"] = r.usc_ok;
  } catch (const Error& e) {
    j["usc_error"] = {{"kind", safedet::to_string(e.kind())}, {"message", e.detail()}};
  }
  j["iou"] = eciou::bev_iou(p, g);
  j["center_distance"] = safedet::norm(p.bev_center() - g.bev_center());
  Json ec = Json::object();
  for (double a : alphas) {
    eciou::EcIouParams params = cfg.eciou();
    params.alpha = a;
    eciou::validate(params);
    ec[safedet::report::exact(a)] = eciou::ec_iou(p, g, {}, params);
  }
  j["ec_iou"] = ec;

  using safedet::io::ReportFormat;
  if (cfg.format == ReportFormat::Json) return j.dump(2) + "\n";
  std::vector<std::pair<std::string, std::string>> rows;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "ec_iou") {
      for (auto e = it->begin(); e != it->end(); ++e) rows.emplace_back("ec_iou(alpha=" + e.key() + ")", e->dump());
    } else if (it.key() == "usc_error") {
      rows.emplace_back("usc_error", (*it)["kind"].get<std::string>());
    } else {
      rows.emplace_back(it.key(), it->dump());
    }
  }
  std::string out = cfg.format == ReportFormat::Csv ? "metric,value\n" : "| metric | value |\n|---|---|\n";
  for (const auto& [k, v] : rows)
    out += cfg.format == ReportFormat::Csv ? k + "," + v + "\n" : "| " + k + " | " + v + " |\n";
  return out;
}

// IoU and EC-IoU (per alpha) as the prediction slides along ego x.
std::string pair_sweep(const safedet::Box3D& p, const safedet::Box3D& g, const std::vector<double>& offsets,
                       const std::vector<double>& alphas, const safedet::io::RunConfig& cfg) {
  std::string out = "offset,iou";
  for (double a : alphas) out += ",ec_iou_alpha_" + safedet::report::exact(a);
  out += "\n";
  for (double dx : offsets) {
    safedet::Box3D q = p;
    q.center.x += dx;
    out += safedet::report::exact(dx) + "," + safedet::report::exact(safedet::eciou::bev_iou(q, g));
    for (double a : alphas) {
      safedet::eciou::EcIouParams params = cfg.eciou();
      params.alpha = a;
      out += "," + safedet::report::exact(safedet::eciou::ec_iou(q, g, {}, params));
    }
    out += "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safety-oriented 3D detection evaluation: USC, EC-IoU, NDS-USC, EC-mAP and safety impact"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "safedet 1.0.0");

  CommonOptions common;
  auto add_common = [&](CLI::App* sub, bool with_workers) {
    sub->add_option("--config", common.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "csv", "markdown", "md"}));
    sub->add_option("--out", common.out, "Write output to PATH instead of stdout");
    if (with_workers) sub->add_option("--workers", common.workers, "Worker threads (0 = auto)");
  };

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate detections against ground truth");
  std::string dataset_path, view, affinity;
  std::optional<double> alpha;
  eval_cmd->add_option("--dataset", dataset_path, "Dataset file (JSON)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--view", view, "Evaluation view")->check(CLI::IsMember({"ego", "roadside"}));
  eval_cmd->add_option("--affinity", affinity, "Matching affinity")->check(CLI::IsMember({"dist", "iou", "eciou"}));
  eval_cmd->add_option("--alpha", alpha, "EC-IoU exponent");
  add_common(eval_cmd, true);

  // pair
  auto* pair_cmd = app.add_subcommand("pair", "Diagnose one prediction/ground-truth pair");
  std::string pred_text, gt_text, alphas_text = "0,1,2,4", sweep_text;
  double focal = 1.0;
  std::string mount_text = "0,0,0";
  pair_cmd->add_option("--pred", pred_text, "Prediction x,y,z,width,length,height,yaw")->required();
  pair_cmd->add_option("--gt", gt_text, "Ground truth x,y,z,width,length,height,yaw")->required();
  pair_cmd->add_option("--alpha", alphas_text, "Comma-separated EC-IoU exponents")->capture_default_str();
  pair_cmd->add_option("--focal", focal, "Camera focal length")->capture_default_str();
  pair_cmd->add_option("--camera-mount", mount_text, "Forward camera position x,y,z in the ego frame")
      ->capture_default_str();
  pair_cmd->add_option("--sweep", sweep_text, "Slide the prediction along ego x over START:STOP:STEP (CSV)");
  add_common(pair_cmd, false);

  // impact
  auto* impact_cmd = app.add_subcommand("impact", "Intersection safety-impact model");
  std::string impact_sweep;
  bool vision_zero = false;
  std::optional<double> av_reduction;
  impact_cmd->add_option("--av-reduction", av_reduction, "AV collision reduction fraction in [0, 1]");
  impact_cmd->add_option("--sweep", impact_sweep, "Sweep the AV reduction over START:STOP:STEP");
  impact_cmd->add_flag("--vision-zero", vision_zero, "Report the Vision-Zero threshold");
  add_common(impact_cmd, false);

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Per-metric deltas between two JSON reports");
  std::string baseline_path, candidate_path;
  compare_cmd->add_option("baseline", baseline_path, "Baseline report")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("candidate", candidate_path, "Candidate report")->required()->check(CLI::ExistingFile);
  add_common(compare_cmd, false);

  // schema
  auto* schema_cmd = app.add_subcommand("schema", "Print the dataset schema reference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("UsageError", e.what(), 3);
  }

  try {
    if (schema_cmd->parsed()) {
      std::cout << safedet::io::kSchemaReference;
      return 0;
    }

    safedet::io::RunConfig cfg = base_config(common);

    if (eval_cmd->parsed()) {
      if (!view.empty()) cfg.match.view = *safedet::io::parse_view(view);
      if (!affinity.empty()) cfg.match.affinity = *safedet::io::parse_affinity(affinity);
      if (alpha) cfg.match.alpha = *alpha;
      safedet::io::validate(cfg);
      const safedet::eval::Dataset ds = safedet::io::load_dataset(dataset_path);
      const auto rep = safedet::eval::evaluate(ds, cfg.match, safedet::resolve_workers(cfg.workers));
      write_output(safedet::report::render(rep, cfg), common.out);
      return 0;
    }

    if (pair_cmd->parsed()) {
      const safedet::Box3D p = parse_box(pred_text, "--pred");
      const safedet::Box3D g = parse_box(gt_text, "--gt");
      const auto alphas = parse_numbers(alphas_text, "--alpha");
      const auto mount = parse_numbers(mount_text, "--camera-mount");
      if (mount.size() != 3) safedet::fail(ErrorKind::ConfigError, "--camera-mount expects x,y,z");
      if (!(focal > 0.0)) safedet::fail(ErrorKind::ConfigError, "--focal must be > 0");
      safedet::eciou::validate(cfg.eciou());
      for (double a : alphas) {
        auto params = cfg.eciou();
        params.alpha = a;
        safedet::eciou::validate(params);
      }
      if (!sweep_text.empty()) {
        write_output(pair_sweep(p, g, parse_sweep(sweep_text), alphas, cfg), common.out);
      } else {
        const auto cam = safedet::CameraModel::front_facing(focal, {mount[0], mount[1], mount[2]});
        write_output(pair_report(p, g, cam, alphas, cfg), common.out);
      }
      return 0;
    }

    if (impact_cmd->parsed()) {
      if (av_reduction) cfg.impact.av_reduction = *av_reduction;
      safedet::impact::validate(cfg.impact);
      const std::vector<double> reductions =
          impact_sweep.empty() ? std::vector<double>{cfg.impact.av_reduction} : parse_sweep(impact_sweep);
      const auto rows = safedet::impact::sensitivity_sweep(cfg.impact, reductions);
      std::optional<safedet::report::VisionZero> vz;
      if (vision_zero)
        vz = safedet::report::VisionZero{
            safedet::impact::vision_zero_threshold(cfg.impact.rho, cfg.impact.sigma_ecmap, cfg.impact.delta_ecmap),
            safedet::impact::vision_zero_av_reduction(cfg.impact)};
      write_output(safedet::report::render_impact(rows, cfg.impact, vz, cfg.format), common.out);
      return 0;
    }

    if (compare_cmd->parsed()) {
      const Json a = safedet::io::parse_json(safedet::io::read_file(baseline_path, ErrorKind::SchemaError),
                                             ErrorKind::SchemaError, baseline_path);
      const Json b = safedet::io::parse_json(safedet::io::read_file(candidate_path, ErrorKind::SchemaError),
                                             ErrorKind::SchemaError, candidate_path);
      write_output(safedet::report::render_compare(safedet::report::compare(a, b), cfg.format), common.out);
      return 0;
    }
  } catch (const Error& e) {
    return report_error(safedet::to_string(e.kind()), e.detail(), safedet::exit_code(e.kind()));
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what(), 4);
  }
  return report_error("UsageError", "no subcommand", 3);
}
