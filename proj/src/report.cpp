#include "tda/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tda {

namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

Json bbox_json(const BBox& b) { return Json::array({b.x0, b.y0, b.x1, b.y1}); }

Json bins_json(const std::vector<BinRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"upper", json_real(r.upper)},
                   {"n", r.n},
                   {"detected", r.detected},
                   {"pd", json_real(r.pd)}});
  }
  return out;
}

}  // namespace

Json json_real(double v) {
  if (!std::isfinite(v)) return nullptr;
  const double r = std::strtod(fmt9(v).c_str(), nullptr);
  return r == 0.0 ? 0.0 : r;  // folds -0
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const DatasetStats& stats) {
  return {{"s_mean", json_real(stats.s_mean)},
          {"c_mean", json_real(stats.c_mean)},
          {"n_targets", stats.n_targets},
          {"dilation", stats.dilation}};
}

DatasetStats stats_from_json(const Json& j) {
  try {
    DatasetStats s;
    s.s_mean = j.at("s_mean").get<double>();
    s.c_mean = j.at("c_mean").get<double>();
    s.n_targets = j.at("n_targets").get<int>();
    s.dilation = j.value("dilation", 3);
    return s;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("stats JSON: ") + e.what());
  }
}

DatasetStats load_stats(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return stats_from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_stats(const std::filesystem::path& path, const DatasetStats& stats) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << dump_json(to_json(stats));
  if (!out) throw IoError("write failed: " + path.string());
}

Json to_json(const TargetLossRecord& rec) {
  return {{"label", rec.label},
          {"bbox", bbox_json(rec.bbox)},
          {"patch_bbox", bbox_json(rec.patch_bbox)},
          {"dilation", rec.dilation},
          {"p_t", json_real(rec.p_t)},
          {"s_t", rec.s_t},
          {"c_t", json_real(rec.c_t)},
          {"contrast_fallback", rec.contrast_fallback},
          {"soft_iou", json_real(rec.soft_iou)},
          {"loss", json_real(rec.loss)}};
}

Json loss_report(const CombinedLoss& loss, const BaseLossSpec& base, const TdaConfig& cfg) {
  Json per_target = Json::array();
  for (const auto& t : loss.tda.per_target) per_target.push_back(to_json(t));
  Json base_j = {{"kind", to_string(base.kind)}, {"value", json_real(loss.base.value)}};
  if (base.kind == BaseKind::focal) base_j["gamma"] = json_real(base.gamma);
  if (base.kind == BaseKind::tversky) {
    base_j["alpha"] = json_real(base.alpha);
    base_j["beta"] = json_real(base.beta);
  }
  return {{"loss", json_real(loss.total.value)},
          {"base", base_j},
          {"tda", json_real(loss.tda.loss.value)},
          {"w_T", json_real(cfg.w_T)},
          {"pred_resample", to_string(cfg.pred_resample)},
          {"fixed_p", cfg.p_override ? json_real(*cfg.p_override) : Json(nullptr)},
          {"n_targets", loss.tda.per_target.size()},
          {"per_target", per_target}};
}

Json to_json(const EvalReport& report) {
  Json roc = Json::array();
  for (const auto& p : report.roc) {
    roc.push_back({{"threshold", json_real(p.threshold)},
                   {"fa_e6", json_real(p.fa_e6)},
                   {"pd", json_real(p.pd)}});
  }
  return {{"threshold", json_real(report.threshold)},
          {"match", to_string(report.match)},
          {"iou", json_real(report.iou)},
          {"pd", json_real(report.pd)},
          {"fa_e6", json_real(report.fa_e6)},
          {"detected", report.totals.detected},
          {"targets", report.totals.total},
          {"fa_pixels", report.totals.fa_pixels},
          {"image_pixels", report.totals.image_pixels},
          {"roc", roc},
          {"binned_scale", bins_json(report.binned_scale)},
          {"binned_contrast", bins_json(report.binned_contrast)}};
}

std::string roc_csv(const std::vector<RocPoint>& points) {
  std::ostringstream out;
  out << "threshold,fa_e6,pd\n";
  for (const auto& p : points) out << fmt9(p.threshold) << ',' << fmt9(p.fa_e6) << ',' << fmt9(p.pd) << '\n';
  return out.str();
}

std::string bins_csv(const std::vector<BinRow>& rows) {
  std::ostringstream out;
  out << "bin_upper,n,pd\n";
  for (const auto& r : rows) out << fmt9(r.upper) << ',' << r.n << ',' << fmt9(r.pd) << '\n';
  return out.str();
}

SceneSpec scene_spec_from_json(const Json& j) {
  try {
    SceneSpec s;
    s.width = j.at("width").get<int>();
    s.height = j.at("height").get<int>();
    s.background = j.value("background", 100.0);
    s.noise_sigma = j.value("noise_sigma", 0.0);
    const auto profile = j.value("profile", std::string("flat"));
    if (profile == "flat") {
      s.profile = Profile::flat;
    } else if (profile == "gaussian") {
      s.profile = Profile::gaussian;
    } else {
      throw SpecError("scene profile must be 'flat' or 'gaussian'");
    }
    s.quantize = j.value("quantize", true);
    for (const auto& t : j.value("targets", Json::array())) {
      s.targets.push_back(SceneTarget{t.at("cx").get<double>(), t.at("cy").get<double>(),
                                      t.at("radius").get<double>(), t.at("amplitude").get<double>()});
    }
    s.validate();
    return s;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("scene spec JSON: ") + e.what());
  }
}

Json to_json(const SceneSpec& spec) {
  Json targets = Json::array();
  for (const auto& t : spec.targets) {
    targets.push_back({{"cx", t.cx}, {"cy", t.cy}, {"radius", t.radius}, {"amplitude", t.amplitude}});
  }
  return {{"width", spec.width},
          {"height", spec.height},
          {"background", spec.background},
          {"noise_sigma", spec.noise_sigma},
          {"profile", spec.profile == Profile::flat ? "flat" : "gaussian"},
          {"quantize", spec.quantize},
          {"targets", targets}};
}

}  // namespace tda
