#include "tda/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "tda/gradcheck.hpp"
#include "tda/io.hpp"
#include "tda/loss.hpp"
#include "tda/metrics.hpp"
#include "tda/report.hpp"
#include "tda/synth.hpp"
#include "tda/targets.hpp"
#include "tda/version.hpp"

namespace tda::cli {

namespace fs = std::filesystem;

namespace {

// Raised for command-level failures that map straight onto an exit code.
struct CommandFailure {
  int code;
  std::string message;
};

void write_output(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + out_path);
  f << text;
  if (!f) throw IoError("write failed: " + out_path);
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

Connectivity parse_connectivity(int c) {
  if (c == 4) return Connectivity::four;
  if (c == 8) return Connectivity::eight;
  throw DomainError("connectivity must be 4 or 8");
}

Resample resample_from(const std::string& name) {
  const auto m = parse_resample(name);
  if (!m) throw DomainError("unknown resample mode '" + name + "'");
  return *m;
}

std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int i = 0; i <= 10; ++i) t.push_back(i / 10.0);
  return t;
}

// Options shared by commands that evaluate the TDA loss. Values from a JSON
// config file act as defaults; flags given on the command line win.
struct LossOptions {
  std::string config;
  std::string base = "iou";
  double gamma = 2.0;
  double alpha = 0.3;
  double beta = 0.7;
  double w_T = 0.2;
  int patch_size = 48;
  int d_min = 2;
  int d_max = 5;
  double eps = 1e-6;
  double fixed_p = 0.0;
  std::string pred_resample = "nearest";
  int connectivity = 8;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON config file (flags override it)");
    cmd->add_option("--base", base, "base loss: bce, focal, tversky, iou, dice");
    cmd->add_option("--gamma", gamma, "focal gamma");
    cmd->add_option("--alpha", alpha, "tversky false-positive weight");
    cmd->add_option("--beta", beta, "tversky false-negative weight");
    cmd->add_option("--w_T,--w-t", w_T, "weight of the TDA term");
    cmd->add_option("--patch-size", patch_size, "patch side length");
    cmd->add_option("--d-min", d_min, "minimum box dilation");
    cmd->add_option("--d-max", d_max, "maximum box dilation");
    cmd->add_option("--eps", eps, "soft IoU smoothing");
    cmd->add_option("--fixed-p", fixed_p, "use this exponent for every target");
    cmd->add_option("--pred-resample", pred_resample, "prediction patch sampling: nearest or bilinear");
    cmd->add_option("--connectivity", connectivity, "4 or 8");
  }

  void resolve(const CLI::App* cmd, BaseLossSpec& b, TdaConfig& t) const {
    std::optional<double> fixed;
    if (!config.empty()) {
      const auto j = load_json_file(config);
      const auto jb = j.value("base", Json::object());
      if (jb.contains("kind")) {
        const auto k = parse_base_kind(jb["kind"].get<std::string>());
        if (!k) throw DomainError("config: unknown base loss");
        b.kind = *k;
      }
      b.gamma = jb.value("gamma", b.gamma);
      b.alpha = jb.value("alpha", b.alpha);
      b.beta = jb.value("beta", b.beta);
      const auto jt = j.value("tda", Json::object());
      t.patch_size = jt.value("patch_size", t.patch_size);
      t.d_min = jt.value("d_min", t.d_min);
      t.d_max = jt.value("d_max", t.d_max);
      t.w_T = jt.value("w_T", t.w_T);
      t.eps = jt.value("eps", t.eps);
      if (jt.contains("fixed_p") && !jt["fixed_p"].is_null()) fixed = jt["fixed_p"].get<double>();
      if (jt.contains("pred_resample")) t.pred_resample = resample_from(jt["pred_resample"].get<std::string>());
      if (jt.contains("connectivity")) t.connectivity = parse_connectivity(jt["connectivity"].get<int>());
    }
    auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--base") || config.empty()) {
      const auto k = parse_base_kind(base);
      if (!k) throw DomainError("unknown base loss '" + base + "'");
      b.kind = *k;
    }
    if (given("--gamma")) b.gamma = gamma;
    if (given("--alpha")) b.alpha = alpha;
    if (given("--beta")) b.beta = beta;
    if (given("--w_T")) t.w_T = w_T;
    if (given("--patch-size")) t.patch_size = patch_size;
    if (given("--d-min")) t.d_min = d_min;
    if (given("--d-max")) t.d_max = d_max;
    if (given("--eps")) {
      t.eps = eps;
      b.eps = eps;
    }
    if (given("--fixed-p")) fixed = fixed_p;
    if (given("--pred-resample")) t.pred_resample = resample_from(pred_resample);
    if (given("--connectivity")) t.connectivity = parse_connectivity(connectivity);
    t.p_override = fixed;
    b.validate();
    t.validate();
  }
};

struct EvalOptions {
  std::string config;
  double threshold = 0.5;
  std::string match = "centroid";
  double centroid_distance = 3.0;
  int contrast_dilation = 3;
  int connectivity = 8;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON config file (flags override it)");
    cmd->add_option("--threshold", threshold, "binarization threshold")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--match", match, "target matching rule: centroid or overlap");
    cmd->add_option("--centroid-distance", centroid_distance, "centroid match radius in pixels");
    cmd->add_option("--contrast-dilation", contrast_dilation, "box dilation for contrast bins");
    cmd->add_option("--connectivity", connectivity, "4 or 8");
  }

  EvalConfig resolve(const CLI::App* cmd) const {
    EvalConfig c;
    if (!config.empty()) {
      const auto j = load_json_file(config).value("eval", Json::object());
      c.threshold = j.value("threshold", c.threshold);
      if (j.contains("match")) {
        const auto m = parse_match_rule(j["match"].get<std::string>());
        if (!m) throw DomainError("config: unknown match rule");
        c.match = *m;
      }
      c.centroid_distance = j.value("centroid_distance", c.centroid_distance);
      c.contrast_dilation = j.value("contrast_dilation", c.contrast_dilation);
      c.bins_scale = j.value("bins_scale", c.bins_scale);
      c.bins_contrast = j.value("bins_contrast", c.bins_contrast);
      if (j.contains("connectivity")) c.connectivity = parse_connectivity(j["connectivity"].get<int>());
    }
    auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--threshold")) c.threshold = threshold;
    if (given("--match") || config.empty()) {
      const auto m = parse_match_rule(match);
      if (!m) throw DomainError("unknown match rule '" + match + "'");
      c.match = *m;
    }
    if (given("--centroid-distance")) c.centroid_distance = centroid_distance;
    if (given("--contrast-dilation")) c.contrast_dilation = contrast_dilation;
    if (given("--connectivity")) c.connectivity = parse_connectivity(connectivity);
    c.validate();
    return c;
  }
};

// Test-split predictions paired with their masks and images. Predictions
// are looked up in pred_dir under the mask's file name.
struct EvalSet {
  std::vector<ProbMap> preds;
  std::vector<BinaryMask> masks;
  std::vector<GrayImage> images;
};

EvalSet load_eval_set(const std::string& pred_dir, const std::string& manifest_path) {
  const auto manifest = load_manifest(manifest_path);
  const auto entries = manifest.split(Split::test);
  if (entries.empty()) throw EmptyDataset("manifest has no test entries");
  std::vector<std::string> missing;
  for (const auto& e : entries) {
    const auto p = fs::path(pred_dir) / fs::path(e.mask_path).filename();
    if (!fs::exists(p)) missing.push_back(p.string());
  }
  if (!missing.empty()) {
    std::string msg = "missing prediction files:";
    for (const auto& m : missing) msg += "\n  " + m;
    throw IoError(msg);
  }
  EvalSet set;
  for (const auto& e : entries) {
    auto sample = load_sample(manifest, e);
    auto pred = load_prob(fs::path(pred_dir) / fs::path(e.mask_path).filename());
    require_same_shape(pred, sample.mask, ("prediction for " + e.mask_path).c_str());
    set.preds.push_back(std::move(pred));
    set.masks.push_back(std::move(sample.mask));
    set.images.push_back(std::move(sample.image));
  }
  return set;
}

void warn_fallbacks(const TdaImageLoss& tda, std::ostream& err) {
  for (const auto& t : tda.per_target) {
    if (t.contrast_fallback) {
      err << "warning: target " << t.label
          << " fills its patch; contrast measured against the global image mean\n";
    }
  }
}

// Deterministic random prediction map in [0.05, 0.95].
ProbMap random_prediction(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> p(static_cast<std::size_t>(w) * h);
  for (auto& v : p) v = 0.05 + 0.9 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return ProbMap(w, h, std::move(p));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Target-driven adaptive loss toolkit for infrared small target detection", "tda"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::function<void()> action;

  // stats
  std::string manifest_path, stats_out;
  int dilation = 3, stats_conn = 8;
  auto* stats_cmd = app.add_subcommand("stats", "compute training-set scale and contrast means");
  stats_cmd->add_option("manifest", manifest_path, "dataset manifest CSV")->required();
  stats_cmd->add_option("--dilation", dilation, "box dilation for contrast")->check(CLI::NonNegativeNumber);
  stats_cmd->add_option("--connectivity", stats_conn, "4 or 8");
  stats_cmd->add_option("--out", stats_out, "write stats JSON here instead of stdout");
  stats_cmd->callback([&] {
    action = [&] {
      const auto conn = parse_connectivity(stats_conn);
      const auto stats = dataset_stats(load_manifest(manifest_path), dilation, conn);
      if (stats_out.empty()) {
        out << dump_json(to_json(stats));
      } else {
        save_stats(stats_out, stats);
        out << "s_mean=" << stats.s_mean << " c_mean=" << stats.c_mean
            << " n_targets=" << stats.n_targets << " -> " << stats_out << "\n";
      }
    };
  });

  // loss
  std::string pred_path, mask_path, image_path, stats_path, loss_out;
  std::uint64_t seed = 0;
  LossOptions loss_opts;
  auto* loss_cmd = app.add_subcommand("loss", "evaluate base + w_T * TDA loss on one image");
  loss_cmd->add_option("pred", pred_path, "prediction PGM (probability * 255)")->required();
  loss_cmd->add_option("mask", mask_path, "ground-truth mask PGM")->required();
  loss_cmd->add_option("image", image_path, "input image PGM")->required();
  loss_cmd->add_option("stats", stats_path, "training stats JSON")->required();
  loss_cmd->add_option("--seed", seed, "seed for per-target dilation draws");
  loss_cmd->add_option("--out", loss_out, "write JSON here instead of stdout");
  loss_opts.add_to(loss_cmd);
  loss_cmd->callback([&] {
    action = [&] {
      BaseLossSpec base;
      TdaConfig cfg;
      loss_opts.resolve(loss_cmd, base, cfg);
      const auto pred = load_prob(pred_path);
      const auto mask = load_mask(mask_path);
      const auto image = load_gray(image_path);
      const auto stats = load_stats(stats_path);
      const auto loss = combined_loss(pred, mask, image, stats, base, cfg, seed, false);
      warn_fallbacks(loss.tda, err);
      write_output(dump_json(loss_report(loss, base, cfg)), loss_out, out);
    };
  });

  // eval
  std::string pred_dir, eval_manifest, eval_stats, eval_out, csv_dir, thresholds_arg;
  std::vector<double> roc_thresholds;
  EvalOptions eval_opts;
  auto* eval_cmd = app.add_subcommand("eval", "IoU, Pd, Fa, ROC and binned Pd over the test split");
  eval_cmd->add_option("pred_dir", pred_dir, "directory of prediction PGMs named like the masks")->required();
  eval_cmd->add_option("manifest", eval_manifest, "dataset manifest CSV")->required();
  eval_cmd->add_option("--stats", eval_stats, "training stats JSON, echoed into the report");
  eval_cmd->add_option("--thresholds", roc_thresholds, "ROC thresholds (ascending)")->delimiter(',');
  eval_cmd->add_option("--csv-dir", csv_dir, "also write roc.csv, bins_scale.csv, bins_contrast.csv here");
  eval_cmd->add_option("--out", eval_out, "write JSON here instead of stdout");
  eval_opts.add_to(eval_cmd);
  eval_cmd->callback([&] {
    action = [&] {
      const auto cfg = eval_opts.resolve(eval_cmd);
      const auto thresholds = roc_thresholds.empty() ? default_thresholds() : roc_thresholds;
      std::optional<DatasetStats> stats;
      if (!eval_stats.empty()) stats = load_stats(eval_stats);
      const auto set = load_eval_set(pred_dir, eval_manifest);
      const auto report = evaluate(set.preds, set.masks, set.images, cfg, thresholds);
      auto j = to_json(report);
      j["n_images"] = set.preds.size();
      if (stats) j["stats"] = to_json(*stats);
      write_output(dump_json(j), eval_out, out);
      if (!csv_dir.empty()) {
        fs::create_directories(csv_dir);
        write_output(roc_csv(report.roc), (fs::path(csv_dir) / "roc.csv").string(), out);
        write_output(bins_csv(report.binned_scale), (fs::path(csv_dir) / "bins_scale.csv").string(), out);
        write_output(bins_csv(report.binned_contrast), (fs::path(csv_dir) / "bins_contrast.csv").string(), out);
      }
    };
  });

  // roc
  std::string roc_pred_dir, roc_manifest, roc_out;
  std::vector<double> roc_list;
  EvalOptions roc_opts;
  auto* roc_cmd = app.add_subcommand("roc", "threshold sweep of (Fa, Pd) as CSV");
  roc_cmd->add_option("pred_dir", roc_pred_dir, "directory of prediction PGMs")->required();
  roc_cmd->add_option("manifest", roc_manifest, "dataset manifest CSV")->required();
  roc_cmd->add_option("--thresholds", roc_list, "thresholds (ascending)")->delimiter(',');
  roc_cmd->add_option("--out", roc_out, "write CSV here instead of stdout");
  roc_opts.add_to(roc_cmd);
  roc_cmd->callback([&] {
    action = [&] {
      const auto cfg = roc_opts.resolve(roc_cmd);
      const auto thresholds = roc_list.empty() ? default_thresholds() : roc_list;
      const auto set = load_eval_set(roc_pred_dir, roc_manifest);
      write_output(roc_csv(roc(set.preds, set.masks, cfg, thresholds)), roc_out, out);
    };
  });

  // bins
  std::string bins_pred_dir, bins_manifest, bins_out, bins_axis = "scale";
  EvalOptions bins_opts;
  auto* bins_cmd = app.add_subcommand("bins", "Pd over cumulative scale or contrast ranges as CSV");
  bins_cmd->add_option("pred_dir", bins_pred_dir, "directory of prediction PGMs")->required();
  bins_cmd->add_option("manifest", bins_manifest, "dataset manifest CSV")->required();
  bins_cmd->add_option("--axis", bins_axis, "scale or contrast")->check(CLI::IsMember({"scale", "contrast"}));
  bins_cmd->add_option("--out", bins_out, "write CSV here instead of stdout");
  bins_opts.add_to(bins_cmd);
  bins_cmd->callback([&] {
    action = [&] {
      const auto cfg = bins_opts.resolve(bins_cmd);
      const auto set = load_eval_set(bins_pred_dir, bins_manifest);
      const auto axis = bins_axis == "scale" ? BinAxis::scale : BinAxis::contrast;
      write_output(bins_csv(binned_pd(set.preds, set.masks, set.images, cfg, axis)), bins_out, out);
    };
  });

  // gradcheck
  std::string gc_loss = "tda";
  int gc_size = 64, gc_samples = 50, gc_targets = 3;
  std::uint64_t gc_seed = 0;
  double gc_eps = 1e-5, gc_tol = 1e-4;
  LossOptions gc_opts;
  auto* gc_cmd = app.add_subcommand("gradcheck", "finite-difference check of analytic gradients");
  gc_cmd->add_option("--loss", gc_loss, "bce, focal, tversky, iou, dice, tda or total")
      ->check(CLI::IsMember({"bce", "focal", "tversky", "iou", "dice", "tda", "total"}));
  gc_cmd->add_option("--size", gc_size, "scene side length")->check(CLI::Range(8, 4096));
  gc_cmd->add_option("--targets", gc_targets, "number of targets in the scene")->check(CLI::Range(0, 64));
  gc_cmd->add_option("--samples", gc_samples, "pixels to check")->check(CLI::PositiveNumber);
  gc_cmd->add_option("--seed", gc_seed, "scene and sampling seed");
  gc_cmd->add_option("--eps-fd", gc_eps, "finite-difference step")->check(CLI::PositiveNumber);
  gc_cmd->add_option("--tol", gc_tol, "maximum accepted relative error")->check(CLI::PositiveNumber);
  gc_opts.add_to(gc_cmd);
  gc_cmd->callback([&] {
    action = [&] {
      BaseLossSpec base;
      TdaConfig cfg;
      gc_opts.resolve(gc_cmd, base, cfg);
      if (gc_loss != "tda" && gc_loss != "total") base.kind = *parse_base_kind(gc_loss);
      const auto scene = generate_scene(random_scene_spec(gc_size, gc_size, gc_targets, gc_seed), gc_seed);
      const Sample sample{scene.image, scene.mask};
      const DatasetStats stats = foreground_count(scene.mask) > 0
                                     ? dataset_stats(std::span(&sample, 1), 3, cfg.connectivity)
                                     : DatasetStats{10.0, 20.0, 1, 3};
      const auto pred = random_prediction(gc_size, gc_size, gc_seed + 1);
      LossClosure closure = [&](const ProbMap& p, bool want) -> LossValue {
        if (gc_loss == "tda") return tda_image_loss(p, scene.mask, scene.image, stats, cfg, gc_seed, want).loss;
        if (gc_loss == "total") {
          return combined_loss(p, scene.mask, scene.image, stats, base, cfg, gc_seed, want).total;
        }
        return base_loss(base, p, scene.mask, want);
      };
      const auto idx = sample_indices_near_targets(scene.mask, cfg.d_max, static_cast<std::size_t>(gc_samples), gc_seed);
      const auto r = grad_check(closure, pred, gc_eps, idx);
      const bool pass = r.max_rel_error < gc_tol;
      out << dump_json({{"loss", gc_loss},
                        {"samples", r.samples},
                        {"max_rel_error", json_real(r.max_rel_error)},
                        {"worst_index", r.worst_index},
                        {"analytic", json_real(r.analytic_at_worst)},
                        {"numeric", json_real(r.numeric_at_worst)},
                        {"tol", json_real(gc_tol)},
                        {"pass", pass}});
      if (!pass) throw CommandFailure{kCheckFailed, "gradient check failed"};
    };
  });

  // synth
  std::string synth_spec, synth_dir, synth_manifest, synth_prefix = "scene", synth_split = "train";
  bool synth_random = false;
  int synth_size = 64, synth_targets = 3, synth_count = 1;
  double synth_noise = 4.0;
  std::uint64_t synth_seed = 0;
  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic scenes as PGM pairs");
  auto* spec_opt = synth_cmd->add_option("--spec", synth_spec, "scene spec JSON");
  auto* random_opt = synth_cmd->add_flag("--random", synth_random, "use random disk targets instead of a spec");
  spec_opt->excludes(random_opt);
  synth_cmd->add_option("--count", synth_count, "number of scenes (seeds seed..seed+count-1)")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--size", synth_size, "side length for random scenes")->check(CLI::Range(8, 4096));
  synth_cmd->add_option("--targets", synth_targets, "targets per random scene")->check(CLI::Range(0, 64));
  synth_cmd->add_option("--noise", synth_noise, "noise sigma for random scenes")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--seed", synth_seed, "base seed");
  synth_cmd->add_option("--out-dir", synth_dir, "output directory")->required();
  synth_cmd->add_option("--prefix", synth_prefix, "file name prefix");
  synth_cmd->add_option("--split", synth_split, "manifest split")->check(CLI::IsMember({"train", "test"}));
  synth_cmd->add_option("--manifest", synth_manifest, "manifest CSV to create or append to");
  synth_cmd->callback([&] {
    action = [&] {
      if (synth_spec.empty() && !synth_random) throw DomainError("synth needs --spec or --random");
      std::optional<SceneSpec> fixed;
      if (!synth_spec.empty()) fixed = scene_spec_from_json(load_json_file(synth_spec));
      fs::create_directories(synth_dir);
      DatasetManifest manifest;
      fs::path manifest_path;
      if (!synth_manifest.empty()) {
        manifest_path = synth_manifest;
        if (fs::exists(manifest_path)) manifest = load_manifest(manifest_path);
      }
      for (int k = 0; k < synth_count; ++k) {
        const std::uint64_t s = synth_seed + static_cast<std::uint64_t>(k);
        const auto spec = fixed ? *fixed : random_scene_spec(synth_size, synth_size, synth_targets, s, synth_noise);
        const auto scene = generate_scene(spec, s);
        const std::string stem = synth_prefix + "_" + std::to_string(s);
        const auto image_file = fs::path(synth_dir) / (stem + "_image.pgm");
        const auto mask_file = fs::path(synth_dir) / (stem + "_mask.pgm");
        save_gray(image_file, scene.image);
        save_mask(mask_file, scene.mask);
        if (!manifest_path.empty()) {
          const auto base = manifest_path.parent_path();
          manifest.entries.push_back(ManifestEntry{
              fs::relative(fs::absolute(image_file), fs::absolute(base)).generic_string(),
              fs::relative(fs::absolute(mask_file), fs::absolute(base)).generic_string(),
              synth_split == "train" ? Split::train : Split::test});
        }
        out << image_file.string() << "," << mask_file.string() << "\n";
      }
      if (!manifest_path.empty()) save_manifest(manifest_path, manifest);
    };
  });

  // fitdemo
  std::string fit_image, fit_mask, fit_stats, fit_out, fit_pred_out;
  int fit_steps = 500;
  double fit_step = 0.0;
  bool fit_no_tda = false, fit_no_base = false;
  std::uint64_t fit_seed = 0;
  LossOptions fit_opts;
  auto* fit_cmd = app.add_subcommand("fitdemo", "gradient descent of a free prediction map");
  fit_cmd->add_option("image", fit_image, "input image PGM")->required();
  fit_cmd->add_option("mask", fit_mask, "ground-truth mask PGM")->required();
  fit_cmd->add_option("stats", fit_stats, "training stats JSON")->required();
  fit_cmd->add_option("--steps", fit_steps, "descent steps")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--step-size", fit_step, "step size (default: 0.5 * pixel count)")->check(CLI::NonNegativeNumber);
  fit_cmd->add_flag("--no-tda", fit_no_tda, "optimize the base loss alone");
  fit_cmd->add_flag("--no-base", fit_no_base, "optimize w_T * TDA alone");
  fit_cmd->add_option("--seed", fit_seed, "seed for dilation draws");
  fit_cmd->add_option("--out", fit_out, "write JSON here instead of stdout");
  fit_cmd->add_option("--save-pred", fit_pred_out, "write the final prediction PGM here");
  fit_opts.add_to(fit_cmd);
  fit_cmd->callback([&] {
    action = [&] {
      FitObjective obj;
      fit_opts.resolve(fit_cmd, obj.base, obj.tda);
      obj.use_tda = !fit_no_tda;
      obj.use_base = !fit_no_base;
      const auto image = load_gray(fit_image);
      const auto mask = load_mask(fit_mask);
      const auto stats = load_stats(fit_stats);
      const double step = fit_cmd->count("--step-size") ? fit_step : 0.5 * static_cast<double>(mask.size());
      const auto r = fit_prediction(image, mask, stats, obj, fit_steps, step, fit_seed);
      Json traj = Json::array();
      for (double v : r.loss_trajectory) traj.push_back(json_real(v));
      Json soft = Json::array();
      for (double v : r.per_target_soft_iou) soft.push_back(json_real(v));
      write_output(dump_json({{"steps", fit_steps},
                              {"step_size", json_real(step)},
                              {"final_pixel_iou", json_real(r.final_pixel_iou)},
                              {"per_target_soft_iou", soft},
                              {"loss_trajectory", traj}}),
                   fit_out, out);
      if (!fit_pred_out.empty()) save_prob(fit_pred_out, r.final_pred);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const CommandFailure& f) {
    err << "error: " << f.message << "\n";
    return f.code;
  } catch (const EmptyTrainingSet& e) {
    err << "error: " << e.what() << "\n";
    return kEmptyData;
  } catch (const EmptyDataset& e) {
    err << "error: " << e.what() << "\n";
    return kEmptyData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace tda::cli
