// Copyright 2026 The Repulse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "repulse/cli.h"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "repulse/assignment.h"
#include "repulse/dataio.h"
#include "repulse/evaluation.h"
#include "repulse/gradcheck.h"
#include "repulse/losses.h"
#include "repulse/nms.h"
#include "repulse/simulator.h"

namespace repulse {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

void Emit(std::ostream& out, const ojson& doc) { out << doc.dump(2) << "\n"; }

std::vector<Box> BoxList(const nlohmann::json& doc, const char* key,
                         bool required) {
  std::vector<Box> out;
  const auto it = doc.find(key);
  if (it == doc.end()) {
    if (required) throw DataError(std::string("missing field '") + key + "'");
    return out;
  }
  if (!it->is_array()) {
    throw DataError(std::string("field '") + key + "' must be an array");
  }
  for (std::size_t i = 0; i < it->size(); ++i) {
    out.push_back(BoxFromJson(
        (*it)[i], std::string(key) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

LossConfig LoadLossConfig(const std::string& path) {
  if (path.empty()) return LossConfig{};
  return LossConfigFromJson(ReadJsonFile(path));
}

ojson BreakdownJson(const LossBreakdown& l) {
  return {{"attraction", l.attraction},
          {"rep_gt", l.rep_gt},
          {"rep_box", l.rep_box},
          {"total", l.total},
          {"no_positives", l.no_positives}};
}

ojson AssignmentJson(const AssignmentSet& a) {
  ojson target = ojson::object(), rep = ojson::object(),
        part = ojson::object();
  for (std::size_t p : a.positive_indices) {
    const std::string k = std::to_string(p);
    target[k] = a.target_of.at(p);
    const auto& r = a.rep_target_of.at(p);
    rep[k] = r ? ojson(*r) : ojson();
    part[k] = a.partition.at(p);
  }
  return {{"positive_indices", a.positive_indices},
          {"target_of", target},
          {"rep_target_of", rep},
          {"partition", part}};
}

ojson TaxonomyJson(const FpTaxonomy& t) {
  return {{"background", t.background},
          {"localization", t.localization},
          {"crowd", t.crowd},
          {"total", t.total()},
          {"crowd_proportion", t.crowd_proportion()}};
}

std::vector<double> ScoreGrid(double step) {
  if (!(step > 0.0 && step <= 1.0)) {
    throw std::invalid_argument("--score-step must be in (0,1]");
  }
  std::vector<double> grid;
  const auto n = static_cast<int>(std::floor(1.0 / step + 1e-9));
  for (int k = 0; k <= n; ++k) grid.push_back(k * step);
  return grid;
}

// ---- loss -----------------------------------------------------------------

struct LossArgs {
  std::string input;
  std::string loss_config;
  double iou_threshold = kDefaultPositiveIoU;
};

int RunLoss(const LossArgs& a, std::ostream& out) {
  const nlohmann::json doc = ReadJsonFile(a.input);
  if (!doc.is_object()) throw DataError(a.input + ": expected an object");
  const std::vector<Box> proposals = BoxList(doc, "proposals", true);
  const std::vector<Box> gts = BoxList(doc, "gts", true);
  std::vector<Box> predicted = BoxList(doc, "predicted", false);
  if (predicted.empty()) predicted = proposals;
  if (predicted.size() != proposals.size()) {
    throw DataError("'predicted' must have one box per proposal");
  }
  const LossConfig cfg = LoadLossConfig(a.loss_config);
  const AssignmentSet assignment = Assign(proposals, gts, a.iou_threshold);
  const PositiveBatch batch = GatherPositives(assignment, predicted, gts);
  const LossBreakdown loss = TotalLoss(batch.view(), cfg);
  Emit(out, {{"loss", BreakdownJson(loss)},
             {"assignment", AssignmentJson(assignment)}});
  return kExitOk;
}

// ---- grad-check -----------------------------------------------------------

struct GradCheckArgs {
  int scenes = 200;
  std::uint64_t seed = 0;
  std::string loss_config;
};

int RunGradCheckCmd(const GradCheckArgs& a, std::ostream& out) {
  GradCheckConfig cfg;
  cfg.scenes = a.scenes;
  cfg.seed = a.seed;
  cfg.loss = LoadLossConfig(a.loss_config);
  const GradCheckReport r = RunGradCheck(cfg);
  Emit(out, {{"scenes_drawn", r.scenes},
             {"scenes_checked", r.checked},
             {"scenes_flagged_non_smooth", r.flagged},
             {"components", r.components},
             {"step", cfg.step},
             {"max_rel_error", r.max_rel_error},
             {"tolerance", cfg.tolerance},
             {"passed", r.passed}});
  return r.passed ? kExitOk : kExitRuntime;
}

// ---- nms ------------------------------------------------------------------

struct NmsArgs {
  std::string detections;
  std::string out;
  double iou_threshold = 0.5;
};

int RunNmsCmd(const NmsArgs& a, std::ostream& out) {
  DetectionSet dets = LoadDetections(a.detections);
  for (ImageDetections& img : dets) {
    img.detections = GreedyNms(img.detections, a.iou_threshold);
  }
  const std::string text = DetectionsToJson(dets).dump(2) + "\n";
  if (a.out.empty()) {
    out << text;
  } else {
    WriteTextFile(a.out, text);
  }
  return kExitOk;
}

// ---- eval / analyze -------------------------------------------------------

struct EvalArgs {
  std::string annotations;
  std::string detections;
  double iou_threshold = 0.5;
  std::string subset = "reasonable";
  std::string out_curve;
  std::string out_dir;
  double score_step = 0.05;
};

std::vector<EvalImage> LoadEvalImages(const EvalArgs& a, std::ostream& err) {
  const Dataset ds = LoadAnnotations(a.annotations);
  for (const std::string& w : ds.warnings) err << "warning: " << w << "\n";
  return JoinForEval(ds, LoadDetections(a.detections));
}

int RunEval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const SubsetSpec subset = SubsetSpec::Named(a.subset);
  const std::vector<EvalImage> images = LoadEvalImages(a, err);
  const EvalReport r = Evaluate(images, subset, a.iou_threshold, {});
  if (!a.out_curve.empty()) WriteCurveCsv(r.curve, a.out_curve);
  Emit(out, {{"subset", a.subset},
             {"iou_threshold", a.iou_threshold},
             {"images", r.num_images},
             {"ground_truths", r.num_gts},
             {"mr2", r.mr2},
             {"fp_taxonomy", TaxonomyJson(r.fp_taxonomy)}});
  return kExitOk;
}

int RunAnalyze(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const SubsetSpec subset = SubsetSpec::Named(a.subset);
  const std::vector<double> grid = ScoreGrid(a.score_step);
  const std::vector<EvalImage> images = LoadEvalImages(a, err);
  fs::create_directories(a.out_dir);

  std::vector<MissedCount> missed;
  for (double s : grid) missed.push_back({s, 0});
  for (const EvalImage& img : images) {
    const auto per = MissedByScore(img.detections, img.annotations, subset,
                                   a.iou_threshold, grid);
    for (std::size_t k = 0; k < per.size(); ++k) {
      missed[k].missed += per[k].missed;
    }
  }
  std::vector<CsvRow> missed_rows;
  for (const MissedCount& m : missed) {
    missed_rows.push_back({FormatNumber(m.score), std::to_string(m.missed)});
  }
  const std::string missed_header[] = {"score", "missed"};
  WriteTextFile(fs::path(a.out_dir) / "missed_by_score.csv",
                FormatCsv(missed_header, missed_rows));

  // False positives are counted against the full reasonable annotation set.
  const auto fps = CrowdFpByScore(images, SubsetSpec::Named("reasonable"),
                                  a.iou_threshold, grid);
  std::vector<CsvRow> fp_rows;
  for (const CrowdFpPoint& p : fps) {
    fp_rows.push_back({FormatNumber(p.score),
                       std::to_string(p.taxonomy.total()),
                       std::to_string(p.taxonomy.background),
                       std::to_string(p.taxonomy.localization),
                       std::to_string(p.taxonomy.crowd),
                       FormatNumber(p.taxonomy.crowd_proportion())});
  }
  const std::string fp_header[] = {"score",        "false_positives",
                                   "background",   "localization",
                                   "crowd",        "crowd_proportion"};
  WriteTextFile(fs::path(a.out_dir) / "crowd_fp_by_score.csv",
                FormatCsv(fp_header, fp_rows));

  Emit(out, {{"subset", a.subset},
             {"missed_by_score", (fs::path(a.out_dir) / "missed_by_score.csv")
                                     .string()},
             {"crowd_fp_by_score",
              (fs::path(a.out_dir) / "crowd_fp_by_score.csv").string()},
             {"fp_taxonomy_all_scores", TaxonomyJson(fps.front().taxonomy)}});
  return kExitOk;
}

// ---- simulate / sweep -----------------------------------------------------

struct SimArgs {
  std::string scene_config;
  std::string loss_config;
  std::string opt_config;
  std::uint64_t seed = 0;
  int seeds = 1;
  std::string out_dir;
  bool svg = false;
  double alpha = 0.5;
  double beta = 0.5;
};

SceneConfig LoadSceneConfig(const std::string& path) {
  if (path.empty()) return SceneConfig{};
  return SceneConfigFromJson(ReadJsonFile(path));
}

OptimizerConfig LoadOptConfig(const std::string& path) {
  if (path.empty()) return OptimizerConfig{};
  return OptimizerConfigFromJson(ReadJsonFile(path));
}

std::string TrajectoryCsv(const Trajectory& t) {
  const std::string header[] = {"step", "attraction", "rep_gt", "rep_box",
                                "total"};
  std::vector<CsvRow> rows;
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const LossBreakdown& l = t.steps[k].loss;
    rows.push_back({std::to_string(k), FormatNumber(l.attraction),
                    FormatNumber(l.rep_gt), FormatNumber(l.rep_box),
                    FormatNumber(l.total)});
  }
  return FormatCsv(header, rows);
}

std::string SweepCsv(std::span<const SweepPoint> sweep) {
  const std::string header[] = {"threshold", "detected", "fp"};
  std::vector<CsvRow> rows;
  for (const SweepPoint& p : sweep) {
    rows.push_back({FormatNumber(p.threshold), std::to_string(p.detected),
                    std::to_string(p.false_positives)});
  }
  return FormatCsv(header, rows);
}

ojson SummaryJson(const RunSummary& s) {
  return {{"mean_rep_iog", s.mean_rep_iog},
          {"mean_cross_iou", s.mean_cross_iou},
          {"missed_after_nms", s.missed_after_nms},
          {"detected_variance", s.detected_variance},
          {"final_loss", BreakdownJson(s.final_loss)}};
}

int RunSimulate(const SimArgs& a, std::ostream& out) {
  SceneConfig scene_cfg = LoadSceneConfig(a.scene_config);
  const LossConfig loss_cfg = LoadLossConfig(a.loss_config);
  OptimizerConfig opt_cfg = LoadOptConfig(a.opt_config);
  if (a.seeds <= 0) throw std::invalid_argument("--seeds must be positive");
  fs::create_directories(a.out_dir);
  const std::vector<double> thresholds = DefaultNmsThresholds();

  ojson runs = ojson::array();
  for (int i = 0; i < a.seeds; ++i) {
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
    scene_cfg.seed = seed;
    opt_cfg.seed = seed;
    const SimulationRun run =
        Simulate(scene_cfg, loss_cfg, opt_cfg, thresholds);
    const std::string tag = std::to_string(seed);
    WriteTextFile(fs::path(a.out_dir) / ("trajectory_" + tag + ".csv"),
                  TrajectoryCsv(run.trajectory));
    WriteTextFile(fs::path(a.out_dir) / ("sweep_" + tag + ".csv"),
                  SweepCsv(run.summary.sweep));
    if (a.svg) {
      WriteSceneSvg(run.scene.boxes(), run.trajectory.initial,
                    run.trajectory.final_boxes(),
                    fs::path(a.out_dir) / ("scene_" + tag + ".svg"));
    }
    ojson entry = SummaryJson(run.summary);
    entry["seed"] = seed;
    runs.push_back(entry);
  }
  Emit(out, {{"loss_config", LossConfigToJson(loss_cfg)},
             {"runs", runs}});
  return kExitOk;
}

double Mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

int RunSweep(const SimArgs& a, std::ostream& out) {
  SceneConfig scene_cfg = LoadSceneConfig(a.scene_config);
  OptimizerConfig opt_cfg = LoadOptConfig(a.opt_config);
  if (a.seeds <= 0) throw std::invalid_argument("--seeds must be positive");
  fs::create_directories(a.out_dir);
  const std::vector<double> thresholds = DefaultNmsThresholds();

  LossConfig baseline;
  baseline.alpha = 0.0;
  baseline.beta = 0.0;
  LossConfig repgt = baseline;
  repgt.alpha = a.alpha;
  repgt.sigma_gt = 1.0;
  LossConfig repbox = baseline;
  repbox.beta = a.beta;
  repbox.sigma_box = 0.0;
  const double sigmas[] = {0.0, 0.5, 1.0};

  struct GridCell {
    std::string term;
    double sigma;
    LossConfig cfg;
    std::vector<double> rep_iog, cross_iou, missed, variance;
  };
  std::vector<GridCell> grid;
  for (const char* term : {"RepGT", "RepBox"}) {
    for (double sigma : sigmas) {
      LossConfig cfg = baseline;
      if (std::string(term) == "RepGT") {
        cfg.alpha = a.alpha;
        cfg.sigma_gt = sigma;
      } else {
        cfg.beta = a.beta;
        cfg.sigma_box = sigma;
      }
      grid.push_back({term, sigma, cfg, {}, {}, {}, {}});
    }
  }

  std::vector<CsvRow> rows;
  std::size_t iog_reduced = 0, missed_not_worse = 0, var_smaller = 0,
              cross_lower = 0;
  std::vector<double> base_iog, gt_iog;
  for (int i = 0; i < a.seeds; ++i) {
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
    scene_cfg.seed = seed;
    opt_cfg.seed = seed;
    const RunSummary b =
        Simulate(scene_cfg, baseline, opt_cfg, thresholds).summary;
    const RunSummary g = Simulate(scene_cfg, repgt, opt_cfg, thresholds).summary;
    const RunSummary x =
        Simulate(scene_cfg, repbox, opt_cfg, thresholds).summary;
    base_iog.push_back(b.mean_rep_iog);
    gt_iog.push_back(g.mean_rep_iog);
    iog_reduced += g.mean_rep_iog < b.mean_rep_iog;
    missed_not_worse += g.missed_after_nms <= b.missed_after_nms;
    var_smaller += x.detected_variance < b.detected_variance;
    cross_lower += x.mean_cross_iou < b.mean_cross_iou;
    rows.push_back({std::to_string(seed), FormatNumber(b.mean_rep_iog),
                    FormatNumber(g.mean_rep_iog),
                    std::to_string(b.missed_after_nms),
                    std::to_string(g.missed_after_nms),
                    FormatNumber(b.detected_variance),
                    FormatNumber(x.detected_variance),
                    FormatNumber(b.mean_cross_iou),
                    FormatNumber(x.mean_cross_iou)});
    for (GridCell& cell : grid) {
      const RunSummary s =
          Simulate(scene_cfg, cell.cfg, opt_cfg, thresholds).summary;
      cell.rep_iog.push_back(s.mean_rep_iog);
      cell.cross_iou.push_back(s.mean_cross_iou);
      cell.missed.push_back(static_cast<double>(s.missed_after_nms));
      cell.variance.push_back(s.detected_variance);
    }
  }

  const std::string cmp_header[] = {
      "seed",           "baseline_rep_iog",     "repgt_rep_iog",
      "baseline_missed", "repgt_missed",        "baseline_detected_var",
      "repbox_detected_var", "baseline_cross_iou", "repbox_cross_iou"};
  WriteTextFile(fs::path(a.out_dir) / "comparison.csv",
                FormatCsv(cmp_header, rows));

  const std::string grid_header[] = {"term",         "sigma",
                                     "mean_rep_iog", "mean_cross_iou",
                                     "mean_missed",  "mean_detected_variance"};
  std::vector<CsvRow> grid_rows;
  for (const GridCell& c : grid) {
    grid_rows.push_back({c.term, FormatNumber(c.sigma),
                         FormatNumber(Mean(c.rep_iog)),
                         FormatNumber(Mean(c.cross_iou)),
                         FormatNumber(Mean(c.missed)),
                         FormatNumber(Mean(c.variance))});
  }
  WriteTextFile(fs::path(a.out_dir) / "grid.csv",
                FormatCsv(grid_header, grid_rows));

  const double n = static_cast<double>(a.seeds);
  const double mb = Mean(base_iog), mg = Mean(gt_iog);
  const ojson summary = {
      {"seeds", a.seeds},
      {"first_seed", a.seed},
      {"mean_rep_iog_baseline", mb},
      {"mean_rep_iog_repgt", mg},
      {"rep_iog_relative_reduction", mb > 0.0 ? 1.0 - mg / mb : 0.0},
      {"fraction_missed_not_worse", static_cast<double>(missed_not_worse) / n},
      {"fraction_rep_iog_reduced", static_cast<double>(iog_reduced) / n},
      {"fraction_detected_variance_smaller",
       static_cast<double>(var_smaller) / n},
      {"fraction_cross_iou_lower", static_cast<double>(cross_lower) / n}};
  WriteTextFile(fs::path(a.out_dir) / "summary.json", summary.dump(2) + "\n");
  Emit(out, summary);
  return kExitOk;
}

}  // namespace

int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Repulsion-loss toolkit for crowded bounding-box regression",
               "repulse"};
  app.set_version_flag("--version", std::string("repulse ") + kVersion +
                                        " (schema " + kSchemaVersion + ")");
  app.require_subcommand(1);

  std::function<int()> action;

  LossArgs loss_args;
  auto* loss = app.add_subcommand(
      "loss", "Assign proposals and print the loss breakdown as JSON");
  loss->add_option("--input", loss_args.input,
                    "JSON with 'proposals', 'gts' and optional 'predicted'")
      ->required();
  loss->add_option("--loss-config", loss_args.loss_config, "LossConfig JSON");
  loss->add_option("--iou-threshold", loss_args.iou_threshold,
                   "Positive proposal IoU threshold")
      ->capture_default_str();
  loss->callback([&] { action = [&] { return RunLoss(loss_args, out); }; });

  GradCheckArgs gc_args;
  auto* gc = app.add_subcommand(
      "grad-check", "Compare analytic and finite-difference loss gradients");
  gc->add_option("--scenes", gc_args.scenes, "Number of smooth scenes")
      ->capture_default_str();
  gc->add_option("--seed", gc_args.seed, "Random seed")->required();
  gc->add_option("--loss-config", gc_args.loss_config, "LossConfig JSON");
  gc->callback(
      [&] { action = [&] { return RunGradCheckCmd(gc_args, out); }; });

  NmsArgs nms_args;
  auto* nms = app.add_subcommand("nms", "Greedy NMS over a detections file");
  nms->add_option("--detections", nms_args.detections, "Detections JSON")
      ->required();
  nms->add_option("--iou-threshold", nms_args.iou_threshold,
                  "Suppress when IoU exceeds this")
      ->capture_default_str();
  nms->add_option("--out", nms_args.out,
                  "Output path (standard output if omitted)");
  nms->callback([&] { action = [&] { return RunNmsCmd(nms_args, out); }; });

  const std::vector<std::string> subsets = {
      "reasonable", "occ", "crowd", "partial", "bare", "heavy", "all"};

  EvalArgs eval_args;
  auto* ev = app.add_subcommand("eval", "Miss-rate curve, MR-2 and FP types");
  ev->add_option("--annotations", eval_args.annotations, "Annotations JSON")
      ->required();
  ev->add_option("--detections", eval_args.detections, "Detections JSON")
      ->required();
  ev->add_option("--iou-threshold", eval_args.iou_threshold,
                 "Matching IoU threshold")
      ->capture_default_str();
  ev->add_option("--subset", eval_args.subset, "Evaluation subset")
      ->check(CLI::IsMember(subsets))
      ->capture_default_str();
  ev->add_option("--out-curve", eval_args.out_curve,
                 "CSV path for the fppi,miss_rate curve");
  ev->callback(
      [&] { action = [&] { return RunEval(eval_args, out, err); }; });

  EvalArgs an_args;
  an_args.subset = "crowd";
  auto* an = app.add_subcommand(
      "analyze", "Missed detections and crowd false positives by score");
  an->add_option("--annotations", an_args.annotations, "Annotations JSON")
      ->required();
  an->add_option("--detections", an_args.detections, "Detections JSON")
      ->required();
  an->add_option("--iou-threshold", an_args.iou_threshold,
                 "Matching IoU threshold")
      ->capture_default_str();
  an->add_option("--subset", an_args.subset,
                 "Subset whose misses are counted")
      ->check(CLI::IsMember(subsets))
      ->capture_default_str();
  an->add_option("--score-step", an_args.score_step, "Score grid spacing")
      ->capture_default_str();
  an->add_option("--out-dir", an_args.out_dir, "Directory for the CSVs")
      ->required();
  an->callback(
      [&] { action = [&] { return RunAnalyze(an_args, out, err); }; });

  SimArgs sim_args;
  auto* sim = app.add_subcommand(
      "simulate", "Optimize predicted boxes on synthetic crowd scenes");
  sim->add_option("--scene-config", sim_args.scene_config, "SceneConfig JSON");
  sim->add_option("--loss-config", sim_args.loss_config, "LossConfig JSON");
  sim->add_option("--opt-config", sim_args.opt_config,
                  "OptimizerConfig JSON");
  sim->add_option("--seed", sim_args.seed, "First seed")->required();
  sim->add_option("--seeds", sim_args.seeds, "Number of consecutive seeds")
      ->capture_default_str();
  sim->add_option("--out-dir", sim_args.out_dir, "Output directory")
      ->required();
  sim->add_flag("--svg", sim_args.svg, "Also write per-scene SVG renders");
  sim->callback([&] { action = [&] { return RunSimulate(sim_args, out); }; });

  SimArgs sweep_args;
  sweep_args.seeds = 100;
  auto* sw = app.add_subcommand(
      "sweep", "Paired baseline vs repulsion runs and the sigma grid");
  sw->add_option("--scene-config", sweep_args.scene_config,
                 "SceneConfig JSON");
  sw->add_option("--opt-config", sweep_args.opt_config,
                 "OptimizerConfig JSON");
  sw->add_option("--seed", sweep_args.seed, "First seed")->required();
  sw->add_option("--seeds", sweep_args.seeds, "Number of consecutive seeds")
      ->capture_default_str();
  sw->add_option("--alpha", sweep_args.alpha, "RepGT weight")
      ->capture_default_str();
  sw->add_option("--beta", sweep_args.beta, "RepBox weight")
      ->capture_default_str();
  sw->add_option("--out-dir", sweep_args.out_dir, "Output directory")
      ->required();
  sw->callback([&] { action = [&] { return RunSweep(sweep_args, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    return action();
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace repulse
