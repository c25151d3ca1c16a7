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

#include "repulse/dataio.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace repulse {

using nlohmann::json;

namespace {

[[noreturn]] void Fail(const std::string& where, const std::string& what) {
  throw DataError(where + ": " + what);
}

const json& Field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) Fail(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string FieldWhere(const std::string& where, const char* key) {
  return where + ", field '" + key + "'";
}

bool BoolField(const json& obj, const char* key, bool fallback,
               const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) Fail(FieldWhere(where, key), "expected a boolean");
  return it->get<bool>();
}

std::string ImageId(const json& img, const std::string& where) {
  const json& id = Field(img, "image_id", where);
  if (!id.is_string()) Fail(FieldWhere(where, "image_id"), "expected a string");
  return id.get<std::string>();
}

// Keeps the part of `visible` inside `box`.
Box ClampInto(const Box& visible, const Box& box) {
  const double l = std::clamp(visible.left(), box.left(), box.right());
  const double t = std::clamp(visible.top(), box.top(), box.bottom());
  const double r = std::clamp(visible.right(), l, box.right());
  const double b = std::clamp(visible.bottom(), t, box.bottom());
  return Box::FromCorners(l, t, r, b);
}

template <typename T>
void ReadNumber(const json& j, const char* key, T& out,
                const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_number()) Fail(FieldWhere(where, key), "expected a number");
  if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) {
      Fail(FieldWhere(where, key), "expected an integer");
    }
  }
  out = it->get<T>();
}

void RejectUnknown(const json& j, std::initializer_list<const char*> known,
                   const std::string& where) {
  if (!j.is_object()) Fail(where, "expected a JSON object");
  const std::set<std::string> names(known.begin(), known.end());
  for (const auto& item : j.items()) {
    if (!names.count(item.key())) {
      Fail(where, "unknown field '" + item.key() + "'");
    }
  }
}

}  // namespace

json BoxToJson(const Box& b) {
  return json::array({b.left(), b.top(), b.width(), b.height()});
}

Box BoxFromJson(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    Fail(where, "expected [left, top, width, height]");
  }
  double c[4];
  for (std::size_t k = 0; k < 4; ++k) {
    if (!j[k].is_number()) Fail(where, "box coordinates must be numbers");
    c[k] = j[k].get<double>();
  }
  try {
    return Box(c[0], c[1], c[2], c[3]);
  } catch (const std::invalid_argument& e) {
    Fail(where, e.what());
  }
}

Dataset ParseAnnotations(const json& doc) {
  if (!doc.is_array()) Fail("annotations", "expected a JSON array of images");
  Dataset ds;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& img = doc[i];
    const std::string img_where = "annotations[" + std::to_string(i) + "]";
    if (!img.is_object()) Fail(img_where, "expected an object");
    ImageAnnotations out;
    out.image_id = ImageId(img, img_where);
    const std::string where = "image '" + out.image_id + "'";
    if (!seen.insert(out.image_id).second) {
      Fail(where, "duplicate image_id");
    }
    const json& anns = Field(img, "annotations", where);
    if (!anns.is_array()) {
      Fail(FieldWhere(where, "annotations"), "expected an array");
    }
    for (std::size_t k = 0; k < anns.size(); ++k) {
      const json& a = anns[k];
      const std::string aw = where + ", annotation " + std::to_string(k);
      if (!a.is_object()) Fail(aw, "expected an object");
      Annotation ann;
      const json& id = Field(a, "id", aw);
      if (id.is_string()) {
        ann.id = id.get<std::string>();
      } else if (id.is_number_integer()) {
        ann.id = std::to_string(id.get<long long>());
      } else {
        Fail(FieldWhere(aw, "id"), "expected a string or integer");
      }
      ann.box = BoxFromJson(Field(a, "box", aw), FieldWhere(aw, "box"));
      const auto vis = a.find("visible_box");
      if (vis != a.end() && !vis->is_null()) {
        const Box v = BoxFromJson(*vis, FieldWhere(aw, "visible_box"));
        const Box clamped = ClampInto(v, ann.box);
        if (!(clamped == v)) {
          ds.warnings.push_back(aw + ": visible_box clamped into box");
        }
        ann.visible_box = clamped;
      }
      ann.ignore = BoolField(a, "ignore", false, aw);
      ann.in_eval = BoolField(a, "in_eval", true, aw);
      out.annotations.push_back(std::move(ann));
    }
    ds.images.push_back(std::move(out));
  }
  return ds;
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Dataset LoadAnnotations(const std::filesystem::path& path) {
  return ParseAnnotations(ReadJsonFile(path));
}

json AnnotationsToJson(const Dataset& ds) {
  json doc = json::array();
  for (const ImageAnnotations& img : ds.images) {
    json anns = json::array();
    for (const Annotation& a : img.annotations) {
      anns.push_back({{"id", a.id},
                      {"box", BoxToJson(a.box)},
                      {"visible_box",
                       a.visible_box ? BoxToJson(*a.visible_box) : json()},
                      {"ignore", a.ignore},
                      {"in_eval", a.in_eval}});
    }
    doc.push_back({{"image_id", img.image_id}, {"annotations", anns}});
  }
  return doc;
}

void SaveAnnotations(const Dataset& ds, const std::filesystem::path& path) {
  WriteTextFile(path, AnnotationsToJson(ds).dump(2) + "\n");
}

DetectionSet ParseDetections(const json& doc) {
  if (!doc.is_array()) Fail("detections", "expected a JSON array of images");
  DetectionSet out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& img = doc[i];
    const std::string img_where = "detections[" + std::to_string(i) + "]";
    if (!img.is_object()) Fail(img_where, "expected an object");
    ImageDetections entry;
    entry.image_id = ImageId(img, img_where);
    const std::string where = "image '" + entry.image_id + "'";
    if (!seen.insert(entry.image_id).second) {
      Fail(where, "duplicate image_id");
    }
    const json& dets = Field(img, "detections", where);
    if (!dets.is_array()) {
      Fail(FieldWhere(where, "detections"), "expected an array");
    }
    for (std::size_t k = 0; k < dets.size(); ++k) {
      const json& d = dets[k];
      const std::string dw = where + ", detection " + std::to_string(k);
      if (!d.is_object()) Fail(dw, "expected an object");
      const Box box = BoxFromJson(Field(d, "box", dw), FieldWhere(dw, "box"));
      const json& score = Field(d, "score", dw);
      if (!score.is_number()) Fail(FieldWhere(dw, "score"), "expected a number");
      try {
        entry.detections.push_back(Detection::Make(box, score.get<double>()));
      } catch (const std::invalid_argument& e) {
        Fail(FieldWhere(dw, "score"), e.what());
      }
    }
    out.push_back(std::move(entry));
  }
  return out;
}

DetectionSet LoadDetections(const std::filesystem::path& path) {
  return ParseDetections(ReadJsonFile(path));
}

json DetectionsToJson(const DetectionSet& dets) {
  json doc = json::array();
  for (const ImageDetections& img : dets) {
    json arr = json::array();
    for (const Detection& d : img.detections) {
      arr.push_back({{"box", BoxToJson(d.box)}, {"score", d.score}});
    }
    doc.push_back({{"image_id", img.image_id}, {"detections", arr}});
  }
  return doc;
}

void SaveDetections(const DetectionSet& dets,
                    const std::filesystem::path& path) {
  WriteTextFile(path, DetectionsToJson(dets).dump(2) + "\n");
}

std::vector<EvalImage> JoinForEval(const Dataset& ds,
                                   const DetectionSet& dets) {
  std::map<std::string, const ImageDetections*> by_id;
  for (const ImageDetections& d : dets) by_id[d.image_id] = &d;
  std::set<std::string> annotated;
  std::vector<EvalImage> out;
  for (const ImageAnnotations& img : ds.images) {
    annotated.insert(img.image_id);
    EvalImage e{img.image_id, img.annotations, {}};
    if (const auto it = by_id.find(img.image_id); it != by_id.end()) {
      e.detections = it->second->detections;
    }
    out.push_back(std::move(e));
  }
  for (const ImageDetections& d : dets) {
    if (!annotated.count(d.image_id)) {
      throw DataError("detections reference unknown image_id '" +
                      d.image_id + "'");
    }
  }
  return out;
}

LossConfig LossConfigFromJson(const json& j) {
  const std::string where = "loss config";
  RejectUnknown(j,
                {"alpha", "beta", "sigma_gt", "sigma_box", "smooth_l1_sigma",
                 "epsilon", "ln_clamp"},
                where);
  LossConfig cfg;
  ReadNumber(j, "alpha", cfg.alpha, where);
  ReadNumber(j, "beta", cfg.beta, where);
  ReadNumber(j, "sigma_gt", cfg.sigma_gt, where);
  ReadNumber(j, "sigma_box", cfg.sigma_box, where);
  ReadNumber(j, "smooth_l1_sigma", cfg.smooth_l1_sigma, where);
  ReadNumber(j, "epsilon", cfg.epsilon, where);
  ReadNumber(j, "ln_clamp", cfg.ln_clamp, where);
  cfg.Validate();
  return cfg;
}

json LossConfigToJson(const LossConfig& cfg) {
  return {{"alpha", cfg.alpha},
          {"beta", cfg.beta},
          {"sigma_gt", cfg.sigma_gt},
          {"sigma_box", cfg.sigma_box},
          {"smooth_l1_sigma", cfg.smooth_l1_sigma},
          {"epsilon", cfg.epsilon},
          {"ln_clamp", cfg.ln_clamp}};
}

SceneConfig SceneConfigFromJson(const json& j) {
  const std::string where = "scene config";
  RejectUnknown(j,
                {"num_gts", "overlap_range", "gt_size_range", "scene_extent",
                 "seed", "max_attempts"},
                where);
  SceneConfig cfg;
  ReadNumber(j, "num_gts", cfg.num_gts, where);
  ReadNumber(j, "seed", cfg.seed, where);
  ReadNumber(j, "max_attempts", cfg.max_attempts, where);
  auto pair = [&](const char* key, double& a, double& b) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
        !(*it)[1].is_number()) {
      Fail(FieldWhere(where, key), "expected a pair of numbers");
    }
    a = (*it)[0].get<double>();
    b = (*it)[1].get<double>();
  };
  pair("overlap_range", cfg.overlap_min, cfg.overlap_max);
  pair("gt_size_range", cfg.size_min, cfg.size_max);
  pair("scene_extent", cfg.extent_width, cfg.extent_height);
  cfg.Validate();
  return cfg;
}

json SceneConfigToJson(const SceneConfig& cfg) {
  return {{"num_gts", cfg.num_gts},
          {"overlap_range", {cfg.overlap_min, cfg.overlap_max}},
          {"gt_size_range", {cfg.size_min, cfg.size_max}},
          {"scene_extent", {cfg.extent_width, cfg.extent_height}},
          {"seed", cfg.seed},
          {"max_attempts", cfg.max_attempts}};
}

OptimizerConfig OptimizerConfigFromJson(const json& j) {
  const std::string where = "optimizer config";
  RejectUnknown(j,
                {"learning_rate", "steps", "proposals_per_gt", "init_noise",
                 "seed", "min_extent", "rejitter_budget"},
                where);
  OptimizerConfig cfg;
  ReadNumber(j, "learning_rate", cfg.learning_rate, where);
  ReadNumber(j, "steps", cfg.steps, where);
  ReadNumber(j, "proposals_per_gt", cfg.proposals_per_gt, where);
  ReadNumber(j, "init_noise", cfg.init_noise, where);
  ReadNumber(j, "seed", cfg.seed, where);
  ReadNumber(j, "min_extent", cfg.min_extent, where);
  ReadNumber(j, "rejitter_budget", cfg.rejitter_budget, where);
  cfg.Validate();
  return cfg;
}

json OptimizerConfigToJson(const OptimizerConfig& cfg) {
  return {{"learning_rate", cfg.learning_rate},
          {"steps", cfg.steps},
          {"proposals_per_gt", cfg.proposals_per_gt},
          {"init_noise", cfg.init_noise},
          {"seed", cfg.seed},
          {"min_extent", cfg.min_extent},
          {"rejitter_budget", cfg.rejitter_budget}};
}

std::string FormatNumber(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string FormatCsv(std::span<const std::string> header,
                      std::span<const CsvRow> rows) {
  std::string out;
  auto line = [&out](std::span<const std::string> cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const CsvRow& r : rows) line(r);
  return out;
}

void WriteTextFile(const std::filesystem::path& path,
                   const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << contents;
  if (!out.flush()) throw DataError(path.string() + ": write failed");
}

std::string CurveToCsv(std::span<const CurvePoint> points) {
  const std::string header[] = {"fppi", "miss_rate"};
  std::vector<CsvRow> rows;
  for (const CurvePoint& p : points) {
    rows.push_back({FormatNumber(p.fppi), FormatNumber(p.miss_rate)});
  }
  return FormatCsv(header, rows);
}

void WriteCurveCsv(std::span<const CurvePoint> points,
                   const std::filesystem::path& path) {
  WriteTextFile(path, CurveToCsv(points));
}

std::vector<CurvePoint> ParseCurveCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "fppi,miss_rate") {
    throw DataError("curve csv: missing 'fppi,miss_rate' header");
  }
  std::vector<CurvePoint> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    CurvePoint p;
    const char* end = line.data() + line.size();
    const auto a = std::from_chars(line.data(), line.data() + comma, p.fppi);
    const auto b =
        comma == std::string::npos
            ? std::from_chars_result{end, std::errc::invalid_argument}
            : std::from_chars(line.data() + comma + 1, end, p.miss_rate);
    if (comma == std::string::npos || a.ec != std::errc() ||
        b.ec != std::errc() || b.ptr != end) {
      throw DataError("curve csv: bad row at line " + std::to_string(lineno));
    }
    out.push_back(p);
  }
  return out;
}

std::string RenderSceneSvg(std::span<const Box> gts,
                           std::span<const Box> initial,
                           std::span<const Box> final_boxes) {
  constexpr double kScale = 50.0;
  constexpr double kMargin = 0.5;
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  for (auto layer : {gts, initial, final_boxes}) {
    for (const Box& b : layer) {
      lo_x = std::min(lo_x, b.left());
      lo_y = std::min(lo_y, b.top());
      hi_x = std::max(hi_x, b.right());
      hi_y = std::max(hi_y, b.bottom());
    }
  }
  if (!(lo_x <= hi_x)) lo_x = lo_y = 0.0, hi_x = hi_y = 1.0;
  lo_x -= kMargin;
  lo_y -= kMargin;
  const double w = (hi_x + kMargin - lo_x) * kScale;
  const double h = (hi_y + kMargin - lo_y) * kScale;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << FormatNumber(w) << "\" height=\"" << FormatNumber(h)
      << "\" viewBox=\"0 0 " << FormatNumber(w) << ' ' << FormatNumber(h)
      << "\">\n";
  svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  auto layer = [&](const char* cls, std::span<const Box> boxes,
                   const char* style) {
    svg << "  <g class=\"" << cls << "\" " << style << ">\n";
    for (const Box& b : boxes) {
      svg << "    <rect x=\"" << FormatNumber((b.left() - lo_x) * kScale)
          << "\" y=\"" << FormatNumber((b.top() - lo_y) * kScale)
          << "\" width=\"" << FormatNumber(b.width() * kScale)
          << "\" height=\"" << FormatNumber(b.height() * kScale) << "\"/>\n";
    }
    svg << "  </g>\n";
  };
  layer("gt", gts, "fill=\"none\" stroke=\"#2e7d32\" stroke-width=\"3\"");
  layer("initial", initial,
        "fill=\"none\" stroke=\"#9e9e9e\" stroke-width=\"1\" "
        "stroke-dasharray=\"4 3\"");
  layer("final", final_boxes,
        "fill=\"none\" stroke=\"#c62828\" stroke-width=\"1.5\"");
  svg << "</svg>\n";
  return svg.str();
}

void WriteSceneSvg(std::span<const Box> gts, std::span<const Box> initial,
                   std::span<const Box> final_boxes,
                   const std::filesystem::path& path) {
  WriteTextFile(path, RenderSceneSvg(gts, initial, final_boxes));
}

}  // namespace repulse
