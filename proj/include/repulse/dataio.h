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

// File formats.
//
// Annotations (JSON array, one object per image):
//   [{"image_id": "a", "annotations": [{"id": "p0", "box": [l,t,w,h],
//     "visible_box": [l,t,w,h] | null, "ignore": false, "in_eval": true}]}]
// Detections (JSON array, one object per image):
//   [{"image_id": "a", "detections": [{"box": [l,t,w,h], "score": 0.9}]}]
// Loss / scene / optimizer configs are flat JSON objects whose keys are the
// struct field names. CSV files carry a header row and shortest round-trip
// numbers.

#ifndef REPULSE_DATAIO_H_
#define REPULSE_DATAIO_H_

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "repulse/evaluation.h"
#include "repulse/losses.h"
#include "repulse/nms.h"
#include "repulse/simulator.h"

namespace repulse {

// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kSchemaVersion = "1";

struct ImageAnnotations {
  std::string image_id;
  std::vector<Annotation> annotations;
};

struct Dataset {
  std::vector<ImageAnnotations> images;
  // Non-fatal repairs made while loading (visible_box clamping).
  std::vector<std::string> warnings;
};

struct ImageDetections {
  std::string image_id;
  std::vector<Detection> detections;
};

using DetectionSet = std::vector<ImageDetections>;

Dataset ParseAnnotations(const nlohmann::json& doc);
Dataset LoadAnnotations(const std::filesystem::path& path);
nlohmann::json AnnotationsToJson(const Dataset& ds);
void SaveAnnotations(const Dataset& ds, const std::filesystem::path& path);

DetectionSet ParseDetections(const nlohmann::json& doc);
DetectionSet LoadDetections(const std::filesystem::path& path);
nlohmann::json DetectionsToJson(const DetectionSet& dets);
void SaveDetections(const DetectionSet& dets,
                    const std::filesystem::path& path);

// Pairs every annotated image with its detections (none if absent). Throws
// DataError for a detection image_id that has no annotations.
std::vector<EvalImage> JoinForEval(const Dataset& ds,
                                   const DetectionSet& dets);

nlohmann::json BoxToJson(const Box& b);
// `where` prefixes error messages.
Box BoxFromJson(const nlohmann::json& j, const std::string& where);

// Missing keys keep their defaults; unknown keys are rejected.
LossConfig LossConfigFromJson(const nlohmann::json& j);
nlohmann::json LossConfigToJson(const LossConfig& cfg);
SceneConfig SceneConfigFromJson(const nlohmann::json& j);
nlohmann::json SceneConfigToJson(const SceneConfig& cfg);
OptimizerConfig OptimizerConfigFromJson(const nlohmann::json& j);
nlohmann::json OptimizerConfigToJson(const OptimizerConfig& cfg);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);

// Shortest decimal string that parses back to exactly `v`.
std::string FormatNumber(double v);

using CsvRow = std::vector<std::string>;

std::string FormatCsv(std::span<const std::string> header,
                      std::span<const CsvRow> rows);
void WriteTextFile(const std::filesystem::path& path,
                   const std::string& contents);

std::string CurveToCsv(std::span<const CurvePoint> points);
void WriteCurveCsv(std::span<const CurvePoint> points,
                   const std::filesystem::path& path);
std::vector<CurvePoint> ParseCurveCsv(const std::string& text);

// One <rect> per box, drawn in the order ground truth, initial, final.
std::string RenderSceneSvg(std::span<const Box> gts,
                           std::span<const Box> initial,
                           std::span<const Box> final_boxes);
void WriteSceneSvg(std::span<const Box> gts, std::span<const Box> initial,
                   std::span<const Box> final_boxes,
                   const std::filesystem::path& path);

}  // namespace repulse

#endif  // REPULSE_DATAIO_H_
