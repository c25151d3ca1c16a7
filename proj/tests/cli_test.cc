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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"

namespace repulse {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = Dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / "repulse_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void Spit(const fs::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(CliTest, HelpAndVersion) {
  const Result help = Invoke({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("grad-check"), std::string::npos);
  const Result version = Invoke({"--version"});
  EXPECT_EQ(version.code, kExitOk);
  EXPECT_NE(version.out.find(kVersion), std::string::npos);
}

TEST(CliTest, LossOnExactProposalIsZero) {
  const fs::path dir = Scratch("loss");
  Spit(dir / "in.json", R"({"proposals": [[0, 0, 2, 4]], "gts": [[0, 0, 2, 4]]})");
  const Result r = Invoke({"loss", "--input", (dir / "in.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["loss"]["total"].get<double>(), 0.0);
  EXPECT_EQ(doc["assignment"]["positive_indices"], json::parse("[0]"));
  EXPECT_TRUE(r.err.empty());
}

TEST(CliTest, LossInputErrorsAreValidationErrors) {
  const fs::path dir = Scratch("loss_bad");
  Spit(dir / "in.json", R"({"proposals": [[0, 0, -2, 4]], "gts": []})");
  const Result r = Invoke({"loss", "--input", (dir / "in.json").string()});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("proposals[0]"), std::string::npos) << r.err;
  EXPECT_EQ(Invoke({"loss", "--input", (dir / "absent.json").string()}).code,
            kExitValidation);
}

TEST(CliTest, GradCheckFiftyScenes) {
  const Result r = Invoke({"grad-check", "--scenes", "50", "--seed", "7"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_LE(doc["max_rel_error"].get<double>(), 1e-4);
  EXPECT_TRUE(doc["passed"].get<bool>());
}

TEST(CliTest, BadFlagsExitOne) {
  EXPECT_EQ(Invoke({"grad-check", "--scenes", "5"}).code, kExitValidation);
  EXPECT_EQ(Invoke({"grad-check", "--seed", "1", "--bogus"}).code,
            kExitValidation);
  EXPECT_EQ(Invoke({"grad-check", "--seed", "x"}).code, kExitValidation);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitValidation);
  EXPECT_EQ(Invoke({}).code, kExitValidation);
  EXPECT_EQ(Invoke({"simulate", "--out-dir", "/tmp/x"}).code, kExitValidation);
  const Result bad_subset =
      Invoke({"eval", "--annotations", "a", "--detections", "d", "--subset",
           "tiny"});
  EXPECT_EQ(bad_subset.code, kExitValidation);
  EXPECT_FALSE(bad_subset.err.empty());
}

TEST(CliTest, NmsFiltersPerImage) {
  const fs::path dir = Scratch("nms");
  Spit(dir / "d.json", R"([{"image_id": "a", "detections": [
      {"box": [0, 0, 2, 2], "score": 0.9},
      {"box": [0, 0, 2, 2], "score": 0.8},
      {"box": [5, 5, 2, 2], "score": 0.7}]}])");
  const Result r = Invoke({"nms", "--detections", (dir / "d.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out)[0]["detections"].size(), 2u);

  const fs::path out = dir / "kept.json";
  ASSERT_EQ(Invoke({"nms", "--detections", (dir / "d.json").string(), "--out",
                 out.string()})
                .code,
            kExitOk);
  EXPECT_EQ(Slurp(out), r.out);
}

TEST(CliTest, EvalAndAnalyzeWriteOutputs) {
  const fs::path dir = Scratch("eval");
  Spit(dir / "a.json", R"([{"image_id": "a", "annotations": [
      {"id": "p", "box": [0, 0, 20, 60]}]}])");
  Spit(dir / "d.json", R"([{"image_id": "a", "detections": [
      {"box": [0, 0, 20, 60], "score": 0.9},
      {"box": [100, 0, 20, 60], "score": 0.5}]}])");
  const Result r = Invoke({"eval", "--annotations", (dir / "a.json").string(),
                        "--detections", (dir / "d.json").string(),
                        "--out-curve", (dir / "curve.csv").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["fp_taxonomy"]["background"].get<int>(), 1);
  EXPECT_EQ(Slurp(dir / "curve.csv").rfind("fppi,miss_rate\n", 0), 0u);

  const Result a = Invoke({"analyze", "--annotations",
                        (dir / "a.json").string(), "--detections",
                        (dir / "d.json").string(), "--out-dir",
                        (dir / "out").string(), "--score-step", "0.5",
                           "--subset", "reasonable"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(Slurp(dir / "out" / "missed_by_score.csv"),
            "score,missed\n0,0\n0.5,0\n1,1\n");
}

TEST(CliTest, SimulateAndSweepAreDeterministic) {
  const fs::path one = Scratch("sim1"), two = Scratch("sim2");
  for (const fs::path& d : {one, two}) {
    const Result s = Invoke({"simulate", "--seed", "3", "--seeds", "2",
                          "--out-dir", (d / "sim").string(), "--svg"});
    ASSERT_EQ(s.code, kExitOk) << s.err;
    Spit(d / "simulate.json", s.out);
    const Result w = Invoke({"sweep", "--seed", "3", "--seeds", "2", "--out-dir",
                          (d / "sweep").string()});
    ASSERT_EQ(w.code, kExitOk) << w.err;
    Spit(d / "sweep.json", w.out);
  }
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(one)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), one);
    EXPECT_EQ(Slurp(e.path()), Slurp(two / rel)) << rel;
    ++files;
  }
  // 2 seeds x (trajectory, sweep, svg) + 3 sweep files + 2 stdout captures.
  EXPECT_EQ(files, 11u);
  EXPECT_EQ(Slurp(one / "sweep" / "grid.csv").find("RepBox,1,"),
            Slurp(one / "sweep" / "grid.csv").rfind("RepBox,1,"));
}

}  // namespace
}  // namespace repulse
