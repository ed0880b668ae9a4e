/*
 * Copyright 2026 The erpvis Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "support.hpp"

using erpvis::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = erpvis::cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string ReadBytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const std::vector<std::string> kGen = {"--subjects", "2", "--categories", "2", "--exemplars-per-category", "3",
                                       "--trials", "24", "--channels", "4", "--samples", "8"};
const std::vector<std::string> kTrain = {"--epochs", "2", "--batch", "8", "--hidden", "4", "--repr", "4",
                                         "--threads", "1"};

std::vector<std::string> Cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("generate, extract, train and eval") {
  TempDir tmp;
  const std::string ds = (tmp / "ds").string();
  const std::string erp = (tmp / "erp").string();
  REQUIRE(Cli(Cat({"generate", "--out", ds, "--seed", "5"}, kGen)).code == 0);
  CHECK(fs::exists(tmp / "ds" / "trials.bin"));
  CHECK(fs::exists(tmp / "ds" / "run_manifest.json"));

  REQUIRE(Cli({"extract", "--in", ds, "--out", erp, "--n", "4", "--seed", "2"}).code == 0);
  const auto manifest = nlohmann::json::parse(ReadBytes(tmp / "erp" / "manifest.json"));
  CHECK(manifest.at("n_trials") == 2 * 6 * 6);

  const std::string m1 = (tmp / "a.erpl").string();
  const std::string m2 = (tmp / "b.erpl").string();
  REQUIRE(Cli(Cat({"train", "--in", erp, "--out", m1, "--seed", "3"}, kTrain)).code == 0);
  REQUIRE(Cli(Cat({"train", "--in", erp, "--out", m2, "--seed", "3"}, kTrain)).code == 0);
  CHECK(ReadBytes(m1) == ReadBytes(m2));
  CHECK(ReadBytes(m1 + ".manifest.json") == ReadBytes(m2 + ".manifest.json"));
  const auto train_manifest = nlohmann::json::parse(ReadBytes(m1 + ".manifest.json"));
  CHECK(train_manifest.at("config").at("loss_curve").size() == 2u);

  const Result eval = Cli({"eval", "--model", m1, "--in", erp, "--format", "json"});
  REQUIRE(eval.code == 0);
  const auto report = nlohmann::json::parse(eval.out);
  CHECK(report.at("accuracy").get<double>() >= 0.0);
  CHECK(report.at("accuracy").get<double>() <= 1.0);
  CHECK(report.at("n_test") == 12);
  CHECK(report.at("n_train") == 60);

  const std::string rep_path = (tmp / "eval.json").string();
  REQUIRE(Cli({"eval", "--model", m1, "--in", erp, "--out", rep_path}).code == 0);
  const Result text = Cli({"report", "--in", rep_path, "--format", "text"});
  REQUIRE(text.code == 0);
  CHECK(text.out.find("confusion") != std::string::npos);
  CHECK(Cli({"report", "--in", rep_path, "--format", "csv"}).out.rfind("protocol,subject_id", 0) == 0);

  SUBCASE("training straight from trials") {
    const std::string raw = (tmp / "raw.erpl").string();
    CHECK(Cli(Cat({"train", "--in", ds, "--out", raw, "--input-kind", "raw"}, kTrain)).code == 0);
    const Result r = Cli({"eval", "--model", raw, "--in", ds, "--split", "train"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).at("n_test") == 2 * 6 * 20);
    CHECK(Cli(Cat({"train", "--in", ds, "--out", raw, "--input-kind", "raw", "--n", "4"}, kTrain)).code == 1);
    CHECK(Cli(Cat({"train", "--in", erp, "--out", raw, "--n", "4"}, kTrain)).code == 1);
  }
  SUBCASE("corrupt data is a data error") {
    std::ofstream(tmp / "erp" / "trials.bin", std::ios::trunc) << "junk";
    const Result r = Cli(Cat({"train", "--in", erp, "--out", m1}, kTrain));
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
  }
}

TEST_CASE("usage errors") {
  CHECK(Cli({}).code == 1);
  CHECK(Cli({"--bogus"}).code == 1);
  CHECK(Cli({"train", "--labels", "scene"}).code == 1);
  CHECK(Cli({"eval", "--model", "/nonexistent/model.erpl", "--in", "/nonexistent"}).code == 1);
  CHECK(Cli({"extract", "--in", "/nonexistent", "--out", "/tmp/x", "--n", "0"}).code == 1);
  CHECK(Cli({"compare"}).code == 1);
  CHECK(Cli({"--version"}).code == 0);
  CHECK(Cli({"--help"}).code == 0);
}

TEST_CASE("compare on an in-memory synthetic dataset") {
  TempDir tmp;
  const std::string table = (tmp / "table.json").string();
  const Result r = Cli(Cat(Cat({"compare", "--synthetic", "--seed", "2", "--n", "4", "--protocol", "both",
                                "--labels", "category", "--out", table},
                               kGen),
                           kTrain));
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(ReadBytes(table));
  CHECK(doc.at("rows").size() == 8u);
  CHECK(doc.at("config").at("source").contains("synthetic"));
  CHECK(fs::exists(table + ".manifest.json"));

  const Result csv = Cli({"report", "--in", table, "--format", "csv"});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind("protocol,label_kind,framework,accuracy,improvement\n", 0) == 0);
  CHECK(Cli({"report", "--in", table}).out == ReadBytes(table));
}
