// Copyright 2026 The sharecheck Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sharecheck/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace sharecheck {
namespace {

using nlohmann::json;

const json kFractional = {{"builtin", "fractional"}, {"params", json::object()}};

int cli(std::vector<const char*> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "sharecheck");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(args.size()), args.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("sharecheck_cli_test_" + name);
  std::ofstream(path) << content;
  return path;
}

TEST(CombineExit, InputBeatsBoundBeatsMismatch) {
  EXPECT_EQ(combine_exit(kExitOk, kExitMismatch), kExitMismatch);
  EXPECT_EQ(combine_exit(kExitBound, kExitMismatch), kExitBound);
  EXPECT_EQ(combine_exit(kExitBound, kExitInput), kExitInput);
  EXPECT_EQ(combine_exit(kExitOk, kExitOk), kExitOk);
}

TEST(Check, EmptyRelationsIsWellFormednessOnly) {
  const auto r = run_check(kFractional, json{{"queries", json::array()}});
  EXPECT_EQ(r.exit, kExitOk) << r.report.dump(2);
  EXPECT_TRUE(r.report.at("wellformed").at("holds").get<bool>());
  EXPECT_TRUE(r.report.at("queries").empty());
}

TEST(Check, GuardFromZeroFractionIsAMismatch) {
  const json rel = {{"queries", json::array({{{"name", "zero guards one"},
                                              {"relation", "guard"},
                                              {"p", "0"},
                                              {"s", "1"},
                                              {"expect", "holds"}}})}};
  const auto r = run_check(kFractional, rel);
  EXPECT_EQ(r.exit, kExitMismatch);
  const json& q = r.report.at("queries").at(0);
  EXPECT_EQ(q.at("verdict"), "fails");
  EXPECT_FALSE(q.at("match").get<bool>());
  EXPECT_TRUE(q.contains("witness"));
}

TEST(Check, ExpectedFailureMatches) {
  const json rel = {{"queries", json::array({{{"relation", "guard"}, {"p", "0"}, {"s", "1"}, {"expect", "fails"}},
                                             {{"relation", "guard"}, {"p", "1/2"}, {"s", "1"}}})}};
  const auto r = run_check(kFractional, rel);
  EXPECT_EQ(r.exit, kExitOk) << r.report.dump(2);
  EXPECT_EQ(r.report.at("mismatches"), 0);
}

TEST(Check, BoundFlagNarrowsTheCarrier) {
  const json rel = {{"queries", json::array({{{"relation", "guard"}, {"p", "1/2"}, {"s", "1"}}})}};
  CliOptions o;
  const auto wide = run_check(kFractional, rel, o);
  o.bound = 4;
  const auto narrow = run_check(kFractional, rel, o);
  EXPECT_EQ(wide.exit, kExitOk);
  EXPECT_EQ(narrow.exit, kExitOk);
  EXPECT_LT(narrow.report.at("queries").at(0).at("frames_examined").get<int>(),
            wide.report.at("queries").at(0).at("frames_examined").get<int>());
}

TEST(Check, SchemaErrors) {
  const auto bad = [](const json& rel) { return run_check(kFractional, rel).exit; };
  EXPECT_EQ(bad({{"queries", json::array({{{"relation", "swap"}, {"p", "0"}}})}}), kExitInput);
  EXPECT_EQ(bad({{"queries", json::array({{{"relation", "guard"}, {"p", "0"}}})}}), kExitInput);
  EXPECT_EQ(bad({{"queries", json::array({{{"relation", "guard"}, {"p", "0"}, {"s", "1"}, {"p_after", "0"}}})}}),
            kExitInput);
  EXPECT_EQ(bad({{"queries", json::array({{{"relation", "guard"}, {"p", "(("}, {"s", "1"}}})}}), kExitInput);
  EXPECT_EQ(bad({{"queries", json::array({{{"relation", "guard"}, {"p", "0"}, {"s", "1"}, {"expect", "maybe"}}})}}),
            kExitInput);
  EXPECT_EQ(bad({{"extra", 1}}), kExitInput);
  EXPECT_EQ(run_check({{"builtin", "nope"}}, json()).exit, kExitInput);
}

TEST(Check, RelationFileRoundTrip) {
  const ProtocolSuite suite = counting_suite();
  const auto r = run_check({{"builtin", "counting"}, {"params", json::object()}}, relations_to_json(suite));
  EXPECT_EQ(r.exit, kExitOk);
  EXPECT_EQ(r.report.at("queries").size(), suite.queries.size());
}

TEST(Explore, CorruptScenarioIsInputError) {
  EXPECT_EQ(run_explore(json{{"name", "x"}, {"threads", 3}}).exit, kExitInput);
  EXPECT_EQ(run_explore(json::array()).exit, kExitInput);
  json bad_program = demo_files().at("scenarios/rwlock-exc.json");
  bad_program["threads"][0]["program"] = "(seq (load";
  EXPECT_EQ(run_explore(bad_program).exit, kExitInput);
}

TEST(Explore, BoundExceededExitsThree) {
  CliOptions o;
  o.max_states = 10;
  const auto r = run_explore(demo_files().at("scenarios/rwlock-shared.json"), o);
  EXPECT_EQ(r.exit, kExitBound);
  EXPECT_TRUE(r.report.at("bound_exceeded").get<bool>());
  EXPECT_GT(r.report.at("states").get<int>(), 0);
}

TEST(Explore, RaceNegativeMeetsItsExpectation) {
  const auto r = run_explore(demo_files().at("scenarios/race-negative.json"));
  EXPECT_EQ(r.exit, kExitOk);
  ASSERT_FALSE(r.report.at("violations").empty());
  const json& v = r.report.at("violations").at(0);
  EXPECT_EQ(v.at("name"), "data-race");
  EXPECT_EQ(v.at("trace").size(), v.at("trace_threads").size());
}

TEST(Explore, OverflowScenarioIsStuck) {
  const auto r = run_explore(demo_files().at("scenarios/hashtable-overflow.json"));
  EXPECT_EQ(r.exit, kExitOk);
  EXPECT_EQ(r.report.at("violations").at(0).at("name"), "abort");
}

TEST(Demo, CheckedInFilesMatchBuilders) {
  for (const auto& [rel, content] : demo_files()) {
    std::ifstream in(default_data_dir() / rel);
    ASSERT_TRUE(in) << rel << " missing; run gen_data";
    EXPECT_EQ(json::parse(in), content) << rel << " is stale; run gen_data";
  }
}

TEST(Demo, RegistryInputsExist) {
  const auto files = demo_files();
  for (const auto& d : demo_registry()) {
    for (const auto& in : d.inputs) EXPECT_TRUE(files.count(in)) << d.name << ": " << in;
  }
}

TEST(Demo, UnknownNameListsRegistry) {
  const auto r = run_demo("nope", {});
  EXPECT_EQ(r.exit, kExitInput);
  EXPECT_EQ(r.report.at("demos").size(), demo_registry().size());
  EXPECT_NE(r.text.find("hashtable-collide"), std::string::npos);
}

TEST(Demo, CountAndHashTable) {
  EXPECT_EQ(run_demo("protocol-count", {}).exit, kExitOk);
  const auto ht = run_demo("hashtable-collide", {});
  EXPECT_EQ(ht.exit, kExitOk);
  EXPECT_TRUE(ht.report.at("oracle_subset").get<bool>());
}

TEST(Demo, MissingDataDirIsInputError) {
  CliOptions o;
  o.data_dir = "/nonexistent/sharecheck";
  EXPECT_EQ(run_demo("rwlock-exc", o).exit, kExitInput);
}

TEST(Cli, UnknownFlagAndMissingSubcommand) {
  std::string err;
  EXPECT_EQ(cli({"demo", "rwlock-exc", "--frobnicate"}, nullptr, &err), kExitInput);
  EXPECT_EQ(cli({}), kExitInput);
  EXPECT_EQ(cli({"demo", "rwlock-exc", "--mode", "lenient"}), kExitInput);
  EXPECT_EQ(cli({"demo", "rwlock-exc", "--format", "xml"}), kExitInput);
}

TEST(Cli, DemoJsonIsStable) {
  std::string a;
  std::string b;
  EXPECT_EQ(cli({"demo", "rwlock-exc"}, &a), kExitOk);
  EXPECT_EQ(cli({"demo", "rwlock-exc"}, &b), kExitOk);
  EXPECT_EQ(a, b);
  EXPECT_EQ(json::parse(a).at("demo"), "rwlock-exc");
}

TEST(Cli, TextFormatAndQuiet) {
  std::string text;
  EXPECT_EQ(cli({"demo", "protocol-frac", "--format", "text"}, &text), kExitOk);
  EXPECT_NE(text.find("well-formed: yes"), std::string::npos);
  std::string quiet;
  EXPECT_EQ(cli({"--quiet", "demo", "protocol-frac"}, &quiet), kExitOk);
  EXPECT_TRUE(quiet.empty());
}

TEST(Cli, CheckAndExploreFiles) {
  const auto protocol = write_temp("protocol.json", kFractional.dump());
  const auto rel = write_temp("relations.json", R"({"queries": [{"relation": "guard", "p": "0", "s": "1"}]})");
  EXPECT_EQ(cli({"check", protocol.c_str(), rel.c_str()}), kExitMismatch);
  EXPECT_EQ(cli({"check", protocol.c_str()}), kExitOk);
  const auto corrupt = write_temp("corrupt.json", "{\"name\": ");
  EXPECT_EQ(cli({"explore", corrupt.c_str()}), kExitInput);
  const auto scenario = write_temp("scenario.json", demo_files().at("scenarios/rwlock-exc.json").dump());
  EXPECT_EQ(cli({"explore", scenario.c_str(), "--max-steps", "3"}), kExitBound);
  std::string out;
  EXPECT_EQ(cli({"explore", scenario.c_str(), scenario.c_str()}, &out), kExitOk);
  EXPECT_EQ(json::parse(out).size(), 2u);
}

}  // namespace
}  // namespace sharecheck
