// Copyright 2026 The handsoff Authors
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

#include "handsoff/io.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "handsoff/config.hpp"
#include "handsoff/errors.hpp"
#include "handsoff/report.hpp"

namespace handsoff {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(FormatDoubleTest, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.0), "0");
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(-2.5), "-2.5");
  EXPECT_EQ(io::format_double(1e-300), "1e-300");
}

TEST(ControlsCsvTest, HeaderAndRows) {
  std::ostringstream out;
  io::write_controls_csv(out, ControlSequence(3, 1, {0.5, 0.0, -1.25}));
  EXPECT_EQ(out.str(), "t,u\n0,0.5\n1,0\n2,-1.25\n");
  std::ostringstream multi;
  io::write_controls_csv(multi, ControlSequence(1, 2, {1.0, 2.0}));
  EXPECT_EQ(lines_of(multi.str())[0], "t,u0,u1");
}

TEST(ControlsCsvProperty, RoundTripIsBitIdentical) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t T = 1 + rng() % 60;
    const std::size_t nu = 1 + rng() % 3;
    std::vector<double> v(T * nu);
    for (double& x : v) {
      // mix ordinary values, tiny values, exact zeros and wide exponents
      switch (rng() % 4) {
        case 0: x = d(rng); break;
        case 1: x = d(rng) * 1e-9; break;
        case 2: x = 0.0; break;
        default: x = d(rng) * std::pow(10.0, static_cast<double>(rng() % 600) - 300.0);
      }
    }
    const ControlSequence u(T, nu, v);
    std::ostringstream out;
    io::write_controls_csv(out, u);
    std::istringstream in(out.str());
    EXPECT_EQ(io::read_controls_csv(in), u);
  }
}

TEST(ControlsCsvTest, RejectsMalformedInput) {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return io::read_controls_csv(in);
  };
  EXPECT_THROW(read(""), std::runtime_error);
  EXPECT_THROW(read("time,u\n0,1\n"), std::runtime_error);
  EXPECT_THROW(read("t,u\n0,1,2\n"), std::runtime_error);
  EXPECT_THROW(read("t,u\n1,1\n"), std::runtime_error);
  try {
    read("t,u\n0,1\n1,abc\n");
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(TrajectoryCsvTest, RowCountsForHorizon50) {
  const PendulumModel model;
  const ControlSequence u(50, 1, std::vector<double>(50, 0.1));
  const auto traj = rollout(model, std::vector<double>{0.0, 0.0}, u, std::vector<double>(50, 0.0));
  std::ostringstream controls, states, phase;
  io::write_controls_csv(controls, u);
  io::write_trajectory_csv(states, traj);
  io::write_phase_csv(phase, traj, std::vector<double>{0.0, 0.0}, std::vector<double>{3.0, 0.0});
  const auto c = lines_of(controls.str());
  const auto s = lines_of(states.str());
  const auto p = lines_of(phase.str());
  EXPECT_EQ(c.size(), 51u);
  EXPECT_EQ(s.size(), 52u);
  EXPECT_EQ(s[0], "t,x,y");
  EXPECT_EQ(s[1], "0,0,0");
  EXPECT_EQ(p[0], "label,x,y");
  EXPECT_EQ(p[1], "initial,0,0");
  EXPECT_EQ(p[2], "target,3,0");
  EXPECT_EQ(p.size(), 3u + 51u);
}

TEST(BatchCsvTest, SampleMajorRows) {
  const DisturbanceBatch batch(2, 2, 1, {0.1, 0.2, 0.3, 0.4});
  std::ostringstream out;
  io::write_batch_csv(out, batch);
  EXPECT_EQ(out.str(), "sample,t,w\n0,0,0.1\n0,1,0.2\n1,0,0.3\n1,1,0.4\n");
}

TEST(FileTest, AtomicWriteAndLock) {
  const fs::path dir = fs::temp_directory_path() / "handsoff_io_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  io::atomic_write(dir / "a.txt", "hello\n");
  EXPECT_EQ(io::read_file(dir / "a.txt"), "hello\n");
  io::atomic_write(dir / "a.txt", "again\n");
  EXPECT_EQ(io::read_file(dir / "a.txt"), "again\n");
  {
    io::DirectoryLock lock(dir);
    EXPECT_TRUE(fs::exists(dir / ".lock"));
    EXPECT_THROW(io::DirectoryLock{dir}, std::runtime_error);
  }
  EXPECT_FALSE(fs::exists(dir / ".lock"));
  EXPECT_THROW(io::read_file(dir / "missing.txt"), std::runtime_error);
  fs::remove_all(dir);
}

TEST(RunConfigTest, DumpParsesBackEqual) {
  for (const auto& name : preset_names()) {
    const RunConfig c = preset(name);
    EXPECT_EQ(parse_run_config(dump_run_config(c)), c) << name;
    EXPECT_EQ(dump_run_config(parse_run_config(dump_run_config(c))), dump_run_config(c));
  }
}

TEST(RunConfigTest, ShippedFilesMatchPresets) {
  const fs::path root = HANDSOFF_SOURCE_DIR;
  EXPECT_EQ(load_run_config(root / "configs" / "pendulum_table1.cfg"), preset("pendulum_table1"));
  EXPECT_EQ(load_run_config(root / "configs" / "linear_toy.cfg"), preset("linear_toy"));
}

TEST(RunConfigTest, DefaultPresetMatchesTrainDefaults) {
  const RunConfig c = preset("pendulum_table1");
  EXPECT_EQ(c.train, TrainConfig{});
  EXPECT_EQ(c.model.kind, ModelSpec::Kind::kPendulum);
  EXPECT_EQ(c.model.pendulum, PendulumParams{});
}

TEST(RunConfigTest, MissingKeysTakeDefaults) {
  const RunConfig c =
      parse_run_config(R"({"schema": "handsoff.run/1", "train": {"horizon": 5, "seed": 9}})");
  EXPECT_EQ(c.train.horizon, 5u);
  EXPECT_EQ(c.train.seed, 9u);
  EXPECT_EQ(c.train.p_decay, TrainConfig{}.p_decay);
}

TEST(RunConfigTest, ErrorsNameTheField) {
  auto field_of = [](const std::string& text) {
    try {
      parse_run_config(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<no error>");
  };
  EXPECT_EQ(field_of(R"({"schema": "handsoff.run/1", "train": {"horizn": 5}})"), "train.horizn");
  EXPECT_EQ(field_of(R"({"schema": "handsoff.run/1", "train": {"horizon": -1}})"), "train.horizon");
  EXPECT_EQ(field_of(R"({"schema": "handsoff.run/1", "train": {"p_decay": "x"}})"), "train.p_decay");
  EXPECT_EQ(field_of(R"({"schema": "handsoff.run/1", "disturbance": "normal"})"), "disturbance");
  EXPECT_EQ(field_of(R"({"schema": "handsoff.run/2"})"), "schema");
  EXPECT_EQ(field_of(R"({"schema": "handsoff.run/1", "x0": [0, 0, 0]})"), "train.x0");
  EXPECT_EQ(field_of(R"({"schema": "handsoff.run/1", "model": {"kind": "cart"}})"), "model.kind");
  EXPECT_EQ(field_of(R"({"schema": "handsoff.run/1", "eval": {"n_eval": 0}})"), "eval.n_eval");
}

TEST(RunConfigTest, MalformedJsonReportsPosition) {
  try {
    parse_run_config("{\n  \"schema\": \"handsoff.run/1\",\n  \"train\": {\n}");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos) << e.what();
  }
}

TEST(RunConfigTest, ModelSpecBuildsModels) {
  const auto pend = preset("pendulum_table1").model.build();
  EXPECT_EQ(pend->state_dim(), 2u);
  const auto lin = preset("linear_toy").model.build();
  EXPECT_EQ(lin->state_dim(), 1u);
  EXPECT_THROW(preset("nope"), ConfigError);
}

TEST(ReportJsonTest, EvalHasFixedFields) {
  EvalReport r;
  r.mean_terminal_error = 0.5;
  r.max_terminal_error = 1.5;
  r.l0_sparsity = 7;
  r.threshold = 1e-3;
  r.n_eval = 100;
  r.seed = 42;
  const auto j = eval_json(r);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"mean_terminal_error", "max_terminal_error",
                                            "l0_sparsity", "threshold", "n_eval", "seed"}));
  EXPECT_EQ(j["l0_sparsity"], 7);
}

TEST(ReportJsonTest, CheckpointRoundTrip) {
  Checkpoint cp;
  cp.phase = Phase::kPolish;
  cp.completed = 2;
  cp.controls = ControlSequence(3, 1, {0.1, -1.0 / 3.0, 0.0});
  cp.incremental_controls = ControlSequence(3, 1, {0.2, 0.3, 1e-310});
  cp.stage_history = {CostBreakdown{1.0 / 7.0, 2.0, 3.0, 1.0, 0.667}};
  cp.polish_history = {CostBreakdown{0.1, 0.2, 0.3, 3e7, 1.5e-9}};
  EXPECT_EQ(checkpoint_from_json(nlohmann::json::parse(to_json(cp).dump())), cp);
}

TEST(ReportJsonTest, StepLogLineIsOneJsonObject) {
  const StepRecord r{Phase::kIncremental, 3, 17, 0.444889, 0.1, CostBreakdown{1.0, 2.0, 3.0, 1.0, 0.444889}};
  const std::string line = step_log_line(r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j["phase"], "incremental");
  EXPECT_EQ(j["stage"], 3);
  EXPECT_EQ(j["iteration"], 17);
  EXPECT_EQ(j["total"], 3.0);
}

}  // namespace
}  // namespace handsoff
