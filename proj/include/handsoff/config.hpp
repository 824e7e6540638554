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

// Run configuration files.
//
// A run configuration is a JSON document:
//
//   {
//     "schema": "handsoff.run/1",
//     "model": {"kind": "pendulum", "length": 1, "mass": 1, "friction": 1,
//               "gravity": 9.80665, "dt": 0.1},
//     "disturbance": "uniform(-1,1)",
//     "x0": [0, 0],
//     "target": [3.141592653589793, 0],
//     "train": { ...TrainConfig fields by name... },
//     "eval": {"n_eval": 100, "n_examples": 5}
//   }
//
// A linear model is {"kind": "linear", "state_dim": n, "input_dim": m,
// "noise_dim": k, "a": [...], "b": [...], "g": [...]} with row-major
// matrices. Every key is optional except "schema" (missing keys keep their
// defaults) and unknown keys are rejected.

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "handsoff/dynamics.hpp"
#include "handsoff/trainer.hpp"

namespace handsoff {

inline constexpr std::string_view kRunSchema = "handsoff.run/1";

struct ModelSpec {
  enum class Kind { kPendulum, kLinear };

  Kind kind = Kind::kPendulum;
  PendulumParams pendulum;
  std::size_t state_dim = 1;
  std::size_t input_dim = 1;
  std::size_t noise_dim = 1;
  std::vector<double> a{1.0}, b{1.0}, g{1.0};

  std::unique_ptr<SystemModel> build() const;
  bool operator==(const ModelSpec&) const = default;
};

struct EvalSettings {
  std::size_t n_eval = 100;
  std::size_t n_examples = 5;

  bool operator==(const EvalSettings&) const = default;
};

struct RunConfig {
  ModelSpec model;
  TrainConfig train;
  EvalSettings eval;

  /// Throws ConfigError if the model and training settings disagree.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Parses a configuration document. JSON syntax errors report the line and
/// column; semantic errors name the offending field (e.g. "train.horizon").
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);
/// Canonical JSON text (two-space indent, trailing newline).
std::string dump_run_config(const RunConfig& config);

/// Bundled configurations. Currently "pendulum_table1" (the swing-up
/// experiment) and "linear_toy" (x' = x + u + w, T = 2, no noise).
RunConfig preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace handsoff
