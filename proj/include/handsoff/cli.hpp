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

// Command-line front end. Each subcommand is a plain function so tests can
// drive it without spawning a process.
//
// Exit status: 0 success, 1 usage or configuration error, 2 runtime error.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace handsoff::cli {

enum ExitCode : int { kOk = 0, kUsageError = 1, kRuntimeError = 2 };

/// Relative output paths are resolved under this directory when it is set.
inline constexpr const char* kOutputRootEnv = "HANDSOFF_OUTPUT_ROOT";

struct TrainArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "run";
  bool resume = false;
};

struct EvalArgs {
  std::string controls;
  std::string config;
  std::optional<std::size_t> n_eval;
  std::optional<std::uint64_t> seed;
  std::string out = "eval.json";
};

struct RolloutArgs {
  std::string controls;
  std::string config;
  std::optional<std::uint64_t> noise_seed;
  std::string out = ".";
};

int train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int rollout(const RolloutArgs& args, std::ostream& out, std::ostream& err);
int write_preset(const std::string& name, const std::string& path, std::ostream& out,
                 std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::filesystem::path resolve_output(const std::string& path);

}  // namespace handsoff::cli
