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

#include "handsoff/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "handsoff/config.hpp"
#include "handsoff/errors.hpp"
#include "handsoff/io.hpp"
#include "handsoff/objective.hpp"
#include "handsoff/report.hpp"
#include "handsoff/trainer.hpp"

namespace handsoff::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::string_view kPresetPrefix = "preset:";

RunConfig load_config(const std::string& path) {
  if (std::string_view(path).starts_with(kPresetPrefix)) {
    return preset(std::string_view(path).substr(kPresetPrefix.size()));
  }
  return load_run_config(path);
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream ss;
  fn(ss);
  return ss.str();
}

ControlSequence load_controls(const std::string& path, const RunConfig& config,
                              const SystemModel& model) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  ControlSequence u;
  try {
    u = io::read_controls_csv(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (u.horizon() != config.train.horizon || u.input_dim() != model.input_dim()) {
    throw DimensionError(path + ": " + std::to_string(u.horizon()) + " rows of " +
                         std::to_string(u.input_dim()) + " inputs, config expects " +
                         std::to_string(config.train.horizon) + " rows of " +
                         std::to_string(model.input_dim()));
  }
  return u;
}

// Runs `body`, mapping exceptions to exit codes and a one-line diagnostic.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DimensionError& e) {
    err << "input error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

// Keeps the log lines of work that the checkpoint already covers.
std::string trim_log(const fs::path& path, const Checkpoint& cp) {
  if (!fs::exists(path)) return {};
  std::istringstream in(io::read_file(path));
  std::string kept;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    const bool incremental = j.at("phase").get<std::string>() == "incremental";
    const auto index = j.at("stage").get<std::size_t>();
    const bool covered = cp.phase == Phase::kIncremental
                             ? incremental && index <= cp.completed
                             : incremental || index < cp.completed;
    if (covered) kept += line + '\n';
  }
  return kept;
}

void write_eval_examples(const fs::path& dir, const EvalReport& report) {
  for (std::size_t k = 0; k < report.examples.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "traj_eval_%03zu.csv", k);
    io::atomic_write(dir / name, render([&](std::ostream& os) {
                       io::write_trajectory_csv(os, report.examples[k]);
                     }));
  }
}

}  // namespace

fs::path resolve_output(const std::string& path) {
  fs::path p(path);
  if (p.is_relative()) {
    if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') {
      return fs::path(root) / p;
    }
  }
  return p;
}

int train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig config = load_config(args.config);
    if (args.seed) config.train.seed = *args.seed;
    config.validate();
    const auto model = config.model.build();
    const TrainConfig& tc = config.train;

    const fs::path dir = resolve_output(args.out);
    fs::create_directories(dir);
    io::DirectoryLock lock(dir);
    const fs::path checkpoint_path = dir / "checkpoint.json";
    const fs::path log_path = dir / "train_log.jsonl";

    TrainHooks hooks;
    std::string log_prefix;
    if (args.resume && fs::exists(checkpoint_path)) {
      hooks.resume = checkpoint_from_json(json::parse(io::read_file(checkpoint_path)));
      log_prefix = trim_log(log_path, *hooks.resume);
      out << "resuming after " << hooks.resume->completed << " "
          << (hooks.resume->phase == Phase::kIncremental ? "stages" : "polish rounds") << '\n';
    }
    io::atomic_write(dir / "config.json", dump_run_config(config));

    std::ofstream log(log_path, std::ios::binary | std::ios::trunc);
    if (!log) throw std::runtime_error("cannot write " + log_path.string());
    log << log_prefix;
    hooks.on_step = [&log](const StepRecord& r) { log << step_log_line(r) << '\n'; };
    hooks.on_checkpoint = [&](const Checkpoint& cp) {
      log.flush();
      io::atomic_write(checkpoint_path, to_json(cp).dump(2) + "\n");
    };

    const TrainedResult result = train_full(tc, *model, hooks);
    log.close();

    const std::uint64_t eval_seed = derive_seed(tc.seed, "eval");
    const EvalReport report =
        evaluate(result.controls, *model, tc.x0, tc.target, tc.disturbance, config.eval.n_eval,
                 eval_seed, tc.sparsity_threshold, config.eval.n_examples);
    const EvalReport report_incremental =
        evaluate(result.incremental_controls, *model, tc.x0, tc.target, tc.disturbance,
                 config.eval.n_eval, eval_seed, tc.sparsity_threshold);

    const DisturbanceBatch nominal_w =
        sample_disturbances(0, 1, tc.horizon, model->noise_dim(), Distribution::zero());
    const Trajectory nominal = rollout(*model, tc.x0, result.controls, nominal_w.sample(0));

    io::atomic_write(dir / "u.csv", render([&](std::ostream& os) {
                       io::write_controls_csv(os, result.controls);
                     }));
    io::atomic_write(dir / "u_incremental.csv", render([&](std::ostream& os) {
                       io::write_controls_csv(os, result.incremental_controls);
                     }));
    io::atomic_write(dir / "traj.csv", render([&](std::ostream& os) {
                       io::write_trajectory_csv(os, nominal);
                     }));
    io::atomic_write(dir / "phase.csv", render([&](std::ostream& os) {
                       io::write_phase_csv(os, nominal, tc.x0, tc.target);
                     }));
    write_eval_examples(dir, report);
    io::atomic_write(dir / "eval.json", eval_json(report).dump(2) + "\n");

    ordered_json summary;
    summary["seed"] = result.seed;
    summary["threshold"] = tc.sparsity_threshold;
    summary["l0_after_incremental"] = result.l0_after_incremental;
    summary["l0_after_polish"] = result.l0_after_polish;
    summary["eval_incremental"] = eval_detail_json(report_incremental);
    summary["eval"] = eval_detail_json(report);
    summary["stage_history"] = ordered_json::array();
    for (const auto& h : result.stage_history) summary["stage_history"].push_back(to_json(h));
    summary["polish_history"] = ordered_json::array();
    for (const auto& h : result.polish_history) summary["polish_history"].push_back(to_json(h));
    io::atomic_write(dir / "result.json", summary.dump(2) + "\n");

    out << "trained " << tc.horizon << " steps (seed " << tc.seed << ")\n"
        << "l0 sparsity (|u| > " << tc.sparsity_threshold << "): " << result.l0_after_incremental
        << " after incremental, " << result.l0_after_polish << " after polishing, of "
        << result.controls.size() << '\n'
        << "held-out terminal error over " << report.n_eval
        << " disturbance draws: mean " << report.mean_terminal_error << ", max "
        << report.max_terminal_error << '\n'
        << "artifacts in " << dir.string() << '\n';
    return kOk;
  });
}

int eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = load_config(args.config);
    const auto model = config.model.build();
    const ControlSequence u = load_controls(args.controls, config, *model);
    const TrainConfig& tc = config.train;
    const std::uint64_t seed = derive_seed(args.seed.value_or(tc.seed), "eval");
    const std::size_t n_eval = args.n_eval.value_or(config.eval.n_eval);
    if (n_eval == 0) throw ConfigError("--n-eval", "must be >= 1");
    const EvalReport report = evaluate(u, *model, tc.x0, tc.target, tc.disturbance, n_eval, seed,
                                       tc.sparsity_threshold);
    const fs::path path = resolve_output(args.out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    io::atomic_write(path, eval_json(report).dump(2) + "\n");
    out << "mean terminal error " << report.mean_terminal_error << ", max "
        << report.max_terminal_error << " over " << n_eval << " draws\n"
        << "l0 sparsity " << report.l0_sparsity << " (|u| > " << report.threshold << ")\n";
    return kOk;
  });
}

int rollout(const RolloutArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = load_config(args.config);
    const auto model = config.model.build();
    const ControlSequence u = load_controls(args.controls, config, *model);
    const TrainConfig& tc = config.train;
    const DisturbanceBatch w =
        args.noise_seed ? sample_disturbances(*args.noise_seed, 1, tc.horizon, model->noise_dim(),
                                              tc.disturbance)
                        : sample_disturbances(0, 1, tc.horizon, model->noise_dim(),
                                              Distribution::zero());
    const Trajectory traj = rollout(*model, tc.x0, u, w.sample(0));

    const fs::path dir = resolve_output(args.out);
    fs::create_directories(dir);
    io::atomic_write(dir / "control.csv", render([&](std::ostream& os) {
                       io::write_controls_csv(os, u);
                     }));
    io::atomic_write(dir / "traj.csv", render([&](std::ostream& os) {
                       io::write_trajectory_csv(os, traj);
                     }));
    io::atomic_write(dir / "phase.csv", render([&](std::ostream& os) {
                       io::write_phase_csv(os, traj, tc.x0, tc.target);
                     }));
    out << "terminal error " << std::sqrt(terminal_cost(traj.terminal(), tc.target)) << '\n'
        << "wrote control.csv, traj.csv, phase.csv to " << dir.string() << '\n';
    return kOk;
  });
}

int write_preset(const std::string& name, const std::string& path, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const std::string text = dump_run_config(preset(name));
    if (path.empty() || path == "-") {
      out << text;
    } else {
      io::atomic_write(resolve_output(path), text);
    }
    return kOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse open-loop control synthesis by unrolled gradient training"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train a control sequence and write an artifact bundle");
  train_cmd->add_option("config", train_args.config, "config file or preset:NAME")->required();
  train_cmd->add_option("--seed", train_args.seed, "master seed (overrides train.seed)");
  train_cmd->add_option("--out", train_args.out, "output directory")->capture_default_str();
  train_cmd->add_flag("--resume", train_args.resume, "continue from <out>/checkpoint.json");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a control CSV on fresh disturbances");
  eval_cmd->add_option("controls", eval_args.controls, "u.csv")->required();
  eval_cmd->add_option("config", eval_args.config, "config file or preset:NAME")->required();
  eval_cmd->add_option("--n-eval", eval_args.n_eval, "number of disturbance draws");
  eval_cmd->add_option("--seed", eval_args.seed, "master seed (defaults to train.seed)");
  eval_cmd->add_option("--out", eval_args.out, "report path")->capture_default_str();

  RolloutArgs rollout_args;
  auto* rollout_cmd = app.add_subcommand("rollout", "simulate a control CSV and write plot data");
  rollout_cmd->add_option("controls", rollout_args.controls, "u.csv")->required();
  rollout_cmd->add_option("config", rollout_args.config, "config file or preset:NAME")->required();
  rollout_cmd->add_option("--noise-seed", rollout_args.noise_seed,
                          "draw one disturbance trajectory from this seed (default: none)");
  rollout_cmd->add_option("--out", rollout_args.out, "output directory")->capture_default_str();

  std::string preset_name;
  std::string preset_out;
  auto* preset_cmd = app.add_subcommand("preset", "print a bundled configuration");
  preset_cmd->add_option("name", preset_name, "preset name")
      ->required()
      ->check(CLI::IsMember(preset_names()));
  preset_cmd->add_option("-o,--out", preset_out, "write to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    app.exit(e, out, msg);
    err << msg.str();
    return kUsageError;
  }

  if (*train_cmd) return train(train_args, out, err);
  if (*eval_cmd) return eval(eval_args, out, err);
  if (*rollout_cmd) return rollout(rollout_args, out, err);
  return write_preset(preset_name, preset_out, out, err);
}

}  // namespace handsoff::cli
