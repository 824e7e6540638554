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

#include "handsoff/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "handsoff/errors.hpp"

namespace handsoff {
namespace {

void require(bool ok, const char* field, const char* message) {
  if (!ok) throw ConfigError(field, message);
}

AdamOptions adam_options(const TrainConfig& c, double lr) {
  return AdamOptions{lr, c.adam_beta1, c.adam_beta2, c.adam_epsilon};
}

// Runs `iterations` Adam steps of `penalty` on `batch` starting from u.
void optimize(const TrainConfig& config, const Problem& problem, ControlSequence& u,
              const DisturbanceBatch& batch, const Penalty& penalty, double lr, Phase phase,
              std::size_t index, std::size_t iterations, const StepObserver& observer) {
  Tape tape;
  AdamState adam(u.size(), adam_options(config, lr));
  const std::string where = std::string(phase_name(phase)) + " " +
                            (phase == Phase::kIncremental ? "stage " : "round ") +
                            std::to_string(index);
  for (std::size_t it = 0; it < iterations; ++it) {
    CostAndGradient cg;
    try {
      cg = cost_and_gradient(problem, u.flat(), batch, penalty, config.reduction(), &tape);
    } catch (const NonFiniteError& e) {
      throw NonFiniteError(where + ": " + e.what(), index);
    }
    if (!std::isfinite(cg.cost.total)) {
      throw NonFiniteError(where + ": non-finite loss at iteration " + std::to_string(it), index);
    }
    if (observer) observer(StepRecord{phase, index, it, penalty.p, lr, cg.cost});
    try {
      adam_step(adam, u.flat(), cg.gradient);
    } catch (const NonFiniteError& e) {
      throw NonFiniteError(where + ": " + e.what(), index);
    }
  }
}

void run_incremental(const TrainConfig& config, const SystemModel& model, Checkpoint& progress,
                     const TrainHooks& hooks) {
  const Problem problem = config.problem(model);
  for (std::size_t stage = progress.completed + 1; stage <= config.horizon; ++stage) {
    progress.controls.extend(1);
    const Penalty penalty{config.lambda_incremental, config.stage_p(stage), config.smoothing};
    const DisturbanceBatch batch =
        sample_disturbances(derive_seed(config.seed, "incremental", stage), config.batch_size,
                            stage, model.noise_dim(), config.disturbance);
    optimize(config, problem, progress.controls, batch, penalty, config.incremental_lr,
             Phase::kIncremental, stage, config.stage_iterations, hooks.on_step);
    progress.stage_history.push_back(mc_total_cost(problem, progress.controls.flat(), batch, penalty));
    progress.completed = stage;
    if (hooks.on_checkpoint) hooks.on_checkpoint(progress);
  }
}

void run_polish(const TrainConfig& config, const SystemModel& model, Checkpoint& progress,
                const TrainHooks& hooks) {
  const Problem problem = config.problem(model);
  const LrSchedule schedule{config.lr0, config.lr_decay};
  const Penalty penalty{config.lambda_polish, config.p_polish, config.smoothing};
  for (std::size_t round = progress.completed; round < config.polish_rounds; ++round) {
    const DisturbanceBatch batch =
        sample_disturbances(derive_seed(config.seed, "polish", round), config.polish_batch_size,
                            config.horizon, model.noise_dim(), config.disturbance);
    optimize(config, problem, progress.controls, batch, penalty, schedule.rate(round),
             Phase::kPolish, round, config.polish_iterations, hooks.on_step);
    progress.polish_history.push_back(mc_total_cost(problem, progress.controls.flat(), batch, penalty));
    progress.completed = round + 1;
    if (hooks.on_checkpoint) hooks.on_checkpoint(progress);
  }
}

}  // namespace

const char* phase_name(Phase phase) {
  return phase == Phase::kIncremental ? "incremental" : "polish";
}

void TrainConfig::validate(const SystemModel& model) const {
  require(horizon >= 1, "train.horizon", "must be >= 1");
  require(x0.size() == model.state_dim(), "train.x0", "length must equal the state dimension");
  require(target.size() == model.state_dim(), "train.target",
          "length must equal the state dimension");
  for (double v : x0) require(std::isfinite(v), "train.x0", "entries must be finite");
  for (double v : target) require(std::isfinite(v), "train.target", "entries must be finite");
  require(lambda_incremental >= 0.0 && std::isfinite(lambda_incremental),
          "train.lambda_incremental", "must be finite and >= 0");
  require(lambda_polish >= 0.0 && std::isfinite(lambda_polish), "train.lambda_polish",
          "must be finite and >= 0");
  require(p_start > 0.0 && p_start <= 1.0, "train.p_start", "must lie in (0, 1]");
  require(p_decay > 0.0 && p_decay < 1.0, "train.p_decay", "must lie in (0, 1)");
  require(p_polish > 0.0 && p_polish <= 1.0, "train.p_polish", "must lie in (0, 1]");
  require(smoothing >= 0.0 && std::isfinite(smoothing), "train.smoothing", "must be >= 0");
  require(batch_size >= 1, "train.batch_size", "must be >= 1");
  require(polish_batch_size >= 1, "train.polish_batch_size", "must be >= 1");
  require(stage_iterations >= 1, "train.stage_iterations", "must be >= 1");
  require(polish_iterations >= 1, "train.polish_iterations", "must be >= 1");
  require(incremental_lr > 0.0 && std::isfinite(incremental_lr), "train.incremental_lr",
          "must be > 0");
  require(lr0 > 0.0 && std::isfinite(lr0), "train.lr0", "must be > 0");
  require(lr_decay > 0.0 && lr_decay < 1.0, "train.lr_decay", "must lie in (0, 1)");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "train.adam_beta1", "must lie in [0, 1)");
  require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "train.adam_beta2", "must lie in [0, 1)");
  require(adam_epsilon > 0.0, "train.adam_epsilon", "must be > 0");
  require(sparsity_threshold >= 0.0, "train.sparsity_threshold", "must be >= 0");
}

double TrainConfig::stage_p(std::size_t stage) const {
  if (stage == 0) throw std::invalid_argument("stage_p: stages are numbered from 1");
  return p_start * std::pow(p_decay, static_cast<double>(stage - 1));
}

ControlSequence incremental_train(const TrainConfig& config, const SystemModel& model,
                                  std::vector<CostBreakdown>* history, const TrainHooks& hooks) {
  config.validate(model);
  Checkpoint progress;
  progress.controls = ControlSequence(0, model.input_dim());
  run_incremental(config, model, progress, hooks);
  if (history != nullptr) *history = std::move(progress.stage_history);
  return progress.controls;
}

ControlSequence polish(const TrainConfig& config, const ControlSequence& u_init,
                       const SystemModel& model, std::vector<CostBreakdown>* history,
                       const TrainHooks& hooks) {
  config.validate(model);
  if (u_init.horizon() != config.horizon || u_init.input_dim() != model.input_dim()) {
    throw DimensionError("polish: initial controls do not match the configured horizon");
  }
  Checkpoint progress;
  progress.phase = Phase::kPolish;
  progress.controls = u_init;
  progress.incremental_controls = u_init;
  run_polish(config, model, progress, hooks);
  if (history != nullptr) *history = std::move(progress.polish_history);
  return progress.controls;
}

TrainedResult train_full(const TrainConfig& config, const SystemModel& model,
                         const TrainHooks& hooks) {
  config.validate(model);
  Checkpoint progress;
  progress.controls = ControlSequence(0, model.input_dim());
  if (hooks.resume) {
    progress = *hooks.resume;
    const bool incremental = progress.phase == Phase::kIncremental;
    const std::size_t limit = incremental ? config.horizon : config.polish_rounds;
    if (progress.completed > limit || progress.controls.input_dim() != model.input_dim() ||
        (incremental && progress.controls.horizon() != progress.completed) ||
        (!incremental && progress.controls.horizon() != config.horizon)) {
      throw std::invalid_argument("train_full: checkpoint does not match the configuration");
    }
  }

  if (progress.phase == Phase::kIncremental) {
    run_incremental(config, model, progress, hooks);
    progress.incremental_controls = progress.controls;
    progress.phase = Phase::kPolish;
    progress.completed = 0;
  }
  run_polish(config, model, progress, hooks);

  TrainedResult result;
  result.controls = progress.controls;
  result.incremental_controls = progress.incremental_controls;
  result.stage_history = std::move(progress.stage_history);
  result.polish_history = std::move(progress.polish_history);
  result.l0_after_incremental =
      sparsity_l0(result.incremental_controls.flat(), config.sparsity_threshold);
  result.l0_after_polish = sparsity_l0(result.controls.flat(), config.sparsity_threshold);
  result.config = config;
  result.seed = config.seed;
  return result;
}

EvalReport evaluate(const ControlSequence& u, const SystemModel& model, std::span<const double> x0,
                    std::span<const double> target, const Distribution& dist, std::size_t n_eval,
                    std::uint64_t seed, double threshold, std::size_t n_examples) {
  if (n_eval == 0) throw std::invalid_argument("evaluate: n_eval must be >= 1");
  const DisturbanceBatch batch =
      sample_disturbances(seed, n_eval, u.horizon(), model.noise_dim(), dist);
  EvalReport report;
  report.threshold = threshold;
  report.n_eval = n_eval;
  report.seed = seed;
  report.l0_sparsity = sparsity_l0(u.flat(), threshold);
  report.mean_terminal_state.assign(model.state_dim(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_eval; ++i) {
    Trajectory traj = rollout(model, x0, u, batch.sample(i));
    const double cost = terminal_cost(traj.terminal(), target);
    const double err = std::sqrt(cost);
    report.terminal_costs.push_back(cost);
    report.terminal_errors.push_back(err);
    sum += err;
    report.max_terminal_error = std::max(report.max_terminal_error, err);
    for (std::size_t k = 0; k < model.state_dim(); ++k) {
      report.mean_terminal_state[k] += traj.terminal()[k];
    }
    if (i < n_examples) report.examples.push_back(std::move(traj));
  }
  report.mean_terminal_error = sum / static_cast<double>(n_eval);
  for (double& v : report.mean_terminal_state) v /= static_cast<double>(n_eval);
  return report;
}

}  // namespace handsoff
