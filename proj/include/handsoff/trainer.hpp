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

// Two-phase training of an open-loop control sequence.
//
// Incremental phase: for stage i = 1..T only u_0..u_{i-1} are trained, on
// the cost of reaching the target at step i with p_i = p_start * alpha^(i-1)
// and a fresh batch of N_p disturbance trajectories. Stage i starts from the
// result of stage i-1 with the new input initialised to zero.
//
// Polishing phase: round r = 0..R-1 retrains all T inputs jointly on the
// full cost with lambda_polish, p_polish, learning rate lr0 * beta^r and a
// fresh disturbance batch. Every stage and round starts a fresh Adam state.
//
// Random draws come from substreams of the master seed:
//   incremental stage i -> derive_seed(seed, "incremental", i)
//   polish round r      -> derive_seed(seed, "polish", r)
//   evaluation          -> derive_seed(seed, "eval", 0)

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "handsoff/adam.hpp"
#include "handsoff/controls.hpp"
#include "handsoff/dynamics.hpp"
#include "handsoff/objective.hpp"
#include "handsoff/random.hpp"

namespace handsoff {

/// (2/3)^50, the final exponent of the incremental schedule carried into polishing.
inline double default_p_polish() { return std::pow(2.0 / 3.0, 50); }

struct TrainConfig {
  std::size_t horizon = 50;
  std::vector<double> x0{0.0, 0.0};
  std::vector<double> target{std::numbers::pi, 0.0};
  Distribution disturbance = Distribution::uniform(-1.0, 1.0);

  double lambda_incremental = 1.0;
  double lambda_polish = 3e7;
  double p_start = 1.0;
  double p_decay = 0.667;  // alpha
  double p_polish = default_p_polish();
  // eps of the smoothed |u|^p. Matches the default reporting threshold; much
  // smaller values leave inputs stuck around |u| ~ 1e-2 during polishing.
  double smoothing = 1e-3;

  std::size_t batch_size = 2;         // N_p, per incremental stage
  std::size_t polish_batch_size = 64;  // per polish round
  std::size_t stage_iterations = 200;
  std::size_t polish_rounds = 10;
  std::size_t polish_iterations = 500;

  double incremental_lr = 0.1;
  double lr0 = 1.0;       // first polish round
  double lr_decay = 0.5;  // beta
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  double sparsity_threshold = 1e-3;
  std::uint64_t seed = 0;
  bool deterministic = true;

  /// Throws ConfigError naming the first invalid field.
  void validate(const SystemModel& model) const;
  /// p used in incremental stage i (1-based).
  double stage_p(std::size_t stage) const;
  Problem problem(const SystemModel& model) const { return Problem{&model, x0, target}; }
  Reduction reduction() const { return deterministic ? Reduction::kSerial : Reduction::kParallel; }

  bool operator==(const TrainConfig&) const = default;
};

enum class Phase { kIncremental, kPolish };
const char* phase_name(Phase phase);

/// One optimizer step as seen by a StepObserver. `cost` is evaluated at the
/// parameters before the update.
struct StepRecord {
  Phase phase;
  std::size_t index;  // 1-based stage, or 0-based polish round
  std::size_t iteration;
  double p;
  double lr;
  CostBreakdown cost;
};

using StepObserver = std::function<void(const StepRecord&)>;

/// State after a finished stage or round; enough to resume the run.
struct Checkpoint {
  Phase phase = Phase::kIncremental;
  std::size_t completed = 0;  // stages (incremental) or rounds (polish) finished
  ControlSequence controls;
  ControlSequence incremental_controls;  // set once the incremental phase is over
  std::vector<CostBreakdown> stage_history;
  std::vector<CostBreakdown> polish_history;

  bool operator==(const Checkpoint&) const = default;
};

using CheckpointSink = std::function<void(const Checkpoint&)>;

struct TrainHooks {
  StepObserver on_step;
  CheckpointSink on_checkpoint;
  std::optional<Checkpoint> resume;
};

struct TrainedResult {
  ControlSequence controls;
  ControlSequence incremental_controls;
  std::vector<CostBreakdown> stage_history;   // one entry per stage, at the stage optimum
  std::vector<CostBreakdown> polish_history;  // one entry per round
  std::size_t l0_after_incremental = 0;
  std::size_t l0_after_polish = 0;
  TrainConfig config;
  std::uint64_t seed = 0;

  bool operator==(const TrainedResult&) const = default;
};

/// Runs stages first_stage..T starting from `start` (which must hold
/// first_stage - 1 steps). Stage histories are appended to `history`.
ControlSequence incremental_train(const TrainConfig& config, const SystemModel& model,
                                  std::vector<CostBreakdown>* history = nullptr,
                                  const TrainHooks& hooks = {});

/// Runs the configured polish rounds from u_init.
ControlSequence polish(const TrainConfig& config, const ControlSequence& u_init,
                       const SystemModel& model, std::vector<CostBreakdown>* history = nullptr,
                       const TrainHooks& hooks = {});

TrainedResult train_full(const TrainConfig& config, const SystemModel& model,
                         const TrainHooks& hooks = {});

struct EvalReport {
  double mean_terminal_error = 0.0;  // mean of |x_T - x*|
  double max_terminal_error = 0.0;
  std::vector<double> terminal_errors;
  std::vector<double> terminal_costs;  // |x_T - x*|^2 per sample
  std::vector<double> mean_terminal_state;
  std::size_t l0_sparsity = 0;
  double threshold = 0.0;
  std::size_t n_eval = 0;
  std::uint64_t seed = 0;
  std::vector<Trajectory> examples;

  bool operator==(const EvalReport&) const = default;
};

/// Open-loop evaluation of u against n_eval disturbance trajectories drawn
/// from `seed` (used directly, not derived). The first `n_examples`
/// trajectories are kept in the report.
EvalReport evaluate(const ControlSequence& u, const SystemModel& model, std::span<const double> x0,
                    std::span<const double> target, const Distribution& dist, std::size_t n_eval,
                    std::uint64_t seed, double threshold, std::size_t n_examples = 0);

}  // namespace handsoff
