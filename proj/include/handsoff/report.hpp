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

// JSON forms of training and evaluation records.
//
//   eval.json        {mean_terminal_error, max_terminal_error, l0_sparsity,
//                     threshold, n_eval, seed}
//   train_log.jsonl  one object per optimizer step: {phase, stage, iteration,
//                     p, lr, terminal_mc, regularizer, total}
//   checkpoint.json  {schema, phase, completed, input_dim, controls,
//                     incremental_controls, stage_history, polish_history}
//   adam state       {t, lr, beta1, beta2, epsilon, m, v}

#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "handsoff/adam.hpp"
#include "handsoff/objective.hpp"
#include "handsoff/trainer.hpp"

namespace handsoff {

inline constexpr std::string_view kCheckpointSchema = "handsoff.checkpoint/1";

nlohmann::ordered_json to_json(const CostBreakdown& cost);
CostBreakdown cost_from_json(const nlohmann::json& j);

/// The six-field eval.json document.
nlohmann::ordered_json eval_json(const EvalReport& report);
/// eval_json plus per-sample terminal errors and the mean terminal state.
nlohmann::ordered_json eval_detail_json(const EvalReport& report);

/// One train_log.jsonl line (without the newline).
std::string step_log_line(const StepRecord& record);

nlohmann::ordered_json to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const AdamState& state);
AdamState adam_state_from_json(const nlohmann::json& j);

}  // namespace handsoff
