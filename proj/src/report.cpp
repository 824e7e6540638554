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

#include "handsoff/report.hpp"

#include <stdexcept>

namespace handsoff {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json to_json(const CostBreakdown& c) {
  ordered_json j;
  j["terminal_mc"] = c.terminal_mc;
  j["regularizer"] = c.regularizer;
  j["total"] = c.total;
  j["lambda"] = c.lambda;
  j["p"] = c.p;
  return j;
}

CostBreakdown cost_from_json(const json& j) {
  CostBreakdown c;
  c.terminal_mc = j.at("terminal_mc").get<double>();
  c.regularizer = j.at("regularizer").get<double>();
  c.total = j.at("total").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.p = j.at("p").get<double>();
  return c;
}

ordered_json eval_json(const EvalReport& r) {
  ordered_json j;
  j["mean_terminal_error"] = r.mean_terminal_error;
  j["max_terminal_error"] = r.max_terminal_error;
  j["l0_sparsity"] = r.l0_sparsity;
  j["threshold"] = r.threshold;
  j["n_eval"] = r.n_eval;
  j["seed"] = r.seed;
  return j;
}

ordered_json eval_detail_json(const EvalReport& r) {
  ordered_json j = eval_json(r);
  j["mean_terminal_state"] = r.mean_terminal_state;
  j["terminal_errors"] = r.terminal_errors;
  return j;
}

std::string step_log_line(const StepRecord& s) {
  ordered_json j;
  j["phase"] = phase_name(s.phase);
  j["stage"] = s.index;
  j["iteration"] = s.iteration;
  j["p"] = s.p;
  j["lr"] = s.lr;
  j["terminal_mc"] = s.cost.terminal_mc;
  j["regularizer"] = s.cost.regularizer;
  j["total"] = s.cost.total;
  return j.dump();
}

ordered_json to_json(const Checkpoint& c) {
  ordered_json j;
  j["schema"] = kCheckpointSchema;
  j["phase"] = phase_name(c.phase);
  j["completed"] = c.completed;
  j["input_dim"] = c.controls.input_dim();
  j["controls"] = c.controls.values();
  j["incremental_controls"] = c.incremental_controls.values();
  j["stage_history"] = ordered_json::array();
  for (const auto& h : c.stage_history) j["stage_history"].push_back(to_json(h));
  j["polish_history"] = ordered_json::array();
  for (const auto& h : c.polish_history) j["polish_history"].push_back(to_json(h));
  return j;
}

Checkpoint checkpoint_from_json(const json& j) {
  if (j.at("schema").get<std::string>() != kCheckpointSchema) {
    throw std::runtime_error("checkpoint: unsupported schema");
  }
  Checkpoint c;
  const std::string phase = j.at("phase").get<std::string>();
  if (phase == "incremental") {
    c.phase = Phase::kIncremental;
  } else if (phase == "polish") {
    c.phase = Phase::kPolish;
  } else {
    throw std::runtime_error("checkpoint: unknown phase '" + phase + "'");
  }
  c.completed = j.at("completed").get<std::size_t>();
  const auto input_dim = j.at("input_dim").get<std::size_t>();
  if (input_dim == 0) throw std::runtime_error("checkpoint: input_dim must be >= 1");
  auto controls = j.at("controls").get<std::vector<double>>();
  auto incremental = j.at("incremental_controls").get<std::vector<double>>();
  const std::size_t horizon = controls.size() / input_dim;
  const std::size_t incremental_horizon = incremental.size() / input_dim;
  c.controls = ControlSequence(horizon, input_dim, std::move(controls));
  c.incremental_controls = ControlSequence(incremental_horizon, input_dim, std::move(incremental));
  for (const auto& h : j.at("stage_history")) c.stage_history.push_back(cost_from_json(h));
  for (const auto& h : j.at("polish_history")) c.polish_history.push_back(cost_from_json(h));
  return c;
}

ordered_json to_json(const AdamState& s) {
  ordered_json j;
  j["t"] = s.t;
  j["lr"] = s.options.lr;
  j["beta1"] = s.options.beta1;
  j["beta2"] = s.options.beta2;
  j["epsilon"] = s.options.epsilon;
  j["m"] = s.m;
  j["v"] = s.v;
  return j;
}

AdamState adam_state_from_json(const json& j) {
  AdamState s;
  s.t = j.at("t").get<std::uint64_t>();
  s.options.lr = j.at("lr").get<double>();
  s.options.beta1 = j.at("beta1").get<double>();
  s.options.beta2 = j.at("beta2").get<double>();
  s.options.epsilon = j.at("epsilon").get<double>();
  s.m = j.at("m").get<std::vector<double>>();
  s.v = j.at("v").get<std::vector<double>>();
  if (s.m.size() != s.v.size()) throw std::runtime_error("adam state: m and v sizes differ");
  return s;
}

}  // namespace handsoff
