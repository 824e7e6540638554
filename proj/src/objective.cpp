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

#include "handsoff/objective.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <thread>

#include "handsoff/errors.hpp"

namespace handsoff {
namespace {

void check_target(std::size_t n, std::size_t target_size) {
  if (n != target_size) {
    throw DimensionError("terminal_cost: state has " + std::to_string(n) + " entries, target has " +
                         std::to_string(target_size));
  }
}

void check_problem(const Problem& problem, std::size_t u_size, const DisturbanceBatch& batch) {
  if (problem.model == nullptr) throw std::invalid_argument("Problem: model is null");
  const SystemModel& model = *problem.model;
  if (batch.count() == 0) throw std::invalid_argument("mc_total_cost: empty disturbance batch");
  if (u_size % model.input_dim() != 0 || u_size / model.input_dim() != batch.horizon()) {
    throw DimensionError("mc_total_cost: control horizon does not match the batch horizon");
  }
  if (batch.noise_dim() != model.noise_dim()) {
    throw DimensionError("mc_total_cost: batch noise dimension does not match the model");
  }
  check_target(model.state_dim(), problem.target.size());
}

template <class S>
S squared_distance(std::span<const S> x, std::span<const double> target) {
  check_target(x.size(), target.size());
  S acc = square(x[0] - target[0]);
  for (std::size_t i = 1; i < x.size(); ++i) acc = acc + square(x[i] - target[i]);
  return acc;
}

void check_p(double p, double eps) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError("lp_regularizer: p must lie in (0, 1], got " + std::to_string(p));
  }
  if (!(eps >= 0.0)) throw DomainError("lp_regularizer: eps must be >= 0");
}

// Terminal-cost part for one sample on its own tape; accumulates its gradient
// into grad (length u.size()) and returns the cost value.
double sample_cost_and_gradient(Tape& tape, const Problem& problem, std::span<const double> u,
                                std::span<const double> w, std::vector<double>& grad) {
  tape.clear();
  std::vector<Var> leaves;
  leaves.reserve(u.size());
  for (double v : u) leaves.push_back(tape.leaf(v));
  const std::vector<Var> states = record_rollout(tape, *problem.model, problem.x0, leaves, w);
  const std::size_t n = problem.model->state_dim();
  const Var cost = terminal_cost(std::span<const Var>(states).last(n), problem.target);
  const std::vector<double> g = tape.backward(cost);
  for (std::size_t k = 0; k < g.size(); ++k) grad[k] += g[k];
  return cost.value();
}

}  // namespace

double terminal_cost(std::span<const double> x, std::span<const double> target) {
  return squared_distance<double>(x, target);
}

Var terminal_cost(std::span<const Var> x, std::span<const double> target) {
  return squared_distance<Var>(x, target);
}

double lp_regularizer(std::span<const double> u, double p, double eps) {
  check_p(p, eps);
  double acc = 0.0;
  for (double v : u) acc += smooth_abs_pow(v, p, eps);
  return acc;
}

Var lp_regularizer(Tape& tape, std::span<const Var> u, double p, double eps) {
  check_p(p, eps);
  if (u.empty()) return tape.constant(0.0);
  Var acc = smooth_abs_pow(u[0], p, eps);
  for (std::size_t k = 1; k < u.size(); ++k) acc = acc + smooth_abs_pow(u[k], p, eps);
  return acc;
}

std::size_t sparsity_l0(std::span<const double> u, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("sparsity_l0: threshold must be >= 0");
  return static_cast<std::size_t>(
      std::count_if(u.begin(), u.end(), [threshold](double v) { return std::abs(v) > threshold; }));
}

CostBreakdown mc_total_cost(const Problem& problem, std::span<const double> u,
                            const DisturbanceBatch& batch, const Penalty& penalty) {
  check_problem(problem, u.size(), batch);
  const SystemModel& model = *problem.model;
  const ControlSequence controls(u.size() / model.input_dim(), model.input_dim(),
                                 std::vector<double>(u.begin(), u.end()));
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.count(); ++i) {
    const Trajectory traj = rollout(model, problem.x0, controls, batch.sample(i));
    const double c = terminal_cost(traj.terminal(), problem.target);
    sum = i == 0 ? c : sum + c;
  }
  CostBreakdown out;
  out.terminal_mc = sum / static_cast<double>(batch.count());
  out.regularizer = lp_regularizer(u, penalty.p, penalty.eps);
  out.total = out.terminal_mc + out.regularizer * penalty.lambda;
  out.lambda = penalty.lambda;
  out.p = penalty.p;
  return out;
}

Var record_total_cost(Tape& tape, const Problem& problem, std::span<const Var> u,
                      const DisturbanceBatch& batch, const Penalty& penalty, Var* terminal_out,
                      Var* regularizer_out) {
  check_problem(problem, u.size(), batch);
  const std::size_t n = problem.model->state_dim();
  Var sum;
  for (std::size_t i = 0; i < batch.count(); ++i) {
    const std::vector<Var> states = record_rollout(tape, *problem.model, problem.x0, u, batch.sample(i));
    const Var c = terminal_cost(std::span<const Var>(states).last(n), problem.target);
    sum = i == 0 ? c : sum + c;
  }
  const Var terminal = sum / static_cast<double>(batch.count());
  const Var reg = lp_regularizer(tape, u, penalty.p, penalty.eps);
  if (terminal_out != nullptr) *terminal_out = terminal;
  if (regularizer_out != nullptr) *regularizer_out = reg;
  return terminal + reg * penalty.lambda;
}

CostAndGradient cost_and_gradient(const Problem& problem, std::span<const double> u,
                                  const DisturbanceBatch& batch, const Penalty& penalty,
                                  Reduction reduction, Tape* tape) {
  check_problem(problem, u.size(), batch);
  Tape local;
  Tape& t = tape != nullptr ? *tape : local;
  CostAndGradient out;
  out.cost.lambda = penalty.lambda;
  out.cost.p = penalty.p;

  if (reduction == Reduction::kSerial) {
    t.clear();
    std::vector<Var> leaves;
    leaves.reserve(u.size());
    for (double v : u) leaves.push_back(t.leaf(v));
    Var terminal, reg;
    const Var total = record_total_cost(t, problem, leaves, batch, penalty, &terminal, &reg);
    out.gradient = t.backward(total);
    out.cost.terminal_mc = terminal.value();
    out.cost.regularizer = reg.value();
    out.cost.total = total.value();
    return out;
  }

  // One tape per worker; samples are split into contiguous chunks and the
  // partial results are combined in sample order.
  const std::size_t count = batch.count();
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::vector<double>> costs(workers);
  std::vector<std::vector<double>> grads(workers, std::vector<double>(u.size(), 0.0));
  std::vector<std::future<void>> jobs;
  for (std::size_t k = 0; k < workers; ++k) {
    const std::size_t begin = count * k / workers;
    const std::size_t end = count * (k + 1) / workers;
    jobs.push_back(std::async(std::launch::async, [&, k, begin, end] {
      Tape worker_tape;
      for (std::size_t i = begin; i < end; ++i) {
        costs[k].push_back(
            sample_cost_and_gradient(worker_tape, problem, u, batch.sample(i), grads[k]));
      }
    }));
  }
  for (auto& j : jobs) j.get();

  double sum = 0.0;
  bool first = true;
  for (const auto& chunk : costs) {
    for (double c : chunk) {
      sum = first ? c : sum + c;
      first = false;
    }
  }
  const double inv_count = 1.0 / static_cast<double>(count);
  out.cost.terminal_mc = sum / static_cast<double>(count);
  out.cost.regularizer = lp_regularizer(u, penalty.p, penalty.eps);
  out.cost.total = out.cost.terminal_mc + out.cost.regularizer * penalty.lambda;
  out.gradient.assign(u.size(), 0.0);
  for (const auto& g : grads) {
    for (std::size_t j = 0; j < u.size(); ++j) out.gradient[j] += g[j];
  }
  for (std::size_t j = 0; j < u.size(); ++j) {
    out.gradient[j] = out.gradient[j] * inv_count +
                      penalty.lambda * smooth_abs_pow_grad(u[j], penalty.p, penalty.eps);
  }
  return out;
}

}  // namespace handsoff
