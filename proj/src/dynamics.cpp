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

#include "handsoff/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "handsoff/errors.hpp"

namespace handsoff {
namespace {

void check_dims(const SystemModel& model, std::size_t x0_size, std::size_t u_size,
                std::size_t w_size, std::size_t& horizon) {
  if (x0_size != model.state_dim()) {
    throw DimensionError("rollout: x0 has " + std::to_string(x0_size) + " entries, model state is " +
                         std::to_string(model.state_dim()));
  }
  if (u_size % model.input_dim() != 0) {
    throw DimensionError("rollout: control length is not a multiple of the input dimension");
  }
  horizon = u_size / model.input_dim();
  if (w_size != horizon * model.noise_dim()) {
    throw DimensionError("rollout: disturbance has " + std::to_string(w_size) +
                         " entries, expected " + std::to_string(horizon * model.noise_dim()));
  }
}

void check_finite(std::span<const double> x, std::size_t t, const char* who) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw NonFiniteError(std::string(who) + ": non-finite state at step " + std::to_string(t), t);
    }
  }
}

}  // namespace

void PendulumParams::validate() const {
  for (double v : {length, mass, friction, gravity, dt}) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw std::invalid_argument("pendulum parameters must be finite and strictly positive");
    }
  }
}

PendulumModel::PendulumModel(PendulumParams params)
    : params_(params),
      gravity_over_length_(params.gravity / params.length),
      friction_over_mass_(params.friction / params.mass) {
  params_.validate();
}

LinearModel::LinearModel(std::size_t state_dim, std::size_t input_dim, std::size_t noise_dim,
                         std::vector<double> a, std::vector<double> b, std::vector<double> g)
    : n_(state_dim), nu_(input_dim), nw_(noise_dim), a_(std::move(a)), b_(std::move(b)),
      g_(std::move(g)) {
  if (n_ == 0 || nu_ == 0 || nw_ == 0) {
    throw DimensionError("LinearModel: dimensions must be >= 1");
  }
  if (a_.size() != n_ * n_ || b_.size() != n_ * nu_ || g_.size() != n_ * nw_) {
    throw DimensionError("LinearModel: matrix sizes do not match the dimensions");
  }
  for (const auto* m : {&a_, &b_, &g_}) {
    for (double v : *m) {
      if (!std::isfinite(v)) throw std::invalid_argument("LinearModel: non-finite coefficient");
    }
  }
}

LinearModel LinearModel::scalar_integrator() { return LinearModel(1, 1, 1, {1.0}, {1.0}, {1.0}); }

Trajectory rollout(const SystemModel& model, std::span<const double> x0, const ControlSequence& u,
                   std::span<const double> w) {
  if (u.input_dim() != model.input_dim()) {
    throw DimensionError("rollout: control input dimension does not match the model");
  }
  std::size_t horizon = 0;
  check_dims(model, x0.size(), u.size(), w.size(), horizon);
  check_finite(x0, 0, "rollout");

  const std::size_t n = model.state_dim();
  const std::size_t nw = model.noise_dim();
  std::vector<double> states((horizon + 1) * n);
  std::copy(x0.begin(), x0.end(), states.begin());
  for (std::size_t t = 0; t < horizon; ++t) {
    std::span<const double> x(states.data() + t * n, n);
    std::span<double> next(states.data() + (t + 1) * n, n);
    model.step(x, u.at(t), w.subspan(t * nw, nw), next);
    check_finite(next, t + 1, "rollout");
  }
  return Trajectory(n, std::move(states));
}

std::vector<Var> record_rollout(Tape& tape, const SystemModel& model, std::span<const double> x0,
                                std::span<const Var> u, std::span<const double> w) {
  std::size_t horizon = 0;
  check_dims(model, x0.size(), u.size(), w.size(), horizon);
  check_finite(x0, 0, "record_rollout");

  const std::size_t n = model.state_dim();
  const std::size_t nu = model.input_dim();
  const std::size_t nw = model.noise_dim();
  std::vector<Var> states((horizon + 1) * n);
  for (std::size_t i = 0; i < n; ++i) states[i] = tape.constant(x0[i]);
  std::vector<double> values(n);
  for (std::size_t t = 0; t < horizon; ++t) {
    std::span<const Var> x(states.data() + t * n, n);
    std::span<Var> next(states.data() + (t + 1) * n, n);
    model.step(x, u.subspan(t * nu, nu), w.subspan(t * nw, nw), next);
    for (std::size_t i = 0; i < n; ++i) values[i] = next[i].value();
    check_finite(values, t + 1, "record_rollout");
  }
  return states;
}

std::vector<double> pendulum_step(std::span<const double> x, double u, double w,
                                  const PendulumParams& params) {
  if (x.size() != 2) throw DimensionError("pendulum_step: state must have 2 entries");
  if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !std::isfinite(u) || !std::isfinite(w)) {
    throw NonFiniteError("pendulum_step: non-finite input", 0);
  }
  const PendulumModel model(params);
  std::vector<double> next(2);
  const double uu[1] = {u};
  const double ww[1] = {w};
  model.step(x, uu, ww, next);
  return next;
}

}  // namespace handsoff
