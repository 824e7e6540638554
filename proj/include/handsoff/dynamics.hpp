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

// Discrete-time stochastic systems x_{t+1} = f(x_t, u_t, w_t) and rollouts.
//
// Every model implements its step once as a template over the scalar type,
// so the plain rollout and the tape-recorded rollout perform the same
// floating-point operations in the same order and agree bit for bit.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "handsoff/controls.hpp"
#include "handsoff/tape.hpp"

namespace handsoff {

class SystemModel {
 public:
  virtual ~SystemModel() = default;

  virtual std::size_t state_dim() const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t noise_dim() const = 0;

  virtual void step(std::span<const double> x, std::span<const double> u,
                    std::span<const double> w, std::span<double> next) const = 0;
  virtual void step(std::span<const Var> x, std::span<const Var> u, std::span<const double> w,
                    std::span<Var> next) const = 0;
};

/// Routes both step overloads to Derived::step_impl<Scalar>.
template <class Derived>
class ModelBase : public SystemModel {
 public:
  void step(std::span<const double> x, std::span<const double> u, std::span<const double> w,
            std::span<double> next) const final {
    static_cast<const Derived&>(*this).step_impl(x, u, w, next);
  }
  void step(std::span<const Var> x, std::span<const Var> u, std::span<const double> w,
            std::span<Var> next) const final {
    static_cast<const Derived&>(*this).step_impl(x, u, w, next);
  }
};

struct PendulumParams {
  double length = 1.0;    // l [m]
  double mass = 1.0;      // m [kg]
  double friction = 1.0;  // k [kg/s]
  double gravity = 9.80665;
  double dt = 0.1;        // sampling time [s]

  /// Throws std::invalid_argument unless every field is finite and > 0.
  void validate() const;
  bool operator==(const PendulumParams&) const = default;
};

/// Damped pendulum, state [angle, angular velocity], angle 0 hanging down.
/// The input and disturbance enter the velocity update without dt scaling:
///   angle'    = angle + dt * vel
///   vel'      = vel - dt * ((g / l) sin(angle) + (k / m) vel) + u + w
class PendulumModel final : public ModelBase<PendulumModel> {
 public:
  explicit PendulumModel(PendulumParams params = {});

  std::size_t state_dim() const override { return 2; }
  std::size_t input_dim() const override { return 1; }
  std::size_t noise_dim() const override { return 1; }
  const PendulumParams& params() const { return params_; }

  template <class S>
  void step_impl(std::span<const S> x, std::span<const S> u, std::span<const double> w,
                 std::span<S> next) const {
    using std::sin;
    const S& angle = x[0];
    const S& vel = x[1];
    next[0] = angle + vel * params_.dt;
    next[1] = vel - (sin(angle) * gravity_over_length_ + vel * friction_over_mass_) * params_.dt +
              u[0] + w[0];
  }

 private:
  PendulumParams params_;
  double gravity_over_length_;
  double friction_over_mass_;
};

/// x' = A x + B u + G w with dense row-major matrices. Zero coefficients are
/// skipped and unit coefficients are not multiplied.
class LinearModel final : public ModelBase<LinearModel> {
 public:
  LinearModel(std::size_t state_dim, std::size_t input_dim, std::size_t noise_dim,
              std::vector<double> a, std::vector<double> b, std::vector<double> g);

  /// x' = x + u + w on the real line.
  static LinearModel scalar_integrator();

  std::size_t state_dim() const override { return n_; }
  std::size_t input_dim() const override { return nu_; }
  std::size_t noise_dim() const override { return nw_; }
  const std::vector<double>& a() const { return a_; }
  const std::vector<double>& b() const { return b_; }
  const std::vector<double>& g() const { return g_; }

  template <class S>
  void step_impl(std::span<const S> x, std::span<const S> u, std::span<const double> w,
                 std::span<S> next) const {
    for (std::size_t i = 0; i < n_; ++i) {
      bool started = false;
      S acc{};
      auto add = [&](const S& term) {
        if (started) {
          acc = acc + term;
        } else {
          acc = term;
          started = true;
        }
      };
      for (std::size_t j = 0; j < n_; ++j) {
        const double c = a_[i * n_ + j];
        if (c == 1.0) add(x[j]);
        else if (c != 0.0) add(x[j] * c);
      }
      for (std::size_t j = 0; j < nu_; ++j) {
        const double c = b_[i * nu_ + j];
        if (c == 1.0) add(u[j]);
        else if (c != 0.0) add(u[j] * c);
      }
      double noise = 0.0;
      bool has_noise = false;
      for (std::size_t j = 0; j < nw_; ++j) {
        const double c = g_[i * nw_ + j];
        if (c != 0.0) {
          noise += c * w[j];
          has_noise = true;
        }
      }
      if (!started) {
        acc = constant_like(x[0], 0.0);
        started = true;
      }
      next[i] = has_noise ? acc + noise : acc;
    }
  }

 private:
  std::size_t n_, nu_, nw_;
  std::vector<double> a_, b_, g_;
};

/// States x_0..x_T, flattened time-major.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::size_t state_dim, std::vector<double> states)
      : state_dim_(state_dim), states_(std::move(states)) {}

  std::size_t state_dim() const { return state_dim_; }
  /// Number of stored states, T + 1.
  std::size_t size() const { return state_dim_ == 0 ? 0 : states_.size() / state_dim_; }
  std::span<const double> state(std::size_t t) const {
    return std::span<const double>(states_).subspan(t * state_dim_, state_dim_);
  }
  std::span<const double> terminal() const { return state(size() - 1); }
  const std::vector<double>& values() const { return states_; }

  bool operator==(const Trajectory&) const = default;

 private:
  std::size_t state_dim_ = 0;
  std::vector<double> states_;
};

/// Iterates the model over u.horizon() steps. `w` holds horizon x noise_dim
/// values. Throws DimensionError on size mismatch and NonFiniteError (with
/// the offending step index) if a state becomes NaN or infinite.
Trajectory rollout(const SystemModel& model, std::span<const double> x0, const ControlSequence& u,
                   std::span<const double> w);

/// Tape-recorded rollout over `u.size() / input_dim` steps. x0 enters as
/// constants. Returns all states flattened, (T + 1) * state_dim entries.
std::vector<Var> record_rollout(Tape& tape, const SystemModel& model, std::span<const double> x0,
                                std::span<const Var> u, std::span<const double> w);

/// Single pendulum step on plain numbers.
std::vector<double> pendulum_step(std::span<const double> x, double u, double w,
                                  const PendulumParams& params = {});

}  // namespace handsoff
