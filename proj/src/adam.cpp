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

#include "handsoff/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "handsoff/errors.hpp"

namespace handsoff {

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad) {
  if (params.size() != grad.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw DimensionError("adam_step: parameter, gradient and state sizes differ");
  }
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw NonFiniteError("adam_step: non-finite gradient at index " + std::to_string(i), i);
    }
  }
  const AdamOptions& o = state.options;
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    state.m[i] = o.beta1 * state.m[i] + (1.0 - o.beta1) * g;
    state.v[i] = o.beta2 * state.v[i] + (1.0 - o.beta2) * g * g;
    const double m_hat = state.m[i] / correction1;
    const double v_hat = state.v[i] / correction2;
    params[i] -= o.lr * m_hat / (std::sqrt(v_hat) + o.epsilon);
  }
}

void LrSchedule::validate() const {
  if (!(lr0 > 0.0) || !std::isfinite(lr0)) throw std::invalid_argument("lr0 must be > 0");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("lr decay must lie in (0, 1)");
}

double LrSchedule::rate(std::size_t round) const {
  double lr = lr0;
  for (std::size_t i = 0; i < round; ++i) lr *= beta;
  return lr;
}

}  // namespace handsoff
