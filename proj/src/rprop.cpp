// Copyright 2026 The nnir Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nnir/rprop.hpp"

#include <algorithm>
#include <cmath>

#include "nnir/errors.hpp"

namespace nnir {

Rprop::Rprop(std::size_t n, const RpropConfig& cfg)
    : cfg_(cfg), delta_(n, std::clamp(cfg.delta0, cfg.delta_min, cfg.delta_max)), prev_grad_(n, 0.0) {
  if (!(cfg.delta_min > 0.0 && cfg.delta_min <= cfg.delta_max)) {
    throw UsageError("Rprop needs 0 < delta_min <= delta_max");
  }
}

double Rprop::step(std::span<const double> grad, std::span<double> params) {
  if (grad.size() != delta_.size() || params.size() != delta_.size()) {
    throw UsageError("Rprop size mismatch");
  }
  double max_change = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double agree = grad[i] * prev_grad_[i];
    if (agree > 0.0) {
      delta_[i] = std::min(delta_[i] * cfg_.eta_plus, cfg_.delta_max);
    } else if (agree < 0.0) {
      delta_[i] = std::max(delta_[i] * cfg_.eta_minus, cfg_.delta_min);
    }
    if (grad[i] > 0.0) {
      params[i] -= delta_[i];
      max_change = std::max(max_change, delta_[i]);
    } else if (grad[i] < 0.0) {
      params[i] += delta_[i];
      max_change = std::max(max_change, delta_[i]);
    }
    prev_grad_[i] = grad[i];
  }
  return max_change;
}

}  // namespace nnir
