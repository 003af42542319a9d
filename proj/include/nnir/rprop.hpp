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

#pragma once

#include <span>
#include <vector>

namespace nnir {

struct RpropConfig {
  double eta_plus = 1.2;
  double eta_minus = 0.5;
  double delta0 = 0.1;
  double delta_min = 1e-6;
  double delta_max = 50.0;
};

/// Sign-based Rprop without weight backtracking (Rprop-): each coordinate
/// keeps its own step size, grown by eta_plus while the gradient sign holds
/// and shrunk by eta_minus when it flips. Every coordinate with a non-zero
/// gradient moves by -sign(g) * step.
class Rprop {
 public:
  Rprop(std::size_t n, const RpropConfig& cfg = {});

  /// Updates params in place; returns the largest absolute change.
  double step(std::span<const double> grad, std::span<double> params);

  std::span<const double> step_sizes() const { return delta_; }
  const RpropConfig& config() const { return cfg_; }

 private:
  RpropConfig cfg_;
  std::vector<double> delta_;
  std::vector<double> prev_grad_;
};

}  // namespace nnir
