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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnir/nnlm.hpp"

namespace nnir {

/// A random model plus a batch of samples drawn from it, owning the
/// context storage the samples point into.
struct GradCheckProblem {
  NeuralModel model;
  std::optional<DocVector> doc_vector;
  std::vector<std::vector<TermId>> contexts;
  std::vector<Sample> samples;
};

/// |V| = vocab words, every dimension = dims, order 3, kappa 2. Parameters,
/// biases, HSM vectors and (when mode is set) the document vector are all
/// random so no gradient is trivially zero.
GradCheckProblem make_gradcheck_problem(Arch arch, std::optional<MergeMode> mode,
                                        std::size_t vocab, int dims, std::uint64_t seed,
                                        std::size_t num_samples = 12);

struct TensorCheck {
  std::string tensor;
  std::size_t entries = 0;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
};

/// Error per entry is |analytic - numeric| / max(|analytic|, |numeric|, floor),
/// with the numeric value from central differences of the weighted NLL.
struct GradCheckOptions {
  double step = 1e-4;
  double floor = 1e-5;
  GradientScope scope = GradientScope::All;
};

std::vector<TensorCheck> gradcheck(const GradCheckProblem& problem, const GradCheckOptions& opt = {});

/// Weighted NLL of a batch under the model (and document vector when given).
double batch_nll(std::span<const Sample> batch, const NeuralModel& model, const DocVector* dv);

}  // namespace nnir
