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

#include "nnir/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "nnir/errors.hpp"

namespace nnir {

GradCheckProblem make_gradcheck_problem(Arch arch, std::optional<MergeMode> mode,
                                        std::size_t vocab, int dims, std::uint64_t seed,
                                        std::size_t num_samples) {
  if (vocab < 2) throw UsageError("gradcheck needs a vocabulary of at least two words");
  NeuralConfig cfg;
  cfg.arch = arch;
  cfg.order = 3;
  cfg.m0 = cfg.m1 = cfg.m2 = dims;
  cfg.kappa = 2;
  cfg.validate();

  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> freq(vocab);
  for (auto& f : freq) f = 1 + rng() % 20;
  GradCheckProblem p{{cfg, NeuralParams::random(cfg, vocab, seed), HuffmanTree::build(freq)},
                     std::nullopt, {}, {}};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& x : p.model.params.hsm.flat()) x = u(rng);
  for (auto& x : p.model.params.b) x = 0.5 * u(rng);
  for (auto& x : p.model.params.embeddings.flat()) x = u(rng);
  if (mode) {
    p.doc_vector = DocVector::identity(*mode, static_cast<std::size_t>(cfg.state_dim()));
    for (auto& x : p.doc_vector->z) x += 0.5 * u(rng);
  }

  const auto pad = p.model.padding_id();
  p.contexts.resize(num_samples);
  std::vector<TermId> targets(num_samples);
  std::vector<double> weights(num_samples);
  for (std::size_t i = 0; i < num_samples; ++i) {
    auto& ctx = p.contexts[i];
    ctx.resize(static_cast<std::size_t>(cfg.context_size()));
    // Some contexts are left-padded so the padding row is exercised.
    for (auto& c : ctx) c = rng() % 4 == 0 ? pad : static_cast<TermId>(rng() % vocab);
    targets[i] = static_cast<TermId>(rng() % vocab);
    weights[i] = 0.25 + 0.75 * (u(rng) + 1.0) / 2.0;
  }
  for (std::size_t i = 0; i < num_samples; ++i) {
    p.samples.push_back({p.contexts[i], targets[i], weights[i]});
  }
  return p;
}

double batch_nll(std::span<const Sample> batch, const NeuralModel& model, const DocVector* dv) {
  double total = 0.0;
  for (const auto& s : batch) total -= s.weight * next_token_log_prob(s.context, s.target, model, dv);
  return total;
}

namespace {

void compare(const std::string& name, std::span<double> values, std::span<const double> analytic,
             const std::function<double()>& loss, const GradCheckOptions& opt,
             std::vector<TensorCheck>& out) {
  TensorCheck tc{name, values.size(), 0.0, 0.0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double orig = values[i];
    values[i] = orig + opt.step;
    const double up = loss();
    values[i] = orig - opt.step;
    const double down = loss();
    values[i] = orig;
    const double numeric = (up - down) / (2.0 * opt.step);
    const double err = std::abs(analytic[i] - numeric);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), opt.floor});
    tc.max_abs_error = std::max(tc.max_abs_error, err);
    tc.max_rel_error = std::max(tc.max_rel_error, err / denom);
  }
  out.push_back(tc);
}

}  // namespace

std::vector<TensorCheck> gradcheck(const GradCheckProblem& problem, const GradCheckOptions& opt) {
  NeuralModel model = problem.model;
  std::optional<DocVector> dv = problem.doc_vector;
  const auto& cfg = model.config;
  if (opt.scope == GradientScope::DocVectorOnly && !dv) {
    throw UsageError("document-vector gradcheck needs a document vector");
  }

  Gradients g(cfg, model.vocab_words(), dv.has_value());
  backward(problem.samples, model, dv ? &*dv : nullptr, opt.scope, g);

  auto loss = [&]() { return batch_nll(problem.samples, model, dv ? &*dv : nullptr); };
  std::vector<TensorCheck> out;
  if (opt.scope == GradientScope::All) {
    compare("embeddings", model.params.embeddings.flat(), g.embeddings.flat(), loss, opt, out);
    for (std::size_t j = 0; j < model.params.A.size(); ++j) {
      compare("A" + std::to_string(j + 1), model.params.A[j].flat(), g.A[j].flat(), loss, opt, out);
    }
    compare("b", model.params.b, g.b, loss, opt, out);
    if (cfg.arch != Arch::M1) compare("B", model.params.B.flat(), g.B.flat(), loss, opt, out);
    compare("hsm", model.params.hsm.flat(), g.hsm.flat(), loss, opt, out);
  }
  if (dv) compare("z_d", dv->z, g.z, loss, opt, out);
  return out;
}

}  // namespace nnir
