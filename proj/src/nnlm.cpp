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

#include "nnir/nnlm.hpp"

#include <cmath>
#include <random>

#include "nnir/errors.hpp"

namespace nnir {

std::string_view to_string(Arch a) {
  switch (a) {
    case Arch::M1: return "M1";
    case Arch::M2: return "M2";
    case Arch::M2Max: return "M2Max";
  }
  return "?";
}

std::string_view to_string(MergeMode m) { return m == MergeMode::Sum ? "sum" : "prod"; }

Arch parse_arch(std::string_view s) {
  if (s == "M1" || s == "m1") return Arch::M1;
  if (s == "M2" || s == "m2") return Arch::M2;
  if (s == "M2Max" || s == "m2max" || s == "M2MAX") return Arch::M2Max;
  throw UsageError("unknown architecture: " + std::string(s));
}

MergeMode parse_merge_mode(std::string_view s) {
  if (s == "sum" || s == "+") return MergeMode::Sum;
  if (s == "prod" || s == "product" || s == "*") return MergeMode::Product;
  throw UsageError("unknown merge mode: " + std::string(s));
}

void NeuralConfig::validate() const {
  if (order < 2) throw UsageError("model order n must be >= 2");
  if (m0 < 1 || m1 < 1 || m2 < 1 || kappa < 1) throw UsageError("dimensions must be >= 1");
}

ParameterCounts count_parameters(const NeuralConfig& cfg, std::uint64_t vocab_words) {
  cfg.validate();
  const std::uint64_t ctx = static_cast<std::uint64_t>(cfg.context_size());
  const std::uint64_t m0 = static_cast<std::uint64_t>(cfg.m0);
  const std::uint64_t m1 = static_cast<std::uint64_t>(cfg.m1);
  const std::uint64_t m2 = static_cast<std::uint64_t>(cfg.m2);
  const std::uint64_t kappa = static_cast<std::uint64_t>(cfg.kappa);
  ParameterCounts c;
  switch (cfg.arch) {
    case Arch::M1: c.phi = ctx * m0 * m1; break;
    case Arch::M2: c.phi = ctx * m0 * m1 + m1 * m2; break;
    case Arch::M2Max: c.phi = ctx * kappa * m0 * m1 + m1 * m2; break;
  }
  const std::uint64_t inner = vocab_words == 0 ? 0 : vocab_words - 1;
  c.words_hsm = vocab_words * m0 + inner * static_cast<std::uint64_t>(cfg.state_dim());
  return c;
}

NeuralParams NeuralParams::zeros(const NeuralConfig& cfg, std::size_t vocab_words) {
  cfg.validate();
  if (vocab_words < 2) throw UsageError("neural vocabulary needs at least two words");
  NeuralParams p;
  const auto h = static_cast<std::size_t>(cfg.first_width());
  p.embeddings = Matrix(vocab_words + 1, static_cast<std::size_t>(cfg.m0));
  p.A.assign(static_cast<std::size_t>(cfg.context_size()), Matrix(h, static_cast<std::size_t>(cfg.m0)));
  p.b.assign(h, 0.0);
  if (cfg.arch != Arch::M1) p.B = Matrix(static_cast<std::size_t>(cfg.m2), static_cast<std::size_t>(cfg.m1));
  p.hsm = Matrix(vocab_words - 1, static_cast<std::size_t>(cfg.state_dim()));
  return p;
}

NeuralParams NeuralParams::random(const NeuralConfig& cfg, std::size_t vocab_words,
                                  std::uint64_t seed) {
  NeuralParams p = zeros(cfg, vocab_words);
  std::mt19937_64 rng(seed);
  auto fill = [&](std::span<double> xs, double fan_in) {
    const double r = 1.0 / std::sqrt(fan_in);
    std::uniform_real_distribution<double> u(-r, r);
    for (auto& x : xs) x = u(rng);
  };
  fill(p.embeddings.flat(), cfg.m0);
  for (auto& a : p.A) fill(a.flat(), static_cast<double>(cfg.context_size()) * cfg.m0);
  if (!p.B.empty()) fill(p.B.flat(), cfg.m1);
  return p;
}

bool NeuralParams::all_finite() const {
  auto ok = [](std::span<const double> xs) {
    for (double x : xs) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  };
  if (!ok(embeddings.flat()) || !ok(b) || !ok(B.flat()) || !ok(hsm.flat())) return false;
  for (const auto& a : A) {
    if (!ok(a.flat())) return false;
  }
  return true;
}

DocVector DocVector::identity(MergeMode mode, std::size_t dim) {
  return {mode, std::vector<double>(dim, mode == MergeMode::Sum ? 0.0 : 1.0)};
}

std::vector<double> psi_merge(std::span<const double> state, const DocVector& dv) {
  if (state.size() != dv.z.size()) throw UsageError("document vector dimension mismatch");
  std::vector<double> out(state.size());
  if (dv.mode == MergeMode::Sum) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = state[i] + dv.z[i];
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = state[i] * dv.z[i];
  }
  return out;
}

void maxpool(std::span<const double> x, int kappa, std::span<double> out,
             std::span<std::uint32_t> argmax) {
  const auto k = static_cast<std::size_t>(kappa);
  if (x.size() != out.size() * k || argmax.size() != out.size()) {
    throw UsageError("maxpool size mismatch");
  }
  for (std::size_t j = 0; j < out.size(); ++j) {
    std::size_t best = j * k;
    for (std::size_t i = j * k + 1; i < (j + 1) * k; ++i) {
      if (x[i] > x[best]) best = i;
    }
    out[j] = x[best];
    argmax[j] = static_cast<std::uint32_t>(best);
  }
}

double log_sigmoid(double z) { return -(std::max(-z, 0.0) + std::log1p(std::exp(-std::abs(z)))); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double hsm_log_prob(std::uint32_t t, std::span<const double> v, const HuffmanTree& tree,
                    const Matrix& hsm_nodes) {
  const auto path = tree.path(t);
  const auto signs = tree.signs(t);
  double lp = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    lp += log_sigmoid(-signs[i] * dot(hsm_nodes.row(path[i]), v));
  }
  return lp;
}

NeuralModel NeuralModel::create(const NeuralConfig& cfg, const Vocabulary& vocab,
                                std::uint64_t seed) {
  NeuralModel m;
  m.config = cfg;
  m.tree = HuffmanTree::build(vocab.frequencies());
  m.params = NeuralParams::random(cfg, vocab.word_count(), seed);
  return m;
}

void build_context(std::span<const TermId> seq, std::size_t i, TermId padding,
                   std::span<TermId> out) {
  const std::size_t c = out.size();
  for (std::size_t j = 0; j < c; ++j) {
    // out[j] is the term at position i - c + j
    out[j] = (i + j >= c) ? seq[i + j - c] : padding;
  }
}

void phi_forward(std::span<const TermId> context, const NeuralModel& model, ForwardCache& cache) {
  const auto& cfg = model.config;
  const auto& p = model.params;
  if (context.size() != static_cast<std::size_t>(cfg.context_size())) {
    throw UsageError("context length must equal n-1");
  }
  cache.context.assign(context.begin(), context.end());
  cache.pre1.assign(p.b.begin(), p.b.end());
  for (std::size_t j = 0; j < context.size(); ++j) {
    if (context[j] >= p.embeddings.rows()) throw UsageError("context id out of range");
    gemv_acc(p.A[j], p.embeddings.row(context[j]), cache.pre1);
  }
  switch (cfg.arch) {
    case Arch::M1:
      cache.state.resize(cache.pre1.size());
      for (std::size_t i = 0; i < cache.pre1.size(); ++i) cache.state[i] = std::tanh(cache.pre1[i]);
      break;
    case Arch::M2:
      cache.hidden.resize(cache.pre1.size());
      for (std::size_t i = 0; i < cache.pre1.size(); ++i) cache.hidden[i] = std::tanh(cache.pre1[i]);
      cache.state.assign(static_cast<std::size_t>(cfg.m2), 0.0);
      gemv_acc(p.B, cache.hidden, cache.state);
      for (auto& s : cache.state) s = std::tanh(s);
      break;
    case Arch::M2Max:
      cache.hidden.resize(static_cast<std::size_t>(cfg.m1));
      cache.argmax.resize(static_cast<std::size_t>(cfg.m1));
      maxpool(cache.pre1, cfg.kappa, cache.hidden, cache.argmax);
      cache.state.assign(static_cast<std::size_t>(cfg.m2), 0.0);
      gemv_acc(p.B, cache.hidden, cache.state);
      for (auto& s : cache.state) s = std::tanh(s);
      break;
  }
}

namespace {

void merge_into_cache(const DocVector* dv, ForwardCache& cache) {
  if (dv == nullptr) {
    cache.merged = cache.state;
  } else {
    cache.merged = psi_merge(cache.state, *dv);
  }
}

void check_target(TermId t, const NeuralModel& model) {
  if (t >= model.vocab_words()) throw UsageError("target term is not in the neural vocabulary");
}

}  // namespace

double next_token_log_prob(std::span<const TermId> context, TermId t, const NeuralModel& model,
                           const DocVector* dv) {
  check_target(t, model);
  ForwardCache cache;
  phi_forward(context, model, cache);
  merge_into_cache(dv, cache);
  return hsm_log_prob(t, cache.merged, model.tree, model.params.hsm);
}

Gradients::Gradients(const NeuralConfig& cfg, std::size_t vocab_words, bool with_doc_vector) {
  auto shapes = NeuralParams::zeros(cfg, vocab_words);
  embeddings = std::move(shapes.embeddings);
  A = std::move(shapes.A);
  b = std::move(shapes.b);
  B = std::move(shapes.B);
  hsm = std::move(shapes.hsm);
  if (with_doc_vector) z.assign(static_cast<std::size_t>(cfg.state_dim()), 0.0);
  emb_mark_.assign(embeddings.rows(), 0);
  hsm_mark_.assign(hsm.rows(), 0);
}

void Gradients::touch_embedding(TermId row) {
  if (!emb_mark_[row]) {
    emb_mark_[row] = 1;
    emb_rows_.push_back(row);
  }
}

void Gradients::touch_hsm(std::uint32_t row) {
  if (!hsm_mark_[row]) {
    hsm_mark_[row] = 1;
    hsm_rows_.push_back(row);
  }
}

void Gradients::clear() {
  for (auto r : emb_rows_) {
    std::fill(embeddings.row(r).begin(), embeddings.row(r).end(), 0.0);
    emb_mark_[r] = 0;
  }
  emb_rows_.clear();
  for (auto r : hsm_rows_) {
    std::fill(hsm.row(r).begin(), hsm.row(r).end(), 0.0);
    hsm_mark_[r] = 0;
  }
  hsm_rows_.clear();
  for (auto& a : A) a.fill(0.0);
  std::fill(b.begin(), b.end(), 0.0);
  B.fill(0.0);
  std::fill(z.begin(), z.end(), 0.0);
}

void Gradients::add(const Gradients& other) {
  for (auto r : other.emb_rows_) {
    touch_embedding(r);
    axpy(1.0, other.embeddings.row(r), embeddings.row(r));
  }
  for (auto r : other.hsm_rows_) {
    touch_hsm(r);
    axpy(1.0, other.hsm.row(r), hsm.row(r));
  }
  for (std::size_t j = 0; j < A.size(); ++j) axpy(1.0, other.A[j].flat(), A[j].flat());
  axpy(1.0, other.b, b);
  axpy(1.0, other.B.flat(), B.flat());
  if (!z.empty()) axpy(1.0, other.z, z);
}

void Gradients::scale(double s) {
  for (auto r : emb_rows_) {
    for (auto& x : embeddings.row(r)) x *= s;
  }
  for (auto r : hsm_rows_) {
    for (auto& x : hsm.row(r)) x *= s;
  }
  for (auto& a : A) {
    for (auto& x : a.flat()) x *= s;
  }
  for (auto& x : b) x *= s;
  for (auto& x : B.flat()) x *= s;
  for (auto& x : z) x *= s;
}

double accumulate_sample(const Sample& sample, const NeuralModel& model, const DocVector* dv,
                         GradientScope scope, ForwardCache& cache, Gradients& grads) {
  check_target(sample.target, model);
  const auto& cfg = model.config;
  const auto& p = model.params;
  phi_forward(sample.context, model, cache);
  merge_into_cache(dv, cache);
  const auto& v = cache.merged;
  const std::size_t mf = v.size();

  // HSM: d/du of -w log sigma(c u) is -w c sigma(-c u), with c = -b_s(t).
  std::vector<double> g_v(mf, 0.0);
  const auto path = model.tree.path(sample.target);
  const auto signs = model.tree.signs(sample.target);
  double lp = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto node = path[i];
    const double c = -static_cast<double>(signs[i]);
    const double u = dot(p.hsm.row(node), v);
    lp += log_sigmoid(c * u);
    const double g_u = -sample.weight * c * sigmoid(-c * u);
    axpy(g_u, p.hsm.row(node), g_v);
    if (scope == GradientScope::All) {
      grads.touch_hsm(node);
      axpy(g_u, v, grads.hsm.row(node));
    }
  }
  const double loss = -sample.weight * lp;

  std::vector<double> g_s(mf);
  if (dv == nullptr) {
    g_s = g_v;
  } else if (dv->mode == MergeMode::Sum) {
    g_s = g_v;
    if (!grads.z.empty()) axpy(1.0, g_v, grads.z);
  } else {
    for (std::size_t i = 0; i < mf; ++i) {
      g_s[i] = g_v[i] * dv->z[i];
      if (!grads.z.empty()) grads.z[i] += g_v[i] * cache.state[i];
    }
  }
  if (scope == GradientScope::DocVectorOnly) return loss;

  // Back through phi.
  std::vector<double> g_pre1(cache.pre1.size(), 0.0);
  if (cfg.arch == Arch::M1) {
    for (std::size_t i = 0; i < mf; ++i) g_pre1[i] = g_s[i] * (1.0 - cache.state[i] * cache.state[i]);
  } else {
    std::vector<double> g_pre2(mf);
    for (std::size_t i = 0; i < mf; ++i) g_pre2[i] = g_s[i] * (1.0 - cache.state[i] * cache.state[i]);
    ger_acc(g_pre2, cache.hidden, grads.B);
    std::vector<double> g_hidden(cache.hidden.size(), 0.0);
    gemv_t_acc(p.B, g_pre2, g_hidden);
    if (cfg.arch == Arch::M2) {
      for (std::size_t i = 0; i < g_pre1.size(); ++i) {
        g_pre1[i] = g_hidden[i] * (1.0 - cache.hidden[i] * cache.hidden[i]);
      }
    } else {
      for (std::size_t j = 0; j < g_hidden.size(); ++j) g_pre1[cache.argmax[j]] += g_hidden[j];
    }
  }
  axpy(1.0, g_pre1, grads.b);
  for (std::size_t j = 0; j < cache.context.size(); ++j) {
    const auto id = cache.context[j];
    ger_acc(g_pre1, p.embeddings.row(id), grads.A[j]);
    grads.touch_embedding(id);
    gemv_t_acc(p.A[j], g_pre1, grads.embeddings.row(id));
  }
  return loss;
}

double backward(std::span<const Sample> batch, const NeuralModel& model, const DocVector* dv,
                GradientScope scope, Gradients& grads) {
  ForwardCache cache;
  double total = 0.0;
  for (const auto& s : batch) total += accumulate_sample(s, model, dv, scope, cache, grads);
  return total;
}

}  // namespace nnir
