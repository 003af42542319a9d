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

#include "nnir/training.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "nnir/errors.hpp"
#include "nnir/io.hpp"
#include "nnir/kernels.hpp"

namespace nnir {

void TrainConfig::validate() const {
  if (!(eps0 > 0.0)) throw UsageError("initial learning rate must be > 0");
  if (!(delta >= 0.0)) throw UsageError("learning-rate decay must be >= 0");
  if (batch_size < 1) throw UsageError("batch size must be >= 1");
  if (!(subsample > 0.0)) throw UsageError("subsample threshold must be > 0");
}

double lr_schedule(std::size_t k, const TrainConfig& cfg) {
  return cfg.eps0 / (1.0 + static_cast<double>(k) * cfg.delta);
}

double word_weight(TermId t, const Vocabulary& vocab, double subsample) {
  const double f = static_cast<double>(vocab.frequency(t)) /
                   static_cast<double>(vocab.total_frequency());
  if (f <= subsample) return 1.0;
  return std::min(1.0, std::sqrt(subsample / f));
}

std::vector<double> word_weights(const Vocabulary& vocab, double subsample) {
  std::vector<double> w(vocab.word_count());
  for (TermId t = 0; t < w.size(); ++t) w[t] = word_weight(t, vocab, subsample);
  return w;
}

namespace {

void apply_update(NeuralModel& model, const Gradients& g, double lr) {
  auto& p = model.params;
  for (auto r : g.touched_embeddings()) axpy(-lr, g.embeddings.row(r), p.embeddings.row(r));
  for (auto r : g.touched_hsm()) axpy(-lr, g.hsm.row(r), p.hsm.row(r));
  for (std::size_t j = 0; j < p.A.size(); ++j) axpy(-lr, g.A[j].flat(), p.A[j].flat());
  axpy(-lr, g.b, p.b);
  axpy(-lr, g.B.flat(), p.B.flat());
}

double step_with(EncodedDocs docs, std::span<const std::uint32_t> batch, NeuralModel& model,
                 std::span<const double> weights, double lr, int threads, Gradients& grads,
                 std::vector<Gradients>& scratch) {
  grads.clear();
  const auto loss = threads == 1
                        ? kernels::batch_gradient_serial(docs, batch, model, weights, grads)
                        : kernels::batch_gradient_parallel(docs, batch, model, weights, grads,
                                                           threads, &scratch);
  if (loss.weight <= 0.0) return 0.0;
  const double mean = loss.nll / loss.weight;
  if (!std::isfinite(mean)) {
    throw NumericalError("non-finite training loss");
  }
  grads.scale(1.0 / loss.weight);
  apply_update(model, grads, lr);
  return mean;
}

}  // namespace

double sgd_step(EncodedDocs docs, std::span<const std::uint32_t> batch, NeuralModel& model,
                std::span<const double> weights, double lr, int threads) {
  Gradients grads(model.config, model.vocab_words(), false);
  std::vector<Gradients> scratch;
  return step_with(docs, batch, model, weights, lr, threads, grads, scratch);
}

TrainResult train_generic(EncodedDocs docs, NeuralModel& model, std::span<const double> weights,
                          const TrainConfig& cfg,
                          const std::function<void(const TraceEntry&)>& on_log) {
  cfg.validate();
  if (docs.empty()) throw DataError("empty corpus");
  if (weights.size() != model.vocab_words()) throw UsageError("weight table size mismatch");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(docs.size() - 1));
  Gradients grads(model.config, model.vocab_words(), false);
  std::vector<Gradients> scratch;
  std::vector<std::uint32_t> batch(cfg.batch_size);
  TrainResult result;
  const std::size_t every = std::max<std::size_t>(cfg.log_every, 1);
  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    for (auto& d : batch) d = pick(rng);
    const double lr = lr_schedule(k, cfg);
    const double loss = step_with(docs, batch, model, weights, lr, cfg.threads, grads, scratch);
    if (k % every == 0 || k + 1 == cfg.max_iters) {
      TraceEntry e{k, lr, loss, std::exp(loss)};
      result.trace.push_back(e);
      if (on_log) on_log(e);
    }
  }
  if (!model.params.all_finite()) throw NumericalError("training produced non-finite parameters");
  return result;
}

void pretrain_embeddings(EncodedDocs docs, NeuralModel& model, const PretrainConfig& cfg) {
  std::uint64_t words = 0;
  for (const auto& d : docs) words += d.size();
  if (words == 0) throw DataError("empty corpus");
  if (cfg.window < 1 || cfg.epochs < 1) throw UsageError("window and epochs must be >= 1");

  auto& emb = model.params.embeddings;
  const std::size_t m0 = emb.cols();
  Matrix syn1(model.tree.inner_count(), m0);
  std::mt19937_64 rng(cfg.seed);
  std::vector<double> neu1(m0), neu1e(m0);
  const double total = static_cast<double>(words) * cfg.epochs;
  double processed = 0.0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& doc : docs) {
      for (std::size_t i = 0; i < doc.size(); ++i, processed += 1.0) {
        const double alpha = std::max(cfg.alpha0 * (1.0 - processed / (total + 1.0)),
                                      cfg.alpha0 * 1e-4);
        const auto shrink = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(cfg.window));
        const std::size_t span = static_cast<std::size_t>(cfg.window) - shrink;
        std::fill(neu1.begin(), neu1.end(), 0.0);
        std::fill(neu1e.begin(), neu1e.end(), 0.0);
        const std::size_t lo = i >= span ? i - span : 0;
        const std::size_t hi = std::min(doc.size() - 1, i + span);
        std::size_t cw = 0;
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          axpy(1.0, emb.row(doc[j]), neu1);
          ++cw;
        }
        if (cw == 0) continue;
        for (auto& x : neu1) x /= static_cast<double>(cw);
        const auto path = model.tree.path(doc[i]);
        const auto signs = model.tree.signs(doc[i]);
        for (std::size_t s = 0; s < path.size(); ++s) {
          const double f = sigmoid(dot(neu1, syn1.row(path[s])));
          const double code = signs[s] > 0 ? 1.0 : 0.0;
          const double g = (1.0 - code - f) * alpha;
          axpy(g, syn1.row(path[s]), neu1e);
          axpy(g, neu1, syn1.row(path[s]));
        }
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j != i) axpy(1.0, neu1e, emb.row(doc[j]));
        }
      }
    }
  }
  if (m0 == model.params.hsm.cols()) model.params.hsm = std::move(syn1);
}

std::size_t load_word_vectors(const std::filesystem::path& path, const Vocabulary& vocab,
                              NeuralModel& model) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word vectors: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": missing header");
  const auto header = io::split_ws(line);
  if (header.size() != 2) throw DataError(path.string() + ": header must be 'count dim'");
  const auto dim = std::stoull(header[1]);
  auto& emb = model.params.embeddings;
  if (dim != emb.cols()) {
    throw DataError(path.string() + ": vector dimension " + header[1] + " does not match m0 " +
                    std::to_string(emb.cols()));
  }
  std::size_t loaded = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    auto f = io::split_ws(line);
    if (f.empty()) continue;
    if (f.size() != dim + 1) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(dim) + " values");
    }
    auto id = vocab.find(f[0]);
    if (!id) continue;
    for (std::size_t c = 0; c < dim; ++c) emb(*id, c) = std::stod(f[c + 1]);
    ++loaded;
  }
  return loaded;
}

Matrix document_states(std::span<const TermId> doc, const NeuralModel& model) {
  Matrix states(doc.size(), static_cast<std::size_t>(model.config.state_dim()));
  ForwardCache cache;
  std::vector<TermId> ctx(static_cast<std::size_t>(model.config.context_size()));
  for (std::size_t i = 0; i < doc.size(); ++i) {
    build_context(doc, i, model.padding_id(), ctx);
    phi_forward(ctx, model, cache);
    std::copy(cache.state.begin(), cache.state.end(), states.row(i).begin());
  }
  return states;
}

double doc_vector_objective(const Matrix& states, std::span<const TermId> doc,
                            const NeuralModel& model, std::span<const double> weights,
                            const DocVector& dv, std::span<double> grad_z) {
  const std::size_t mf = states.cols();
  if (dv.z.size() != mf || grad_z.size() != mf) throw UsageError("document vector dimension mismatch");
  std::fill(grad_z.begin(), grad_z.end(), 0.0);
  std::vector<double> v(mf), g_v(mf);
  const auto& hsm = model.params.hsm;
  double nll = 0.0;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto s = states.row(i);
    for (std::size_t k = 0; k < mf; ++k) {
      v[k] = dv.mode == MergeMode::Sum ? s[k] + dv.z[k] : s[k] * dv.z[k];
    }
    std::fill(g_v.begin(), g_v.end(), 0.0);
    const double w = weights[doc[i]];
    const auto path = model.tree.path(doc[i]);
    const auto signs = model.tree.signs(doc[i]);
    for (std::size_t j = 0; j < path.size(); ++j) {
      const double c = -static_cast<double>(signs[j]);
      const double u = dot(hsm.row(path[j]), v);
      nll -= w * log_sigmoid(c * u);
      axpy(-w * c * sigmoid(-c * u), hsm.row(path[j]), g_v);
    }
    for (std::size_t k = 0; k < mf; ++k) {
      grad_z[k] += dv.mode == MergeMode::Sum ? g_v[k] : g_v[k] * s[k];
    }
  }
  return nll;
}

FitResult fit_doc_vector(std::span<const TermId> doc, const NeuralModel& model,
                         std::span<const double> weights, MergeMode mode, const FitConfig& cfg) {
  const auto dim = static_cast<std::size_t>(model.config.state_dim());
  FitResult r;
  r.dv = DocVector::identity(mode, dim);
  if (doc.empty()) {
    r.empty_document = true;
    r.converged = true;
    return r;
  }
  const Matrix states = document_states(doc, model);
  std::vector<double> grad(dim);
  DocVector cur = r.dv;
  r.initial_nll = doc_vector_objective(states, doc, model, weights, cur, grad);
  r.final_nll = r.initial_nll;
  Rprop rprop(dim, cfg.rprop);
  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    const double change = rprop.step(grad, cur.z);
    const double nll = doc_vector_objective(states, doc, model, weights, cur, grad);
    r.iterations = it;
    if (std::isfinite(nll) && nll < r.final_nll) {
      r.final_nll = nll;
      r.dv = cur;
    }
    if (change < cfg.tolerance) {
      r.converged = true;
      break;
    }
  }
  return r;
}

double perplexity(EncodedDocs docs, const NeuralModel& model, std::span<const double> weights,
                  std::span<const DocVector* const> doc_vectors, int threads) {
  if (!doc_vectors.empty() && doc_vectors.size() != docs.size()) {
    throw UsageError("one document vector slot per document is required");
  }
  const auto loss = threads == 1
                        ? kernels::corpus_nll_serial(docs, model, weights, doc_vectors)
                        : kernels::corpus_nll_parallel(docs, model, weights, doc_vectors, threads);
  if (loss.weight <= 0.0) throw DataError("perplexity undefined: total weight is zero");
  return std::exp(loss.nll / loss.weight);
}

}  // namespace nnir
