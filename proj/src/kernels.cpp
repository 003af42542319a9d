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

#include "nnir/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nnir::kernels {

int resolve_threads(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

namespace {

int thread_index() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

WeightedLoss accumulate_document(std::span<const TermId> doc, const NeuralModel& model,
                                 std::span<const double> weights, ForwardCache& cache,
                                 std::vector<TermId>& ctx, Gradients& grads) {
  WeightedLoss loss;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    build_context(doc, i, model.padding_id(), ctx);
    const Sample s{ctx, doc[i], weights[doc[i]]};
    loss.nll += accumulate_sample(s, model, nullptr, GradientScope::All, cache, grads);
    loss.weight += s.weight;
  }
  return loss;
}

WeightedLoss document_nll(std::span<const TermId> doc, const NeuralModel& model,
                          std::span<const double> weights, const DocVector* dv,
                          ForwardCache& cache, std::vector<TermId>& ctx) {
  WeightedLoss loss;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    build_context(doc, i, model.padding_id(), ctx);
    phi_forward(ctx, model, cache);
    const double lp = dv == nullptr
                          ? hsm_log_prob(doc[i], cache.state, model.tree, model.params.hsm)
                          : hsm_log_prob(doc[i], psi_merge(cache.state, *dv), model.tree,
                                         model.params.hsm);
    const double w = weights[doc[i]];
    loss.nll += -w * lp;
    loss.weight += w;
  }
  return loss;
}

}  // namespace

WeightedLoss batch_gradient_serial(EncodedDocs docs, std::span<const std::uint32_t> batch,
                                   const NeuralModel& model, std::span<const double> weights,
                                   Gradients& out) {
  ForwardCache cache;
  std::vector<TermId> ctx(static_cast<std::size_t>(model.config.context_size()));
  WeightedLoss total;
  for (auto d : batch) {
    const auto l = accumulate_document(docs[d], model, weights, cache, ctx, out);
    total.nll += l.nll;
    total.weight += l.weight;
  }
  return total;
}

WeightedLoss batch_gradient_parallel(EncodedDocs docs, std::span<const std::uint32_t> batch,
                                     const NeuralModel& model, std::span<const double> weights,
                                     Gradients& out, int threads,
                                     std::vector<Gradients>* scratch) {
  const int nt = resolve_threads(threads);
  std::vector<Gradients> local;
  auto& bufs = scratch != nullptr ? *scratch : local;
  while (bufs.size() < static_cast<std::size_t>(nt)) {
    bufs.emplace_back(model.config, model.vocab_words(), false);
  }
  for (auto& g : bufs) g.clear();
  std::vector<WeightedLoss> losses(static_cast<std::size_t>(nt));
  const auto n = static_cast<std::ptrdiff_t>(batch.size());
#pragma omp parallel num_threads(nt)
  {
    const auto tid = static_cast<std::size_t>(thread_index());
    auto& g = bufs[tid];
    ForwardCache cache;
    std::vector<TermId> ctx(static_cast<std::size_t>(model.config.context_size()));
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto l = accumulate_document(docs[batch[static_cast<std::size_t>(i)]], model, weights,
                                         cache, ctx, g);
      losses[tid].nll += l.nll;
      losses[tid].weight += l.weight;
    }
  }
  WeightedLoss total;
  for (int t = 0; t < nt; ++t) {
    out.add(bufs[static_cast<std::size_t>(t)]);
    total.nll += losses[static_cast<std::size_t>(t)].nll;
    total.weight += losses[static_cast<std::size_t>(t)].weight;
  }
  return total;
}

WeightedLoss corpus_nll_serial(EncodedDocs docs, const NeuralModel& model,
                               std::span<const double> weights,
                               std::span<const DocVector* const> doc_vectors) {
  ForwardCache cache;
  std::vector<TermId> ctx(static_cast<std::size_t>(model.config.context_size()));
  WeightedLoss total;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const DocVector* dv = doc_vectors.empty() ? nullptr : doc_vectors[d];
    const auto l = document_nll(docs[d], model, weights, dv, cache, ctx);
    total.nll += l.nll;
    total.weight += l.weight;
  }
  return total;
}

WeightedLoss corpus_nll_parallel(EncodedDocs docs, const NeuralModel& model,
                                 std::span<const double> weights,
                                 std::span<const DocVector* const> doc_vectors, int threads) {
  const int nt = resolve_threads(threads);
  std::vector<WeightedLoss> per_doc(docs.size());
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel num_threads(nt)
  {
    ForwardCache cache;
    std::vector<TermId> ctx(static_cast<std::size_t>(model.config.context_size()));
#pragma omp for schedule(dynamic, 4)
    for (std::ptrdiff_t d = 0; d < n; ++d) {
      const auto i = static_cast<std::size_t>(d);
      const DocVector* dv = doc_vectors.empty() ? nullptr : doc_vectors[i];
      per_doc[i] = document_nll(docs[i], model, weights, dv, cache, ctx);
    }
  }
  // Summed in document order, matching the serial kernel.
  WeightedLoss total;
  for (const auto& l : per_doc) {
    total.nll += l.nll;
    total.weight += l.weight;
  }
  return total;
}

std::vector<FitResult> fit_doc_vectors_serial(EncodedDocs docs, const NeuralModel& model,
                                              std::span<const double> weights, MergeMode mode,
                                              const FitConfig& cfg) {
  std::vector<FitResult> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(fit_doc_vector(d, model, weights, mode, cfg));
  return out;
}

std::vector<FitResult> fit_doc_vectors_parallel(EncodedDocs docs, const NeuralModel& model,
                                                std::span<const double> weights, MergeMode mode,
                                                const FitConfig& cfg, int threads) {
  const int nt = resolve_threads(threads);
  std::vector<FitResult> out(docs.size());
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (std::ptrdiff_t d = 0; d < n; ++d) {
    const auto i = static_cast<std::size_t>(d);
    out[i] = fit_doc_vector(docs[i], model, weights, mode, cfg);
  }
  return out;
}

std::vector<std::vector<ScoredDoc>> retrieve_all_serial(const InvertedIndex& index,
                                                        std::span<const std::vector<TermId>> queries,
                                                        std::size_t k, const Bm25Params& p) {
  std::vector<std::vector<ScoredDoc>> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(index.retrieve_topk(q, k, p));
  return out;
}

std::vector<std::vector<ScoredDoc>> retrieve_all_parallel(
    const InvertedIndex& index, std::span<const std::vector<TermId>> queries, std::size_t k,
    const Bm25Params& p, int threads) {
  const int nt = resolve_threads(threads);
  std::vector<std::vector<ScoredDoc>> out(queries.size());
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (std::ptrdiff_t q = 0; q < n; ++q) {
    const auto i = static_cast<std::size_t>(q);
    out[i] = index.retrieve_topk(queries[i], k, p);
  }
  return out;
}

}  // namespace nnir::kernels
