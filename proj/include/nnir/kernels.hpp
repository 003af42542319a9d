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

// Data-parallel kernels. Each has a serial reference and an OpenMP version;
// the tests check that both agree and bench/ compares their throughput.
//
// Parallel reductions accumulate into one buffer per thread over a static
// schedule and combine the buffers in thread order, so results are
// reproducible for a fixed thread count.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nnir/inverted_index.hpp"
#include "nnir/nnlm.hpp"
#include "nnir/training.hpp"

namespace nnir::kernels {

struct WeightedLoss {
  double nll = 0.0;     // sum of w * -log p
  double weight = 0.0;  // sum of w
};

/// Accumulates gradients of the weighted NLL over every position of the
/// selected documents into `out` (not normalized).
WeightedLoss batch_gradient_serial(EncodedDocs docs, std::span<const std::uint32_t> batch,
                                   const NeuralModel& model, std::span<const double> weights,
                                   Gradients& out);

WeightedLoss batch_gradient_parallel(EncodedDocs docs, std::span<const std::uint32_t> batch,
                                     const NeuralModel& model, std::span<const double> weights,
                                     Gradients& out, int threads,
                                     std::vector<Gradients>* scratch = nullptr);

/// Weighted NLL over documents, optionally with one document vector per doc.
WeightedLoss corpus_nll_serial(EncodedDocs docs, const NeuralModel& model,
                               std::span<const double> weights,
                               std::span<const DocVector* const> doc_vectors);

WeightedLoss corpus_nll_parallel(EncodedDocs docs, const NeuralModel& model,
                                 std::span<const double> weights,
                                 std::span<const DocVector* const> doc_vectors, int threads);

/// fit_doc_vector for every document; results are in input order.
std::vector<FitResult> fit_doc_vectors_serial(EncodedDocs docs, const NeuralModel& model,
                                              std::span<const double> weights, MergeMode mode,
                                              const FitConfig& cfg);

std::vector<FitResult> fit_doc_vectors_parallel(EncodedDocs docs, const NeuralModel& model,
                                                std::span<const double> weights, MergeMode mode,
                                                const FitConfig& cfg, int threads);

/// BM25 top-k for a list of queries.
std::vector<std::vector<ScoredDoc>> retrieve_all_serial(const InvertedIndex& index,
                                                        std::span<const std::vector<TermId>> queries,
                                                        std::size_t k, const Bm25Params& p);

std::vector<std::vector<ScoredDoc>> retrieve_all_parallel(
    const InvertedIndex& index, std::span<const std::vector<TermId>> queries, std::size_t k,
    const Bm25Params& p, int threads);

/// Number of OpenMP threads to use for a requested count (0 = runtime default).
int resolve_threads(int requested);

}  // namespace nnir::kernels
