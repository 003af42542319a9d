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
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nnir/corpus.hpp"
#include "nnir/nnlm.hpp"
#include "nnir/rprop.hpp"

namespace nnir {

using EncodedDocs = std::span<const std::vector<TermId>>;

struct TrainConfig {
  double eps0 = 0.1;
  double delta = 2e-4;
  std::size_t batch_size = 100;  // documents per step
  std::size_t max_iters = 50000;
  double subsample = 1e-3;
  std::uint64_t seed = 1;
  int threads = 1;  // 1 runs the serial reference kernel
  std::size_t log_every = 100;

  void validate() const;
};

/// eps0 / (1 + k delta)
double lr_schedule(std::size_t k, const TrainConfig& cfg);

/// min(1, sqrt(s / f(t))) with f the relative frequency among vocabulary words.
double word_weight(TermId t, const Vocabulary& vocab, double subsample);
std::vector<double> word_weights(const Vocabulary& vocab, double subsample);

struct TraceEntry {
  std::size_t step = 0;
  double lr = 0.0;
  double weighted_nll = 0.0;  // batch sum of w * nll divided by batch sum of w
  double perplexity = 0.0;
};

struct TrainResult {
  std::vector<TraceEntry> trace;
};

/// Mini-batch SGD on the weighted log-likelihood. Each step samples
/// batch_size documents uniformly with replacement, accumulates the gradient
/// over every position (left-padded contexts), divides by the batch weight
/// and applies params -= lr_schedule(k) * grad.
/// Throws NumericalError on a non-finite loss.
TrainResult train_generic(EncodedDocs docs, NeuralModel& model, std::span<const double> weights,
                          const TrainConfig& cfg,
                          const std::function<void(const TraceEntry&)>& on_log = {});

/// One SGD step over the given batch of document indices; returns the
/// normalized batch loss. Exposed for tests.
double sgd_step(EncodedDocs docs, std::span<const std::uint32_t> batch, NeuralModel& model,
                std::span<const double> weights, double lr, int threads);

struct PretrainConfig {
  int window = 5;
  double alpha0 = 0.5;  // decays linearly to 0 over all epochs
  int epochs = 5;
  std::uint64_t seed = 1;
};

/// CBOW with hierarchical softmax: the mean of the context embeddings
/// (up to `window` words each side, window shrunk at random per position)
/// predicts the centre word through the model's Huffman tree. Writes the
/// embeddings; HSM vectors are written too when m0 equals the state size.
/// Throws DataError on an empty corpus.
void pretrain_embeddings(EncodedDocs docs, NeuralModel& model, const PretrainConfig& cfg);

/// Text vectors: first line "count dim", then "word v1 .. vdim". Words not in
/// the vocabulary are ignored; vocabulary words absent from the file keep
/// their current values. Returns the number of rows loaded.
std::size_t load_word_vectors(const std::filesystem::path& path, const Vocabulary& vocab,
                              NeuralModel& model);

struct FitConfig {
  RpropConfig rprop;
  double tolerance = 1e-4;  // max-abs change of z_d between iterations
  std::size_t max_iters = 500;
};

struct FitResult {
  DocVector dv;
  double initial_nll = 0.0;  // weighted NLL at the identity
  double final_nll = 0.0;    // weighted NLL of the returned vector
  std::size_t iterations = 0;
  bool converged = false;
  bool empty_document = false;
};

/// Weighted document NLL and its gradient with respect to z_d, given the
/// precomputed states s_i of every position.
double doc_vector_objective(const Matrix& states, std::span<const TermId> doc,
                            const NeuralModel& model, std::span<const double> weights,
                            const DocVector& dv, std::span<double> grad_z);

/// phi state for every position of doc (rows follow positions).
Matrix document_states(std::span<const TermId> doc, const NeuralModel& model);

/// Rprop on z_d with the generic parameters frozen, starting at the identity
/// and returning the best iterate seen.
FitResult fit_doc_vector(std::span<const TermId> doc, const NeuralModel& model,
                         std::span<const double> weights, MergeMode mode,
                         const FitConfig& cfg = {});

/// exp(sum w * nll / sum w) over all positions of all documents. doc_vectors,
/// when non-empty, supplies one vector (or nullptr for generic) per document.
/// Throws DataError when the total weight is zero.
double perplexity(EncodedDocs docs, const NeuralModel& model, std::span<const double> weights,
                  std::span<const DocVector* const> doc_vectors = {}, int threads = 1);

}  // namespace nnir
