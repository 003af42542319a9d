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
#include <string_view>
#include <vector>

#include "nnir/corpus.hpp"
#include "nnir/huffman.hpp"
#include "nnir/matrix.hpp"

namespace nnir {

/// Context summarizer architectures:
///   M1:    s = tanh(sum_j A_j z_j + b)
///   M2:    s = tanh(B tanh(sum_j A_j z_j + b))
///   M2Max: s = tanh(B maxpool_kappa(sum_j A_j z_j + b)), first layer kappa*m1 wide
enum class Arch { M1, M2, M2Max };

/// How a document vector z_d is merged into the state: s + z_d or s (.) z_d.
enum class MergeMode { Sum, Product };

std::string_view to_string(Arch a);
std::string_view to_string(MergeMode m);
Arch parse_arch(std::string_view s);
MergeMode parse_merge_mode(std::string_view s);

struct NeuralConfig {
  Arch arch = Arch::M1;
  int order = 5;  // n: the model sees n-1 previous terms
  int m0 = 100;
  int m1 = 100;
  int m2 = 100;
  int kappa = 4;

  int context_size() const { return order - 1; }
  int first_width() const { return arch == Arch::M2Max ? kappa * m1 : m1; }
  int state_dim() const { return arch == Arch::M1 ? m1 : m2; }
  void validate() const;

  bool operator==(const NeuralConfig&) const = default;
};

struct ParameterCounts {
  std::uint64_t phi = 0;        // context network weights, biases excluded
  std::uint64_t words_hsm = 0;  // word embeddings plus HSM inner-node vectors
  std::uint64_t total() const { return phi + words_hsm; }
};

/// Counts as reported for the model family: the padding row and biases are
/// not included.
ParameterCounts count_parameters(const NeuralConfig& cfg, std::uint64_t vocab_words);

struct NeuralParams {
  Matrix embeddings;     // (words + 1) x m0, last row is the padding term
  std::vector<Matrix> A; // context_size() matrices of first_width() x m0
  std::vector<double> b; // first_width()
  Matrix B;              // m2 x m1, empty for M1
  Matrix hsm;            // (words - 1) x state_dim()

  static NeuralParams zeros(const NeuralConfig& cfg, std::size_t vocab_words);
  /// Uniform in +-1/sqrt(fan_in) per layer, zero bias, zero HSM vectors.
  static NeuralParams random(const NeuralConfig& cfg, std::size_t vocab_words,
                             std::uint64_t seed);

  bool all_finite() const;
  bool operator==(const NeuralParams&) const = default;
};

struct DocVector {
  MergeMode mode = MergeMode::Sum;
  std::vector<double> z;

  /// 0 for Sum, 1 for Product: the merge leaves the state untouched.
  static DocVector identity(MergeMode mode, std::size_t dim);
};

/// psi(s, z_d). Throws UsageError on dimension mismatch.
std::vector<double> psi_merge(std::span<const double> state, const DocVector& dv);

/// maxpool_kappa(x)_j = max of the j-th block of kappa entries; argmax holds
/// the winning input index per output (first one on ties).
void maxpool(std::span<const double> x, int kappa, std::span<double> out,
             std::span<std::uint32_t> argmax);

/// Numerically stable log(sigma(z)).
double log_sigmoid(double z);
double sigmoid(double z);

/// log HSM_t(v) = sum over path(t) of log sigma(-b_s(t) x_s . v).
double hsm_log_prob(std::uint32_t t, std::span<const double> v, const HuffmanTree& tree,
                    const Matrix& hsm_nodes);

/// Intermediate values of one forward pass, reused by backward.
struct ForwardCache {
  std::vector<TermId> context;
  std::vector<double> pre1;            // first linear layer output
  std::vector<double> hidden;          // tanh(pre1) for M2, maxpool(pre1) for M2Max
  std::vector<std::uint32_t> argmax;   // M2Max pooling winners
  std::vector<double> state;           // s
  std::vector<double> merged;          // psi(s, z_d), or s without a doc vector
};

/// Generic model: configuration, parameters and the Huffman tree over the
/// neural vocabulary words. The padding id is the last embedding row.
struct NeuralModel {
  NeuralConfig config;
  NeuralParams params;
  HuffmanTree tree;

  std::size_t vocab_words() const { return tree.leaf_count(); }
  TermId padding_id() const { return static_cast<TermId>(tree.leaf_count()); }

  static NeuralModel create(const NeuralConfig& cfg, const Vocabulary& vocab, std::uint64_t seed);
};

/// Fills cache.pre1 .. cache.state. Throws UsageError on a wrong context length.
void phi_forward(std::span<const TermId> context, const NeuralModel& model, ForwardCache& cache);

/// log P_NN(t | context) under the generic model, or the document-adapted
/// model when dv is given. Throws UsageError when t is not a word id.
double next_token_log_prob(std::span<const TermId> context, TermId t, const NeuralModel& model,
                           const DocVector* dv = nullptr);

/// Writes the n-1 ids preceding position i of seq into out, left-padded.
void build_context(std::span<const TermId> seq, std::size_t i, TermId padding,
                   std::span<TermId> out);

/// Row-sparse gradient accumulator with the same shapes as NeuralParams,
/// plus the document vector gradient.
class Gradients {
 public:
  Gradients() = default;
  Gradients(const NeuralConfig& cfg, std::size_t vocab_words, bool with_doc_vector);

  Matrix embeddings;
  std::vector<Matrix> A;
  std::vector<double> b;
  Matrix B;
  Matrix hsm;
  std::vector<double> z;

  void touch_embedding(TermId row);
  void touch_hsm(std::uint32_t row);
  std::span<const std::uint32_t> touched_embeddings() const { return emb_rows_; }
  std::span<const std::uint32_t> touched_hsm() const { return hsm_rows_; }

  /// Zeros everything, touching only rows that were written.
  void clear();
  /// this += other, visiting other's rows in the order they were touched.
  void add(const Gradients& other);
  /// Multiplies all entries by s.
  void scale(double s);

 private:
  std::vector<std::uint32_t> emb_rows_;
  std::vector<char> emb_mark_;
  std::vector<std::uint32_t> hsm_rows_;
  std::vector<char> hsm_mark_;
};

/// Which parameters receive gradients.
enum class GradientScope { All, DocVectorOnly };

/// One training example: predict `target` after `context` with loss weight `weight`.
struct Sample {
  std::span<const TermId> context;
  TermId target = 0;
  double weight = 1.0;
};

/// Forward and backward for one sample; accumulates the gradient of
/// weight * -log P(target | context) into grads and returns that loss.
double accumulate_sample(const Sample& sample, const NeuralModel& model, const DocVector* dv,
                         GradientScope scope, ForwardCache& cache, Gradients& grads);

/// Sums accumulate_sample over a batch; returns the total weighted NLL.
double backward(std::span<const Sample> batch, const NeuralModel& model, const DocVector* dv,
                GradientScope scope, Gradients& grads);

}  // namespace nnir
