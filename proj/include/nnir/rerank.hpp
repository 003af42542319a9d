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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnir/baseline_lm.hpp"
#include "nnir/checkpoint.hpp"
#include "nnir/evaluation.hpp"
#include "nnir/inverted_index.hpp"
#include "nnir/nnlm.hpp"

namespace nnir {

/// lambda weighs the neural model against the unigram mixture; gamma weighs
/// the collection unigram against the document unigram.
struct MixParams {
  double lambda = 0.01;
  double gamma = 0.5;
  void validate() const;
};

/// A query term in both vocabularies. Terms absent from the collection are
/// dropped at encoding; `neural` is empty for terms outside the neural
/// vocabulary.
struct QueryTerm {
  TermId retrieval = 0;
  std::optional<TermId> neural;
};

using EncodedQuery = std::vector<QueryTerm>;

EncodedQuery encode_query(std::span<const std::string> stems, const Vocabulary& retrieval_vocab,
                          const Vocabulary* neural_vocab);

/// log P_NN(q_i | preceding neural query terms) for each query term, nullopt
/// for terms outside the neural vocabulary. Contexts are built over the
/// neural terms of the query only, left-padded.
std::vector<std::optional<double>> neural_query_log_probs(const EncodedQuery& query,
                                                          const NeuralModel& model,
                                                          const DocVector* dv);

/// Sum_i log[(1-l)((1-g) theta_d(q_i) + g theta_C(q_i)) + l P_NN(q_i | ctx)],
/// with the neural term omitted for terms lacking a neural id.
double nn_mixed_log_prob(const EncodedQuery& query, const CountLM& doc_lm, const CountLM& coll_lm,
                         const MixParams& mix, std::span<const std::optional<double>> neural_lp);

/// Convenience form computing the neural log-probabilities itself.
double nn_mixed_log_prob(const EncodedQuery& query, const CountLM& doc_lm, const CountLM& coll_lm,
                         const MixParams& mix, const NeuralModel* model, const DocVector* dv);

/// What to score with. With model == nullptr only the unigram mixture is
/// used (lambda must then be 0 or the neural part is treated as absent).
struct RerankModels {
  const InvertedIndex* index = nullptr;
  const CountLM* collection = nullptr;
  const NeuralModel* model = nullptr;
  const DocVectorTable* doc_vectors = nullptr;  // document-specific when set
};

/// Reorders each topic's candidates by nn_mixed_log_prob, ties by doc id.
/// Throws DataError listing candidates without a document vector when
/// doc_vectors is set, or candidates missing from the index.
Run rerank_run(const Run& candidates, const std::map<std::string, EncodedQuery>& queries,
               const MixParams& mix, const RerankModels& models, int threads = 1);

/// Jelinek-Mercer reranking with unigram models (the LM baseline).
Run rerank_jm(const Run& candidates, const std::map<std::string, EncodedQuery>& queries,
              double lambda, const InvertedIndex& index, const CountLM& collection);

/// Run tag such as `M2-prod-l0.01-g0.5`, `M1-gen-l0.1-g0.5` or `LM-l0.5`.
std::string run_tag(const std::string& model_name, double lambda, std::optional<double> gamma);

/// One rerank_run per lambda, tagged `<label>-l<lambda>-g<gamma>`.
std::vector<Run> sweep_lambda(const Run& candidates,
                              const std::map<std::string, EncodedQuery>& queries,
                              std::span<const double> lambdas, double gamma,
                              const RerankModels& models, const std::string& label,
                              int threads = 1);

/// BM25 candidates for every topic.
Run bm25_run(const InvertedIndex& index, const std::map<std::string, EncodedQuery>& queries,
             std::size_t k, const Bm25Params& p = {}, int threads = 1);

}  // namespace nnir
