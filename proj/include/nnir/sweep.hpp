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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "nnir/corpus.hpp"
#include "nnir/evaluation.hpp"
#include "nnir/rerank.hpp"

namespace nnir {

/// Tokenizes topic texts with the document pipeline and encodes them.
std::map<std::string, EncodedQuery> encode_topics(const std::map<std::string, std::string>& topics,
                                                  const Vocabulary& retrieval_vocab,
                                                  const Vocabulary* neural_vocab,
                                                  const StopWords* stopwords = nullptr);

/// One neural row of a sweep: generic when doc_vectors is null.
struct SweepModel {
  std::string label;  // e.g. "M2-gen", "M2-prod"
  const NeuralModel* model = nullptr;
  const DocVectorTable* doc_vectors = nullptr;
};

struct SweepResult {
  EvalReport bm25;                 // the candidate ranking itself
  EvalReport lm;                   // unigram Jelinek-Mercer with weight gamma
  std::vector<SweepCell> cells;    // one per (model, lambda), failures included
  std::vector<Run> runs;           // successful runs, same order as their cells
  std::vector<EvalReport> reports; // evaluations of `runs`
};

/// Reranks the candidates with every model at every lambda and evaluates
/// each run. A cell whose reranking throws is recorded as a failure with
/// the error message instead of aborting the sweep.
SweepResult run_sweep(const Run& candidates, const std::map<std::string, EncodedQuery>& queries,
                      const Qrels& qrels, std::span<const double> lambdas, double gamma,
                      const InvertedIndex& index, const CountLM& collection,
                      std::span<const SweepModel> models, int threads = 1);

/// Label for a model row: `<arch>-gen` or `<arch>-<mode>`.
std::string model_label(const NeuralModel& model, const DocVectorTable* doc_vectors);

}  // namespace nnir
