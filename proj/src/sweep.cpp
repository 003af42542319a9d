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

#include "nnir/sweep.hpp"

#include "nnir/errors.hpp"

namespace nnir {

std::map<std::string, EncodedQuery> encode_topics(const std::map<std::string, std::string>& topics,
                                                  const Vocabulary& retrieval_vocab,
                                                  const Vocabulary* neural_vocab,
                                                  const StopWords* stopwords) {
  std::map<std::string, EncodedQuery> out;
  for (const auto& [id, text] : topics) {
    const auto doc = make_document(id, text, stopwords);
    out[id] = encode_query(doc.tokens, retrieval_vocab, neural_vocab);
  }
  return out;
}

std::string model_label(const NeuralModel& model, const DocVectorTable* doc_vectors) {
  std::string label(to_string(model.config.arch));
  label += doc_vectors == nullptr ? "-gen" : "-" + std::string(to_string(doc_vectors->mode));
  return label;
}

SweepResult run_sweep(const Run& candidates, const std::map<std::string, EncodedQuery>& queries,
                      const Qrels& qrels, std::span<const double> lambdas, double gamma,
                      const InvertedIndex& index, const CountLM& collection,
                      std::span<const SweepModel> models, int threads) {
  MixParams{0.0, gamma}.validate();
  for (double l : lambdas) MixParams{l, gamma}.validate();

  SweepResult res;
  res.bm25 = evaluate_run(candidates, qrels);
  res.lm = evaluate_run(rerank_jm(candidates, queries, gamma, index, collection), qrels);
  for (const auto& m : models) {
    const RerankModels rm{&index, &collection, m.model, m.doc_vectors};
    for (double l : lambdas) {
      SweepCell cell{m.label, l, std::nullopt, ""};
      try {
        auto run = rerank_run(candidates, queries, MixParams{l, gamma}, rm, threads);
        run.tag = run_tag(m.label, l, gamma);
        auto rep = evaluate_run(run, qrels);
        cell.value = rep.summary;
        res.runs.push_back(std::move(run));
        res.reports.push_back(std::move(rep));
      } catch (const std::exception& e) {
        cell.note = e.what();
      }
      res.cells.push_back(std::move(cell));
    }
  }
  return res;
}

}  // namespace nnir
