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

#include "nnir/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "nnir/errors.hpp"
#include "nnir/kernels.hpp"

namespace nnir {

void MixParams::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw UsageError("lambda must lie in [0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw UsageError("gamma must lie in [0, 1]");
}

EncodedQuery encode_query(std::span<const std::string> stems, const Vocabulary& retrieval_vocab,
                          const Vocabulary* neural_vocab) {
  EncodedQuery q;
  for (const auto& s : stems) {
    auto r = retrieval_vocab.find(s);
    if (!r) continue;
    QueryTerm t{*r, std::nullopt};
    if (neural_vocab != nullptr) t.neural = neural_vocab->find(s);
    q.push_back(t);
  }
  return q;
}

std::vector<std::optional<double>> neural_query_log_probs(const EncodedQuery& query,
                                                          const NeuralModel& model,
                                                          const DocVector* dv) {
  std::vector<TermId> seq;
  for (const auto& t : query) {
    if (t.neural) seq.push_back(*t.neural);
  }
  std::vector<std::optional<double>> out(query.size());
  std::vector<TermId> ctx(static_cast<std::size_t>(model.config.context_size()));
  std::size_t pos = 0;
  for (std::size_t i = 0; i < query.size(); ++i) {
    if (!query[i].neural) continue;
    build_context(seq, pos, model.padding_id(), ctx);
    out[i] = next_token_log_prob(ctx, seq[pos], model, dv);
    ++pos;
  }
  return out;
}

double nn_mixed_log_prob(const EncodedQuery& query, const CountLM& doc_lm, const CountLM& coll_lm,
                         const MixParams& mix, std::span<const std::optional<double>> neural_lp) {
  mix.validate();
  if (doc_lm.order() != 1 || coll_lm.order() != 1) {
    throw UsageError("mixed scoring uses unigram document and collection models");
  }
  if (neural_lp.size() != query.size()) throw UsageError("one neural slot per query term expected");
  double score = 0.0;
  for (std::size_t i = 0; i < query.size(); ++i) {
    const double unigram = (1.0 - mix.gamma) * doc_lm.unigram(query[i].retrieval) +
                           mix.gamma * coll_lm.unigram(query[i].retrieval);
    double p = (1.0 - mix.lambda) * unigram;
    if (neural_lp[i]) p += mix.lambda * std::exp(*neural_lp[i]);
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    score += std::log(p);
  }
  return score;
}

double nn_mixed_log_prob(const EncodedQuery& query, const CountLM& doc_lm, const CountLM& coll_lm,
                         const MixParams& mix, const NeuralModel* model, const DocVector* dv) {
  std::vector<std::optional<double>> lp(query.size());
  if (model != nullptr) lp = neural_query_log_probs(query, *model, dv);
  return nn_mixed_log_prob(query, doc_lm, coll_lm, mix, lp);
}

namespace {

std::vector<const std::pair<const std::string, std::vector<RunEntry>>*> topic_list(const Run& run) {
  std::vector<const std::pair<const std::string, std::vector<RunEntry>>*> out;
  for (const auto& kv : run.topics) out.push_back(&kv);
  return out;
}

void sort_entries(std::vector<RunEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const RunEntry& a, const RunEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
}

CountLM doc_unigram(const InvertedIndex& index, const std::string& doc_id) {
  auto d = index.find_doc(doc_id);
  if (!d) throw DataError("candidate " + doc_id + " is not in the index");
  return estimate_count_lm(index.doc_terms(*d), 1);
}

}  // namespace

Run rerank_run(const Run& candidates, const std::map<std::string, EncodedQuery>& queries,
               const MixParams& mix, const RerankModels& models, int threads) {
  mix.validate();
  if (models.index == nullptr || models.collection == nullptr) {
    throw UsageError("reranking needs an index and a collection model");
  }
  if (models.doc_vectors != nullptr) {
    if (models.model == nullptr) throw UsageError("document vectors need a neural model");
    std::set<std::string> missing;
    for (const auto& [topic, entries] : candidates.topics) {
      for (const auto& e : entries) {
        if (models.doc_vectors->find(e.doc_id) == nullptr) missing.insert(e.doc_id);
      }
    }
    if (!missing.empty()) {
      std::string msg = "missing document vectors for:";
      for (const auto& m : missing) msg += " " + m;
      throw DataError(msg);
    }
  }
  for (const auto& [topic, entries] : candidates.topics) {
    if (!queries.contains(topic)) throw DataError("no query for topic " + topic);
    for (const auto& e : entries) {
      if (!models.index->find_doc(e.doc_id)) throw DataError("candidate " + e.doc_id + " is not in the index");
    }
  }

  const auto topics = topic_list(candidates);
  std::vector<std::vector<RunEntry>> results(topics.size());
  const auto n = static_cast<std::ptrdiff_t>(topics.size());
  const int nt = kernels::resolve_threads(threads);
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt) if (nt > 1)
  for (std::ptrdiff_t ti = 0; ti < n; ++ti) {
    const auto& [topic, entries] = *topics[static_cast<std::size_t>(ti)];
    const auto& query = queries.at(topic);
    std::vector<std::optional<double>> generic(query.size());
    if (models.model != nullptr && models.doc_vectors == nullptr) {
      generic = neural_query_log_probs(query, *models.model, nullptr);
    }
    auto& out = results[static_cast<std::size_t>(ti)];
    for (const auto& e : entries) {
      const CountLM doc_lm = doc_unigram(*models.index, e.doc_id);
      double score = 0.0;
      if (models.doc_vectors != nullptr) {
        const auto lp = neural_query_log_probs(query, *models.model, models.doc_vectors->find(e.doc_id));
        score = nn_mixed_log_prob(query, doc_lm, *models.collection, mix, lp);
      } else {
        score = nn_mixed_log_prob(query, doc_lm, *models.collection, mix, generic);
      }
      out.push_back({e.doc_id, score});
    }
    sort_entries(out);
  }
  Run run;
  run.tag = candidates.tag;
  for (std::size_t i = 0; i < topics.size(); ++i) run.topics[topics[i]->first] = std::move(results[i]);
  return run;
}

Run rerank_jm(const Run& candidates, const std::map<std::string, EncodedQuery>& queries,
              double lambda, const InvertedIndex& index, const CountLM& collection) {
  Run run;
  run.tag = run_tag("LM", lambda, std::nullopt);
  for (const auto& [topic, entries] : candidates.topics) {
    auto qit = queries.find(topic);
    if (qit == queries.end()) throw DataError("no query for topic " + topic);
    std::vector<TermId> ids;
    for (const auto& t : qit->second) ids.push_back(t.retrieval);
    auto& out = run.topics[topic];
    for (const auto& e : entries) {
      out.push_back({e.doc_id, jm_log_prob(ids, doc_unigram(index, e.doc_id), collection, lambda)});
    }
    sort_entries(out);
  }
  return run;
}

std::string run_tag(const std::string& model_name, double lambda, std::optional<double> gamma) {
  std::string tag = model_name + "-l" + format_real(lambda);
  if (gamma) tag += "-g" + format_real(*gamma);
  return tag;
}

std::vector<Run> sweep_lambda(const Run& candidates,
                              const std::map<std::string, EncodedQuery>& queries,
                              std::span<const double> lambdas, double gamma,
                              const RerankModels& models, const std::string& label,
                              int threads) {
  std::vector<Run> runs;
  for (double l : lambdas) {
    auto run = rerank_run(candidates, queries, MixParams{l, gamma}, models, threads);
    run.tag = run_tag(label, l, gamma);
    runs.push_back(std::move(run));
  }
  return runs;
}

Run bm25_run(const InvertedIndex& index, const std::map<std::string, EncodedQuery>& queries,
             std::size_t k, const Bm25Params& p, int threads) {
  std::vector<std::string> ids;
  std::vector<std::vector<TermId>> qs;
  for (const auto& [topic, q] : queries) {
    ids.push_back(topic);
    std::vector<TermId> terms;
    for (const auto& t : q) terms.push_back(t.retrieval);
    qs.push_back(std::move(terms));
  }
  const auto results = threads == 1 ? kernels::retrieve_all_serial(index, qs, k, p)
                                    : kernels::retrieve_all_parallel(index, qs, k, p, threads);
  Run run;
  run.tag = "BM25";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto& out = run.topics[ids[i]];
    for (const auto& r : results[i]) out.push_back({r.doc_id, r.score});
  }
  return run;
}

}  // namespace nnir
