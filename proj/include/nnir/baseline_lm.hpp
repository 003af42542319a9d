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
#include <map>
#include <span>
#include <vector>

#include "nnir/corpus.hpp"

namespace nnir {

/// Maximum-likelihood n-gram table: theta(t | ctx) = count(ctx t) / count(ctx *).
/// Contexts are the n-1 preceding ids; order 1 uses the empty context.
class CountLM {
 public:
  struct ContextTable {
    std::map<TermId, std::uint64_t> counts;
    std::uint64_t total = 0;
  };

  explicit CountLM(int order = 1);

  int order() const { return order_; }
  const std::map<std::vector<TermId>, ContextTable>& tables() const { return tables_; }

  /// Adds every n-gram of `seq` that has a full context. Sequences are never
  /// joined, so n-grams do not span document boundaries.
  void add_sequence(std::span<const TermId> seq);
  void merge(const CountLM& other);

  /// 0 for unseen contexts or terms.
  double prob(TermId t, std::span<const TermId> context) const;
  double unigram(TermId t) const { return prob(t, {}); }

 private:
  int order_;
  std::map<std::vector<TermId>, ContextTable> tables_;
};

CountLM estimate_count_lm(std::span<const TermId> term_ids, int order);

/// Collection model from per-document counts (sum of counts, no cross-document n-grams).
CountLM estimate_collection_lm(std::span<const std::vector<TermId>> docs, int order);

/// Sum over query positions with a full context of
/// log[(1-lambda) theta_d + lambda theta_C]. Natural log; -inf when both are 0.
/// For order n > 1 the first n-1 query terms have no full context and are skipped.
double jm_log_prob(std::span<const TermId> query, const CountLM& doc_lm, const CountLM& coll_lm,
                   double lambda);

}  // namespace nnir
