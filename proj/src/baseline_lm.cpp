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

#include "nnir/baseline_lm.hpp"

#include <cmath>
#include <limits>

#include "nnir/errors.hpp"

namespace nnir {

CountLM::CountLM(int order) : order_(order) {
  if (order < 1) throw UsageError("n-gram order must be >= 1");
}

void CountLM::add_sequence(std::span<const TermId> seq) {
  const std::size_t ctx_len = static_cast<std::size_t>(order_ - 1);
  if (seq.size() < static_cast<std::size_t>(order_)) return;
  for (std::size_t i = ctx_len; i < seq.size(); ++i) {
    std::vector<TermId> ctx(seq.begin() + static_cast<std::ptrdiff_t>(i - ctx_len),
                            seq.begin() + static_cast<std::ptrdiff_t>(i));
    auto& table = tables_[std::move(ctx)];
    ++table.counts[seq[i]];
    ++table.total;
  }
}

void CountLM::merge(const CountLM& other) {
  if (other.order_ != order_) throw UsageError("cannot merge count models of different order");
  for (const auto& [ctx, t] : other.tables_) {
    auto& mine = tables_[ctx];
    for (const auto& [term, c] : t.counts) mine.counts[term] += c;
    mine.total += t.total;
  }
}

double CountLM::prob(TermId t, std::span<const TermId> context) const {
  if (context.size() != static_cast<std::size_t>(order_ - 1)) {
    throw UsageError("context length does not match model order");
  }
  auto it = tables_.find(std::vector<TermId>(context.begin(), context.end()));
  if (it == tables_.end() || it->second.total == 0) return 0.0;
  auto jt = it->second.counts.find(t);
  if (jt == it->second.counts.end()) return 0.0;
  return static_cast<double>(jt->second) / static_cast<double>(it->second.total);
}

CountLM estimate_count_lm(std::span<const TermId> term_ids, int order) {
  CountLM lm(order);
  lm.add_sequence(term_ids);
  return lm;
}

CountLM estimate_collection_lm(std::span<const std::vector<TermId>> docs, int order) {
  CountLM lm(order);
  for (const auto& d : docs) lm.add_sequence(d);
  return lm;
}

double jm_log_prob(std::span<const TermId> query, const CountLM& doc_lm, const CountLM& coll_lm,
                   double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw UsageError("lambda must lie in [0, 1]");
  if (doc_lm.order() != coll_lm.order()) throw UsageError("document and collection order differ");
  const std::size_t ctx_len = static_cast<std::size_t>(doc_lm.order() - 1);
  double score = 0.0;
  for (std::size_t i = ctx_len; i < query.size(); ++i) {
    auto ctx = query.subspan(i - ctx_len, ctx_len);
    const double p = (1.0 - lambda) * doc_lm.prob(query[i], ctx) +
                     lambda * coll_lm.prob(query[i], ctx);
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    score += std::log(p);
  }
  return score;
}

}  // namespace nnir
