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

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "nnir/baseline_lm.hpp"
#include "nnir/errors.hpp"

using namespace nnir;

namespace {
constexpr TermId a = 0, b = 1, c = 2;
}

TEST_CASE("count lm: unigram and bigram examples") {
  std::vector<TermId> aba{a, b, a};
  auto uni = estimate_count_lm(aba, 1);
  CHECK(uni.unigram(a) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(uni.unigram(b) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(uni.unigram(c) == 0.0);

  std::vector<TermId> aab{a, a, b};
  auto bi = estimate_count_lm(aab, 2);
  std::vector<TermId> ctx{a};
  CHECK(bi.prob(a, ctx) == 0.5);
  CHECK(bi.prob(b, ctx) == 0.5);
  std::vector<TermId> unseen{b};
  CHECK(bi.prob(a, unseen) == 0.0);
  CHECK_THROWS_AS(bi.prob(a, {}), UsageError);
}

TEST_CASE("count lm: collection of two docs") {
  std::vector<std::vector<TermId>> docs{{a}, {b}};
  auto coll = estimate_collection_lm(docs, 1);
  CHECK(coll.unigram(a) == 0.5);
  CHECK(coll.unigram(b) == 0.5);
  // No bigram spans the document boundary.
  auto coll2 = estimate_collection_lm(docs, 2);
  CHECK(coll2.tables().empty());
}

TEST_CASE("count lm: order longer than the sequence gives empty tables") {
  std::vector<TermId> s{a, b};
  auto lm = estimate_count_lm(s, 4);
  CHECK(lm.tables().empty());
  CHECK_THROWS_AS(estimate_count_lm(s, 0), UsageError);
}

TEST_CASE("count lm: per-context normalization") {
  std::mt19937_64 rng(5);
  for (int order = 1; order <= 3; ++order) {
    std::vector<TermId> seq(300);
    for (auto& t : seq) t = static_cast<TermId>(rng() % 7);
    auto lm = estimate_count_lm(seq, order);
    for (const auto& [ctx, table] : lm.tables()) {
      std::uint64_t total = 0;
      double sum = 0.0;
      for (const auto& [t, n] : table.counts) {
        total += n;
        sum += lm.prob(t, ctx);
      }
      CHECK(total == table.total);
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("jm_log_prob examples") {
  std::vector<TermId> doc{a, b, a};
  std::vector<TermId> coll_seq{a, b};
  auto d = estimate_count_lm(doc, 1);
  auto coll = estimate_count_lm(coll_seq, 1);
  std::vector<TermId> qa{a};
  CHECK(jm_log_prob(qa, d, coll, 0.5) == doctest::Approx(std::log(7.0 / 12.0)).epsilon(1e-14));

  // lambda = 1 depends only on the collection model.
  std::vector<TermId> other{b, b, b};
  auto d2 = estimate_count_lm(other, 1);
  std::vector<TermId> q{a, b};
  CHECK(jm_log_prob(q, d, coll, 1.0) == jm_log_prob(q, d2, coll, 1.0));

  // lambda = 0 with a term absent from the document.
  std::vector<TermId> qc{a};
  CHECK(jm_log_prob(qc, d2, coll, 0.0) == -std::numeric_limits<double>::infinity());

  CHECK_THROWS_AS(jm_log_prob(qa, d, coll, 1.5), UsageError);
  CHECK_THROWS_AS(jm_log_prob(qa, d, coll, -0.1), UsageError);
  auto bi = estimate_count_lm(doc, 2);
  CHECK_THROWS_AS(jm_log_prob(qa, bi, coll, 0.5), UsageError);
}

TEST_CASE("jm_log_prob: monotone toward the collection score when a term is unseen") {
  std::vector<TermId> doc{b, b};
  std::vector<TermId> coll_seq{a, b, c};
  auto d = estimate_count_lm(doc, 1);
  auto coll = estimate_count_lm(coll_seq, 1);
  std::vector<TermId> q{a, c};
  double prev = -std::numeric_limits<double>::infinity();
  for (double l = 0.05; l <= 0.951; l += 0.05) {
    const double s = jm_log_prob(q, d, coll, l);
    CHECK(s > prev);
    prev = s;
  }
}

TEST_CASE("jm_log_prob: bigram skips positions without a full context") {
  std::vector<TermId> doc{a, b, a, b};
  auto d = estimate_count_lm(doc, 2);
  auto coll = estimate_count_lm(doc, 2);
  std::vector<TermId> q{a, b};
  // Only the (a -> b) transition is scored; theta(b|a) = 1 for both models.
  CHECK(jm_log_prob(q, d, coll, 0.3) == 0.0);
}
