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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "nnir/errors.hpp"
#include "nnir/inverted_index.hpp"

using namespace nnir;

namespace {

Document doc_of(std::string id, std::vector<std::string> tokens) {
  return Document{std::move(id), std::move(tokens), {}};
}

std::vector<TermId> q_of(const InvertedIndex& idx, std::vector<std::string> stems) {
  return idx.encode_query(stems);
}

}  // namespace

TEST_CASE("bm25: hand arithmetic example gives ln 2") {
  std::vector<Document> docs{doc_of("d1", {"x", "y"}), doc_of("d2", {"z", "w"})};
  auto idx = InvertedIndex::build(docs);
  CHECK(idx.avgdl() == 2.0);
  const auto q = q_of(idx, {"x"});
  CHECK(idx.idf(q[0]) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(idx.bm25_score(q, "d1") == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(idx.bm25_score(q, "d2") == 0.0);
  CHECK(idx.bm25_score({}, "d1") == 0.0);
  CHECK_THROWS_AS(idx.bm25_score(q, "nope"), DataError);
}

TEST_CASE("bm25: additive over terms and order invariant") {
  std::vector<Document> docs{doc_of("d1", {"x", "y", "x", "z"}), doc_of("d2", {"y", "y"}),
                             doc_of("d3", {"z"})};
  auto idx = InvertedIndex::build(docs);
  const auto xy = q_of(idx, {"x", "y"});
  const auto yx = q_of(idx, {"y", "x"});
  const auto x = q_of(idx, {"x"});
  const auto y = q_of(idx, {"y"});
  for (const char* d : {"d1", "d2", "d3"}) {
    CHECK(idx.bm25_score(xy, d) == doctest::Approx(idx.bm25_score(x, d) + idx.bm25_score(y, d)));
    CHECK(idx.bm25_score(xy, d) == idx.bm25_score(yx, d));
  }
}

TEST_CASE("index invariants") {
  std::vector<Document> docs{doc_of("b", {"x", "y", "x"}), doc_of("a", {"y"}), doc_of("c", {})};
  auto idx = InvertedIndex::build(docs);
  std::uint64_t total = 0;
  for (std::uint32_t d = 0; d < idx.num_docs(); ++d) total += idx.doc_length(d);
  CHECK(total == idx.total_tokens());
  CHECK(total == 4);
  for (TermId t = 0; t < idx.vocabulary().word_count(); ++t) {
    auto p = idx.postings(t);
    CHECK(std::is_sorted(p.begin(), p.end(), [](auto& l, auto& r) { return l.doc < r.doc; }));
  }
  std::vector<Document> dup{doc_of("a", {"x"}), doc_of("a", {"y"})};
  CHECK_THROWS_AS(InvertedIndex::build(dup), DataError);
}

TEST_CASE("retrieve_topk examples") {
  std::vector<Document> docs{doc_of("d2", {"x", "y"}), doc_of("d1", {"y", "x"}),
                             doc_of("d3", {"x", "x", "x", "z"}), doc_of("d4", {"z"})};
  auto idx = InvertedIndex::build(docs);
  const auto q = q_of(idx, {"x"});
  auto top1 = idx.retrieve_topk(q, 1);
  REQUIRE(top1.size() == 1);
  CHECK(top1[0].doc_id == "d3");
  auto all = idx.retrieve_topk(q, 100);
  REQUIRE(all.size() == 3);  // d4 matches nothing
  CHECK(all[1].doc_id == "d1");  // tie with d2, lower id first
  CHECK(all[2].doc_id == "d2");
  CHECK(all[1].score == all[2].score);
}

TEST_CASE("retrieve_topk equals a brute-force full sort") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Document> docs;
    const int n = 5 + static_cast<int>(rng() % 20);
    for (int d = 0; d < n; ++d) {
      Document doc{"doc" + std::to_string(rng() % 1000) + "_" + std::to_string(d), {}, {}};
      const int len = 1 + static_cast<int>(rng() % 12);
      for (int i = 0; i < len; ++i) doc.tokens.push_back(std::string(1, static_cast<char>('a' + rng() % 6)));
      docs.push_back(std::move(doc));
    }
    auto idx = InvertedIndex::build(docs);
    std::vector<std::string> stems;
    for (int i = 0; i < 1 + static_cast<int>(rng() % 3); ++i) stems.push_back(std::string(1, static_cast<char>('a' + rng() % 7)));
    const auto q = idx.encode_query(stems);
    const std::size_t k = 1 + rng() % 10;

    std::vector<ScoredDoc> brute;
    for (const auto& d : docs) {
      const double s = idx.bm25_score(q, d.doc_id);
      if (s > 0.0) brute.push_back({d.doc_id, s});
    }
    std::sort(brute.begin(), brute.end(), [](const ScoredDoc& l, const ScoredDoc& r) {
      if (l.score != r.score) return l.score > r.score;
      return l.doc_id < r.doc_id;
    });
    if (brute.size() > k) brute.resize(k);
    const auto got = idx.retrieve_topk(q, k);
    REQUIRE(got.size() == brute.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].doc_id == brute[i].doc_id);
      CHECK(got[i].score == doctest::Approx(brute[i].score).epsilon(1e-12));
    }
  }
}

TEST_CASE("index save/load round trip") {
  std::vector<Document> docs{doc_of("d1", {"x", "y", "x"}), doc_of("d2", {"z", "y"})};
  auto idx = InvertedIndex::build(docs);
  const auto path = std::filesystem::temp_directory_path() / "nnir_test_index.bin";
  idx.save(path);
  auto back = InvertedIndex::load(path);
  CHECK(back.vocabulary() == idx.vocabulary());
  CHECK(back.num_docs() == 2);
  CHECK(back.avgdl() == idx.avgdl());
  const auto q = q_of(idx, {"x", "y"});
  CHECK(back.bm25_score(q, "d1") == idx.bm25_score(q, "d1"));
  {
    std::ofstream out(path, std::ios::binary);
    out << "garbage";
  }
  CHECK_THROWS_AS(InvertedIndex::load(path), DataError);
}
