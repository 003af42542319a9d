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
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nnir/corpus.hpp"

namespace nnir {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.5;
};

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;
};

/// Orders by descending score, ties by ascending doc_id.
bool ranks_before(const ScoredDoc& a, const ScoredDoc& b);

/// Document-at-a-time postings over the retrieval vocabulary (every stem,
/// no frequency cutoff). Also keeps each document's id sequence so unigram
/// document models can be rebuilt at rerank time.
class InvertedIndex {
 public:
  struct Posting {
    std::uint32_t doc = 0;  // internal document index
    std::uint32_t tf = 0;
  };

  static InvertedIndex build(std::span<const Document> docs);

  const Vocabulary& vocabulary() const { return vocab_; }
  std::size_t num_docs() const { return doc_ids_.size(); }
  double avgdl() const { return avgdl_; }
  std::uint64_t total_tokens() const { return total_tokens_; }

  const std::string& doc_id(std::uint32_t doc) const { return doc_ids_.at(doc); }
  std::optional<std::uint32_t> find_doc(const std::string& doc_id) const;
  std::uint32_t doc_length(std::uint32_t doc) const { return doc_lengths_.at(doc); }
  std::span<const TermId> doc_terms(std::uint32_t doc) const { return doc_terms_.at(doc); }
  std::span<const Posting> postings(TermId t) const { return postings_.at(t); }
  std::size_t df(TermId t) const { return t < postings_.size() ? postings_[t].size() : 0; }

  /// ln(1 + (N - df + 0.5) / (df + 0.5)); 0 when df = 0.
  double idf(TermId t) const;

  /// Okapi BM25 of one document; throws DataError for an unknown doc id.
  double bm25_score(std::span<const TermId> query, const std::string& doc_id,
                    const Bm25Params& p = {}) const;

  /// Top-k by BM25 via postings traversal; documents matching no query term
  /// are omitted.
  std::vector<ScoredDoc> retrieve_topk(std::span<const TermId> query, std::size_t k,
                                       const Bm25Params& p = {}) const;

  /// Encodes query stems against the retrieval vocabulary (unknown stems dropped).
  std::vector<TermId> encode_query(std::span<const std::string> stems) const {
    return encode(stems, vocab_);
  }

  void save(const std::filesystem::path& path) const;
  static InvertedIndex load(const std::filesystem::path& path);

 private:
  double term_weight(std::uint32_t tf, std::uint32_t dl, double idf, const Bm25Params& p) const;

  Vocabulary vocab_;
  std::vector<std::string> doc_ids_;
  std::unordered_map<std::string, std::uint32_t> doc_lookup_;
  std::vector<std::uint32_t> doc_lengths_;
  std::vector<std::vector<TermId>> doc_terms_;
  std::vector<std::vector<Posting>> postings_;
  std::uint64_t total_tokens_ = 0;
  double avgdl_ = 0.0;
};

}  // namespace nnir
