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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace nnir {

using TermId = std::uint32_t;

/// Lowercases, splits on runs of non-alphanumeric ASCII bytes and
/// Porter-stems each token. Bytes outside ASCII act as separators.
std::vector<std::string> tokenize(std::string_view text);

/// Same split and lowercasing as tokenize, without stemming.
std::vector<std::string> split_words(std::string_view text);

using StopWords = std::unordered_set<std::string>;

/// Loads one stop word per line; words are stemmed so they can be matched
/// against tokenize output.
StopWords load_stopwords(const std::filesystem::path& path);

struct Document {
  std::string doc_id;
  std::vector<std::string> tokens;  // stemmed
  std::vector<TermId> term_ids;     // filled by encode against a vocabulary
};

Document make_document(std::string doc_id, std::string_view text,
                       const StopWords* stopwords = nullptr);

/// Line-delimited JSON records: {"doc_id": "...", "text": "..."}.
std::vector<Document> read_jsonl_corpus(const std::filesystem::path& path,
                                        const StopWords* stopwords = nullptr);

/// Minimal TREC SGML: <DOC>, <DOCNO>, and one or more <TEXT> blocks per doc.
std::vector<Document> read_trec_corpus(const std::filesystem::path& path,
                                       const StopWords* stopwords = nullptr);

/// Chooses the reader from the extension (.jsonl / .json vs anything else
/// treated as TREC SGML).
std::vector<Document> read_corpus(const std::filesystem::path& path,
                                  const StopWords* stopwords = nullptr);

/// Stem -> dense id map with corpus frequencies. Word ids are assigned by
/// descending frequency, ties by lexicographic order; the padding token takes
/// the id right after the last word and has no frequency.
class Vocabulary {
 public:
  static constexpr std::string_view kPaddingToken = "<pad>";

  Vocabulary() = default;

  /// Number of real words (the Huffman leaves).
  std::size_t word_count() const { return words_.size(); }
  /// Words plus the padding token.
  std::size_t size() const { return words_.size() + 1; }
  TermId padding_id() const { return static_cast<TermId>(words_.size()); }
  std::uint64_t min_count() const { return min_count_; }

  std::optional<TermId> find(std::string_view stem) const;
  const std::string& word(TermId id) const;
  std::uint64_t frequency(TermId id) const;
  std::span<const std::uint64_t> frequencies() const { return freqs_; }
  std::uint64_t total_frequency() const { return total_; }

  /// `stem<TAB>id<TAB>frequency`, one line per id, padding last with freq 0.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  bool operator==(const Vocabulary& o) const {
    return words_ == o.words_ && freqs_ == o.freqs_ && min_count_ == o.min_count_;
  }

  /// Builds from (stem, count) pairs already filtered by min_count.
  static Vocabulary from_counts(std::map<std::string, std::uint64_t> counts,
                                std::uint64_t min_count);

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> freqs_;
  std::unordered_map<std::string, TermId> index_;
  std::uint64_t min_count_ = 1;
  std::uint64_t total_ = 0;
};

/// Counts stems over all documents (sharded across threads, merged in a
/// fixed order) and keeps those with frequency >= min_count.
/// Throws DataError("empty corpus") when the corpus has no tokens.
Vocabulary build_vocabulary(std::span<const Document> docs, std::uint64_t min_count);

/// Maps tokens to ids, dropping out-of-vocabulary stems.
std::vector<TermId> encode(std::span<const std::string> tokens, const Vocabulary& vocab);

/// Fills doc.term_ids for every document.
void encode_all(std::span<Document> docs, const Vocabulary& vocab);

}  // namespace nnir
