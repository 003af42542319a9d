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
#include <string>
#include <vector>

#include "nnir/evaluation.hpp"

namespace nnir {

/// Markov-grammar test collection. Words are pronounceable strings that the
/// stemmer leaves unchanged. Each topic owns a handful of words and a
/// successor map over them; documents follow their topic's chain (with
/// background words and some tokens borrowed from a second topic), and
/// queries are short successor chains, so word order carries signal.
struct SyntheticConfig {
  std::size_t vocab_size = 200;
  std::size_t background_words = 40;
  std::size_t num_topics = 50;
  std::size_t words_per_topic = 8;
  std::size_t num_docs = 500;
  std::size_t min_doc_len = 30;
  std::size_t max_doc_len = 90;
  std::size_t query_len = 3;
  double successor_prob = 0.6;  // chance the next word is the topic successor
  double topic_word_prob = 0.5; // otherwise: topic word vs background word
  double secondary_share = 0.3; // fraction of tokens drawn from a second topic
  std::uint64_t seed = 42;
};

struct SyntheticDoc {
  std::string doc_id;
  std::string text;
  std::size_t topic = 0;
  std::size_t secondary_topic = 0;
};

struct SyntheticCollection {
  std::vector<SyntheticDoc> docs;
  std::map<std::string, std::string> topics;  // topic id -> query text
  Qrels qrels;
};

SyntheticCollection generate_synthetic(const SyntheticConfig& cfg);

/// Writes corpus.jsonl, topics.tsv and qrels.txt under dir.
void write_synthetic(const SyntheticCollection& c, const std::filesystem::path& dir);

/// Documents over `filler` random words where every occurrence of "alpha"
/// is immediately followed by "beta".
std::vector<SyntheticDoc> generate_grammar_corpus(std::size_t num_docs, std::size_t doc_len,
                                                  std::size_t filler, std::uint64_t seed);

}  // namespace nnir
