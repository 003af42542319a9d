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

#include "nnir/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "nnir/corpus.hpp"
#include "nnir/errors.hpp"
#include "nnir/io.hpp"
#include "nnir/porter_stemmer.hpp"

namespace nnir {

namespace {

std::vector<std::string> make_words(std::size_t n, std::mt19937_64& rng) {
  static constexpr std::string_view kCons = "bdfgklmnprstvz";
  static constexpr std::string_view kVow = "aeiou";
  std::set<std::string> seen;
  std::vector<std::string> words;
  while (words.size() < n) {
    const std::size_t syllables = 2 + rng() % 2;
    std::string w;
    for (std::size_t s = 0; s < syllables; ++s) {
      w.push_back(kCons[rng() % kCons.size()]);
      w.push_back(kVow[rng() % kVow.size()]);
    }
    if (porter_stem(w) != w || seen.contains(w)) continue;
    seen.insert(w);
    words.push_back(std::move(w));
  }
  return words;
}

struct Topic {
  std::vector<std::size_t> words;
  std::map<std::size_t, std::size_t> successor;
};

}  // namespace

SyntheticCollection generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.background_words >= cfg.vocab_size) throw UsageError("background must be smaller than the vocabulary");
  const std::size_t topical = cfg.vocab_size - cfg.background_words;
  if (cfg.words_per_topic < 2 || cfg.words_per_topic > topical) throw UsageError("bad words_per_topic");
  if (cfg.num_topics < 1 || cfg.num_docs < cfg.num_topics) throw UsageError("need at least one doc per topic");
  if (cfg.min_doc_len < 1 || cfg.max_doc_len < cfg.min_doc_len) throw UsageError("bad document lengths");

  std::mt19937_64 rng(cfg.seed);
  const auto words = make_words(cfg.vocab_size, rng);

  // Zipf-like weights for background words.
  std::vector<double> bg_weights(cfg.background_words);
  for (std::size_t i = 0; i < bg_weights.size(); ++i) bg_weights[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::size_t> background(bg_weights.begin(), bg_weights.end());

  std::vector<Topic> topics(cfg.num_topics);
  std::vector<std::size_t> pool(topical);
  std::iota(pool.begin(), pool.end(), cfg.background_words);
  for (auto& t : topics) {
    std::shuffle(pool.begin(), pool.end(), rng);
    t.words.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(cfg.words_per_topic));
    auto order = t.words;
    std::shuffle(order.begin(), order.end(), rng);
    // A single cycle through the topic words.
    for (std::size_t i = 0; i < order.size(); ++i) t.successor[order[i]] = order[(i + 1) % order.size()];
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto next_word = [&](const Topic& t, std::optional<std::size_t> prev) {
    if (prev && t.successor.contains(*prev) && unit(rng) < cfg.successor_prob) {
      return t.successor.at(*prev);
    }
    if (unit(rng) < cfg.topic_word_prob) return t.words[rng() % t.words.size()];
    return background(rng);
  };

  SyntheticCollection out;
  for (std::size_t d = 0; d < cfg.num_docs; ++d) {
    SyntheticDoc doc;
    doc.doc_id = "SYN-" + std::to_string(10000 + d);
    doc.topic = d % cfg.num_topics;
    doc.secondary_topic = (doc.topic + 1 + rng() % (cfg.num_topics > 1 ? cfg.num_topics - 1 : 1)) % cfg.num_topics;
    const std::size_t len = cfg.min_doc_len + rng() % (cfg.max_doc_len - cfg.min_doc_len + 1);
    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < len; ++i) {
      const bool secondary = cfg.num_topics > 1 && unit(rng) < cfg.secondary_share;
      const auto w = next_word(topics[secondary ? doc.secondary_topic : doc.topic], prev);
      if (!doc.text.empty()) doc.text.push_back(' ');
      doc.text += words[w];
      prev = w;
    }
    out.docs.push_back(std::move(doc));
  }

  for (std::size_t t = 0; t < cfg.num_topics; ++t) {
    const std::string id = std::to_string(101 + t);
    std::size_t w = topics[t].words[rng() % topics[t].words.size()];
    std::string q = words[w];
    for (std::size_t i = 1; i < cfg.query_len; ++i) {
      w = topics[t].successor.at(w);
      q += " " + words[w];
    }
    out.topics[id] = q;
    auto& judged = out.qrels.judged[id];
    auto& relevant = out.qrels.relevant[id];
    for (const auto& doc : out.docs) {
      if (doc.topic == t) {
        judged.insert(doc.doc_id);
        relevant.insert(doc.doc_id);
      } else if (doc.secondary_topic == t) {
        judged.insert(doc.doc_id);
      }
    }
  }
  return out;
}

void write_synthetic(const SyntheticCollection& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  io::write_atomically(dir / "corpus.jsonl", [&](std::ostream& out) {
    for (const auto& d : c.docs) {
      out << nlohmann::json{{"doc_id", d.doc_id}, {"text", d.text}}.dump() << '\n';
    }
  });
  write_topics(dir / "topics.tsv", c.topics);
  write_qrels(dir / "qrels.txt", c.qrels);
}

std::vector<SyntheticDoc> generate_grammar_corpus(std::size_t num_docs, std::size_t doc_len,
                                                  std::size_t filler, std::uint64_t seed) {
  if (filler < 1 || doc_len < 2) throw UsageError("grammar corpus needs filler words and length >= 2");
  std::mt19937_64 rng(seed);
  auto vocab = make_words(filler + 1, rng);
  std::erase(vocab, std::string("beta"));
  vocab.resize(filler);
  std::vector<SyntheticDoc> docs;
  for (std::size_t d = 0; d < num_docs; ++d) {
    SyntheticDoc doc;
    doc.doc_id = "G-" + std::to_string(d);
    std::vector<std::string> toks;
    while (toks.size() < doc_len) {
      if (rng() % 5 == 0) {
        toks.emplace_back("alpha");
        toks.emplace_back("beta");
      } else {
        toks.push_back(vocab[rng() % vocab.size()]);
      }
    }
    for (const auto& t : toks) {
      if (!doc.text.empty()) doc.text.push_back(' ');
      doc.text += t;
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace nnir
