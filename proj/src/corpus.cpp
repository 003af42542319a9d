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

#include "nnir/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nnir/errors.hpp"
#include "nnir/io.hpp"
#include "nnir/porter_stemmer.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nnir {

namespace {

bool is_alnum_ascii(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

char to_lower_ascii(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (is_alnum_ascii(static_cast<unsigned char>(ch))) {
      cur.push_back(to_lower_ascii(ch));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  auto words = split_words(text);
  for (auto& w : words) w = porter_stem(w);
  // A lone "s" stems to nothing.
  std::erase_if(words, [](const std::string& w) { return w.empty(); });
  return words;
}

StopWords load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stop word list: " + path.string());
  StopWords out;
  std::string line;
  while (std::getline(in, line)) {
    for (auto& t : tokenize(line)) out.insert(std::move(t));
  }
  return out;
}

Document make_document(std::string doc_id, std::string_view text, const StopWords* stopwords) {
  Document d;
  d.doc_id = std::move(doc_id);
  d.tokens = tokenize(text);
  if (stopwords != nullptr && !stopwords->empty()) {
    std::erase_if(d.tokens, [&](const std::string& t) { return stopwords->contains(t); });
  }
  return d;
}

std::vector<Document> read_jsonl_corpus(const std::filesystem::path& path,
                                        const StopWords* stopwords) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus: " + path.string());
  std::vector<Document> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("doc_id") || !rec.contains("text") ||
        !rec["doc_id"].is_string() || !rec["text"].is_string()) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": record needs string fields doc_id and text");
    }
    docs.push_back(make_document(rec["doc_id"].get<std::string>(),
                                 rec["text"].get<std::string>(), stopwords));
  }
  return docs;
}

std::vector<Document> read_trec_corpus(const std::filesystem::path& path,
                                       const StopWords* stopwords) {
  const std::string all = io::read_text_file(path);
  std::vector<Document> docs;
  std::size_t pos = 0;
  auto between = [&](std::string_view hay, std::string_view open, std::string_view close,
                     std::size_t from, std::size_t& end) -> std::optional<std::string_view> {
    const auto a = hay.find(open, from);
    if (a == std::string_view::npos) return std::nullopt;
    const auto b = hay.find(close, a + open.size());
    if (b == std::string_view::npos) return std::nullopt;
    end = b + close.size();
    return hay.substr(a + open.size(), b - a - open.size());
  };
  while (true) {
    std::size_t doc_end = 0;
    auto body = between(all, "<DOC>", "</DOC>", pos, doc_end);
    if (!body) break;
    pos = doc_end;
    std::size_t e = 0;
    auto docno = between(*body, "<DOCNO>", "</DOCNO>", 0, e);
    if (!docno) throw DataError(path.string() + ": <DOC> without <DOCNO>");
    auto id = io::split_ws(*docno);
    if (id.size() != 1) throw DataError(path.string() + ": malformed <DOCNO>");
    std::string text;
    std::size_t from = 0;
    while (auto t = between(*body, "<TEXT>", "</TEXT>", from, e)) {
      text.append(*t);
      text.push_back(' ');
      from = e;
    }
    docs.push_back(make_document(id.front(), text, stopwords));
  }
  return docs;
}

std::vector<Document> read_corpus(const std::filesystem::path& path, const StopWords* stopwords) {
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json") return read_jsonl_corpus(path, stopwords);
  return read_trec_corpus(path, stopwords);
}

std::optional<TermId> Vocabulary::find(std::string_view stem) const {
  auto it = index_.find(std::string(stem));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::word(TermId id) const {
  static const std::string kPad(kPaddingToken);
  if (id == padding_id()) return kPad;
  return words_.at(id);
}

std::uint64_t Vocabulary::frequency(TermId id) const {
  if (id == padding_id()) return 0;
  return freqs_.at(id);
}

Vocabulary Vocabulary::from_counts(std::map<std::string, std::uint64_t> counts,
                                   std::uint64_t min_count) {
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : counts) {
    if (c >= min_count) kept.emplace_back(w, c);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary v;
  v.min_count_ = min_count;
  for (auto& [w, c] : kept) {
    v.index_.emplace(w, static_cast<TermId>(v.words_.size()));
    v.words_.push_back(std::move(w));
    v.freqs_.push_back(c);
    v.total_ += c;
  }
  return v;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  io::write_atomically(path, [&](std::ostream& out) {
    out << "# min_count\t" << min_count_ << '\n';
    for (std::size_t i = 0; i < words_.size(); ++i) {
      out << words_[i] << '\t' << i << '\t' << freqs_[i] << '\n';
    }
    out << kPaddingToken << '\t' << padding_id() << '\t' << 0 << '\n';
  });
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary: " + path.string());
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t min_count = 1;
  std::string line;
  std::size_t lineno = 0;
  std::size_t expected_id = 0;
  bool saw_padding = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("# min_count\t", 0) == 0) {
      min_count = std::stoull(line.substr(12));
      continue;
    }
    auto f = io::split_ws(line);
    if (f.size() != 3) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected 3 fields");
    }
    if (std::stoull(f[1]) != expected_id++) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": ids must be dense");
    }
    if (f[0] == kPaddingToken) {
      saw_padding = true;
      continue;
    }
    counts[f[0]] = std::stoull(f[2]);
  }
  if (!saw_padding) throw DataError(path.string() + ": missing padding entry");
  auto v = from_counts(std::move(counts), min_count);
  if (v.size() != expected_id) throw DataError(path.string() + ": inconsistent vocabulary");
  return v;
}

Vocabulary build_vocabulary(std::span<const Document> docs, std::uint64_t min_count) {
  if (min_count < 1) throw UsageError("min_count must be >= 1");
  int shards = 1;
#ifdef _OPENMP
  shards = omp_get_max_threads();
#endif
  std::vector<std::unordered_map<std::string, std::uint64_t>> partial(shards);
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(static) num_threads(shards)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    int shard = 0;
#ifdef _OPENMP
    shard = omp_get_thread_num();
#endif
    auto& counts = partial[shard];
    for (const auto& t : docs[i].tokens) ++counts[t];
  }
  std::map<std::string, std::uint64_t> merged;
  for (auto& p : partial) {
    for (auto& [w, c] : p) merged[w] += c;
  }
  if (merged.empty()) throw DataError("empty corpus");
  return Vocabulary::from_counts(std::move(merged), min_count);
}

std::vector<TermId> encode(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::vector<TermId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (auto id = vocab.find(t)) out.push_back(*id);
  }
  return out;
}

void encode_all(std::span<Document> docs, const Vocabulary& vocab) {
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) docs[i].term_ids = encode(docs[i].tokens, vocab);
}

}  // namespace nnir
