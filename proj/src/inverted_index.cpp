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

#include "nnir/inverted_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "nnir/errors.hpp"
#include "nnir/io.hpp"

namespace nnir {

namespace {
constexpr std::string_view kIndexMagic = "NNIRIDX1";
constexpr std::uint32_t kIndexVersion = 1;
}  // namespace

bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id < b.doc_id;
}

InvertedIndex InvertedIndex::build(std::span<const Document> docs) {
  InvertedIndex idx;
  idx.vocab_ = build_vocabulary(docs, 1);
  idx.postings_.resize(idx.vocab_.word_count());
  for (std::uint32_t d = 0; d < docs.size(); ++d) {
    const auto& doc = docs[d];
    if (!idx.doc_lookup_.emplace(doc.doc_id, d).second) {
      throw DataError("duplicate doc_id: " + doc.doc_id);
    }
    idx.doc_ids_.push_back(doc.doc_id);
    auto terms = encode(doc.tokens, idx.vocab_);
    std::map<TermId, std::uint32_t> tf;
    for (auto t : terms) ++tf[t];
    for (auto [t, c] : tf) idx.postings_[t].push_back({d, c});
    idx.doc_lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
    idx.total_tokens_ += terms.size();
    idx.doc_terms_.push_back(std::move(terms));
  }
  idx.avgdl_ = docs.empty() ? 0.0
                            : static_cast<double>(idx.total_tokens_) /
                                  static_cast<double>(docs.size());
  return idx;
}

std::optional<std::uint32_t> InvertedIndex::find_doc(const std::string& doc_id) const {
  auto it = doc_lookup_.find(doc_id);
  if (it == doc_lookup_.end()) return std::nullopt;
  return it->second;
}

double InvertedIndex::idf(TermId t) const {
  const double n = static_cast<double>(num_docs());
  const double df = static_cast<double>(this->df(t));
  if (df == 0.0) return 0.0;
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double InvertedIndex::term_weight(std::uint32_t tf, std::uint32_t dl, double idf,
                                  const Bm25Params& p) const {
  const double norm = p.k1 * (1.0 - p.b + p.b * static_cast<double>(dl) / avgdl_);
  return idf * static_cast<double>(tf) * (p.k1 + 1.0) / (static_cast<double>(tf) + norm);
}

double InvertedIndex::bm25_score(std::span<const TermId> query, const std::string& doc_id,
                                 const Bm25Params& p) const {
  auto d = find_doc(doc_id);
  if (!d) throw DataError("unknown doc_id: " + doc_id);
  double score = 0.0;
  for (auto t : query) {
    if (t >= postings_.size()) continue;
    const auto& plist = postings_[t];
    auto it = std::lower_bound(plist.begin(), plist.end(), *d,
                               [](const Posting& a, std::uint32_t doc) { return a.doc < doc; });
    if (it == plist.end() || it->doc != *d) continue;
    score += term_weight(it->tf, doc_lengths_[*d], idf(t), p);
  }
  return score;
}

std::vector<ScoredDoc> InvertedIndex::retrieve_topk(std::span<const TermId> query, std::size_t k,
                                                    const Bm25Params& p) const {
  if (k < 1) throw UsageError("k must be >= 1");
  std::vector<double> acc(num_docs(), 0.0);
  std::vector<char> hit(num_docs(), 0);
  for (auto t : query) {
    if (t >= postings_.size()) continue;
    const double w = idf(t);
    for (const auto& post : postings_[t]) {
      acc[post.doc] += term_weight(post.tf, doc_lengths_[post.doc], w, p);
      hit[post.doc] = 1;
    }
  }
  std::vector<ScoredDoc> out;
  for (std::uint32_t d = 0; d < acc.size(); ++d) {
    if (hit[d] && acc[d] != 0.0) out.push_back({doc_ids_[d], acc[d]});
  }
  const std::size_t keep = std::min(k, out.size());
  std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(keep), out.end(),
                    ranks_before);
  out.resize(keep);
  return out;
}

void InvertedIndex::save(const std::filesystem::path& path) const {
  io::write_atomically(
      path,
      [&](std::ostream& out) {
        io::put_magic(out, kIndexMagic, kIndexVersion);
        io::put_u64(out, vocab_.word_count());
        for (TermId t = 0; t < vocab_.word_count(); ++t) {
          io::put_string(out, vocab_.word(t));
          io::put_u64(out, vocab_.frequency(t));
        }
        io::put_u64(out, doc_ids_.size());
        for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
          io::put_string(out, doc_ids_[d]);
          io::put_u64(out, doc_terms_[d].size());
          for (auto t : doc_terms_[d]) io::put_u32(out, t);
        }
      },
      true);
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open index: " + path.string());
  const auto version = io::expect_magic(in, kIndexMagic);
  if (version != kIndexVersion) throw DataError("unsupported index version");
  const auto nwords = io::get_u64(in);
  std::map<std::string, std::uint64_t> counts;
  std::vector<std::string> words;
  for (std::uint64_t i = 0; i < nwords; ++i) {
    auto w = io::get_string(in);
    counts[w] = io::get_u64(in);
    words.push_back(std::move(w));
  }
  // Postings, lengths and lookups are derived; only the vocabulary and the
  // encoded documents are stored.
  InvertedIndex idx;
  idx.vocab_ = Vocabulary::from_counts(std::move(counts), 1);
  for (TermId t = 0; t < words.size(); ++t) {
    if (idx.vocab_.word(t) != words[t]) throw DataError("index vocabulary order mismatch");
  }
  idx.postings_.resize(idx.vocab_.word_count());
  const auto ndocs = io::get_u64(in);
  for (std::uint32_t d = 0; d < ndocs; ++d) {
    auto id = io::get_string(in);
    const auto len = io::get_u64(in);
    std::vector<TermId> terms(len);
    for (auto& t : terms) {
      t = io::get_u32(in);
      if (t >= nwords) throw DataError("index term id out of range");
    }
    std::map<TermId, std::uint32_t> tf;
    for (auto t : terms) ++tf[t];
    for (auto [t, c] : tf) idx.postings_[t].push_back({d, c});
    idx.doc_lookup_.emplace(id, d);
    idx.doc_ids_.push_back(std::move(id));
    idx.doc_lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
    idx.total_tokens_ += terms.size();
    idx.doc_terms_.push_back(std::move(terms));
  }
  idx.avgdl_ = ndocs == 0 ? 0.0 : static_cast<double>(idx.total_tokens_) / static_cast<double>(ndocs);
  return idx;
}

}  // namespace nnir
