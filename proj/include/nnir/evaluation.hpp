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

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace nnir {

/// Binary relevance judgments: topic -> relevant doc ids. Judged
/// non-relevant documents are kept separately so files round-trip.
struct Qrels {
  std::map<std::string, std::set<std::string>> relevant;
  std::map<std::string, std::set<std::string>> judged;

  const std::set<std::string>* relevant_for(const std::string& topic) const {
    auto it = relevant.find(topic);
    return it == relevant.end() ? nullptr : &it->second;
  }
};

/// Whitespace-separated `topic 0 docid rel`; rel >= 1 is relevant.
/// Throws DataError with the line number on malformed input.
Qrels read_qrels(const std::filesystem::path& path);
void write_qrels(const std::filesystem::path& path, const Qrels& qrels);

struct RunEntry {
  std::string doc_id;
  double score = 0.0;
};

/// Ranked results per topic; entries are stored in rank order.
struct Run {
  std::string tag;
  std::map<std::string, std::vector<RunEntry>> topics;
};

/// `topic Q0 docid rank score tag`, ranks starting at 1.
void write_run(const std::filesystem::path& path, const Run& run);
Run read_run(const std::filesystem::path& path);

/// `topic_id<TAB>query text`, one topic per line.
std::map<std::string, std::string> read_topics(const std::filesystem::path& path);
void write_topics(const std::filesystem::path& path, const std::map<std::string, std::string>& topics);

/// Mean over relevant documents of precision at each relevant hit; relevant
/// documents never retrieved contribute 0. nullopt when `relevant` is empty.
std::optional<double> average_precision(std::span<const std::string> ranking,
                                        const std::set<std::string>& relevant);

struct MapGmap {
  double map = 0.0;
  double gmap = 0.0;
};

inline constexpr double kGmapEpsilon = 1e-5;

/// MAP = mean, GMAP = exp(mean(log(max(ap, eps)))). Requires at least one value.
MapGmap map_gmap(std::span<const double> aps, double eps = kGmapEpsilon);

/// Mean over topics of (specific - generic). Throws DataError when the topic
/// sets differ.
double delta_report(const std::map<std::string, double>& ap_specific,
                    const std::map<std::string, double>& ap_generic);

struct EvalReport {
  std::string tag;
  std::map<std::string, double> per_topic_ap;
  std::vector<std::string> skipped_topics;  // no relevant documents
  MapGmap summary;
};

/// Evaluates every qrels topic with at least one relevant document; a topic
/// missing from the run scores AP 0.
EvalReport evaluate_run(const Run& run, const Qrels& qrels);

/// One cell of a sweep table; nullopt renders as an explicit failure.
struct SweepCell {
  std::string model;
  double lambda = 0.0;
  std::optional<MapGmap> value;
  std::string note;
};

/// Fixed-width text table: one row per model, MAP and GMAP columns per lambda.
std::string render_sweep_table(std::span<const SweepCell> cells);

/// One JSON object per line: {"model", "lambda", "map", "gmap"} with null
/// metrics and an "error" field for failed cells.
std::string render_sweep_jsonl(std::span<const SweepCell> cells);

/// Shortest round-trip decimal form of a double.
std::string format_real(double x);

}  // namespace nnir
