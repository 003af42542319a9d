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

#include "nnir/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nnir/errors.hpp"
#include "nnir/io.hpp"

namespace nnir {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t lineno,
                            const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + what);
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t lineno) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) malformed(path, lineno, "bad number '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    malformed(path, lineno, "bad number '" + s + "'");
  } catch (const std::out_of_range&) {
    malformed(path, lineno, "number out of range '" + s + "'");
  }
}

long parse_int(const std::string& s, const std::filesystem::path& path, std::size_t lineno) {
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    malformed(path, lineno, "bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

Qrels read_qrels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open qrels: " + path.string());
  Qrels q;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto f = io::split_ws(line);
    if (f.empty()) continue;
    if (f.size() != 4) malformed(path, lineno, "expected 'topic iter docid rel'");
    const long rel = parse_int(f[3], path, lineno);
    auto& judged = q.judged[f[0]];
    if (!judged.insert(f[2]).second) malformed(path, lineno, "duplicate judgment for " + f[2]);
    if (rel >= 1) q.relevant[f[0]].insert(f[2]);
  }
  return q;
}

void write_qrels(const std::filesystem::path& path, const Qrels& qrels) {
  io::write_atomically(path, [&](std::ostream& out) {
    for (const auto& [topic, docs] : qrels.judged) {
      const auto* rel = qrels.relevant_for(topic);
      for (const auto& d : docs) {
        out << topic << " 0 " << d << ' ' << (rel != nullptr && rel->contains(d) ? 1 : 0) << '\n';
      }
    }
  });
}

void write_run(const std::filesystem::path& path, const Run& run) {
  const std::string tag = run.tag.empty() ? "nnir" : run.tag;
  io::write_atomically(path, [&](std::ostream& out) {
    for (const auto& [topic, entries] : run.topics) {
      for (std::size_t i = 0; i < entries.size(); ++i) {
        out << topic << " Q0 " << entries[i].doc_id << ' ' << (i + 1) << ' '
            << format_real(entries[i].score) << ' ' << tag << '\n';
      }
    }
  });
}

Run read_run(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open run: " + path.string());
  Run run;
  std::map<std::string, std::vector<std::pair<long, RunEntry>>> ranked;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto f = io::split_ws(line);
    if (f.empty()) continue;
    if (f.size() != 6) malformed(path, lineno, "expected 'topic Q0 docid rank score tag'");
    const long rank = parse_int(f[3], path, lineno);
    const double score = parse_double(f[4], path, lineno);
    if (run.tag.empty()) run.tag = f[5];
    ranked[f[0]].push_back({rank, RunEntry{f[2], score}});
  }
  for (auto& [topic, rows] : ranked) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::set<std::string> seen;
    auto& out = run.topics[topic];
    for (auto& r : rows) {
      if (!seen.insert(r.second.doc_id).second) {
        throw DataError(path.string() + ": duplicate doc " + r.second.doc_id + " in topic " + topic);
      }
      out.push_back(std::move(r.second));
    }
  }
  return run;
}

std::map<std::string, std::string> read_topics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open topics: " + path.string());
  std::map<std::string, std::string> topics;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) malformed(path, lineno, "expected 'topic<TAB>query'");
    auto id = line.substr(0, tab);
    if (!topics.emplace(id, line.substr(tab + 1)).second) {
      malformed(path, lineno, "duplicate topic " + id);
    }
  }
  return topics;
}

void write_topics(const std::filesystem::path& path,
                  const std::map<std::string, std::string>& topics) {
  io::write_atomically(path, [&](std::ostream& out) {
    for (const auto& [id, q] : topics) out << id << '\t' << q << '\n';
  });
}

std::optional<double> average_precision(std::span<const std::string> ranking,
                                        const std::set<std::string>& relevant) {
  if (relevant.empty()) return std::nullopt;
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (relevant.contains(ranking[i])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

MapGmap map_gmap(std::span<const double> aps, double eps) {
  if (aps.empty()) throw UsageError("MAP/GMAP need at least one topic");
  double sum = 0.0;
  double log_sum = 0.0;
  for (double ap : aps) {
    sum += ap;
    log_sum += std::log(std::max(ap, eps));
  }
  const double n = static_cast<double>(aps.size());
  return {sum / n, std::exp(log_sum / n)};
}

double delta_report(const std::map<std::string, double>& ap_specific,
                    const std::map<std::string, double>& ap_generic) {
  if (ap_specific.size() != ap_generic.size()) throw DataError("delta report: topic sets differ");
  if (ap_specific.empty()) throw DataError("delta report: no topics");
  double sum = 0.0;
  for (const auto& [topic, ap] : ap_specific) {
    auto it = ap_generic.find(topic);
    if (it == ap_generic.end()) throw DataError("delta report: topic " + topic + " missing");
    sum += ap - it->second;
  }
  return sum / static_cast<double>(ap_specific.size());
}

EvalReport evaluate_run(const Run& run, const Qrels& qrels) {
  EvalReport rep;
  rep.tag = run.tag;
  std::vector<double> aps;
  for (const auto& [topic, judged] : qrels.judged) {
    const auto* rel = qrels.relevant_for(topic);
    if (rel == nullptr || rel->empty()) {
      rep.skipped_topics.push_back(topic);
      continue;
    }
    std::vector<std::string> ranking;
    if (auto it = run.topics.find(topic); it != run.topics.end()) {
      for (const auto& e : it->second) ranking.push_back(e.doc_id);
    }
    const double ap = *average_precision(ranking, *rel);
    rep.per_topic_ap[topic] = ap;
    aps.push_back(ap);
  }
  if (aps.empty()) throw DataError("no topic with relevant documents to evaluate");
  rep.summary = map_gmap(aps);
  return rep;
}

std::string render_sweep_table(std::span<const SweepCell> cells) {
  std::vector<std::string> models;
  std::vector<double> lambdas;
  for (const auto& c : cells) {
    if (std::find(models.begin(), models.end(), c.model) == models.end()) models.push_back(c.model);
    if (std::find(lambdas.begin(), lambdas.end(), c.lambda) == lambdas.end()) lambdas.push_back(c.lambda);
  }
  std::sort(lambdas.begin(), lambdas.end());
  std::size_t name_w = 5;
  for (const auto& m : models) name_w = std::max(name_w, m.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(name_w)) << "model";
  for (const char* metric : {"MAP", "GMAP"}) {
    for (double l : lambdas) {
      out << "  " << std::setw(12) << (std::string(metric) + "@" + format_real(l));
    }
  }
  out << '\n';
  for (const auto& m : models) {
    out << std::setw(static_cast<int>(name_w)) << m;
    for (int metric = 0; metric < 2; ++metric) {
      for (double l : lambdas) {
        auto it = std::find_if(cells.begin(), cells.end(),
                               [&](const SweepCell& c) { return c.model == m && c.lambda == l; });
        std::string v = "missing";
        if (it != cells.end()) {
          if (it->value) {
            std::ostringstream num;
            num << std::fixed << std::setprecision(4)
                << (metric == 0 ? it->value->map : it->value->gmap);
            v = num.str();
          } else {
            v = "FAILED";
          }
        }
        out << "  " << std::setw(12) << v;
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string render_sweep_jsonl(std::span<const SweepCell> cells) {
  std::ostringstream out;
  for (const auto& c : cells) {
    nlohmann::json rec{{"model", c.model}, {"lambda", c.lambda}};
    if (c.value) {
      rec["map"] = c.value->map;
      rec["gmap"] = c.value->gmap;
    } else {
      rec["map"] = nullptr;
      rec["gmap"] = nullptr;
      rec["error"] = c.note.empty() ? "failed" : c.note;
    }
    out << rec.dump() << '\n';
  }
  return out.str();
}

}  // namespace nnir
