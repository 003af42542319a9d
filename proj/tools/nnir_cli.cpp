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

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nnir/baseline_lm.hpp"
#include "nnir/checkpoint.hpp"
#include "nnir/corpus.hpp"
#include "nnir/errors.hpp"
#include "nnir/evaluation.hpp"
#include "nnir/gradcheck.hpp"
#include "nnir/inverted_index.hpp"
#include "nnir/io.hpp"
#include "nnir/kernels.hpp"
#include "nnir/nnlm.hpp"
#include "nnir/rerank.hpp"
#include "nnir/sweep.hpp"
#include "nnir/synthetic.hpp"
#include "nnir/training.hpp"

namespace fs = std::filesystem;
using namespace nnir;

namespace {

struct Options {
  // Inputs.
  std::string corpus;
  std::string vocab;
  std::string index;
  std::string model;
  std::vector<std::string> docvecs;
  std::string topics;
  std::string qrels;
  std::string candidates;
  std::string run;
  std::string stopwords;
  std::string vectors;
  std::string init_model;
  std::string out = ".";

  // Neural configuration.
  std::string arch = "M1";
  int order = 5;
  int m0 = 100;
  int m1 = 100;
  int m2 = 100;
  int kappa = 4;

  // Training.
  double eps0 = 0.1;
  double delta = 2e-4;
  std::size_t batch_size = 100;
  std::size_t iters = 50000;
  double subsample = 1e-3;
  std::size_t log_every = 100;
  int window = 5;
  double alpha = 0.5;
  int epochs = 5;

  // Document fitting.
  std::string mode = "sum";
  double tolerance = 1e-4;
  std::size_t fit_iters = 500;

  // Retrieval and scoring.
  std::uint64_t min_count = 5;
  std::size_t k = 100;
  double k1 = 1.2;
  double b = 0.5;
  double lambda = 0.01;
  double gamma = 0.5;
  std::vector<double> lambdas{0.0, 0.01, 0.1, 0.5, 1.0};
  bool no_generic = false;

  // Misc.
  std::uint64_t seed = 1;
  int threads = 1;

  // gradcheck / paramcount.
  std::size_t gc_vocab = 20;
  int gc_dims = 4;
  std::optional<std::string> only_arch;
  std::optional<std::string> only_mode;
  double gc_tolerance = 1e-4;
  std::uint64_t vocab_size = 375219;

  // synth.
  std::size_t synth_docs = 500;
  std::size_t synth_topics = 50;
  std::size_t synth_vocab = 200;
};

NeuralConfig neural_config(const Options& o) {
  NeuralConfig c;
  c.arch = parse_arch(o.arch);
  c.order = o.order;
  c.m0 = o.m0;
  c.m1 = o.m1;
  c.m2 = o.m2;
  c.kappa = o.kappa;
  c.validate();
  return c;
}

TrainConfig train_config(const Options& o) {
  TrainConfig t;
  t.eps0 = o.eps0;
  t.delta = o.delta;
  t.batch_size = o.batch_size;
  t.max_iters = o.iters;
  t.subsample = o.subsample;
  t.seed = o.seed;
  t.threads = o.threads;
  t.log_every = o.log_every;
  t.validate();
  return t;
}

std::optional<StopWords> stopwords_of(const Options& o) {
  if (o.stopwords.empty()) return std::nullopt;
  return load_stopwords(o.stopwords);
}

std::vector<Document> load_docs(const Options& o) {
  const auto stop = stopwords_of(o);
  return read_corpus(o.corpus, stop ? &*stop : nullptr);
}

std::vector<std::vector<TermId>> encode_docs(const std::vector<Document>& docs, const Vocabulary& v) {
  std::vector<std::vector<TermId>> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(encode(d.tokens, v));
  return out;
}

NeuralModel load_checked_model(const std::string& path, const Vocabulary& vocab) {
  auto m = load_model(path);
  if (m.vocab_words() != vocab.word_count()) {
    throw DataError("model " + path + " has " + std::to_string(m.vocab_words()) +
                    " words but the vocabulary has " + std::to_string(vocab.word_count()));
  }
  return m;
}

fs::path prepare_out(const Options& o) {
  fs::create_directories(o.out);
  return fs::path(o.out);
}

std::map<std::string, EncodedQuery> load_queries(const Options& o, const InvertedIndex& index,
                                                 const Vocabulary* neural_vocab) {
  const auto stop = stopwords_of(o);
  return encode_topics(read_topics(o.topics), index.vocabulary(), neural_vocab,
                       stop ? &*stop : nullptr);
}

CountLM collection_model(const InvertedIndex& index) {
  CountLM coll(1);
  for (std::uint32_t d = 0; d < index.num_docs(); ++d) {
    coll.add_sequence(index.doc_terms(d));
  }
  return coll;
}

void print_eval(std::ostream& out, const EvalReport& rep) {
  out << "run\t" << rep.tag << '\n';
  out << "topics\t" << rep.per_topic_ap.size() << '\n';
  out << "map\t" << format_real(rep.summary.map) << '\n';
  out << "gmap\t" << format_real(rep.summary.gmap) << '\n';
}

// --- commands --------------------------------------------------------------

int cmd_synth(const Options& o) {
  SyntheticConfig c;
  c.num_docs = o.synth_docs;
  c.num_topics = o.synth_topics;
  c.vocab_size = o.synth_vocab;
  c.seed = o.seed;
  const auto coll = generate_synthetic(c);
  const auto dir = prepare_out(o);
  write_synthetic(coll, dir);
  std::cout << "documents\t" << coll.docs.size() << "\ntopics\t" << coll.topics.size() << '\n';
  return 0;
}

int cmd_build_index(const Options& o) {
  const auto docs = load_docs(o);
  const auto index = InvertedIndex::build(docs);
  const auto dir = prepare_out(o);
  index.save(dir / "index.bin");
  std::cout << "documents\t" << index.num_docs() << "\nterms\t" << index.vocabulary().word_count()
            << "\ntokens\t" << index.total_tokens() << '\n';
  return 0;
}

int cmd_build_vocab(const Options& o) {
  const auto docs = load_docs(o);
  const auto v = build_vocabulary(docs, o.min_count);
  const auto dir = prepare_out(o);
  v.save(dir / "vocab.tsv");
  std::cout << "words\t" << v.word_count() << "\nmin_count\t" << v.min_count() << '\n';
  return 0;
}

int cmd_pretrain(const Options& o) {
  const auto cfg = neural_config(o);
  const auto vocab = Vocabulary::load(o.vocab);
  auto model = NeuralModel::create(cfg, vocab, o.seed);
  if (!o.vectors.empty()) {
    const auto n = load_word_vectors(o.vectors, vocab, model);
    std::cout << "loaded\t" << n << '\n';
  } else {
    const auto docs = encode_docs(load_docs(o), vocab);
    PretrainConfig pc;
    pc.window = o.window;
    pc.alpha0 = o.alpha;
    pc.epochs = o.epochs;
    pc.seed = o.seed;
    pretrain_embeddings(docs, model, pc);
  }
  if (!model.params.all_finite()) throw NumericalError("pretraining produced non-finite values");
  const auto dir = prepare_out(o);
  save_model(dir / "model.bin", model, vocab.frequencies());
  return 0;
}

int cmd_train_lm(const Options& o) {
  const auto tc = train_config(o);
  const auto vocab = Vocabulary::load(o.vocab);
  NeuralModel model = o.init_model.empty() ? NeuralModel::create(neural_config(o), vocab, o.seed)
                                           : load_checked_model(o.init_model, vocab);
  const auto docs = encode_docs(load_docs(o), vocab);
  const auto weights = word_weights(vocab, o.subsample);
  const double before = perplexity(docs, model, weights, {}, o.threads);

  std::ostringstream log;
  train_generic(docs, model, weights, tc, [&](const TraceEntry& e) {
    log << nlohmann::json{{"step", e.step},
                          {"lr", e.lr},
                          {"weighted_nll", e.weighted_nll},
                          {"perplexity", e.perplexity}}
               .dump()
        << '\n';
    std::cerr << "step " << e.step << " lr " << e.lr << " nll " << e.weighted_nll << '\n';
  });
  const double after = perplexity(docs, model, weights, {}, o.threads);

  const auto dir = prepare_out(o);
  save_model(dir / "model.bin", model, vocab.frequencies());
  io::write_atomically(dir / "train_log.jsonl", [&](std::ostream& out) { out << log.str(); });
  std::cout << "perplexity_before\t" << format_real(before) << "\nperplexity_after\t"
            << format_real(after) << '\n';
  return 0;
}

int cmd_fit_docvecs(const Options& o) {
  const auto mode = parse_merge_mode(o.mode);
  const auto vocab = Vocabulary::load(o.vocab);
  const auto model = load_checked_model(o.model, vocab);
  auto docs = load_docs(o);
  if (!o.candidates.empty()) {
    const auto cand = read_run(o.candidates);
    std::set<std::string> wanted;
    for (const auto& [t, es] : cand.topics) {
      for (const auto& e : es) wanted.insert(e.doc_id);
    }
    std::erase_if(docs, [&](const Document& d) { return !wanted.contains(d.doc_id); });
  }
  const auto encoded = encode_docs(docs, vocab);
  const auto weights = word_weights(vocab, o.subsample);
  FitConfig fc;
  fc.tolerance = o.tolerance;
  fc.max_iters = o.fit_iters;
  const auto results = o.threads == 1
                           ? kernels::fit_doc_vectors_serial(encoded, model, weights, mode, fc)
                           : kernels::fit_doc_vectors_parallel(encoded, model, weights, mode, fc, o.threads);

  DocVectorTable table{mode, static_cast<std::size_t>(model.config.state_dim()), {}};
  std::size_t improved = 0, empty = 0, converged = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& r = results[i];
    if (r.empty_document) {
      ++empty;
      std::cerr << "warning: " << docs[i].doc_id << " has no in-vocabulary terms; using the identity\n";
    }
    if (r.final_nll < r.initial_nll) ++improved;
    if (r.converged) ++converged;
    table.vectors[docs[i].doc_id] = r.dv;
  }
  const auto dir = prepare_out(o);
  save_doc_vectors(dir / ("docvecs-" + std::string(to_string(mode)) + ".bin"), table);
  std::cout << "documents\t" << docs.size() << "\nimproved\t" << improved << "\nconverged\t"
            << converged << "\nempty\t" << empty << '\n';
  return 0;
}

int cmd_retrieve(const Options& o) {
  const auto index = InvertedIndex::load(o.index);
  const auto queries = load_queries(o, index, nullptr);
  const auto run = bm25_run(index, queries, o.k, Bm25Params{o.k1, o.b}, o.threads);
  const auto dir = prepare_out(o);
  write_run(dir / "bm25.run", run);
  return 0;
}

int cmd_rerank(const Options& o) {
  MixParams{o.lambda, o.gamma}.validate();
  if (o.docvecs.size() > 1) throw UsageError("rerank takes at most one --docvecs table");
  if (!o.docvecs.empty() && o.model.empty()) throw UsageError("--docvecs needs --model");
  if (o.lambda > 0.0 && o.model.empty()) throw UsageError("lambda > 0 needs --model and --vocab");
  const auto index = InvertedIndex::load(o.index);
  const auto candidates = read_run(o.candidates);
  std::optional<Vocabulary> vocab;
  std::optional<NeuralModel> model;
  std::optional<DocVectorTable> dvs;
  if (!o.model.empty()) {
    if (o.vocab.empty()) throw UsageError("--model needs --vocab");
    vocab = Vocabulary::load(o.vocab);
    model = load_checked_model(o.model, *vocab);
  }
  if (!o.docvecs.empty()) dvs = load_doc_vectors(o.docvecs.front());
  const auto queries = load_queries(o, index, vocab ? &*vocab : nullptr);
  const auto coll = collection_model(index);
  const RerankModels rm{&index, &coll, model ? &*model : nullptr, dvs ? &*dvs : nullptr};
  auto run = rerank_run(candidates, queries, MixParams{o.lambda, o.gamma}, rm, o.threads);
  run.tag = model ? run_tag(model_label(*model, dvs ? &*dvs : nullptr), o.lambda, o.gamma)
                  : "UNI-g" + format_real(o.gamma);
  const auto dir = prepare_out(o);
  write_run(dir / (run.tag + ".run"), run);
  std::cout << "run\t" << (dir / (run.tag + ".run")).string() << '\n';
  return 0;
}

int cmd_evaluate(const Options& o) {
  const auto run = read_run(o.run);
  const auto qrels = read_qrels(o.qrels);
  const auto rep = evaluate_run(run, qrels);
  print_eval(std::cout, rep);
  for (const auto& t : rep.skipped_topics) std::cerr << "warning: topic " << t << " has no relevant documents\n";
  if (o.out != ".") {
    const auto dir = prepare_out(o);
    nlohmann::json j{{"run", rep.tag}, {"map", rep.summary.map}, {"gmap", rep.summary.gmap}};
    for (const auto& [t, ap] : rep.per_topic_ap) j["ap"][t] = ap;
    io::write_atomically(dir / ("eval-" + (rep.tag.empty() ? std::string("run") : rep.tag) + ".json"),
                         [&](std::ostream& out) { out << j.dump(1) << '\n'; });
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  for (double l : o.lambdas) MixParams{l, o.gamma}.validate();
  if (o.model.empty() || o.vocab.empty()) throw UsageError("sweep needs --model and --vocab");
  const auto index = InvertedIndex::load(o.index);
  const auto qrels = read_qrels(o.qrels);
  const auto vocab = Vocabulary::load(o.vocab);
  const auto model = load_checked_model(o.model, vocab);
  std::vector<DocVectorTable> tables;
  for (const auto& p : o.docvecs) tables.push_back(load_doc_vectors(p));
  const auto queries = load_queries(o, index, &vocab);
  const Run candidates = o.candidates.empty()
                             ? bm25_run(index, queries, o.k, Bm25Params{o.k1, o.b}, o.threads)
                             : read_run(o.candidates);
  const auto coll = collection_model(index);

  std::vector<SweepModel> rows;
  if (!o.no_generic) rows.push_back({model_label(model, nullptr), &model, nullptr});
  for (const auto& t : tables) rows.push_back({model_label(model, &t), &model, &t});
  const auto res = run_sweep(candidates, queries, qrels, o.lambdas, o.gamma, index, coll, rows, o.threads);

  const auto dir = prepare_out(o);
  fs::create_directories(dir / "runs");
  write_run(dir / "runs" / (candidates.tag + ".run"), candidates);
  write_run(dir / "runs" / (res.lm.tag + ".run"), rerank_jm(candidates, queries, o.gamma, index, coll));
  for (const auto& r : res.runs) write_run(dir / "runs" / (r.tag + ".run"), r);

  std::ostringstream text;
  text << render_sweep_table(res.cells);
  for (const auto* base : {&res.bm25, &res.lm}) {
    text << "baseline " << base->tag << "  MAP " << std::fixed << std::setprecision(4)
         << base->summary.map << "  GMAP " << base->summary.gmap << '\n';
  }
  std::ostringstream jsonl;
  for (const auto* base : {&res.bm25, &res.lm}) {
    jsonl << nlohmann::json{{"model", base->tag}, {"lambda", nullptr}, {"map", base->summary.map},
                            {"gmap", base->summary.gmap}}
                 .dump()
          << '\n';
  }
  jsonl << render_sweep_jsonl(res.cells);
  io::write_atomically(dir / "sweep.txt", [&](std::ostream& out) { out << text.str(); });
  io::write_atomically(dir / "sweep.jsonl", [&](std::ostream& out) { out << jsonl.str(); });
  std::cout << text.str();
  int rc = 0;
  for (const auto& c : res.cells) {
    if (c.value) continue;
    std::cerr << "failed: " << c.model << " lambda " << c.lambda << ": " << c.note << '\n';
    rc = 3;
  }
  return rc;
}

int cmd_gradcheck(const Options& o) {
  std::vector<Arch> archs{Arch::M1, Arch::M2, Arch::M2Max};
  if (o.only_arch) archs = {parse_arch(*o.only_arch)};
  std::vector<std::optional<MergeMode>> modes{std::nullopt, MergeMode::Sum, MergeMode::Product};
  if (o.only_mode) {
    modes = {*o.only_mode == "gen" ? std::optional<MergeMode>{} : parse_merge_mode(*o.only_mode)};
  }
  double worst = 0.0;
  std::cout << "arch\tmode\ttensor\tentries\tmax_abs_error\tmax_rel_error\n";
  for (auto a : archs) {
    for (const auto& m : modes) {
      const auto problem = make_gradcheck_problem(a, m, o.gc_vocab, o.gc_dims, o.seed);
      for (const auto& c : gradcheck(problem)) {
        std::cout << to_string(a) << '\t' << (m ? to_string(*m) : "gen") << '\t' << c.tensor << '\t'
                  << c.entries << '\t' << c.max_abs_error << '\t' << c.max_rel_error << '\n';
        worst = std::max(worst, c.max_rel_error);
      }
    }
  }
  std::cout << "max_rel_error\t" << worst << '\n';
  if (!(worst < o.gc_tolerance)) {
    std::cerr << "gradient check failed: " << worst << " >= " << o.gc_tolerance << '\n';
    return 3;
  }
  return 0;
}

int cmd_paramcount(const Options& o) {
  std::vector<Arch> archs{Arch::M1, Arch::M2, Arch::M2Max};
  if (o.only_arch) archs = {parse_arch(*o.only_arch)};
  std::cout << "arch\tphi\twords_hsm\ttotal\n";
  for (auto a : archs) {
    Options copy = o;
    copy.arch = std::string(to_string(a));
    const auto c = count_parameters(neural_config(copy), o.vocab_size);
    std::cout << to_string(a) << '\t' << c.phi << '\t' << c.words_hsm << '\t' << c.total() << '\n';
  }
  return 0;
}

// --- option wiring ---------------------------------------------------------

void add_neural_options(CLI::App* s, Options& o) {
  s->add_option("--arch", o.arch, "M1, M2 or M2Max")->check(CLI::IsMember({"M1", "M2", "M2Max"}));
  s->add_option("--n", o.order, "model order (n-1 context terms)")->check(CLI::Range(2, 64));
  s->add_option("--m0", o.m0, "embedding size")->check(CLI::PositiveNumber);
  s->add_option("--m1", o.m1, "first hidden size")->check(CLI::PositiveNumber);
  s->add_option("--m2", o.m2, "second hidden size")->check(CLI::PositiveNumber);
  s->add_option("--kappa", o.kappa, "max-pooling factor")->check(CLI::PositiveNumber);
}

void add_out(CLI::App* s, Options& o) { s->add_option("--out", o.out, "output directory"); }

void add_threads(CLI::App* s, Options& o) {
  s->add_option("--threads", o.threads, "worker threads (0 = all cores, 1 = deterministic)")
      ->check(CLI::NonNegativeNumber);
}

void add_stopwords(CLI::App* s, Options& o) {
  s->add_option("--stopwords", o.stopwords, "optional stop word list")->check(CLI::ExistingFile);
}

CLI::Option* req_file(CLI::App* s, const std::string& name, std::string& v, const std::string& help) {
  return s->add_option(name, v, help)->required()->check(CLI::ExistingFile);
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Neural language models for ad-hoc retrieval"};
  app.set_config("--config", "", "key=value configuration file")->envname("NNIR_CONFIG");
  app.require_subcommand(1);
  std::map<CLI::App*, std::function<int(const Options&)>> commands;

  auto* synth = app.add_subcommand("synth", "write the bundled synthetic test collection");
  synth->add_option("--docs", o.synth_docs, "documents")->check(CLI::PositiveNumber);
  synth->add_option("--topics", o.synth_topics, "topics")->check(CLI::PositiveNumber);
  synth->add_option("--vocab-size", o.synth_vocab, "distinct words")->check(CLI::PositiveNumber);
  synth->add_option("--seed", o.seed, "generator seed");
  add_out(synth, o);
  commands[synth] = cmd_synth;

  auto* bi = app.add_subcommand("build-index", "build the BM25 inverted index");
  req_file(bi, "--corpus", o.corpus, "corpus (.jsonl or TREC SGML)");
  add_stopwords(bi, o);
  add_out(bi, o);
  commands[bi] = cmd_build_index;

  auto* bv = app.add_subcommand("build-vocab", "build the neural vocabulary");
  req_file(bv, "--corpus", o.corpus, "corpus (.jsonl or TREC SGML)");
  bv->add_option("--min-count", o.min_count, "minimum corpus frequency")->check(CLI::PositiveNumber);
  add_stopwords(bv, o);
  add_out(bv, o);
  commands[bv] = cmd_build_vocab;

  auto* pt = app.add_subcommand("pretrain", "initialize embeddings (CBOW with hierarchical softmax)");
  req_file(pt, "--vocab", o.vocab, "vocabulary file");
  pt->add_option("--corpus", o.corpus, "corpus")->check(CLI::ExistingFile);
  pt->add_option("--vectors", o.vectors, "load word vectors instead of training")->check(CLI::ExistingFile);
  pt->add_option("--window", o.window, "context window")->check(CLI::PositiveNumber);
  pt->add_option("--alpha", o.alpha, "initial learning rate")->check(CLI::PositiveNumber);
  pt->add_option("--epochs", o.epochs, "passes over the corpus")->check(CLI::PositiveNumber);
  pt->add_option("--seed", o.seed, "seed");
  add_neural_options(pt, o);
  add_stopwords(pt, o);
  add_out(pt, o);
  commands[pt] = [](const Options& opt) {
    if (opt.corpus.empty() == opt.vectors.empty()) throw UsageError("pretrain needs exactly one of --corpus or --vectors");
    return cmd_pretrain(opt);
  };

  auto* tl = app.add_subcommand("train-lm", "train the generic neural language model");
  req_file(tl, "--corpus", o.corpus, "corpus");
  req_file(tl, "--vocab", o.vocab, "vocabulary file");
  tl->add_option("--init-model", o.init_model, "start from this checkpoint")->check(CLI::ExistingFile);
  add_neural_options(tl, o);
  tl->add_option("--eps0", o.eps0, "initial learning rate");
  tl->add_option("--delta", o.delta, "learning-rate decay");
  tl->add_option("--batch-size", o.batch_size, "documents per step");
  tl->add_option("--iters", o.iters, "SGD steps");
  tl->add_option("--subsample", o.subsample, "word weight threshold");
  tl->add_option("--log-every", o.log_every, "log interval in steps");
  tl->add_option("--seed", o.seed, "seed");
  add_threads(tl, o);
  add_stopwords(tl, o);
  add_out(tl, o);
  commands[tl] = cmd_train_lm;

  auto* fd = app.add_subcommand("fit-docvecs", "fit one document vector per document (Rprop)");
  req_file(fd, "--corpus", o.corpus, "corpus");
  req_file(fd, "--vocab", o.vocab, "vocabulary file");
  req_file(fd, "--model", o.model, "generic model checkpoint");
  fd->add_option("--mode", o.mode, "merge mode")->check(CLI::IsMember({"sum", "prod"}));
  fd->add_option("--candidates", o.candidates, "only fit documents in this run")->check(CLI::ExistingFile);
  fd->add_option("--tolerance", o.tolerance, "stop when the largest change is below this");
  fd->add_option("--max-iters", o.fit_iters, "iteration cap");
  fd->add_option("--subsample", o.subsample, "word weight threshold");
  add_threads(fd, o);
  add_stopwords(fd, o);
  add_out(fd, o);
  commands[fd] = cmd_fit_docvecs;

  auto* rt = app.add_subcommand("retrieve", "BM25 top-k candidates for every topic");
  req_file(rt, "--index", o.index, "index file");
  req_file(rt, "--topics", o.topics, "topics file");
  rt->add_option("--k", o.k, "candidates per topic")->check(CLI::PositiveNumber);
  rt->add_option("--k1", o.k1, "BM25 k1");
  rt->add_option("--b", o.b, "BM25 b");
  add_threads(rt, o);
  add_stopwords(rt, o);
  add_out(rt, o);
  commands[rt] = cmd_retrieve;

  auto* rr = app.add_subcommand("rerank", "rerank candidates with the mixed score");
  req_file(rr, "--index", o.index, "index file");
  req_file(rr, "--topics", o.topics, "topics file");
  req_file(rr, "--candidates", o.candidates, "candidate run");
  rr->add_option("--vocab", o.vocab, "vocabulary file")->check(CLI::ExistingFile);
  rr->add_option("--model", o.model, "generic model checkpoint")->check(CLI::ExistingFile);
  rr->add_option("--docvecs", o.docvecs, "document vectors")->check(CLI::ExistingFile);
  rr->add_option("--lambda", o.lambda, "neural weight")->check(CLI::Range(0.0, 1.0));
  rr->add_option("--gamma", o.gamma, "collection weight")->check(CLI::Range(0.0, 1.0));
  add_threads(rr, o);
  add_stopwords(rr, o);
  add_out(rr, o);
  commands[rr] = cmd_rerank;

  auto* ev = app.add_subcommand("evaluate", "MAP and GMAP of a run");
  req_file(ev, "--run", o.run, "run file");
  req_file(ev, "--qrels", o.qrels, "relevance judgments");
  add_out(ev, o);
  commands[ev] = cmd_evaluate;

  auto* sw = app.add_subcommand("sweep", "rerank and evaluate over a list of lambdas");
  req_file(sw, "--index", o.index, "index file");
  req_file(sw, "--topics", o.topics, "topics file");
  req_file(sw, "--qrels", o.qrels, "relevance judgments");
  req_file(sw, "--vocab", o.vocab, "vocabulary file");
  req_file(sw, "--model", o.model, "generic model checkpoint");
  sw->add_option("--docvecs", o.docvecs, "document vector tables (one row each)")->check(CLI::ExistingFile);
  sw->add_option("--candidates", o.candidates, "candidate run (default: BM25 top-k)")->check(CLI::ExistingFile);
  sw->add_option("--lambdas", o.lambdas, "lambda values")->delimiter(',')->check(CLI::Range(0.0, 1.0));
  sw->add_option("--gamma", o.gamma, "collection weight")->check(CLI::Range(0.0, 1.0));
  sw->add_option("--k", o.k, "BM25 candidates per topic")->check(CLI::PositiveNumber);
  sw->add_flag("--no-generic", o.no_generic, "skip the generic-model row");
  add_threads(sw, o);
  add_stopwords(sw, o);
  add_out(sw, o);
  commands[sw] = cmd_sweep;

  auto* gc = app.add_subcommand("gradcheck", "compare analytic and finite-difference gradients");
  gc->add_option("--seed", o.seed, "seed");
  gc->add_option("--vocab", o.gc_vocab, "vocabulary size")->check(CLI::Range(2, 100000));
  gc->add_option("--dims", o.gc_dims, "all layer sizes")->check(CLI::PositiveNumber);
  gc->add_option("--arch", o.only_arch, "only this architecture")->check(CLI::IsMember({"M1", "M2", "M2Max"}));
  gc->add_option("--mode", o.only_mode, "only gen, sum or prod")->check(CLI::IsMember({"gen", "sum", "prod"}));
  gc->add_option("--tolerance", o.gc_tolerance, "maximum relative error");
  commands[gc] = cmd_gradcheck;

  auto* pc = app.add_subcommand("paramcount", "count model parameters");
  pc->add_option("--arch", o.only_arch, "only this architecture")->check(CLI::IsMember({"M1", "M2", "M2Max"}));
  pc->add_option("--n", o.order, "model order")->check(CLI::Range(2, 64));
  pc->add_option("--m0", o.m0, "embedding size")->check(CLI::PositiveNumber);
  pc->add_option("--m1", o.m1, "first hidden size")->check(CLI::PositiveNumber);
  pc->add_option("--m2", o.m2, "second hidden size")->check(CLI::PositiveNumber);
  pc->add_option("--kappa", o.kappa, "max-pooling factor")->check(CLI::PositiveNumber);
  pc->add_option("--vocab-size", o.vocab_size, "vocabulary words")->check(CLI::PositiveNumber);
  commands[pc] = cmd_paramcount;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) return fn(o);
    }
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
