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

// Serial reference kernels against their OpenMP counterparts on the
// synthetic collection. Thread counts come from the benchmark argument.

#include <benchmark/benchmark.h>

#include "nnir/corpus.hpp"
#include "nnir/inverted_index.hpp"
#include "nnir/kernels.hpp"
#include "nnir/nnlm.hpp"
#include "nnir/synthetic.hpp"
#include "nnir/training.hpp"

using namespace nnir;

namespace {

struct Data {
  std::vector<Document> docs;
  Vocabulary vocab;
  std::vector<std::vector<TermId>> encoded;
  std::vector<double> weights;
  std::optional<InvertedIndex> index;
  std::vector<std::vector<TermId>> queries;
  std::optional<NeuralModel> model;
  std::vector<std::uint32_t> batch;
};

const Data& data() {
  static const Data d = [] {
    Data x;
    SyntheticConfig cfg;
    cfg.num_docs = 2000;
    cfg.vocab_size = 400;
    const auto coll = generate_synthetic(cfg);
    for (const auto& doc : coll.docs) x.docs.push_back(make_document(doc.doc_id, doc.text));
    x.vocab = build_vocabulary(x.docs, 1);
    for (const auto& doc : x.docs) x.encoded.push_back(encode(doc.tokens, x.vocab));
    x.weights = word_weights(x.vocab, 1e-3);
    x.index = InvertedIndex::build(x.docs);
    for (const auto& [id, text] : coll.topics) x.queries.push_back(x.index->encode_query(tokenize(text)));
    NeuralConfig nc;
    nc.arch = Arch::M2;
    nc.m0 = nc.m1 = nc.m2 = 64;
    x.model = NeuralModel::create(nc, x.vocab, 1);
    for (std::uint32_t i = 0; i < 100; ++i) x.batch.push_back(i * 7 % cfg.num_docs);
    return x;
  }();
  return d;
}

void BM_BatchGradientSerial(benchmark::State& state) {
  const auto& d = data();
  Gradients g(d.model->config, d.model->vocab_words(), false);
  for (auto _ : state) {
    g.clear();
    benchmark::DoNotOptimize(kernels::batch_gradient_serial(d.encoded, d.batch, *d.model, d.weights, g));
  }
}

void BM_BatchGradientParallel(benchmark::State& state) {
  const auto& d = data();
  Gradients g(d.model->config, d.model->vocab_words(), false);
  std::vector<Gradients> scratch;
  for (auto _ : state) {
    g.clear();
    benchmark::DoNotOptimize(kernels::batch_gradient_parallel(d.encoded, d.batch, *d.model, d.weights, g,
                                                              static_cast<int>(state.range(0)), &scratch));
  }
}

void BM_CorpusNllSerial(benchmark::State& state) {
  const auto& d = data();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::corpus_nll_serial(d.encoded, *d.model, d.weights, {}));
}

void BM_CorpusNllParallel(benchmark::State& state) {
  const auto& d = data();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::corpus_nll_parallel(d.encoded, *d.model, d.weights, {}, static_cast<int>(state.range(0))));
  }
}

void BM_RetrieveSerial(benchmark::State& state) {
  const auto& d = data();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::retrieve_all_serial(*d.index, d.queries, 100, {}));
}

void BM_RetrieveParallel(benchmark::State& state) {
  const auto& d = data();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::retrieve_all_parallel(*d.index, d.queries, 100, {}, static_cast<int>(state.range(0))));
  }
}

void BM_FitDocVectorsSerial(benchmark::State& state) {
  const auto& d = data();
  const std::span<const std::vector<TermId>> docs(d.encoded.data(), 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::fit_doc_vectors_serial(docs, *d.model, d.weights, MergeMode::Sum, {}));
  }
}

void BM_FitDocVectorsParallel(benchmark::State& state) {
  const auto& d = data();
  const std::span<const std::vector<TermId>> docs(d.encoded.data(), 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::fit_doc_vectors_parallel(docs, *d.model, d.weights, MergeMode::Sum, {},
                                                               static_cast<int>(state.range(0))));
  }
}

}  // namespace

BENCHMARK(BM_BatchGradientSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BatchGradientParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CorpusNllSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CorpusNllParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RetrieveSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RetrieveParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FitDocVectorsSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FitDocVectorsParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
