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

#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "nnir/errors.hpp"
#include "nnir/kernels.hpp"
#include "nnir/training.hpp"
#include "test_util.hpp"

using namespace nnir;

namespace {

std::vector<std::vector<TermId>> random_docs(std::size_t n, std::size_t vocab, std::uint64_t seed) {
  // Each document follows t -> (t + step) mod vocab with a little noise.
  std::mt19937_64 rng(seed);
  std::vector<std::vector<TermId>> docs(n);
  for (auto& d : docs) {
    const auto step = 1 + rng() % 3;
    auto t = static_cast<TermId>(rng() % vocab);
    const auto len = 10 + rng() % 20;
    for (std::size_t i = 0; i < len; ++i) {
      d.push_back(t);
      t = rng() % 10 == 0 ? static_cast<TermId>(rng() % vocab) : static_cast<TermId>((t + step) % vocab);
    }
  }
  return docs;
}

NeuralModel model_for(const std::vector<std::vector<TermId>>& docs, std::size_t vocab, Arch arch,
                      std::uint64_t seed) {
  std::vector<std::uint64_t> freq(vocab, 1);
  for (const auto& d : docs) {
    for (auto t : d) ++freq[t];
  }
  auto cfg = test::small_config(arch, 8, 3);
  return NeuralModel{cfg, NeuralParams::random(cfg, vocab, seed), HuffmanTree::build(freq)};
}

double weighted_nll(const std::vector<std::vector<TermId>>& docs, const NeuralModel& m,
                    std::span<const double> w) {
  const auto l = kernels::corpus_nll_serial(docs, m, w, {});
  return l.nll / l.weight;
}

}  // namespace

TEST_CASE("lr schedule examples") {
  TrainConfig cfg;
  CHECK(lr_schedule(0, cfg) == 0.1);
  CHECK(lr_schedule(5000, cfg) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(lr_schedule(50000, cfg) == doctest::Approx(0.1 / 11.0).epsilon(1e-14));
  for (std::size_t k = 0; k < 1000; ++k) CHECK(lr_schedule(k + 1, cfg) < lr_schedule(k, cfg));
  cfg.delta = 0.0;
  CHECK(lr_schedule(12345, cfg) == 0.1);
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
}

TEST_CASE("word weight examples") {
  // total 1000: f(big) = 0.1, f(mid) = 4e-3, f(one) = 1e-3
  std::map<std::string, std::uint64_t> counts{{"big", 100}, {"mid", 4}, {"one", 1}, {"rest", 895}};
  auto v = Vocabulary::from_counts(counts, 1);
  CHECK(word_weight(*v.find("big"), v, 1e-3) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(word_weight(*v.find("mid"), v, 1e-3) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(word_weight(*v.find("one"), v, 1e-3) == 1.0);
  // Non-increasing in frequency, within (0, 1].
  auto w = word_weights(v, 1e-3);
  for (TermId t = 0; t + 1 < w.size(); ++t) {
    CHECK(v.frequency(t) >= v.frequency(t + 1));
    CHECK(w[t] <= w[t + 1]);
    CHECK(w[t] > 0.0);
    CHECK(w[t] <= 1.0);
  }
}

TEST_CASE("one sgd step is a plain gradient step") {
  auto docs = random_docs(1, 12, 3);
  docs[0].resize(1);
  auto m = model_for(docs, 12, Arch::M2, 1);
  for (auto& x : m.params.hsm.flat()) x = 0.1;
  std::vector<double> w(12, 0.7);
  const auto before = m.params;

  Gradients g(m.config, 12, false);
  std::vector<TermId> ctx(2, m.padding_id());
  Sample s{ctx, docs[0][0], 0.7};
  backward(std::span(&s, 1), m, nullptr, GradientScope::All, g);
  g.scale(1.0 / 0.7);

  std::vector<std::uint32_t> batch{0};
  sgd_step(docs, batch, m, w, 0.1, 1);
  for (std::size_t i = 0; i < before.B.flat().size(); ++i) {
    CHECK(m.params.B.flat()[i] - before.B.flat()[i] == doctest::Approx(-0.1 * g.B.flat()[i]).epsilon(1e-10));
  }
  for (std::size_t i = 0; i < before.hsm.flat().size(); ++i) {
    CHECK(m.params.hsm.flat()[i] - before.hsm.flat()[i] == doctest::Approx(-0.1 * g.hsm.flat()[i]).epsilon(1e-10));
  }
  const auto pad = m.padding_id();
  for (std::size_t c = 0; c < before.embeddings.cols(); ++c) {
    CHECK(m.params.embeddings(pad, c) - before.embeddings(pad, c) ==
          doctest::Approx(-0.1 * g.embeddings(pad, c)).epsilon(1e-10));
  }
}

TEST_CASE("training reduces the weighted NLL and is reproducible") {
  const auto docs = random_docs(50, 20, 8);
  std::vector<double> w(20, 1.0);
  TrainConfig cfg;
  cfg.max_iters = 2000;
  cfg.batch_size = 5;
  cfg.eps0 = 0.5;
  cfg.log_every = 500;
  for (auto arch : {Arch::M1, Arch::M2, Arch::M2Max}) {
    auto m = model_for(docs, 20, arch, 2);
    const double before = weighted_nll(docs, m, w);
    std::vector<TraceEntry> logged;
    auto result = train_generic(docs, m, w, cfg, [&](const TraceEntry& e) { logged.push_back(e); });
    const double after = weighted_nll(docs, m, w);
    CAPTURE(to_string(arch));
    CHECK(after < before);
    CHECK(perplexity(docs, m, w) == doctest::Approx(std::exp(after)));
    CHECK(logged.size() == result.trace.size());
    CHECK(result.trace.front().step == 0);
    CHECK(result.trace.back().step == 1999);

    auto again = model_for(docs, 20, arch, 2);
    train_generic(docs, again, w, cfg);
    CHECK(again.params == m.params);
  }
}

TEST_CASE("training rejects empty input") {
  std::vector<std::vector<TermId>> none;
  auto m = model_for({{0, 1}}, 4, Arch::M1, 1);
  std::vector<double> w(4, 1.0);
  CHECK_THROWS_AS(train_generic(none, m, w, TrainConfig{}), DataError);
}

TEST_CASE("perplexity examples") {
  // Two-word vocabulary with zero HSM vector: uniform, perplexity 2.
  auto cfg = test::small_config(Arch::M1, 3, 2);
  std::vector<std::uint64_t> f{1, 1};
  NeuralModel m{cfg, NeuralParams::random(cfg, 2, 1), HuffmanTree::build(f)};
  std::vector<std::vector<TermId>> docs{{0, 1, 1, 0}};
  std::vector<double> w(2, 1.0);
  CHECK(perplexity(docs, m, w) == doctest::Approx(2.0).epsilon(1e-14));

  // A saturated predictor for word 0 everywhere: perplexity 1.
  std::vector<std::vector<TermId>> zeros{{0, 0, 0}};
  std::fill(m.params.b.begin(), m.params.b.end(), 50.0);
  for (auto& a : m.params.A) a.fill(0.0);
  const double sign = m.tree.signs(0)[0];  // state is all +1
  for (auto& x : m.params.hsm.flat()) x = -sign * 200.0;
  CHECK(perplexity(zeros, m, w) == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> zero_w(2, 0.0);
  CHECK_THROWS_AS(perplexity(docs, m, zero_w), DataError);
}

TEST_CASE("fit_doc_vector never does worse than the identity") {
  const auto docs = random_docs(30, 20, 21);
  auto m = model_for(docs, 20, Arch::M2, 5);
  std::vector<double> w(20, 1.0);
  TrainConfig cfg;
  cfg.max_iters = 300;
  cfg.batch_size = 5;
  cfg.eps0 = 0.5;
  train_generic(docs, m, w, cfg);
  for (auto mode : {MergeMode::Sum, MergeMode::Product}) {
    std::size_t improved = 0;
    for (const auto& d : docs) {
      const auto r = fit_doc_vector(d, m, w, mode);
      CHECK(r.final_nll <= r.initial_nll);
      if (r.final_nll < r.initial_nll) ++improved;
      CHECK(r.iterations <= 500);
      // The reported loss is the loss of the returned vector.
      const auto states = document_states(d, m);
      std::vector<double> g(r.dv.z.size());
      CHECK(doc_vector_objective(states, d, m, w, r.dv, g) == doctest::Approx(r.final_nll).epsilon(1e-12));
      // Matches the loss computed through the full forward pass.
      double direct = 0.0;
      std::vector<TermId> ctx(2);
      for (std::size_t i = 0; i < d.size(); ++i) {
        build_context(d, i, m.padding_id(), ctx);
        direct -= w[d[i]] * next_token_log_prob(ctx, d[i], m, &r.dv);
      }
      CHECK(direct == doctest::Approx(r.final_nll).epsilon(1e-10));
    }
    CHECK(improved >= docs.size() * 9 / 10);
  }
  std::vector<TermId> empty;
  const auto r = fit_doc_vector(empty, m, w, MergeMode::Product);
  CHECK(r.empty_document);
  CHECK(r.dv.z == DocVector::identity(MergeMode::Product, 8).z);
}

TEST_CASE("doc vector objective gradient matches finite differences") {
  const auto docs = random_docs(1, 15, 2);
  auto m = test::random_model(test::small_config(Arch::M2Max, 4, 3), 15, 3);
  std::vector<double> w(15, 0.6);
  std::mt19937_64 rng(1);
  for (auto mode : {MergeMode::Sum, MergeMode::Product}) {
    auto dv = test::random_doc_vector(mode, 4, rng);
    const auto states = document_states(docs[0], m);
    std::vector<double> g(4), scratch(4);
    doc_vector_objective(states, docs[0], m, w, dv, g);
    for (std::size_t k = 0; k < 4; ++k) {
      auto up = dv, down = dv;
      up.z[k] += 1e-5;
      down.z[k] -= 1e-5;
      const double num = (doc_vector_objective(states, docs[0], m, w, up, scratch) -
                          doc_vector_objective(states, docs[0], m, w, down, scratch)) / 2e-5;
      CHECK(g[k] == doctest::Approx(num).epsilon(1e-6));
    }
  }
}

TEST_CASE("pretraining makes interchangeable words similar") {
  // "a" and "b" occur in identical contexts; "c" occurs elsewhere.
  std::mt19937_64 rng(5);
  const std::size_t V = 12;
  std::vector<std::vector<TermId>> docs(200);
  for (auto& d : docs) {
    for (int i = 0; i < 30; ++i) {
      const auto r = rng() % 4;
      if (r == 0) {
        d.insert(d.end(), {3, static_cast<TermId>(rng() % 2), 4});
      } else if (r == 1) {
        d.insert(d.end(), {5, 2, 6});
      } else {
        d.push_back(static_cast<TermId>(7 + rng() % 5));
      }
    }
  }
  auto m = model_for(docs, V, Arch::M1, 3);
  PretrainConfig pc;
  pc.window = 1;
  pc.alpha0 = 0.05;
  pretrain_embeddings(docs, m, pc);
  auto cos = [&](TermId x, TermId y) {
    const auto a = m.params.embeddings.row(x);
    const auto b = m.params.embeddings.row(y);
    return dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
  };
  CHECK(cos(0, 1) > cos(0, 2));
  CHECK(m.params.all_finite());

  std::vector<std::vector<TermId>> empty(3);
  CHECK_THROWS_AS(pretrain_embeddings(empty, m, pc), DataError);
}

TEST_CASE("external word vectors") {
  std::map<std::string, std::uint64_t> counts{{"x", 5}, {"y", 3}, {"z", 2}};
  auto v = Vocabulary::from_counts(counts, 1);
  auto cfg = test::small_config(Arch::M1, 3, 3);
  auto m = NeuralModel::create(cfg, v, 1);
  const double z_before = m.params.embeddings(*v.find("z"), 0);
  const auto dir = test::temp_dir("wordvec");
  {
    std::ofstream out(dir / "vec.txt");
    out << "3 3\nx 1 2 3\nunknown 9 9 9\ny -1 -2 -3\n";
  }
  CHECK(load_word_vectors(dir / "vec.txt", v, m) == 2);
  CHECK(m.params.embeddings(*v.find("x"), 2) == 3.0);
  CHECK(m.params.embeddings(*v.find("y"), 0) == -1.0);
  CHECK(m.params.embeddings(*v.find("z"), 0) == z_before);
  {
    std::ofstream out(dir / "bad.txt");
    out << "1 4\nx 1 2 3 4\n";
  }
  CHECK_THROWS_AS(load_word_vectors(dir / "bad.txt", v, m), DataError);
}
