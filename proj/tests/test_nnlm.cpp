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
#include <random>

#include "doctest.h"
#include "nnir/errors.hpp"
#include "nnir/nnlm.hpp"
#include "test_util.hpp"

using namespace nnir;
using nnir::test::random_model;
using nnir::test::small_config;

TEST_CASE("parameter counts of the reported configurations") {
  NeuralConfig cfg;  // n = 5, m0 = m1 = m2 = 100, kappa = 4
  const std::uint64_t words = 375219;
  cfg.arch = Arch::M1;
  CHECK(count_parameters(cfg, words).phi == 40000);
  cfg.arch = Arch::M2;
  CHECK(count_parameters(cfg, words).phi == 50000);
  cfg.arch = Arch::M2Max;
  CHECK(count_parameters(cfg, words).phi == 170000);
  CHECK(count_parameters(cfg, words).words_hsm == 75043700);
}

TEST_CASE("config validation and parsing") {
  NeuralConfig c;
  c.order = 1;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = NeuralConfig{};
  c.m1 = 0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  CHECK(parse_arch("M2Max") == Arch::M2Max);
  CHECK(parse_merge_mode("prod") == MergeMode::Product);
  CHECK(parse_merge_mode("sum") == MergeMode::Sum);
  CHECK_THROWS_AS(parse_arch("M3"), UsageError);
}

TEST_CASE("psi merge examples") {
  std::vector<double> s{0.25, -0.5, 1.0};
  CHECK(psi_merge(s, DocVector::identity(MergeMode::Sum, 3)) == s);
  CHECK(psi_merge(s, DocVector::identity(MergeMode::Product, 3)) == s);
  DocVector zero{MergeMode::Product, {0.0, 0.0, 0.0}};
  for (double x : psi_merge(s, zero)) CHECK(x == 0.0);
  DocVector add{MergeMode::Sum, {1.0, 1.0, 1.0}};
  CHECK(psi_merge(s, add) == std::vector<double>{1.25, 0.5, 2.0});
  DocVector wrong{MergeMode::Sum, {1.0}};
  CHECK_THROWS_AS(psi_merge(s, wrong), UsageError);
}

TEST_CASE("maxpool example") {
  std::vector<double> x{1, 3, 2, 0, -1, -1, -5, -2};
  std::vector<double> out(2);
  std::vector<std::uint32_t> arg(2);
  maxpool(x, 4, out, arg);
  CHECK(out[0] == 3);
  CHECK(arg[0] == 1);
  CHECK(out[1] == -1);
  CHECK(arg[1] == 4);  // first on ties
}

TEST_CASE("log_sigmoid is stable") {
  CHECK(log_sigmoid(0.0) == doctest::Approx(-std::log(2.0)));
  CHECK(log_sigmoid(800.0) == 0.0);
  CHECK(log_sigmoid(-800.0) == doctest::Approx(-800.0));
  CHECK(std::isfinite(log_sigmoid(-1e6)));
  CHECK(sigmoid(0.0) == 0.5);
}

TEST_CASE("hsm: zero vector gives 2^-depth") {
  std::vector<std::uint64_t> f{5, 1, 1, 2, 9, 3, 3};
  auto tree = HuffmanTree::build(f);
  Matrix nodes(6, 3);
  std::mt19937_64 rng(2);
  for (auto& x : nodes.flat()) x = static_cast<double>(rng() % 100) / 10.0;
  std::vector<double> v(3, 0.0);
  for (std::uint32_t t = 0; t < 7; ++t) {
    CHECK(hsm_log_prob(t, v, tree, nodes) ==
          doctest::Approx(-static_cast<double>(tree.depth(t)) * std::log(2.0)));
  }
}

TEST_CASE("hsm: normalization by exhaustive enumeration") {
  std::mt19937_64 rng(7);
  for (std::size_t V : {2u, 7u, 64u, 512u}) {
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<std::uint64_t> f(V);
      for (auto& x : f) x = 1 + rng() % 1000;
      auto tree = HuffmanTree::build(f);
      Matrix nodes(V - 1, 5);
      std::normal_distribution<double> g(0.0, 2.0);
      for (auto& x : nodes.flat()) x = g(rng);
      std::vector<double> v(5);
      for (auto& x : v) x = g(rng);
      double sum = 0.0;
      for (std::uint32_t t = 0; t < V; ++t) sum += std::exp(hsm_log_prob(t, v, tree, nodes));
      CHECK(std::abs(sum - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("phi: zero weights give the zero state") {
  for (auto arch : {Arch::M1, Arch::M2, Arch::M2Max}) {
    auto cfg = small_config(arch);
    std::vector<std::uint64_t> f(10, 1);
    NeuralModel m{cfg, NeuralParams::zeros(cfg, 10), HuffmanTree::build(f)};
    std::vector<TermId> ctx{1, 2};
    ForwardCache cache;
    phi_forward(ctx, m, cache);
    for (double x : cache.state) CHECK(x == 0.0);
    // Zero model: 2^-depth for every target.
    for (TermId t = 0; t < 10; ++t) {
      CHECK(next_token_log_prob(ctx, t, m) ==
            doctest::Approx(-static_cast<double>(m.tree.depth(t)) * std::log(2.0)));
    }
    std::vector<TermId> shortctx{1};
    CHECK_THROWS_AS(phi_forward(shortctx, m, cache), UsageError);
    CHECK_THROWS_AS(next_token_log_prob(ctx, 10, m), UsageError);
  }
}

TEST_CASE("phi: matches direct evaluation of the architecture formulas") {
  std::mt19937_64 rng(9);
  for (auto arch : {Arch::M1, Arch::M2, Arch::M2Max}) {
    auto cfg = small_config(arch, 3, 3);
    auto m = random_model(cfg, 8, 21);
    std::vector<TermId> ctx{3, static_cast<TermId>(m.padding_id())};
    ForwardCache cache;
    phi_forward(ctx, m, cache);
    const auto& P = m.params;
    const int h = cfg.first_width();
    std::vector<double> pre(static_cast<std::size_t>(h));
    for (int r = 0; r < h; ++r) {
      double acc = P.b[static_cast<std::size_t>(r)];
      for (int j = 0; j < 2; ++j) {
        for (int c = 0; c < cfg.m0; ++c) {
          acc += P.A[static_cast<std::size_t>(j)](static_cast<std::size_t>(r), static_cast<std::size_t>(c)) *
                 P.embeddings(ctx[static_cast<std::size_t>(j)], static_cast<std::size_t>(c));
        }
      }
      pre[static_cast<std::size_t>(r)] = acc;
    }
    std::vector<double> s;
    if (arch == Arch::M1) {
      for (double x : pre) s.push_back(std::tanh(x));
    } else {
      std::vector<double> hid;
      if (arch == Arch::M2) {
        for (double x : pre) hid.push_back(std::tanh(x));
      } else {
        for (int j = 0; j < cfg.m1; ++j) {
          double mx = pre[static_cast<std::size_t>(j * cfg.kappa)];
          for (int k = 1; k < cfg.kappa; ++k) mx = std::max(mx, pre[static_cast<std::size_t>(j * cfg.kappa + k)]);
          hid.push_back(mx);
        }
      }
      for (int r = 0; r < cfg.m2; ++r) {
        double acc = 0.0;
        for (int c = 0; c < cfg.m1; ++c) acc += P.B(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) * hid[static_cast<std::size_t>(c)];
        s.push_back(std::tanh(acc));
      }
    }
    REQUIRE(cache.state.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(cache.state[i] == doctest::Approx(s[i]).epsilon(1e-14));
    (void)rng;
  }
}

TEST_CASE("identity document vector reproduces the generic model bit for bit") {
  std::mt19937_64 rng(99);
  for (auto arch : {Arch::M1, Arch::M2, Arch::M2Max}) {
    auto cfg = small_config(arch, 5, 4);
    auto m = random_model(cfg, 30, 5);
    for (auto mode : {MergeMode::Sum, MergeMode::Product}) {
      const auto id = DocVector::identity(mode, static_cast<std::size_t>(cfg.state_dim()));
      for (int i = 0; i < 200; ++i) {
        std::vector<TermId> ctx(3);
        for (auto& c : ctx) c = static_cast<TermId>(rng() % 31);  // 30 = padding
        const auto t = static_cast<TermId>(rng() % 30);
        CHECK(next_token_log_prob(ctx, t, m, &id) == next_token_log_prob(ctx, t, m));
      }
    }
  }
}

TEST_CASE("build_context left-pads") {
  std::vector<TermId> seq{4, 5, 6};
  std::vector<TermId> out(3);
  build_context(seq, 0, 9, out);
  CHECK(out == std::vector<TermId>{9, 9, 9});
  build_context(seq, 2, 9, out);
  CHECK(out == std::vector<TermId>{9, 4, 5});
}

TEST_CASE("random init follows the fan-in rule") {
  auto cfg = small_config(Arch::M2, 4, 3);
  auto p = NeuralParams::random(cfg, 10, 3);
  const double bound_a = 1.0 / std::sqrt(static_cast<double>(cfg.context_size() * cfg.m0));
  for (const auto& A : p.A) {
    for (double x : A.flat()) CHECK(std::abs(x) <= bound_a);
  }
  for (double x : p.hsm.flat()) CHECK(x == 0.0);
  for (double x : p.b) CHECK(x == 0.0);
  CHECK(p == NeuralParams::random(cfg, 10, 3));
  CHECK_FALSE(p == NeuralParams::random(cfg, 10, 4));
}
