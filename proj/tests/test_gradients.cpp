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

#include "doctest.h"
#include "nnir/gradcheck.hpp"

using namespace nnir;

namespace {

double worst(const std::vector<TensorCheck>& checks) {
  double w = 0.0;
  for (const auto& c : checks) {
    MESSAGE(c.tensor << " rel=" << c.max_rel_error << " abs=" << c.max_abs_error);
    w = std::max(w, c.max_rel_error);
  }
  return w;
}

}  // namespace

TEST_CASE("finite differences agree with backprop for every architecture and merge mode") {
  for (auto arch : {Arch::M1, Arch::M2, Arch::M2Max}) {
    for (std::optional<MergeMode> mode :
         {std::optional<MergeMode>{}, std::optional{MergeMode::Sum}, std::optional{MergeMode::Product}}) {
      CAPTURE(to_string(arch));
      CAPTURE(mode ? to_string(*mode) : "generic");
      const auto p = make_gradcheck_problem(arch, mode, 20, 4, 7);
      const auto checks = gradcheck(p);
      CHECK(checks.size() == (arch == Arch::M1 ? 5u : 6u) + (mode ? 1u : 0u));
      CHECK(worst(checks) < 1e-4);
    }
  }
}

TEST_CASE("document-vector-only scope") {
  for (auto mode : {MergeMode::Sum, MergeMode::Product}) {
    const auto p = make_gradcheck_problem(Arch::M2, mode, 20, 4, 11);
    GradCheckOptions opt;
    opt.scope = GradientScope::DocVectorOnly;
    const auto checks = gradcheck(p, opt);
    REQUIRE(checks.size() == 1);
    CHECK(checks[0].tensor == "z_d");
    CHECK(checks[0].max_rel_error < 1e-4);

    Gradients g(p.model.config, p.model.vocab_words(), true);
    backward(p.samples, p.model, &*p.doc_vector, GradientScope::DocVectorOnly, g);
    for (double x : g.embeddings.flat()) CHECK(x == 0.0);
    for (double x : g.hsm.flat()) CHECK(x == 0.0);
    for (double x : g.b) CHECK(x == 0.0);
    for (double x : g.B.flat()) CHECK(x == 0.0);
  }
}

TEST_CASE("zero weights give zero gradients") {
  auto p = make_gradcheck_problem(Arch::M2Max, MergeMode::Product, 20, 4, 3);
  for (auto& s : p.samples) s.weight = 0.0;
  Gradients g(p.model.config, p.model.vocab_words(), true);
  backward(p.samples, p.model, &*p.doc_vector, GradientScope::All, g);
  for (double x : g.embeddings.flat()) CHECK(x == 0.0);
  for (const auto& a : g.A) {
    for (double x : a.flat()) CHECK(x == 0.0);
  }
  for (double x : g.hsm.flat()) CHECK(x == 0.0);
  for (double x : g.z) CHECK(x == 0.0);
}

TEST_CASE("sum-mode document gradient is the state gradient") {
  // M1 with one sample: dL/db = dL/ds * (1 - s^2), and dL/dz = dL/ds.
  auto p = make_gradcheck_problem(Arch::M1, MergeMode::Sum, 20, 4, 5, 1);
  Gradients g(p.model.config, p.model.vocab_words(), true);
  backward(p.samples, p.model, &*p.doc_vector, GradientScope::All, g);
  ForwardCache cache;
  phi_forward(p.samples[0].context, p.model, cache);
  for (std::size_t i = 0; i < g.z.size(); ++i) {
    CHECK(g.b[i] == doctest::Approx(g.z[i] * (1.0 - cache.state[i] * cache.state[i])).epsilon(1e-12));
  }
}

TEST_CASE("gradients accumulate and scale") {
  const auto p = make_gradcheck_problem(Arch::M2, std::nullopt, 20, 4, 13);
  Gradients whole(p.model.config, p.model.vocab_words(), false);
  backward(p.samples, p.model, nullptr, GradientScope::All, whole);
  Gradients first(p.model.config, p.model.vocab_words(), false);
  Gradients second(p.model.config, p.model.vocab_words(), false);
  const std::size_t half = p.samples.size() / 2;
  backward(std::span(p.samples).first(half), p.model, nullptr, GradientScope::All, first);
  backward(std::span(p.samples).subspan(half), p.model, nullptr, GradientScope::All, second);
  first.add(second);
  for (std::size_t i = 0; i < whole.hsm.flat().size(); ++i) {
    CHECK(first.hsm.flat()[i] == doctest::Approx(whole.hsm.flat()[i]).epsilon(1e-12));
  }
  for (std::size_t i = 0; i < whole.embeddings.flat().size(); ++i) {
    CHECK(first.embeddings.flat()[i] == doctest::Approx(whole.embeddings.flat()[i]).epsilon(1e-12));
  }
  first.scale(0.0);
  for (double x : first.B.flat()) CHECK(x == 0.0);
  first.clear();
  CHECK(first.touched_embeddings().empty());
}
