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

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "doctest.h"
#include "nnir/errors.hpp"
#include "nnir/huffman.hpp"

using namespace nnir;

namespace {

// Minimal weighted length over every prefix code: optimal codeword lengths
// can be taken non-increasing in weight, so enumerate non-decreasing depth
// sequences for the weights sorted in descending order and keep those
// satisfying the Kraft inequality.
std::uint64_t brute_force_optimal(std::vector<std::uint64_t> w) {
  std::sort(w.rbegin(), w.rend());
  const int n = static_cast<int>(w.size());
  std::uint64_t best = UINT64_MAX;
  std::vector<int> depth(w.size());
  std::function<void(int, int, double)> rec = [&](int i, int min_depth, double kraft) {
    if (i == n) {
      if (kraft <= 1.0 + 1e-12) {
        std::uint64_t cost = 0;
        for (int j = 0; j < n; ++j) cost += w[j] * static_cast<std::uint64_t>(depth[j]);
        best = std::min(best, cost);
      }
      return;
    }
    for (int d = min_depth; d <= n - 1; ++d) {
      // The rest fit only if they can all go to the deepest level.
      if (kraft + std::ldexp(1.0, -d) + std::ldexp(1.0, -(n - 1)) * (n - i - 1) > 1.0 + 1e-12) continue;
      depth[i] = d;
      rec(i + 1, d, kraft + std::ldexp(1.0, -d));
    }
  };
  rec(0, 1, 0.0);
  return best;
}

void check_structure(const HuffmanTree& t) {
  const auto n = t.leaf_count();
  CHECK(t.inner_count() == n - 1);
  double kraft = 0.0;
  std::set<std::vector<std::int8_t>> codes;
  for (std::uint32_t leaf = 0; leaf < n; ++leaf) {
    const auto p = t.path(leaf);
    const auto s = t.signs(leaf);
    REQUIRE(p.size() == s.size());
    REQUIRE(!p.empty());
    CHECK(p[0] == t.root());
    kraft += std::ldexp(1.0, -static_cast<int>(p.size()));
    codes.insert(std::vector<std::int8_t>(s.begin(), s.end()));
  }
  CHECK(codes.size() == n);
  // Prefix-free: no code is a prefix of another.
  for (const auto& c1 : codes) {
    for (const auto& c2 : codes) {
      if (c1.size() < c2.size()) CHECK_FALSE(std::equal(c1.begin(), c1.end(), c2.begin()));
    }
  }
  CHECK(kraft == doctest::Approx(1.0));
}

}  // namespace

TEST_CASE("huffman examples") {
  std::vector<std::uint64_t> two{1, 1};
  auto t2 = HuffmanTree::build(two);
  CHECK(t2.depth(0) == 1);
  CHECK(t2.depth(1) == 1);
  CHECK(t2.signs(0)[0] == -1);  // first popped goes left
  CHECK(t2.signs(1)[0] == +1);

  std::vector<std::uint64_t> abc{1, 1, 2};
  auto t3 = HuffmanTree::build(abc);
  CHECK(t3.depth(2) == 1);
  CHECK(t3.depth(0) == 2);
  CHECK(t3.depth(1) == 2);
  CHECK(t3.root() == 1);
  check_structure(t3);

  std::vector<std::uint64_t> one{5};
  CHECK_THROWS_AS(HuffmanTree::build(one), UsageError);
  std::vector<std::uint64_t> zero{3, 0};
  CHECK_THROWS_AS(HuffmanTree::build(zero), UsageError);
}

TEST_CASE("huffman: FIFO tie-breaking") {
  // Leaves of weight 2 are preferred over the merged (1,1) tree of weight 2.
  std::vector<std::uint64_t> w{1, 1, 2, 2};
  auto t = HuffmanTree::build(w);
  const auto ch = t.children();
  REQUIRE(ch.size() == 3);
  CHECK(ch[0].left == 0);
  CHECK(ch[0].right == 1);
  CHECK(ch[1].left == 2);
  CHECK(ch[1].right == 3);
  CHECK(ch[2].left == 4 + 0);
  CHECK(ch[2].right == 4 + 1);
  CHECK(t.max_depth() == 2);
}

TEST_CASE("huffman: optimal for every multiset of size <= 8 with counts <= 5") {
  std::mt19937_64 rng(1);
  std::size_t checked = 0;
  for (int n = 2; n <= 8; ++n) {
    std::vector<std::uint64_t> w(static_cast<std::size_t>(n), 1);
    // Enumerate non-decreasing sequences over [1, 5].
    while (true) {
      auto perm = w;
      std::shuffle(perm.begin(), perm.end(), rng);
      auto t = HuffmanTree::build(perm);
      CHECK(t.weighted_path_length(perm) == brute_force_optimal(perm));
      check_structure(t);
      ++checked;
      int i = n - 1;
      while (i >= 0 && w[static_cast<std::size_t>(i)] == 5) --i;
      if (i < 0) break;
      const auto v = w[static_cast<std::size_t>(i)] + 1;
      for (int j = i; j < n; ++j) w[static_cast<std::size_t>(j)] = v;
    }
  }
  CHECK(checked == 15 + 35 + 70 + 126 + 210 + 330 + 495);
}

TEST_CASE("huffman: deterministic") {
  std::vector<std::uint64_t> w{5, 3, 3, 3, 1, 1, 7, 2, 2};
  auto a = HuffmanTree::build(w);
  auto b = HuffmanTree::build(w);
  for (std::uint32_t i = 0; i < w.size(); ++i) {
    CHECK(std::vector<std::uint32_t>(a.path(i).begin(), a.path(i).end()) ==
          std::vector<std::uint32_t>(b.path(i).begin(), b.path(i).end()));
  }
}
