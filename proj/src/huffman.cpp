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

#include "nnir/huffman.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "nnir/errors.hpp"

namespace nnir {

HuffmanTree HuffmanTree::build(std::span<const std::uint64_t> frequencies) {
  const std::size_t n = frequencies.size();
  if (n < 2) throw UsageError("Huffman tree needs at least two terms");
  for (auto f : frequencies) {
    if (f < 1) throw UsageError("Huffman frequencies must be >= 1");
  }

  struct Node {
    std::uint64_t weight;
    std::uint32_t code;  // leaf id, or n + inner id
  };
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return frequencies[a] < frequencies[b];
  });
  std::deque<Node> leaves;
  for (auto id : order) leaves.push_back({frequencies[id], id});
  std::deque<Node> merged;

  // Merged weights are produced in non-decreasing order, so both queues stay
  // sorted and the front of each is its minimum.
  auto pop_min = [&]() {
    const bool take_leaf =
        !leaves.empty() && (merged.empty() || leaves.front().weight <= merged.front().weight);
    auto& q = take_leaf ? leaves : merged;
    Node node = q.front();
    q.pop_front();
    return node;
  };

  HuffmanTree tree;
  tree.children_.reserve(n - 1);
  while (leaves.size() + merged.size() > 1) {
    const Node a = pop_min();
    const Node b = pop_min();
    const auto id = static_cast<std::uint32_t>(tree.children_.size());
    tree.children_.push_back({a.code, b.code});
    merged.push_back({a.weight + b.weight, static_cast<std::uint32_t>(n) + id});
  }

  tree.paths_.assign(n, {});
  tree.signs_.assign(n, {});
  // Depth-first walk from the root carrying the path so far.
  struct Frame {
    std::uint32_t code;
    std::vector<std::uint32_t> path;
    std::vector<std::int8_t> signs;
  };
  std::vector<Frame> stack;
  stack.push_back({static_cast<std::uint32_t>(n) + tree.root(), {}, {}});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.code < n) {
      tree.paths_[f.code] = std::move(f.path);
      tree.signs_[f.code] = std::move(f.signs);
      continue;
    }
    const std::uint32_t inner = f.code - static_cast<std::uint32_t>(n);
    const auto ch = tree.children_[inner];
    Frame left{ch.left, f.path, f.signs};
    left.path.push_back(inner);
    left.signs.push_back(-1);
    Frame right{ch.right, std::move(f.path), std::move(f.signs)};
    right.path.push_back(inner);
    right.signs.push_back(+1);
    stack.push_back(std::move(left));
    stack.push_back(std::move(right));
  }
  return tree;
}

std::size_t HuffmanTree::max_depth() const {
  std::size_t d = 0;
  for (const auto& p : paths_) d = std::max(d, p.size());
  return d;
}

std::uint64_t HuffmanTree::weighted_path_length(std::span<const std::uint64_t> frequencies) const {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < paths_.size(); ++i) total += frequencies[i] * paths_[i].size();
  return total;
}

}  // namespace nnir
