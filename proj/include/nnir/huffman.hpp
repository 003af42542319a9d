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

#include <cstdint>
#include <span>
#include <vector>

namespace nnir {

/// Binary Huffman tree over term ids [0, leaves). Inner nodes are numbered
/// in creation order, so the root is leaves - 2.
///
/// Sign convention: a leaf reached through the left branch of node s has
/// sign -1 at s, through the right branch +1. The first tree popped at each
/// merge (the lighter one) becomes the left child.
class HuffmanTree {
 public:
  /// Two-queue construction. Among equal weights the tree created earliest
  /// wins; leaves are created before any inner node, in ascending id order.
  /// Requires at least two terms with count >= 1.
  static HuffmanTree build(std::span<const std::uint64_t> frequencies);

  std::size_t leaf_count() const { return paths_.size(); }
  std::size_t inner_count() const { return children_.size(); }
  std::uint32_t root() const { return static_cast<std::uint32_t>(children_.size() - 1); }

  /// Inner nodes from the root down to the leaf's parent.
  std::span<const std::uint32_t> path(std::uint32_t leaf) const { return paths_.at(leaf); }
  std::span<const std::int8_t> signs(std::uint32_t leaf) const { return signs_.at(leaf); }
  std::size_t depth(std::uint32_t leaf) const { return paths_.at(leaf).size(); }
  std::size_t max_depth() const;

  /// Child encoding: values < leaf_count() are leaves, others are
  /// leaf_count() + inner node id.
  struct Children {
    std::uint32_t left = 0;
    std::uint32_t right = 0;
  };
  std::span<const Children> children() const { return children_; }

  /// Sum over leaves of frequency * depth.
  std::uint64_t weighted_path_length(std::span<const std::uint64_t> frequencies) const;

 private:
  std::vector<Children> children_;
  std::vector<std::vector<std::uint32_t>> paths_;
  std::vector<std::vector<std::int8_t>> signs_;
};

}  // namespace nnir
