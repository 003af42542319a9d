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
#include <string>

#include "nnir/nnlm.hpp"

namespace nnir {

// Model checkpoint layout (little-endian):
//   "NNIRMODL" u32 version
//   config: u32 arch, u32 order, u32 m0, u32 m1, u32 m2, u32 kappa
//   u32 tensor_count, then per tensor: u32 ndims, u64 dims[ndims],
//   row-major f64 data.
// Tensors in order: huffman leaf weights (words), embeddings, A_1..A_{n-1},
// b, B (M2/M2Max only), hsm.
void save_model(const std::filesystem::path& path, const NeuralModel& model,
                std::span<const std::uint64_t> leaf_weights);
NeuralModel load_model(const std::filesystem::path& path);

/// doc_id -> z_d for one merge mode.
struct DocVectorTable {
  MergeMode mode = MergeMode::Sum;
  std::size_t dim = 0;
  std::map<std::string, DocVector> vectors;

  const DocVector* find(const std::string& doc_id) const {
    auto it = vectors.find(doc_id);
    return it == vectors.end() ? nullptr : &it->second;
  }
};

// Doc-vector container: "NNIRDVEC" u32 version, u32 mode, u64 dim, u64 count,
// then per entry a u32-length-prefixed doc id and dim f64 values.
void save_doc_vectors(const std::filesystem::path& path, const DocVectorTable& table);
DocVectorTable load_doc_vectors(const std::filesystem::path& path);

}  // namespace nnir
