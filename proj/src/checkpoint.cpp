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

#include "nnir/checkpoint.hpp"

#include <cmath>
#include <fstream>

#include "nnir/errors.hpp"
#include "nnir/io.hpp"

namespace nnir {

namespace {

constexpr std::string_view kModelMagic = "NNIRMODL";
constexpr std::string_view kDocVecMagic = "NNIRDVEC";
constexpr std::uint32_t kVersion = 1;

void put_tensor(std::ostream& out, std::span<const std::uint64_t> dims, std::span<const double> data) {
  io::put_u32(out, static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) io::put_u64(out, d);
  for (double x : data) io::put_f64(out, x);
}

void put_matrix(std::ostream& out, const Matrix& m) {
  const std::uint64_t dims[] = {m.rows(), m.cols()};
  put_tensor(out, dims, m.flat());
}

void put_vector(std::ostream& out, std::span<const double> v) {
  const std::uint64_t dims[] = {v.size()};
  put_tensor(out, dims, v);
}

std::vector<std::uint64_t> get_dims(std::istream& in) {
  const auto nd = io::get_u32(in);
  if (nd < 1 || nd > 2) throw DataError("checkpoint tensor has unsupported rank");
  std::vector<std::uint64_t> dims(nd);
  for (auto& d : dims) d = io::get_u64(in);
  return dims;
}

void get_matrix(std::istream& in, Matrix& m) {
  auto dims = get_dims(in);
  if (dims.size() != 2 || dims[0] != m.rows() || dims[1] != m.cols()) {
    throw DataError("checkpoint tensor shape does not match its config");
  }
  for (auto& x : m.flat()) x = io::get_f64(in);
}

std::vector<double> get_vector(std::istream& in) {
  auto dims = get_dims(in);
  if (dims.size() != 1) throw DataError("checkpoint expected a vector tensor");
  std::vector<double> v(dims[0]);
  for (auto& x : v) x = io::get_f64(in);
  return v;
}

}  // namespace

void save_model(const std::filesystem::path& path, const NeuralModel& model,
                std::span<const std::uint64_t> leaf_weights) {
  if (leaf_weights.size() != model.vocab_words()) {
    throw UsageError("leaf weight count differs from the model vocabulary");
  }
  const auto& c = model.config;
  const auto& p = model.params;
  io::write_atomically(
      path,
      [&](std::ostream& out) {
        io::put_magic(out, kModelMagic, kVersion);
        io::put_u32(out, static_cast<std::uint32_t>(c.arch));
        for (int v : {c.order, c.m0, c.m1, c.m2, c.kappa}) io::put_u32(out, static_cast<std::uint32_t>(v));
        const std::uint32_t tensors = 1 + 1 + static_cast<std::uint32_t>(p.A.size()) + 1 +
                                      (c.arch != Arch::M1 ? 1 : 0) + 1;
        io::put_u32(out, tensors);
        std::vector<double> weights(leaf_weights.begin(), leaf_weights.end());
        put_vector(out, weights);
        put_matrix(out, p.embeddings);
        for (const auto& a : p.A) put_matrix(out, a);
        put_vector(out, p.b);
        if (c.arch != Arch::M1) put_matrix(out, p.B);
        put_matrix(out, p.hsm);
      },
      true);
}

NeuralModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model: " + path.string());
  if (io::expect_magic(in, kModelMagic) != kVersion) throw DataError("unsupported model version");
  NeuralModel m;
  const auto arch = io::get_u32(in);
  if (arch > 2) throw DataError("unknown architecture in checkpoint");
  m.config.arch = static_cast<Arch>(arch);
  m.config.order = static_cast<int>(io::get_u32(in));
  m.config.m0 = static_cast<int>(io::get_u32(in));
  m.config.m1 = static_cast<int>(io::get_u32(in));
  m.config.m2 = static_cast<int>(io::get_u32(in));
  m.config.kappa = static_cast<int>(io::get_u32(in));
  m.config.validate();
  const auto tensors = io::get_u32(in);
  const std::uint32_t expected = 1 + 1 + static_cast<std::uint32_t>(m.config.context_size()) + 1 +
                                 (m.config.arch != Arch::M1 ? 1 : 0) + 1;
  if (tensors != expected) throw DataError("checkpoint tensor count does not match its config");
  auto weights = get_vector(in);
  std::vector<std::uint64_t> freqs;
  for (double w : weights) {
    if (!(w >= 1.0) || w != std::floor(w)) throw DataError("invalid leaf weight in checkpoint");
    freqs.push_back(static_cast<std::uint64_t>(w));
  }
  m.tree = HuffmanTree::build(freqs);
  m.params = NeuralParams::zeros(m.config, freqs.size());
  get_matrix(in, m.params.embeddings);
  for (auto& a : m.params.A) get_matrix(in, a);
  auto b = get_vector(in);
  if (b.size() != m.params.b.size()) throw DataError("checkpoint bias size mismatch");
  m.params.b = std::move(b);
  if (m.config.arch != Arch::M1) get_matrix(in, m.params.B);
  get_matrix(in, m.params.hsm);
  if (!m.params.all_finite()) throw NumericalError("checkpoint contains non-finite values");
  return m;
}

void save_doc_vectors(const std::filesystem::path& path, const DocVectorTable& table) {
  io::write_atomically(
      path,
      [&](std::ostream& out) {
        io::put_magic(out, kDocVecMagic, kVersion);
        io::put_u32(out, static_cast<std::uint32_t>(table.mode));
        io::put_u64(out, table.dim);
        io::put_u64(out, table.vectors.size());
        for (const auto& [id, dv] : table.vectors) {
          if (dv.z.size() != table.dim || dv.mode != table.mode) {
            throw UsageError("document vector " + id + " does not match its table");
          }
          io::put_string(out, id);
          for (double x : dv.z) io::put_f64(out, x);
        }
      },
      true);
}

DocVectorTable load_doc_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open document vectors: " + path.string());
  if (io::expect_magic(in, kDocVecMagic) != kVersion) throw DataError("unsupported doc-vector version");
  DocVectorTable t;
  const auto mode = io::get_u32(in);
  if (mode > 1) throw DataError("unknown merge mode in doc-vector file");
  t.mode = static_cast<MergeMode>(mode);
  t.dim = io::get_u64(in);
  const auto n = io::get_u64(in);
  for (std::uint64_t i = 0; i < n; ++i) {
    auto id = io::get_string(in);
    DocVector dv{t.mode, std::vector<double>(t.dim)};
    for (auto& x : dv.z) x = io::get_f64(in);
    t.vectors.emplace(std::move(id), std::move(dv));
  }
  return t;
}

}  // namespace nnir
