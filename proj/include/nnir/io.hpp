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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nnir::io {

/// Writes a file by streaming into `<path>.tmp` and renaming it over `path`
/// once `writer` returns. A throwing writer leaves `path` untouched.
void write_atomically(const std::filesystem::path& path,
                      const std::function<void(std::ostream&)>& writer,
                      bool binary = false);

std::string read_text_file(const std::filesystem::path& path);

// Little-endian binary primitives shared by the index, checkpoint and
// doc-vector containers.
void put_u32(std::ostream& out, std::uint32_t v);
void put_u64(std::ostream& out, std::uint64_t v);
void put_f64(std::ostream& out, double v);
void put_string(std::ostream& out, std::string_view s);
void put_magic(std::ostream& out, std::string_view magic, std::uint32_t version);

std::uint32_t get_u32(std::istream& in);
std::uint64_t get_u64(std::istream& in);
double get_f64(std::istream& in);
std::string get_string(std::istream& in);
/// Reads and checks a magic tag; returns the stored version.
std::uint32_t expect_magic(std::istream& in, std::string_view magic);

std::vector<std::string> split_ws(std::string_view line);

}  // namespace nnir::io
