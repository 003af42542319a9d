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

#include <fstream>
#include <string>

#include "doctest.h"
#include "nnir/porter_stemmer.hpp"

using nnir::porter_stem;

TEST_CASE("porter: rule-table examples") {
  CHECK(porter_stem("caresses") == "caress");
  CHECK(porter_stem("ponies") == "poni");
  CHECK(porter_stem("ties") == "ti");
  CHECK(porter_stem("cats") == "cat");
  CHECK(porter_stem("feed") == "feed");
  CHECK(porter_stem("agreed") == "agre");
  CHECK(porter_stem("plastered") == "plaster");
  CHECK(porter_stem("bled") == "bled");
  CHECK(porter_stem("motoring") == "motor");
  CHECK(porter_stem("sing") == "sing");
  CHECK(porter_stem("conflated") == "conflat");
  CHECK(porter_stem("hopping") == "hop");
  CHECK(porter_stem("falling") == "fall");
  CHECK(porter_stem("filing") == "file");
  CHECK(porter_stem("happy") == "happi");
  CHECK(porter_stem("sky") == "sky");
  CHECK(porter_stem("relational") == "relat");
  CHECK(porter_stem("sensibiliti") == "sensibl");
  CHECK(porter_stem("replacement") == "replac");
  CHECK(porter_stem("adoption") == "adopt");
  CHECK(porter_stem("controll") == "control");
  CHECK(porter_stem("generalizations") == "gener");
}

TEST_CASE("porter: short words are stemmed, no length cutoff") {
  CHECK(porter_stem("is") == "i");
  CHECK(porter_stem("a") == "a");
  CHECK(porter_stem("") == "");
}

TEST_CASE("porter: words with digits pass through") {
  CHECK(porter_stem("abc123") == "abc123");
  CHECK(porter_stem("1990s") == "1990");
}

// Frozen from an independent implementation of the original algorithm
// (see tests/oracles/porter_oracle.py).
TEST_CASE("porter: matches the frozen oracle vocabulary") {
  std::ifstream in(std::string(NNIR_TEST_DATA_DIR) + "/porter_vocabulary.tsv");
  REQUIRE(in);
  std::string line;
  std::size_t checked = 0;
  std::size_t mismatches = 0;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    const auto word = line.substr(0, tab);
    const auto stem = line.substr(tab + 1);
    if (porter_stem(word) != stem) {
      ++mismatches;
      if (mismatches <= 20) MESSAGE(word << ": got " << porter_stem(word) << ", want " << stem);
    }
    ++checked;
  }
  CHECK(checked > 8000);
  CHECK(mismatches == 0);
}
