// Copyright 2026 The Interaction Eval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "interaction_eval/scoring/similarity.hpp"

namespace ie = interaction_eval;
using V = std::vector<double>;

namespace {

ie::ActionSequence seq(V a) { return {std::move(a), 0.1}; }

V random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-5, 5);
  V v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST(Euclidean, Examples) {
  EXPECT_EQ(ie::euclidean_distance(V{1, 2}, V{1, 2}), 0.0);
  EXPECT_DOUBLE_EQ(ie::euclidean_distance(V{1, 1}, V{0, 0}), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(ie::euclidean_distance(V{3, 0}, V{0, 4}), 5.0);
  EXPECT_THROW(ie::euclidean_distance(V{1}, V{1, 2}), ie::Error);
}

TEST(Morphological, Examples) {
  EXPECT_EQ(ie::morphological_distance(V{1, -2}, V{1, -2}), 0.0);
  auto c = ie::morphological_components(V{1, 1}, V{0, 0});
  EXPECT_DOUBLE_EQ(c.asd, 2.0);
  EXPECT_DOUBLE_EQ(c.sad, 2.0);
  EXPECT_DOUBLE_EQ(c.msd, std::sqrt(2.0));
  c = ie::morphological_components(V{1, -1}, V{0, 0});
  EXPECT_DOUBLE_EQ(c.asd, 0.0);
  EXPECT_DOUBLE_EQ(c.msd, 2 * std::sqrt(2.0));
}

TEST(Cosine, Examples) {
  EXPECT_DOUBLE_EQ(ie::cosine_similarity(V{1, 2, 3}, V{1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(ie::cosine_similarity(V{1, 2, 3}, V{-1, -2, -3}), -1.0);
  EXPECT_DOUBLE_EQ(ie::cosine_similarity(V{1, 0}, V{0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(ie::cosine_similarity(V{0, 0}, V{0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(ie::cosine_similarity(V{1, 1}, V{0, 0}), 0.0);
}

TEST(AbilityScore, Examples) {
  auto s = ie::ability_score(seq({0.5, -1, 1.5}), seq({0.5, -1, 1.5}));
  EXPECT_EQ(s.score, 1.0);
  EXPECT_EQ(s.level, ie::Level::kI);
  s = ie::ability_score(seq({0.5, -1, 1.5}), seq({-0.5, 1, -1.5}));
  EXPECT_DOUBLE_EQ(s.components.cosine, -1.0);
  EXPECT_LT(s.score, 0.0);
  EXPECT_GE(s.score, -1.0);
  EXPECT_DOUBLE_EQ(s.score, -1.0 / (1.0 + s.components.msd));
  s = ie::ability_score(seq({1, 1}), seq({0, 0}));
  EXPECT_EQ(s.components.cosine, 0.0);
  EXPECT_DOUBLE_EQ(s.components.msd, std::sqrt(2.0));
  EXPECT_EQ(s.score, 0.0);
  EXPECT_THROW(ie::ability_score(seq({}), seq({1})), ie::Error);
}

TEST(PadAlign, PadsWithTrailingZeros) {
  auto [a, b] = ie::pad_align(seq({1, 2, 3, 4, 5}), seq({1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(a.accelerations, (V{1, 2, 3, 4, 5, 0, 0, 0}));
  EXPECT_EQ(b.size(), 8u);
  auto [c, d] = ie::pad_align(seq({1, 2}), seq({3, 4}));
  EXPECT_EQ(c.accelerations, (V{1, 2}));
  EXPECT_EQ(d.accelerations, (V{3, 4}));
  EXPECT_THROW(ie::pad_align(seq({}), seq({1})), ie::Error);
  ie::ActionSequence other{{1.0}, 0.2};
  EXPECT_THROW(ie::pad_align(seq({1}), other), ie::Error);
}

TEST(Level, Bands) {
  EXPECT_EQ(ie::score_to_level(1.0), ie::Level::kI);
  EXPECT_EQ(ie::score_to_level(0.0), ie::Level::kIII);
  EXPECT_EQ(ie::score_to_level(-1.0), ie::Level::kV);
  EXPECT_EQ(ie::score_to_level(0.6), ie::Level::kI);
  EXPECT_EQ(ie::score_to_level(0.59), ie::Level::kII);
  EXPECT_EQ(ie::score_to_level(-0.2), ie::Level::kIII);
  EXPECT_EQ(ie::score_to_level(-0.21), ie::Level::kIV);
  EXPECT_THROW(ie::score_to_level(1.5), ie::Error);
  for (auto l : {ie::Level::kI, ie::Level::kII, ie::Level::kIII, ie::Level::kIV, ie::Level::kV})
    EXPECT_EQ(ie::level_from_string(ie::to_string(l)), l);
}

TEST(ScoringProperties, Fuzz) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> len(1, 200);
  for (int t = 0; t < 3000; ++t) {
    V a = random_vec(rng, len(rng));
    V b = t % 7 == 0 ? a : random_vec(rng, a.size());
    auto s = ie::ability_score(seq(a), seq(b));
    EXPECT_GE(s.score, -1.0);
    EXPECT_LE(s.score, 1.0);
    EXPECT_EQ(ie::ability_score(seq(a), seq(a)).score, 1.0);
    auto c = ie::morphological_components(a, b);
    if (c.sad > 0) {
      EXPECT_GE(c.msd, c.ed * (1 - 1e-12));
      EXPECT_LE(c.msd, 2 * c.ed * (1 + 1e-12));
    }
    EXPECT_DOUBLE_EQ(ie::morphological_distance(a, b), ie::morphological_distance(b, a));
    V neg = a;
    for (double& x : neg) x = -x;
    EXPECT_NEAR(ie::cosine_similarity(a, neg), -1.0, 1e-12);
    if (s.components.cosine < 0) {
      EXPECT_LT(s.score, 0.0);
    }
  }
}
