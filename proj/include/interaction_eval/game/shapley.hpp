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

#ifndef INTERACTION_EVAL_GAME_SHAPLEY_HPP
#define INTERACTION_EVAL_GAME_SHAPLEY_HPP

#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <vector>

#include "interaction_eval/core/types.hpp"

namespace interaction_eval {

/// Coalitions are bitmasks over players 0..n-1.
using Coalition = std::uint32_t;

template <typename F>
concept CharacteristicFunction = requires(const F& f, Coalition c) {
  { f(c) } -> std::convertible_to<double>;
};

/// Characteristic function stored as a dense table of 2^n values.
struct TabularGame {
  int players = 0;
  std::vector<double> values;

  double operator()(Coalition c) const { return values.at(c); }
};

/// Shapley value of every player:
///   phi_i = sum_{S ∋ i} (|S|-1)!(n-|S|)!/n! * [v(S) - v(S \ {i})].
template <CharacteristicFunction V>
std::vector<double> shapley_values(int n, const V& v) {
  if (n <= 0 || n > 24) raise(ErrorKind::kInvalidGame, "unsupported player count");
  if (v(Coalition{0}) != 0.0) raise(ErrorKind::kInvalidGame, "v(empty set) must be zero");
  std::vector<double> weight(n + 1, 0.0);
  for (int k = 1; k <= n; ++k) {
    // (k-1)!(n-k)!/n! = 1 / (k * C(n, k))
    double binom = 1.0;
    for (int j = 1; j <= k; ++j) binom = binom * (n - k + j) / j;
    weight[k] = 1.0 / (k * binom);
  }
  const Coalition full = (Coalition{1} << n) - 1;
  std::vector<double> cache(std::size_t{full} + 1);
  for (Coalition c = 0; c <= full; ++c) cache[c] = v(c);
  std::vector<double> phi(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const Coalition bit = Coalition{1} << i;
    for (Coalition c = 0; c <= full; ++c) {
      if (!(c & bit)) continue;
      phi[i] += weight[std::popcount(c)] * (cache[c] - cache[c ^ bit]);
    }
  }
  return phi;
}

/// True when v(S) + v(T) <= v(S ∪ T) + tol for every disjoint pair.
template <CharacteristicFunction V>
bool is_superadditive(int n, const V& v, double tol = 1e-12) {
  const Coalition full = (Coalition{1} << n) - 1;
  for (Coalition s = 1; s <= full; ++s) {
    const Coalition rest = full ^ s;
    for (Coalition t = rest; t != 0; t = (t - 1) & rest) {
      if (v(s) + v(t) > v(s | t) + tol) return false;
    }
  }
  return true;
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_GAME_SHAPLEY_HPP
