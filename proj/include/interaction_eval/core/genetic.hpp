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

#ifndef INTERACTION_EVAL_CORE_GENETIC_HPP
#define INTERACTION_EVAL_CORE_GENETIC_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <thread>
#include <vector>

#include "interaction_eval/core/types.hpp"

namespace interaction_eval {

/// Hyperparameters of the binary-coded genetic algorithm.
struct GaConfig {
  int dna_size = 10;  // bits per gene
  double crossover_rate = 0.6;
  double mutation_rate = 0.01;
  int generations = 50;
  int population = 20;
  double grid_step = 0.05;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
};

inline void validate(const GaConfig& c) {
  if (c.dna_size < 1 || c.dna_size > 31) raise(ErrorKind::kInvalidInput, "dna_size out of range");
  if (c.crossover_rate < 0 || c.crossover_rate > 1 || c.mutation_rate < 0 || c.mutation_rate > 1)
    raise(ErrorKind::kInvalidInput, "GA rates must lie in [0, 1]");
  if (c.population < 2) raise(ErrorKind::kInvalidInput, "population must be at least 2");
  if (c.generations < 1) raise(ErrorKind::kInvalidInput, "generations must be at least 1");
}

struct GaGeneration {
  int generation = 0;
  double best_fitness = 0.0;  // best ever up to and including this generation
  double mean_fitness = 0.0;
};

struct GaResult {
  std::vector<std::uint32_t> best_genes;
  double best_fitness = 0.0;
  std::vector<GaGeneration> trace;
};

/// Maximizes `fitness` over `genes` unsigned integers of `dna_size` bits
/// each. Roulette-wheel selection, single-point crossover, per-bit mutation
/// and single-individual elitism. Fitness must be non-negative. All
/// randomness comes from `cfg.seed`; evaluations may run on several
/// threads without affecting the result.
inline GaResult run_binary_ga(int genes, const GaConfig& cfg,
                              const std::function<double(const std::vector<std::uint32_t>&)>& fitness) {
  validate(cfg);
  if (genes < 1) raise(ErrorKind::kInvalidInput, "at least one gene required");
  const int bits = genes * cfg.dna_size;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  using Chromosome = std::vector<std::uint8_t>;

  auto decode = [&](const Chromosome& c) {
    std::vector<std::uint32_t> out(genes, 0);
    for (int g = 0; g < genes; ++g)
      for (int b = 0; b < cfg.dna_size; ++b)
        out[g] = (out[g] << 1) | c[g * cfg.dna_size + b];
    return out;
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw;
  auto evaluate = [&](const std::vector<Chromosome>& pop) {
    std::vector<double> f(pop.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < pop.size(); i = next++) {
        double v = fitness(decode(pop[i]));
        f[i] = std::isfinite(v) && v > 0.0 ? v : 0.0;
      }
    };
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> ts;
      for (unsigned t = 0; t < std::min<unsigned>(workers, pop.size()); ++t) ts.emplace_back(work);
      for (auto& t : ts) t.join();
    }
    return f;
  };

  std::vector<Chromosome> pop(cfg.population, Chromosome(bits));
  for (auto& c : pop)
    for (auto& b : c) b = unit(rng) < 0.5 ? 1 : 0;

  GaResult result;
  Chromosome best;
  double best_f = -1.0;
  for (int gen = 0; gen < cfg.generations; ++gen) {
    std::vector<double> f = evaluate(pop);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (f[i] > best_f) {
        best_f = f[i];
        best = pop[i];
      }
    }
    double mean = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
    result.trace.push_back({gen, best_f, mean});
    if (gen + 1 == cfg.generations) break;

    // Roulette selection; uniform when every fitness is zero.
    std::vector<double> cumulative(f.size());
    std::partial_sum(f.begin(), f.end(), cumulative.begin());
    const double total = cumulative.back();
    auto select = [&]() -> const Chromosome& {
      if (!(total > 0.0)) return pop[static_cast<std::size_t>(unit(rng) * pop.size()) % pop.size()];
      double r = unit(rng) * total;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
      return pop[std::min<std::size_t>(it - cumulative.begin(), pop.size() - 1)];
    };

    std::vector<Chromosome> next;
    next.reserve(pop.size());
    next.push_back(best);
    while (next.size() < pop.size()) {
      Chromosome a = select();
      Chromosome b = select();
      if (unit(rng) < cfg.crossover_rate) {
        auto point = static_cast<int>(unit(rng) * (bits - 1)) + 1;
        for (int k = point; k < bits; ++k) std::swap(a[k], b[k]);
      }
      for (auto* c : {&a, &b}) {
        for (auto& bit : *c)
          if (unit(rng) < cfg.mutation_rate) bit ^= 1;
      }
      next.push_back(std::move(a));
      if (next.size() < pop.size()) next.push_back(std::move(b));
    }
    pop = std::move(next);
  }
  result.best_genes = decode(best);
  result.best_fitness = best_f;
  return result;
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_CORE_GENETIC_HPP
