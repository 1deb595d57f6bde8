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
#include <sstream>

#include <gtest/gtest.h>

#include "interaction_eval/calibration/calibration.hpp"
#include "interaction_eval/synthetic.hpp"

namespace ie = interaction_eval;
namespace syn = interaction_eval::synthetic;

namespace {

// Safety weighted so rollouts resolve within the step cap.
ie::GameConfig generating_config() {
  ie::GameConfig c;
  c.m_weight = 0.2;
  c.n_weight = 0.8;
  return c;
}

std::vector<ie::ScenarioRecord> planted(const ie::RiskParams& truth) {
  const std::vector<syn::EncounterSpec> specs{
      {"s1", 30, 30, 8, 10, {}}, {"s2", 25, 35, 7, 11, {}}, {"s3", 35, 28, 9, 9, {}}};
  std::vector<ie::ScenarioRecord> out;
  for (const auto& s : specs) out.push_back(syn::model_generated(s, generating_config(), truth));
  return out;
}

ie::RiskParams truth() {
  ie::RiskParams p;
  p.w_now = 0.3;
  p.alpha_x = 0.1;
  p.alpha_y = 0.45;
  p.beta_x = 0.85;
  p.beta_y = 0.9;
  return p;
}

}  // namespace

TEST(Objective, ZeroAtGeneratingParameters) {
  auto recs = planted(truth());
  ie::ObjectiveStats st;
  double f = ie::calibration_objective(truth(), recs, generating_config(), &st);
  EXPECT_EQ(st.scenarios_used, 3);
  EXPECT_EQ(st.scenarios_skipped, 0);
  EXPECT_NEAR(f, 0.0, 1e-12);
}

TEST(Objective, SinglePerturbationAddsHalfSquareOverN) {
  auto recs = planted(truth());
  const double delta = 0.7;
  recs[1].trajectories[0][0].a += delta;
  double f = ie::calibration_objective(truth(), recs, generating_config());
  EXPECT_NEAR(f, delta * delta / (2.0 * 3.0), 1e-12);
}

TEST(Objective, DuplicatingScenariosKeepsValue) {
  auto recs = planted(truth());
  recs[0].trajectories[1][2].a -= 0.4;
  ie::RiskParams other = truth();
  other.alpha_y = 0.2;
  const double f1 = ie::calibration_objective(other, recs, generating_config());
  auto doubled = recs;
  doubled.insert(doubled.end(), recs.begin(), recs.end());
  const double f2 = ie::calibration_objective(other, doubled, generating_config());
  EXPECT_NEAR(f1, f2, 1e-12 * std::max(1.0, f1));
}

TEST(Objective, NonNegative) {
  auto recs = planted(truth());
  for (double w : {0.0, 0.25, 0.5, 1.0}) {
    ie::RiskParams p = truth();
    p.w_now = w;
    EXPECT_GE(ie::calibration_objective(p, recs, generating_config()), 0.0);
  }
  EXPECT_THROW(ie::calibration_objective(truth(), {}, generating_config()), ie::Error);
}

TEST(Fitness, Examples) {
  EXPECT_NEAR(ie::fitness(1.0), 1.0, 1e-8);
  EXPECT_NEAR(ie::fitness(0.0), 1e9, 1e-3);
  EXPECT_NEAR(ie::fitness(4.0), 0.25, 1e-9);
  EXPECT_THROW(ie::fitness(-1.0), ie::Error);
  EXPECT_GT(ie::fitness(0.5), ie::fitness(0.6));
}

TEST(DecodeGene, OnGridAndInBox) {
  const int bits = 10;
  for (std::uint32_t g = 0; g < (1u << bits); ++g) {
    double v = ie::decode_gene(g, bits, 0.0, 1.0, 0.05);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_NEAR(v / 0.05, std::round(v / 0.05), 1e-9);
  }
  EXPECT_EQ(ie::decode_gene(0, bits, 0.2, 0.8, 0.05), 0.2);
  EXPECT_NEAR(ie::decode_gene((1u << bits) - 1, bits, 0.2, 0.8, 0.05), 0.8, 1e-12);
}

TEST(GaCalibrate, DeterministicAndMonotoneTrace) {
  auto recs = planted(truth());
  ie::GaConfig ga;
  ga.generations = 4;
  ga.population = 8;
  ga.seed = 5;
  ga.threads = 1;
  auto a = ie::ga_calibrate(recs, ga, generating_config());
  ga.threads = 3;
  auto b = ie::ga_calibrate(recs, ga, generating_config());
  EXPECT_EQ(ie::to_vector(a.params), ie::to_vector(b.params));
  EXPECT_EQ(a.objective, b.objective);
  ASSERT_EQ(a.trace.size(), 4u);
  for (std::size_t g = 1; g < a.trace.size(); ++g)
    EXPECT_GE(a.trace[g].best_fitness, a.trace[g - 1].best_fitness);
  EXPECT_NEAR(a.best_fitness, ie::fitness(a.objective), 1e-9 * a.best_fitness);
  for (const auto& v : a.evaluated)
    EXPECT_GE(ie::calibration_objective(ie::from_vector(v), recs, generating_config()),
              a.objective - 1e-12);
}

TEST(GaCalibrate, RecoversTruthInPointBox) {
  auto recs = planted(truth());
  ie::SearchBox box;
  box.lower = ie::to_vector(truth());
  box.upper = box.lower;
  box.upper[2] += 0.1;
  box.lower[2] -= 0.1;
  ie::GaConfig ga;
  ga.generations = 6;
  ga.population = 10;
  ga.threads = 1;
  auto r = ie::ga_calibrate(recs, ga, generating_config(), box);
  EXPECT_NEAR(r.objective, 0.0, 1e-12);
  EXPECT_NEAR(r.params.w_now, 0.3, 1e-12);
}

TEST(GaCalibrate, RejectsBadInput) {
  auto recs = planted(truth());
  ie::SearchBox box;
  box.lower[0] = 0.9;
  box.upper[0] = 0.1;
  EXPECT_THROW(ie::ga_calibrate(recs, {}, generating_config(), box), ie::Error);
  ie::GaConfig bad;
  bad.mutation_rate = 2;
  EXPECT_THROW(ie::ga_calibrate(recs, bad, generating_config()), ie::Error);
}

TEST(TraceCsv, Format) {
  std::vector<ie::GaGeneration> t{{0, 1.5, 0.5}, {1, 2.0, 1.0}};
  std::ostringstream os;
  ie::write_trace_csv(os, t);
  EXPECT_EQ(os.str(), "generation,best_fitness,mean_fitness\n0,1.5,0.5\n1,2,1\n");
}
