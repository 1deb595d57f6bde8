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

#ifndef INTERACTION_EVAL_PIPELINE_STATISTICS_HPP
#define INTERACTION_EVAL_PIPELINE_STATISTICS_HPP

#include <cmath>
#include <limits>
#include <span>

#include <boost/math/distributions/students_t.hpp>

#include "interaction_eval/core/types.hpp"

namespace interaction_eval {

struct GroupSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
  double se = 0.0;  // sd / sqrt(n)
};

inline GroupSummary summarize(std::span<const double> x) {
  GroupSummary g;
  g.n = x.size();
  if (g.n == 0) return g;
  for (double v : x) g.mean += v;
  g.mean /= static_cast<double>(g.n);
  if (g.n > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - g.mean) * (v - g.mean);
    g.sd = std::sqrt(ss / static_cast<double>(g.n - 1));
  }
  g.se = g.sd / std::sqrt(static_cast<double>(g.n));
  return g;
}

inline GroupSummary summary_from_stats(std::size_t n, double mean, double sd) {
  return {n, mean, sd, sd / std::sqrt(static_cast<double>(n))};
}

struct TTest {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

struct GroupComparison {
  GroupSummary a;
  GroupSummary b;
  TTest pooled;
  TTest welch;
  /// Both groups have zero variance; t and p are NaN unless the means agree.
  bool degenerate = false;
};

namespace detail {
inline double two_sided_p(double t, double df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}
}  // namespace detail

/// Student (pooled variance) and Welch two-sample t-tests of a - b.
inline GroupComparison compare_groups(const GroupSummary& a, const GroupSummary& b) {
  if (a.n < 2 || b.n < 2) raise(ErrorKind::kInvalidInput, "each group needs at least two samples");
  GroupComparison r{a, b, {}, {}, false};
  const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
  const double va = a.sd * a.sd, vb = b.sd * b.sd;
  const double diff = a.mean - b.mean;

  if (va == 0.0 && vb == 0.0) {
    r.degenerate = true;
    const double t = diff == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    r.pooled = {t, na + nb - 2.0, diff == 0.0 ? 1.0 : std::numeric_limits<double>::quiet_NaN()};
    r.welch = r.pooled;
    return r;
  }

  const double df_pooled = na + nb - 2.0;
  const double sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / df_pooled;
  r.pooled.t = diff / std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
  r.pooled.df = df_pooled;
  r.pooled.p = detail::two_sided_p(r.pooled.t, df_pooled);

  const double qa = va / na, qb = vb / nb;
  r.welch.t = diff / std::sqrt(qa + qb);
  r.welch.df = (qa + qb) * (qa + qb) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
  r.welch.p = detail::two_sided_p(r.welch.t, r.welch.df);
  return r;
}

inline GroupComparison compare_groups(std::span<const double> a, std::span<const double> b) {
  return compare_groups(summarize(a), summarize(b));
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_PIPELINE_STATISTICS_HPP
