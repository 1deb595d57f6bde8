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

#ifndef INTERACTION_EVAL_GAME_BIMATRIX_HPP
#define INTERACTION_EVAL_GAME_BIMATRIX_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "interaction_eval/core/types.hpp"

namespace interaction_eval {

/// Two-player normal-form game: `row(i, j)` and `col(i, j)` are the payoffs
/// of the row and column player when row plays i and column plays j.
struct Bimatrix {
  Eigen::MatrixXd row;
  Eigen::MatrixXd col;

  Bimatrix() = default;
  Bimatrix(Eigen::MatrixXd a, Eigen::MatrixXd b) : row(std::move(a)), col(std::move(b)) {
    if (row.rows() != col.rows() || row.cols() != col.cols())
      raise(ErrorKind::kInvalidGame, "payoff matrices differ in shape");
  }

  Eigen::Index rows() const { return row.rows(); }
  Eigen::Index cols() const { return row.cols(); }
};

struct Equilibrium {
  Eigen::VectorXd row_strategy;
  Eigen::VectorXd col_strategy;
  double row_payoff = 0.0;
  double col_payoff = 0.0;

  double total_payoff() const { return row_payoff + col_payoff; }
};

inline Equilibrium make_equilibrium(const Bimatrix& g, Eigen::VectorXd x, Eigen::VectorXd y) {
  Equilibrium e;
  e.row_payoff = x.dot(g.row * y);
  e.col_payoff = x.dot(g.col * y);
  e.row_strategy = std::move(x);
  e.col_strategy = std::move(y);
  return e;
}

/// Largest gain either player could obtain by a unilateral deviation.
inline double deviation_gain(const Bimatrix& g, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y) {
  const double u_row = x.dot(g.row * y);
  const double u_col = x.dot(g.col * y);
  const double best_row = (g.row * y).maxCoeff();
  const double best_col = (g.col.transpose() * x).maxCoeff();
  return std::max(best_row - u_row, best_col - u_col);
}

inline bool is_equilibrium(const Bimatrix& g, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y, double tol = 1e-9) {
  if ((x.array() < -tol).any() || (y.array() < -tol).any()) return false;
  if (std::abs(x.sum() - 1.0) > 1e-9 || std::abs(y.sum() - 1.0) > 1e-9) return false;
  return deviation_gain(g, x, y) <= tol;
}

inline double strategy_distance(const Equilibrium& a, const Equilibrium& b) {
  return std::max((a.row_strategy - b.row_strategy).cwiseAbs().maxCoeff(),
                  (a.col_strategy - b.col_strategy).cwiseAbs().maxCoeff());
}

namespace detail {

inline void for_each_subset(int n, int k, const auto& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Mixed strategy over `support` (length n overall) that makes the opponent
/// indifferent across `opp_support` under `payoff` (opponent's payoff with
/// the opponent as the row index).
inline std::optional<Eigen::VectorXd> indifference_mix(const Eigen::MatrixXd& payoff,
                                                       const std::vector<int>& opp_support,
                                                       const std::vector<int>& support,
                                                       Eigen::Index n) {
  const int k = static_cast<int>(support.size());
  const int r = static_cast<int>(opp_support.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(r + 1, k + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(r + 1);
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < k; ++b) m(a, b) = payoff(opp_support[a], support[b]);
    m(a, k) = -1.0;
  }
  for (int b = 0; b < k; ++b) m(r, b) = 1.0;
  rhs(r) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (lu.rank() < k + 1) return std::nullopt;
  Eigen::VectorXd sol = lu.solve(rhs);
  if ((m * sol - rhs).cwiseAbs().maxCoeff() > 1e-9) return std::nullopt;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int b = 0; b < k; ++b) {
    if (sol(b) < -1e-12) return std::nullopt;
    out(support[b]) = std::max(0.0, sol(b));
  }
  out /= out.sum();
  return out;
}

}  // namespace detail

/// Every equilibrium found on equal-size support pairs. For nondegenerate
/// games this is the complete equilibrium set.
inline std::vector<Equilibrium> solve_nash_enumeration(const Bimatrix& g, double tol = 1e-9) {
  const int m = static_cast<int>(g.rows());
  const int n = static_cast<int>(g.cols());
  std::vector<Equilibrium> found;
  const Eigen::MatrixXd col_t = g.col.transpose();
  for (int k = 1; k <= std::min(m, n); ++k) {
    detail::for_each_subset(m, k, [&](const std::vector<int>& rows) {
      detail::for_each_subset(n, k, [&](const std::vector<int>& cols) {
        // y makes the row player indifferent over `rows`; x likewise.
        auto y = detail::indifference_mix(g.row, rows, cols, n);
        if (!y) return;
        auto x = detail::indifference_mix(col_t, cols, rows, m);
        if (!x) return;
        if (!is_equilibrium(g, *x, *y, tol)) return;
        Equilibrium e = make_equilibrium(g, *x, *y);
        for (const auto& f : found)
          if (strategy_distance(f, e) < 1e-9) return;
        found.push_back(std::move(e));
      });
    });
  }
  return found;
}

struct LemkeHowsonResult {
  Equilibrium equilibrium;
  int pivots = 0;
  bool degenerate = false;
  bool fell_back = false;
};

namespace detail {

/// Tableau for one best-response polytope. Variables are indexed by label;
/// row r reads sum_v t(r, v) * var_v = t(r, rhs).
class LhTableau {
 public:
  LhTableau(const Eigen::MatrixXd& constraint, int first_decision_label, int first_slack_label,
            int labels)
      : t_(Eigen::MatrixXd::Zero(constraint.rows(), labels + 1)),
        basis_(constraint.rows()),
        slack0_(first_slack_label) {
    for (Eigen::Index r = 0; r < constraint.rows(); ++r) {
      for (Eigen::Index c = 0; c < constraint.cols(); ++c)
        t_(r, first_decision_label + c) = constraint(r, c);
      t_(r, first_slack_label + r) = 1.0;
      t_(r, labels) = 1.0;
      basis_[r] = first_slack_label + static_cast<int>(r);
    }
  }

  bool is_basic(int label) const {
    return std::find(basis_.begin(), basis_.end(), label) != basis_.end();
  }

  /// Pivots `entering` into the basis with a lexicographic ratio test and
  /// returns the label that leaves. Returns -1 if the column is unbounded.
  int pivot(int entering, bool& tie_seen) {
    const Eigen::Index rows = t_.rows();
    const Eigen::Index rhs = t_.cols() - 1;
    int best = -1;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (t_(r, entering) <= 1e-12) continue;
      if (best < 0) {
        best = static_cast<int>(r);
        continue;
      }
      int cmp = lex_compare(static_cast<int>(r), best, entering, rhs);
      if (cmp < 0) best = static_cast<int>(r);
    }
    if (best < 0) return -1;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (r == best || t_(r, entering) <= 1e-12) continue;
      double a = t_(r, rhs) / t_(r, entering);
      double b = t_(best, rhs) / t_(best, entering);
      if (std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b))) tie_seen = true;
    }
    const int leaving = basis_[best];
    t_.row(best) /= t_(best, entering);
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (r == best) continue;
      double f = t_(r, entering);
      if (f != 0.0) t_.row(r) -= f * t_.row(best);
    }
    basis_[best] = entering;
    return leaving;
  }

  /// Values of the decision variables [first, first + count).
  Eigen::VectorXd values(int first, int count) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(count);
    const Eigen::Index rhs = t_.cols() - 1;
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      int b = basis_[r];
      if (b >= first && b < first + count) v(b - first) = std::max(0.0, t_(r, rhs));
    }
    return v;
  }

 private:
  // Compares rows by (rhs, slack columns) / entering coefficient.
  int lex_compare(int a, int b, int entering, Eigen::Index rhs) const {
    const double da = t_(a, entering), db = t_(b, entering);
    auto compare = [&](double va, double vb) {
      double x = va / da, y = vb / db;
      double scale = std::max({1.0, std::abs(x), std::abs(y)});
      if (x < y - 1e-12 * scale) return -1;
      if (x > y + 1e-12 * scale) return 1;
      return 0;
    };
    if (int c = compare(t_(a, rhs), t_(b, rhs)); c != 0) return c;
    for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(basis_.size()); ++s) {
      if (int c = compare(t_(a, slack0_ + s), t_(b, slack0_ + s)); c != 0) return c;
    }
    return 0;
  }

  Eigen::MatrixXd t_;
  std::vector<int> basis_;
  int slack0_;
};

}  // namespace detail

/// Lemke-Howson path following from the artificial equilibrium, dropping
/// `initial_label` (0..m-1 for row strategies, m..m+n-1 for columns).
/// Payoffs are shifted to be strictly positive, which leaves equilibria
/// unchanged. Ties in the ratio test are resolved lexicographically; if
/// the path still fails the result falls back to support enumeration.
inline LemkeHowsonResult solve_nash_lemke_howson(const Bimatrix& g, int initial_label = 0) {
  const int m = static_cast<int>(g.rows());
  const int n = static_cast<int>(g.cols());
  if (m == 0 || n == 0) raise(ErrorKind::kInvalidGame, "empty game");
  if (initial_label < 0 || initial_label >= m + n)
    raise(ErrorKind::kInvalidGame, "initial label out of range");
  if (!g.row.allFinite() || !g.col.allFinite())
    raise(ErrorKind::kInvalidGame, "non-finite payoff");

  const Eigen::MatrixXd a = g.row.array() - g.row.minCoeff() + 1.0;
  const Eigen::MatrixXd b = g.col.array() - g.col.minCoeff() + 1.0;
  const int labels = m + n;
  // Row polytope: B^T x + s = 1, x has labels 0..m-1, s has m..m+n-1.
  detail::LhTableau row_poly(b.transpose(), 0, m, labels);
  // Column polytope: r + A y = 1, r has labels 0..m-1, y has m..m+n-1.
  detail::LhTableau col_poly(a, m, 0, labels);

  LemkeHowsonResult result;
  int entering = initial_label;
  bool in_row = initial_label < m;
  const int max_pivots = 50 * labels * labels;
  bool ok = false;
  for (; result.pivots < max_pivots; ++result.pivots) {
    auto& tab = in_row ? row_poly : col_poly;
    int leaving = tab.pivot(entering, result.degenerate);
    if (leaving < 0) break;
    if (leaving == initial_label) {
      ok = true;
      ++result.pivots;
      break;
    }
    entering = leaving;
    in_row = !in_row;
  }

  if (ok) {
    Eigen::VectorXd x = row_poly.values(0, m);
    Eigen::VectorXd y = col_poly.values(m, n);
    if (x.sum() > 0.0 && y.sum() > 0.0) {
      x /= x.sum();
      y /= y.sum();
      if (is_equilibrium(g, x, y, 1e-9 * std::max(1.0, g.row.cwiseAbs().maxCoeff() +
                                                           g.col.cwiseAbs().maxCoeff()))) {
        result.equilibrium = make_equilibrium(g, std::move(x), std::move(y));
        return result;
      }
    }
  }
  result.fell_back = true;
  auto all = solve_nash_enumeration(g, 1e-7);
  if (all.empty()) raise(ErrorKind::kNumerical, "no equilibrium found");
  result.equilibrium = all.front();
  return result;
}

/// Distinct equilibria reached by Lemke-Howson from every initial label.
inline std::vector<Equilibrium> lemke_howson_all_labels(const Bimatrix& g,
                                                        bool* any_degenerate = nullptr) {
  std::vector<Equilibrium> out;
  const int labels = static_cast<int>(g.rows() + g.cols());
  for (int k = 0; k < labels; ++k) {
    auto r = solve_nash_lemke_howson(g, k);
    if (any_degenerate && (r.degenerate || r.fell_back)) *any_degenerate = true;
    bool dup = false;
    for (const auto& e : out)
      if (strategy_distance(e, r.equilibrium) < 1e-9) dup = true;
    if (!dup) out.push_back(std::move(r.equilibrium));
  }
  return out;
}

}  // namespace interaction_eval

#endif  // INTERACTION_EVAL_GAME_BIMATRIX_HPP
