// Dense two-phase primal simplex for the desk-scale exact oracles.
// Dantzig pricing with a Bland fallback on stall; the final basic solution is
// re-solved against the original constraint data with an LU factorization so
// residuals stay at machine precision instead of accumulated pivot drift.

#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <utility>
#include <vector>

namespace nsdp {

enum class RowSense { LE, GE, EQ };

struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;  // minimized; size num_vars

  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    RowSense sense = RowSense::EQ;
    double rhs = 0.0;
  };
  std::vector<Row> rows;

  int add_variable(double cost) {
    objective.push_back(cost);
    return num_vars++;
  }
  void add_row(Row row) { rows.push_back(std::move(row)); }
};

enum class SimplexStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct SimplexResult {
  SimplexStatus status = SimplexStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;
};

namespace detail {

class SimplexTableau {
 public:
  explicit SimplexTableau(const LinearProgram& lp) : lp_(lp) { build(); }

  SimplexResult solve() {
    SimplexResult result;
    if (rows_ == 0) {
      result.x.assign(lp_.num_vars, 0.0);
      // Unconstrained nonnegative variables: x = 0 unless some cost is negative.
      for (int j = 0; j < lp_.num_vars; ++j)
        if (lp_.objective[j] < -kEps) {
          result.status = SimplexStatus::Unbounded;
          return result;
        }
      result.status = SimplexStatus::Optimal;
      result.objective = 0.0;
      return result;
    }

    // Phase 1: minimize the artificial sum.
    if (!iterate(cost1_, /*allow_artificials=*/true)) {
      result.status = SimplexStatus::IterationLimit;
      return result;
    }
    if (-cost1_[cols_] > 1e-7) {
      result.status = SimplexStatus::Infeasible;
      return result;
    }
    drive_out_artificials();

    // Phase 2: original objective, artificial columns locked out.
    bland_ = false;
    stall_ = 0;
    if (!iterate(cost2_, /*allow_artificials=*/false)) {
      bool unb = unbounded_;
      result.status = unb ? SimplexStatus::Unbounded : SimplexStatus::IterationLimit;
      return result;
    }

    result.x = extract_solution();
    result.objective = 0.0;
    for (int j = 0; j < lp_.num_vars; ++j) result.objective += lp_.objective[j] * result.x[j];
    result.status = SimplexStatus::Optimal;
    return result;
  }

 private:
  static constexpr double kEps = 1e-9;

  const LinearProgram& lp_;
  int rows_ = 0;
  int cols_ = 0;        // structural + slack + artificial
  int art_begin_ = 0;   // first artificial column
  std::vector<double> tab_;    // rows_ x (cols_ + 1)
  std::vector<double> orig_;   // untouched copy for the final basis re-solve
  std::vector<double> cost1_, cost2_;  // reduced-cost rows, last entry = -objective
  std::vector<int> basis_;
  bool bland_ = false;
  bool unbounded_ = false;
  int stall_ = 0;
  double last_obj_ = std::numeric_limits<double>::infinity();

  double& at(int i, int j) { return tab_[static_cast<size_t>(i) * (cols_ + 1) + j]; }
  double orig_at(int i, int j) const { return orig_[static_cast<size_t>(i) * (cols_ + 1) + j]; }

  void build() {
    rows_ = static_cast<int>(lp_.rows.size());
    int n_slack = 0;
    for (const auto& row : lp_.rows)
      if (row.sense != RowSense::EQ) ++n_slack;
    art_begin_ = lp_.num_vars + n_slack;
    cols_ = art_begin_ + rows_;  // one artificial slot per row (unused ones stay zero)

    tab_.assign(static_cast<size_t>(rows_) * (cols_ + 1), 0.0);
    basis_.assign(rows_, -1);

    int slack = lp_.num_vars;
    for (int i = 0; i < rows_; ++i) {
      const auto& row = lp_.rows[i];
      double sign = row.rhs < 0 ? -1.0 : 1.0;
      for (const auto& [j, v] : row.coeffs) at(i, j) += sign * v;
      at(i, cols_) = sign * row.rhs;

      RowSense sense = row.sense;
      if (sign < 0) {
        if (sense == RowSense::LE) sense = RowSense::GE;
        else if (sense == RowSense::GE) sense = RowSense::LE;
      }
      if (sense == RowSense::LE) {
        at(i, slack) = 1.0;
        basis_[i] = slack;
        ++slack;
      } else if (sense == RowSense::GE) {
        at(i, slack) = -1.0;
        ++slack;
        at(i, art_begin_ + i) = 1.0;
        basis_[i] = art_begin_ + i;
      } else {
        at(i, art_begin_ + i) = 1.0;
        basis_[i] = art_begin_ + i;
      }
    }
    orig_ = tab_;

    cost1_.assign(cols_ + 1, 0.0);
    cost2_.assign(cols_ + 1, 0.0);
    for (int i = 0; i < rows_; ++i)
      if (basis_[i] >= art_begin_) cost1_[basis_[i]] = 1.0;
    for (int j = 0; j < lp_.num_vars; ++j) cost2_[j] = lp_.objective[j];
    // Reduce phase-1 costs against the basic artificials.
    for (int i = 0; i < rows_; ++i) {
      if (basis_[i] < art_begin_) continue;
      for (int j = 0; j <= cols_; ++j) cost1_[j] -= at(i, j);
      cost1_[basis_[i]] = 0.0;
    }
  }

  void pivot(int row, int col) {
    double piv = at(row, col);
    for (int j = 0; j <= cols_; ++j) at(row, j) /= piv;
    at(row, col) = 1.0;
    for (int i = 0; i < rows_; ++i) {
      if (i == row) continue;
      double f = at(i, col);
      if (f == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) at(i, j) -= f * at(row, j);
      at(i, col) = 0.0;
    }
    for (auto* c : {&cost1_, &cost2_}) {
      double f = (*c)[col];
      if (f == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) (*c)[j] -= f * at(row, j);
      (*c)[col] = 0.0;
    }
    basis_[row] = col;
  }

  int choose_entering(const std::vector<double>& cost, bool allow_artificials) const {
    int limit = allow_artificials ? cols_ : art_begin_;
    if (bland_) {
      for (int j = 0; j < limit; ++j)
        if (cost[j] < -kEps) return j;
      return -1;
    }
    int best = -1;
    double best_val = -kEps;
    for (int j = 0; j < limit; ++j)
      if (cost[j] < best_val) {
        best_val = cost[j];
        best = j;
      }
    return best;
  }

  int choose_leaving(int col) const {
    int best = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < rows_; ++i) {
      double a = tab_[static_cast<size_t>(i) * (cols_ + 1) + col];
      if (a <= kEps) continue;
      double ratio = tab_[static_cast<size_t>(i) * (cols_ + 1) + cols_] / a;
      if (best < 0 || ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && basis_[i] < basis_[best])) {
        best = i;
        best_ratio = ratio;
      }
    }
    return best;
  }

  bool iterate(std::vector<double>& cost, bool allow_artificials) {
    unbounded_ = false;
    long max_pivots = 200L * (rows_ + cols_) + 20000;
    for (long it = 0; it < max_pivots; ++it) {
      int col = choose_entering(cost, allow_artificials);
      if (col < 0) return true;  // optimal for this phase
      int row = choose_leaving(col);
      if (row < 0) {
        unbounded_ = true;
        return false;
      }
      pivot(row, col);

      double obj = -cost[cols_];
      if (obj < last_obj_ - 1e-12) {
        last_obj_ = obj;
        stall_ = 0;
      } else if (++stall_ > 1000) {
        bland_ = true;  // anti-cycling from here on
      }
    }
    return false;
  }

  void drive_out_artificials() {
    for (int i = 0; i < rows_; ++i) {
      if (basis_[i] < art_begin_) continue;
      int col = -1;
      for (int j = 0; j < art_begin_; ++j)
        if (std::abs(at(i, j)) > 1e-7) {
          col = j;
          break;
        }
      if (col >= 0) pivot(i, col);
      // Otherwise the row is redundant; the artificial stays basic at zero.
    }
  }

  // Solve B x_B = b against the original data to wash out pivot drift.
  std::vector<double> extract_solution() const {
    std::vector<double> x(lp_.num_vars, 0.0);
    int mdim = rows_;
    std::vector<double> B(static_cast<size_t>(mdim) * mdim, 0.0);
    std::vector<double> b(mdim);
    for (int i = 0; i < mdim; ++i) {
      b[i] = orig_at(i, cols_);
      for (int k = 0; k < mdim; ++k) B[static_cast<size_t>(i) * mdim + k] = orig_at(i, basis_[k]);
    }
    std::vector<double> xb(mdim, 0.0);
    if (lu_solve(B, b, xb)) {
      for (int k = 0; k < mdim; ++k)
        if (basis_[k] < lp_.num_vars) x[basis_[k]] = xb[k];
    } else {
      for (int k = 0; k < mdim; ++k)
        if (basis_[k] < lp_.num_vars)
          x[basis_[k]] = tab_[static_cast<size_t>(k) * (cols_ + 1) + cols_];
    }
    return x;
  }

  static bool lu_solve(std::vector<double> A, std::vector<double> b, std::vector<double>& out) {
    int n = static_cast<int>(b.size());
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int k = 0; k < n; ++k) {
      int p = k;
      double best = std::abs(A[static_cast<size_t>(perm[k]) * n + k]);
      for (int i = k + 1; i < n; ++i) {
        double v = std::abs(A[static_cast<size_t>(perm[i]) * n + k]);
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (best < 1e-12) return false;
      std::swap(perm[k], perm[p]);
      double piv = A[static_cast<size_t>(perm[k]) * n + k];
      for (int i = k + 1; i < n; ++i) {
        double f = A[static_cast<size_t>(perm[i]) * n + k] / piv;
        if (f == 0.0) continue;
        A[static_cast<size_t>(perm[i]) * n + k] = f;
        for (int j = k + 1; j < n; ++j)
          A[static_cast<size_t>(perm[i]) * n + j] -= f * A[static_cast<size_t>(perm[k]) * n + j];
      }
    }
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      double s = b[perm[i]];
      for (int j = 0; j < i; ++j) s -= A[static_cast<size_t>(perm[i]) * n + j] * y[j];
      y[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = y[i];
      for (int j = i + 1; j < n; ++j) s -= A[static_cast<size_t>(perm[i]) * n + j] * out[j];
      out[i] = s / A[static_cast<size_t>(perm[i]) * n + i];
    }
    return true;
  }
};

}  // namespace detail

inline SimplexResult solve_simplex(const LinearProgram& lp) {
  detail::SimplexTableau tableau(lp);
  return tableau.solve();
}

}  // namespace nsdp
