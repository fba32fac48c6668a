#include "ssctm/linprog.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace ssctm {

namespace {

constexpr double kEps = 1e-9;

// Textbook bounded-simplex on the condensed tableau.  Layout: rows 0..m-1
// are the constraints, row m is the phase-1 objective, row m+1 the phase-2
// (artificial) objective; columns 0..n-1 are the structural variables,
// column n the artificial variable, column n+1 the right-hand side.
class Simplex {
 public:
  Simplex(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
          const std::vector<double>& c)
      : m_(static_cast<int>(b.size())),
        n_(static_cast<int>(c.size())),
        nonbasic_(n_ + 1),
        basic_(m_),
        tab_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j) tab_[i][j] = a[i][j];
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      tab_[i][n_] = -1.0;
      tab_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      tab_[m_][j] = -c[j];
    }
    nonbasic_[n_] = -1;
    tab_[m_ + 1][n_] = 1.0;
  }

  LpResult solve() {
    LpResult result;
    // Phase 1: if some b_i < 0, drive the artificial variable out.
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (tab_[i][n_ + 1] < tab_[r][n_ + 1]) r = i;
    if (tab_[r][n_ + 1] < -kEps) {
      pivot(r, n_);
      if (!iterate(2) || tab_[m_ + 1][n_ + 1] < -kEps) {
        result.status = LpStatus::kInfeasible;
        return result;
      }
      for (int i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        int s = 0;
        for (int j = 1; j <= n_; ++j)
          if (prefer(tab_[i], s, j)) s = j;
        pivot(i, s);
      }
    }
    // Phase 2: optimize the real objective.
    if (!iterate(1)) {
      result.status = LpStatus::kUnbounded;
      return result;
    }
    result.status = LpStatus::kOptimal;
    result.objective = tab_[m_][n_ + 1];
    result.x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i)
      if (basic_[i] < n_) result.x[basic_[i]] = tab_[i][n_ + 1];
    return result;
  }

 private:
  // Entering-column choice: most negative reduced cost, ties to the lowest
  // variable index (anti-cycling).
  bool prefer(const std::vector<double>& row, int s, int j) const {
    return s == -1 || std::pair<double, int>(row[j], nonbasic_[j]) <
                          std::pair<double, int>(row[s], nonbasic_[s]);
  }

  void pivot(int r, int s) {
    std::vector<double>& pr = tab_[r];
    double inv = 1.0 / pr[s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r || std::abs(tab_[i][s]) <= kEps) continue;
      std::vector<double>& row = tab_[i];
      double f = row[s] * inv;
      for (int j = 0; j < n_ + 2; ++j) row[j] -= pr[j] * f;
      row[s] = pr[s] * f;
    }
    for (int j = 0; j < n_ + 2; ++j)
      if (j != s) pr[j] *= inv;
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r) tab_[i][s] *= -inv;
    pr[s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  // Runs simplex iterations against objective row m_ + phase - 1.  Returns
  // false when the objective is unbounded in that phase.
  bool iterate(int phase) {
    const int obj = m_ + phase - 1;
    for (;;) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (nonbasic_[j] == -phase) continue;  // phase 1 ignores the artificial
        if (prefer(tab_[obj], s, j)) s = j;
      }
      if (tab_[obj][s] >= -kEps) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (tab_[i][s] <= kEps) continue;
        if (r == -1 ||
            std::pair<double, int>(tab_[i][n_ + 1] / tab_[i][s], basic_[i]) <
                std::pair<double, int>(tab_[r][n_ + 1] / tab_[r][s], basic_[r]))
          r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  int m_, n_;
  std::vector<int> nonbasic_;  // variable ids of the columns
  std::vector<int> basic_;     // variable ids of the rows
  std::vector<std::vector<double>> tab_;
};

}  // namespace

LpResult solve_lp_max(const std::vector<std::vector<double>>& a,
                      const std::vector<double>& b, const std::vector<double>& c) {
  return Simplex(a, b, c).solve();
}

}  // namespace ssctm
