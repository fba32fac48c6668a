#pragma once

#include <vector>

namespace ssctm {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;     // valid when status == kOptimal
  std::vector<double> x;      // primal solution, valid when status == kOptimal
};

// Maximize c^T x subject to A x <= b, x >= 0 (dense two-phase simplex).
// Intended for the small systems produced by the stability search: a few
// dozen rows and columns at most.  Ties in the pivot choice break towards
// the lowest variable index, which prevents cycling on degenerate bases.
LpResult solve_lp_max(const std::vector<std::vector<double>>& a,
                      const std::vector<double>& b,
                      const std::vector<double>& c);

}  // namespace ssctm
