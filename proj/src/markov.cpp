#include "ssctm/markov.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ssctm/errors.hpp"

namespace ssctm {

namespace {

// BFS reachability over edges selected by `edge(i, j)`.
template <class EdgeFn>
int reach_count(int m, int start, EdgeFn edge) {
  std::vector<char> seen(m, 0);
  std::vector<int> queue{start};
  seen[start] = 1;
  for (std::size_t q = 0; q < queue.size(); ++q) {
    int i = queue[q];
    for (int j = 0; j < m; ++j) {
      if (!seen[j] && edge(i, j)) {
        seen[j] = 1;
        queue.push_back(j);
      }
    }
  }
  return static_cast<int>(queue.size());
}

}  // namespace

bool is_ergodic(const std::vector<std::vector<double>>& lambda) {
  const int m = static_cast<int>(lambda.size());
  if (m == 0) return false;
  if (m == 1) return true;
  auto fwd = [&](int i, int j) { return i != j && lambda[i][j] > 0; };
  auto rev = [&](int i, int j) { return i != j && lambda[j][i] > 0; };
  return reach_count(m, 0, fwd) == m && reach_count(m, 0, rev) == m;
}

std::vector<double> steady_state(const std::vector<std::vector<double>>& lambda) {
  const int m = static_cast<int>(lambda.size());
  if (m == 1) return {1.0};

  // Solve A x = e_m where A is lambda^T with its last row replaced by the
  // normalization constraint sum(x) = 1.  Gaussian elimination with partial
  // pivoting; the rate matrix is tiny (a handful of modes), so dense is fine.
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  for (int i = 0; i < m - 1; ++i)
    for (int j = 0; j < m; ++j) a[i][j] = lambda[j][i];
  for (int j = 0; j < m; ++j) a[m - 1][j] = 1.0;
  a[m - 1][m] = 1.0;

  for (int col = 0; col < m; ++col) {
    int pivot = col;
    for (int i = col + 1; i < m; ++i)
      if (std::abs(a[i][col]) > std::abs(a[pivot][col])) pivot = i;
    if (std::abs(a[pivot][col]) < 1e-300)
      throw SingularSystemError("steady_state: rate matrix is singular");
    std::swap(a[col], a[pivot]);
    for (int i = 0; i < m; ++i) {
      if (i == col) continue;
      double f = a[i][col] / a[col][col];
      if (f == 0.0) continue;
      for (int j = col; j <= m; ++j) a[i][j] -= f * a[col][j];
    }
  }

  std::vector<double> p(m);
  for (int i = 0; i < m; ++i) p[i] = a[i][m] / a[i][i];

  // Residual check against the original system.
  double scale = 1.0;
  for (const auto& row : lambda)
    for (double x : row) scale = std::max(scale, std::abs(x));
  for (int j = 0; j < m; ++j) {
    double res = 0;
    for (int i = 0; i < m; ++i) res += p[i] * lambda[i][j];
    if (std::abs(res) > 1e-10 * scale)
      throw SingularSystemError("steady_state: residual too large; chain is not ergodic");
  }
  for (double x : p) {
    if (!(x > -1e-12))
      throw SingularSystemError("steady_state: negative stationary probability");
  }
  for (double& x : p) x = std::max(x, 0.0);
  return p;
}

int ModePath::mode_at(double t) const {
  // Last jump with jump time <= t, else the initial mode.
  int lo = 0, hi = static_cast<int>(jumps.size());
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (jumps[mid].t <= t)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo == 0 ? initial_mode : jumps[lo - 1].to;
}

double ModePath::occupancy(int i) const {
  if (horizon <= 0) return 0.0;
  double total = 0.0;
  int mode = initial_mode;
  double t = 0.0;
  for (const auto& j : jumps) {
    if (mode == i) total += j.t - t;
    t = j.t;
    mode = j.to;
  }
  if (mode == i) total += horizon - t;
  return total / horizon;
}

ModePath sample_mode_path(const std::vector<std::vector<double>>& lambda,
                          int initial_mode, double horizon, SplitMix64& rng) {
  const int m = static_cast<int>(lambda.size());
  ModePath path;
  path.horizon = horizon;
  path.initial_mode = initial_mode;

  int mode = initial_mode;
  double t = 0.0;
  while (true) {
    double rate = 0.0;
    for (int j = 0; j < m; ++j)
      if (j != mode) rate += lambda[mode][j];
    if (rate <= 0) break;  // absorbing mode: dwell forever
    t += rng.next_exponential(rate);
    if (t >= horizon) break;
    // Embedded jump chain: pick j proportional to lambda[mode][j].
    double u = rng.next_double() * rate;
    int next = -1;
    for (int j = 0; j < m; ++j) {
      if (j == mode) continue;
      u -= lambda[mode][j];
      if (u <= 0) {
        next = j;
        break;
      }
    }
    if (next < 0) {  // guard against roundoff at u ~ rate
      for (int j = m - 1; j >= 0; --j)
        if (j != mode && lambda[mode][j] > 0) {
          next = j;
          break;
        }
    }
    path.jumps.push_back({t, next});
    mode = next;
  }
  return path;
}

}  // namespace ssctm
