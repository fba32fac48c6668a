#pragma once

#include <cstdint>
#include <vector>

#include "ssctm/rng.hpp"

namespace ssctm {

// True iff the transition-rate graph (edges i -> j where lambda[i][j] > 0,
// i != j) is strongly connected, i.e. the chain is ergodic.
bool is_ergodic(const std::vector<std::vector<double>>& lambda);

// Stationary distribution p of the continuous-time chain: p * lambda = 0,
// sum(p) = 1, p > 0.  Throws SingularSystemError when the system has no
// unique solution (reducible chain) or the residual check fails.
std::vector<double> steady_state(const std::vector<std::vector<double>>& lambda);

// One realization of the mode process on [0, horizon], stored as its jump
// times.  Piecewise constant and right-continuous: mode_at(t) is the mode
// in force at time t.
struct ModePath {
  struct Jump {
    double t;  // jump instant (hr)
    int to;    // mode entered at t
  };

  double horizon = 0.0;
  int initial_mode = 0;
  std::vector<Jump> jumps;  // strictly increasing t, each within [0, horizon]

  int mode_at(double t) const;
  // Fraction of [0, horizon] spent in mode i.
  double occupancy(int i) const;
};

// Samples a mode path by the exact jump-chain construction: exponential
// dwell in mode i with rate -lambda[i][i], then a jump to j with probability
// lambda[i][j] / (-lambda[i][i]).  An absorbing row (all zeros) dwells
// forever.
ModePath sample_mode_path(const std::vector<std::vector<double>>& lambda,
                          int initial_mode, double horizon, SplitMix64& rng);

}  // namespace ssctm
