#pragma once

#include <cstdint>
#include <vector>

#include "ssctm/dynamics.hpp"
#include "ssctm/markov.hpp"
#include "ssctm/model.hpp"

namespace ssctm {

// A sampled realization of the hybrid process (mode path + densities).
struct HybridTrajectory {
  std::vector<double> t;                // sample times (hr)
  std::vector<int> mode;                // mode in force at each sample
  std::vector<std::vector<double>> n;   // densities at each sample
  std::vector<double> total;            // |N(t)| = sum_k n_k
};

// Integrates the dynamics along a given mode path and returns the state at
// path.horizon.  Mode-switch epochs are hit exactly with partial steps.
std::vector<double> integrate_mode_path(const FreewayModel& model,
                                        const ModePath& path,
                                        const std::vector<double>& n0,
                                        const std::vector<double>& r,
                                        const StepConfig& cfg = {});

// Samples a mode path from the model's chain and integrates through it,
// recording the state every sample_dt hours (sample_dt <= 0 records every
// cfg.dt).  Deterministic per seed.
HybridTrajectory simulate(const FreewayModel& model, const std::vector<double>& r,
                          const std::vector<double>& n0, int initial_mode,
                          double horizon, std::uint64_t seed,
                          const StepConfig& cfg = {}, double sample_dt = 0.0);

// Replication-level queue statistics used to discriminate stable from
// unstable inflows empirically.
struct QueueStats {
  int reps = 0;
  double horizon = 0.0;
  double avg_n1 = 0.0;       // time average of N_1 after 25% burn-in
  double slope = 0.0;        // veh/hr: mean linear-growth rate of N_1
  double slope_ci_lo = 0.0;  // 95% confidence interval over replications
  double slope_ci_hi = 0.0;
  double max_total = 0.0;    // max over replications of max_t |N(t)|
  double clipped_mgf = 0.0;  // time average of exp(min(|N|, 30))
};

// Runs `reps` independent replications (seed streams derived from `seed`),
// fits the queue-growth slope on the second half of the horizon, and
// aggregates in a fixed order so results are independent of `jobs`.
// Throws InsufficientReplicationsError when reps < 2.
QueueStats queue_stats(const FreewayModel& model, const std::vector<double>& r,
                       int reps, double horizon, std::uint64_t seed,
                       const StepConfig& cfg = {}, int jobs = 1);

}  // namespace ssctm
