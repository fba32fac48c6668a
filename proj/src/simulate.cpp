#include "ssctm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

#include "ssctm/errors.hpp"
#include "ssctm/parallel.hpp"
#include "ssctm/rng.hpp"

namespace ssctm {

namespace {

// Steps the state through a mode path, invoking `record` at t = 0 and at
// every multiple of sample_dt up to the horizon.  Switch epochs are hit
// exactly by partial integration steps.
std::vector<double> walk_mode_path(
    const FreewayModel& model, const ModePath& path,
    const std::vector<double>& n0, const std::vector<double>& r,
    const StepConfig& cfg, double sample_dt,
    const std::function<void(double, int, const std::vector<double>&)>& record) {
  const double T = path.horizon;
  const double tiny = 1e-12 * std::max(1.0, T);

  std::vector<double> n = n0;
  clamp_state(model, n);
  int mode = path.initial_mode;
  double t = 0.0;

  auto integrate_to = [&](double target) {
    while (t < target - tiny) {
      double h = std::min(cfg.dt, target - t);
      advance(model, mode, r, h, cfg, n);
      t += h;
    }
    t = target;
  };

  if (record) record(0.0, mode, n);
  const long long samples =
      sample_dt > 0 && T > 0
          ? static_cast<long long>(std::floor(T / sample_dt + 1e-9))
          : 0;
  std::size_t jump_idx = 0;
  auto run_until = [&](double target) {
    while (jump_idx < path.jumps.size() && path.jumps[jump_idx].t <= target) {
      integrate_to(path.jumps[jump_idx].t);
      mode = path.jumps[jump_idx].to;
      ++jump_idx;
    }
    integrate_to(target);
  };
  for (long long j = 1; j <= samples; ++j) {
    run_until(static_cast<double>(j) * sample_dt);
    if (record) record(t, mode, n);
  }
  run_until(T);
  return n;
}

}  // namespace

std::vector<double> integrate_mode_path(const FreewayModel& model,
                                        const ModePath& path,
                                        const std::vector<double>& n0,
                                        const std::vector<double>& r,
                                        const StepConfig& cfg) {
  return walk_mode_path(model, path, n0, r, cfg, path.horizon, nullptr);
}

HybridTrajectory simulate(const FreewayModel& model, const std::vector<double>& r,
                          const std::vector<double>& n0, int initial_mode,
                          double horizon, std::uint64_t seed,
                          const StepConfig& cfg, double sample_dt) {
  SplitMix64 rng(seed);
  ModePath path = sample_mode_path(model.lambda, initial_mode, horizon, rng);
  double sdt = sample_dt > 0 ? sample_dt : cfg.dt;

  HybridTrajectory traj;
  walk_mode_path(model, path, n0, r, cfg, sdt,
                 [&](double t, int mode, const std::vector<double>& n) {
                   traj.t.push_back(t);
                   traj.mode.push_back(mode);
                   traj.n.push_back(n);
                   double total = 0.0;
                   for (double x : n) total += x;
                   traj.total.push_back(total);
                 });
  return traj;
}

namespace {

// Two-sided 95% Student-t quantiles for small degrees of freedom; beyond
// the table the normal quantile is close enough.
double t_quantile_95(int df) {
  static const double table[] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (df < 1) return std::numeric_limits<double>::infinity();
  if (df <= 30) return table[df - 1];
  if (df <= 60) return 2.0;
  return 1.96;
}

struct RepStats {
  double slope = 0.0;
  double avg_n1 = 0.0;
  double max_total = 0.0;
  double clipped_mgf = 0.0;
};

RepStats run_replication(const FreewayModel& model, const std::vector<double>& r,
                         double horizon, std::uint64_t seed,
                         const StepConfig& cfg) {
  const double sdt = std::max(horizon / 1000.0, cfg.dt);
  HybridTrajectory traj =
      simulate(model, r, std::vector<double>(model.cell_count(), 0.0), 0,
               horizon, seed, cfg, sdt);

  RepStats st;
  // Averages skip the first quarter as burn-in; the growth slope is fitted
  // on the second half, where transients have settled either way.
  double sum_n1 = 0.0, sum_mgf = 0.0;
  int count = 0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int fit_count = 0;
  for (std::size_t j = 0; j < traj.t.size(); ++j) {
    st.max_total = std::max(st.max_total, traj.total[j]);
    if (traj.t[j] >= 0.25 * horizon) {
      sum_n1 += traj.n[j][0];
      sum_mgf += std::exp(std::min(traj.total[j], 30.0));
      ++count;
    }
    if (traj.t[j] >= 0.5 * horizon) {
      sx += traj.t[j];
      sy += traj.n[j][0];
      sxx += traj.t[j] * traj.t[j];
      sxy += traj.t[j] * traj.n[j][0];
      ++fit_count;
    }
  }
  if (count > 0) {
    st.avg_n1 = sum_n1 / count;
    st.clipped_mgf = sum_mgf / count;
  }
  double denom = fit_count * sxx - sx * sx;
  st.slope = fit_count >= 2 && denom > 0 ? (fit_count * sxy - sx * sy) / denom : 0.0;
  return st;
}

}  // namespace

QueueStats queue_stats(const FreewayModel& model, const std::vector<double>& r,
                       int reps, double horizon, std::uint64_t seed,
                       const StepConfig& cfg, int jobs) {
  if (reps < 2)
    throw InsufficientReplicationsError(
        "queue_stats: need at least 2 replications for a confidence interval");

  std::vector<RepStats> stats(reps);
  parallel_for(reps, jobs, [&](int rep) {
    stats[rep] = run_replication(model, r, horizon, derive_seed(seed, rep), cfg);
  });

  QueueStats qs;
  qs.reps = reps;
  qs.horizon = horizon;
  double slope_sum = 0.0;
  for (const RepStats& st : stats) {
    slope_sum += st.slope;
    qs.avg_n1 += st.avg_n1 / reps;
    qs.clipped_mgf += st.clipped_mgf / reps;
    qs.max_total = std::max(qs.max_total, st.max_total);
  }
  qs.slope = slope_sum / reps;
  double var = 0.0;
  for (const RepStats& st : stats) {
    double d = st.slope - qs.slope;
    var += d * d;
  }
  var /= reps - 1;
  double half = t_quantile_95(reps - 1) * std::sqrt(var / reps);
  qs.slope_ci_lo = qs.slope - half;
  qs.slope_ci_hi = qs.slope + half;
  return qs;
}

}  // namespace ssctm
