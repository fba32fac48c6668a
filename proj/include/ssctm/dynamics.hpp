#pragma once

#include <vector>

#include "ssctm/model.hpp"

namespace ssctm {

// Sending flow of cell k (0-based): min{v n_k, capacity of cell k in mode}.
double sending(const FreewayModel& model, int mode, double n_k, int k);

// Receiving flow of a cell with density n_k: w (n_max - n_k).  Applies to
// cells 2..K only; cell 1 is an unbounded buffer with no receiving limit.
double receiving(const FreewayModel& model, double n_k);

// Flow across the downstream boundary of each cell (0-based index k):
//   flows[k]   = min{beta_k S_k, (R_{k+1} - r_{k+1})_+}   for k < K-1,
//   flows[K-1] = beta_K S_K.
// On-ramps have priority over mainline flow, hence the r term inside the
// receiving budget of the downstream cell.
std::vector<double> boundary_flows(const FreewayModel& model, int mode,
                                   const std::vector<double>& n,
                                   const std::vector<double>& r);

struct FlowVector {
  std::vector<double> f;  // mainline flows across downstream boundaries
  std::vector<double> s;  // off-ramp flows, s_k = (1/beta_k - 1) f_k
};

FlowVector flows(const FreewayModel& model, int mode,
                 const std::vector<double>& n, const std::vector<double>& r);

// Time derivative of the cell occupancies:
//   G_1 = r_1 - f_1 / beta_1,
//   G_k = f_{k-1} + r_k - f_k / beta_k.
std::vector<double> vector_field(const FreewayModel& model, int mode,
                                 const std::vector<double>& n,
                                 const std::vector<double>& r);

// Projects a state onto the domain: n_1 >= 0, n_k in [0, n_max] for k >= 2.
void clamp_state(const FreewayModel& model, std::vector<double>& n);

enum class StepMethod { kRk4, kEuler };

struct StepConfig {
  double dt = 1e-3;                     // nominal step length (hr)
  StepMethod method = StepMethod::kRk4;
  double exit_tol = 1e-6;               // tolerated domain overshoot (veh)
};

// Advances `n` in place by one step of length h under a fixed mode.  Stage
// states are clamped into the domain before evaluating the field.  A
// post-step excursion beyond cfg.exit_tol raises StepTooLargeError (the
// model is genuinely leaving the domain, or the step is too coarse);
// anything smaller is projected back.
void advance(const FreewayModel& model, int mode, const std::vector<double>& r,
             double h, const StepConfig& cfg, std::vector<double>& n);

// Integrates the state for a duration T under a fixed mode, stepping with
// cfg.dt (plus one shorter final step).  Returns the end state.
std::vector<double> integrate_fixed_mode(const FreewayModel& model, int mode,
                                         const std::vector<double>& n0,
                                         const std::vector<double>& r, double T,
                                         const StepConfig& cfg = {});

}  // namespace ssctm
