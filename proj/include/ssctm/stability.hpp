#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssctm/invariant_set.hpp"
#include "ssctm/model.hpp"

namespace ssctm {

// Per-mode capacities adjusted for the worst admissible downstream
// receiving flow over the invariant box: stilde[i][k] <= modes[i][k], with
// equality for the last cell.
struct SpillbackAdjustedCapacities {
  std::vector<std::vector<double>> stilde;
};

SpillbackAdjustedCapacities spillback_adjusted_capacities(
    const FreewayModel& model, const std::vector<double>& r,
    const InvariantBox& box);

// Necessary condition: through-flow of every cell must not exceed the
// steady-state average of its spillback-adjusted capacity.
struct NecessaryCheck {
  bool satisfied = false;
  std::vector<double> margins;  // per cell: avg adjusted capacity - phi_k
};

NecessaryCheck check_necessary(const FreewayModel& model,
                               const std::vector<double>& r);

// Exponent weights of the Lyapunov function V(i, n) = a_i exp(b Gamma' n).
struct LyapunovWeights {
  std::vector<double> gamma;
  std::vector<double> big_gamma;
};

// Throws PrerequisiteViolatedError unless phi_k is strictly below the
// average raw capacity of every cell (otherwise gamma is undefined).
LyapunovWeights lyapunov_weights(const FreewayModel& model,
                                 const std::vector<double>& r);
LyapunovWeights lyapunov_weights(const FreewayModel& model,
                                 const std::vector<double>& r,
                                 const std::vector<double>& p);

// Weighted-discharge minima over the two vertex families of the box:
// scr_f[i] minimizes over vertices with n_1 at the critical density,
// scr_f_hat[i] over vertices with n_1 at the box's lower boundary.
struct VertexFlowMinima {
  std::vector<double> scr_f;
  std::vector<double> scr_f_hat;
  double scr_r = 0.0;  // Gamma' r
};

// Enumerates all 2^(K-1) vertices per family.  Throws VertexBlowupError
// for K > 26 rather than subsampling (a sampled minimum could overstate
// the true one and certify stability unsoundly).
VertexFlowMinima vertex_flow_minima(const FreewayModel& model,
                                    const std::vector<double>& r,
                                    const InvariantBox& box,
                                    const LyapunovWeights& weights);

struct BmiConfig {
  double b_min = 1e-9;    // sweep range for the scalar b
  double b_max = 1e-1;
  int b_points = 60;      // log-spaced sweep resolution
  int refine_iters = 40;  // golden-section refinement steps
  double a_min = 1e-6;    // box bounds on the weights a
  double a_max = 1e6;
  double slack_tol = 1e-9;  // accept when every LHS <= -1 + slack_tol
};

// A validated drift certificate.  The moment bound can overflow to
// infinity, so its logarithm is carried alongside.
struct Certificate {
  std::vector<double> a;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;              // may be +inf; see log_d
  double log_d = 0.0;
  double mgf_bound = 0.0;      // may be +inf; see log_mgf_bound
  double log_mgf_bound = 0.0;
  std::vector<double> slacks;  // per-mode LHS of the feasibility system
};

// Searches for positive (a, b) with
//   a_i b (scr_r - scr_f[i]) + sum_j lambda_ij (a_j - a_i) <= -1  for all i.
// For fixed b the system is linear in a, so each sweep point solves a
// max-min-slack LP; the best b is then refined.  Returns a certificate
// whose slacks were re-validated by direct substitution, or nullopt.
// The returned certificate has a, b, and slacks filled in; the constants
// c/d and the moment bound are added by certificate_constants.
std::optional<Certificate> bmi_feasibility(
    const std::vector<std::vector<double>>& lambda, double scr_r,
    const std::vector<double>& scr_f, const BmiConfig& cfg = {});

// Fills in c = 1/max_i a_i, the drift offset d (evaluated over the
// n_1 <= critical-density slab via scr_f_hat), and the moment bound
// (d / (c min_i a_i))^(1 / (b Gamma_K)).
void certificate_constants(const FreewayModel& model,
                           const InvariantBox& box,
                           const LyapunovWeights& weights,
                           const std::vector<double>& scr_f_hat,
                           double scr_r, Certificate& cert);

// Numerical end-to-end check of the drift inequality LV + cV <= d at
// random points of the box (first coordinate truncated a little past the
// critical density, where the inequality is tightest).
struct DriftCheckReport {
  long long checks = 0;
  long long violations = 0;
  double worst = 0.0;  // most positive (LV + cV - d) / max(d, 1), if any
};

DriftCheckReport drift_check(const FreewayModel& model,
                             const std::vector<double>& r,
                             const InvariantBox& box,
                             const LyapunovWeights& weights,
                             const Certificate& cert, int samples,
                             std::uint64_t seed);

enum class Verdict { kUnstableCertified, kStableCertified, kAmbiguous };

const char* verdict_name(Verdict v);

struct DecisionReport {
  Verdict verdict = Verdict::kAmbiguous;
  std::vector<double> margins;  // necessary-condition margins per cell
  std::optional<Certificate> certificate;
  std::string diagnostic;
};

// Full decision: UnstableCertified when the necessary condition fails
// strictly; StableCertified when a validated certificate is found;
// Ambiguous otherwise (including weight prerequisites failing or the
// vertex enumeration being out of reach).
DecisionReport decide(const FreewayModel& model, const std::vector<double>& r,
                      const BmiConfig& cfg = {});

}  // namespace ssctm
