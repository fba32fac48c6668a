#include "ssctm/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "ssctm/dynamics.hpp"
#include "ssctm/errors.hpp"
#include "ssctm/linprog.hpp"
#include "ssctm/markov.hpp"
#include "ssctm/rng.hpp"

namespace ssctm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Discharge functional under the Lyapunov weights.  The last cell's flow
// enters through 1/beta_K (that is the combination the weighted field
// Gamma' G telescopes to); for beta_K = 1 this is the plain weighted sum.
double weighted_discharge(const FreewayModel& model,
                          const LyapunovWeights& weights, int mode,
                          const std::vector<double>& n,
                          const std::vector<double>& r) {
  const int K = model.cell_count();
  std::vector<double> f = boundary_flows(model, mode, n, r);
  double total = 0.0;
  for (int k = 0; k + 1 < K; ++k) total += weights.gamma[k] * f[k];
  total += weights.gamma[K - 1] / model.beta[K - 1] * f[K - 1];
  return total;
}

}  // namespace

SpillbackAdjustedCapacities spillback_adjusted_capacities(
    const FreewayModel& model, const std::vector<double>& r,
    const InvariantBox& box) {
  const int K = model.cell_count();
  const int m = model.mode_count();
  SpillbackAdjustedCapacities adj;
  adj.stilde.assign(m, std::vector<double>(K, 0.0));
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < K; ++k) {
      if (k + 1 < K) {
        // Best admissible receiving flow downstream over the box, i.e. at
        // the downstream cell's lower boundary.
        double space = std::max(receiving(model, box.nbot[k + 1]) - r[k + 1], 0.0);
        adj.stilde[i][k] = std::min(model.modes[i][k], space / model.beta[k]);
      } else {
        adj.stilde[i][k] = model.modes[i][k];
      }
    }
  }
  return adj;
}

NecessaryCheck check_necessary(const FreewayModel& model,
                               const std::vector<double>& r) {
  const int K = model.cell_count();
  const int m = model.mode_count();
  std::vector<double> p = steady_state(model.lambda);
  InvariantBox box = build_invariant_box(model, r);
  SpillbackAdjustedCapacities adj = spillback_adjusted_capacities(model, r, box);
  NominalFlows nf = nominal_flows(model, r);

  NecessaryCheck check;
  check.margins.resize(K);
  for (int k = 0; k < K; ++k) {
    double avg = 0.0;
    for (int i = 0; i < m; ++i) avg += p[i] * adj.stilde[i][k];
    check.margins[k] = avg - nf.phi[k];
  }
  check.satisfied = std::all_of(check.margins.begin(), check.margins.end(),
                                [](double x) { return x >= 0.0; });
  return check;
}

LyapunovWeights lyapunov_weights(const FreewayModel& model,
                                 const std::vector<double>& r) {
  return lyapunov_weights(model, r, steady_state(model.lambda));
}

LyapunovWeights lyapunov_weights(const FreewayModel& model,
                                 const std::vector<double>& r,
                                 const std::vector<double>& p) {
  const int K = model.cell_count();
  const int m = model.mode_count();
  NominalFlows nf = nominal_flows(model, r);

  LyapunovWeights w;
  w.gamma.resize(K);
  for (int k = 0; k < K; ++k) {
    double avg = 0.0;
    for (int i = 0; i < m; ++i) avg += p[i] * model.modes[i][k];
    if (!(nf.phi[k] < avg)) {
      std::ostringstream s;
      s << "through-flow of cell " << k + 1 << " (" << nf.phi[k]
        << " veh/hr) is not strictly below its average capacity (" << avg
        << " veh/hr); Lyapunov weights are undefined";
      throw PrerequisiteViolatedError(s.str());
    }
    w.gamma[k] = avg / (avg - nf.phi[k]);
  }
  w.big_gamma.resize(K);
  w.big_gamma[K - 1] = w.gamma[K - 1];
  for (int k = K - 2; k >= 0; --k)
    w.big_gamma[k] = model.beta[k] * (w.big_gamma[k + 1] + w.gamma[k]);
  return w;
}

VertexFlowMinima vertex_flow_minima(const FreewayModel& model,
                                    const std::vector<double>& r,
                                    const InvariantBox& box,
                                    const LyapunovWeights& weights) {
  const int K = model.cell_count();
  const int m = model.mode_count();
  if (K > 26)
    throw VertexBlowupError(
        "vertex enumeration needs 2^(K-1) points; refusing K > 26 cells "
        "(subsampled minima could certify stability unsoundly)");

  VertexFlowMinima vm;
  vm.scr_f.assign(m, kInf);
  vm.scr_f_hat.assign(m, kInf);
  for (int k = 0; k < K; ++k) vm.scr_r += weights.big_gamma[k] * r[k];

  const double n1_values[2] = {model.critical_density(0), box.nbot[0]};
  const std::uint64_t corners = std::uint64_t{1} << (K - 1);
  std::vector<double> n(K);
  for (int family = 0; family < 2; ++family) {
    std::vector<double>& out = family == 0 ? vm.scr_f : vm.scr_f_hat;
    n[0] = n1_values[family];
    for (std::uint64_t mask = 0; mask < corners; ++mask) {
      for (int k = 1; k < K; ++k)
        n[k] = (mask >> (k - 1)) & 1 ? box.ntop[k] : box.nbot[k];
      for (int i = 0; i < m; ++i)
        out[i] = std::min(out[i], weighted_discharge(model, weights, i, n, r));
    }
  }
  return vm;
}

namespace {

// Exact per-mode left-hand sides of the feasibility system at (a, b).
std::vector<double> bmi_lhs(const std::vector<std::vector<double>>& lambda,
                            const std::vector<double>& diff, double b,
                            const std::vector<double>& a) {
  const int m = static_cast<int>(a.size());
  std::vector<double> lhs(m);
  for (int i = 0; i < m; ++i) {
    double v = a[i] * b * diff[i];
    for (int j = 0; j < m; ++j) v += lambda[i][j] * (a[j] - a[i]);
    lhs[i] = v;
  }
  return lhs;
}

// For fixed b the system is linear in a.  Maximize the uniform slack s in
//   a_i b diff_i + sum_j lambda_ij (a_j - a_i) <= -1 - s,   a in [lo, hi].
// Substituting a = x + lo (x >= 0) keeps the lambda terms unchanged (rows
// of lambda sum to zero) and gives an LP in (x, u, t) with s = u - t free.
struct FixedBSolution {
  bool solved = false;
  double slack = -kInf;
  std::vector<double> a;
};

FixedBSolution solve_fixed_b(const std::vector<std::vector<double>>& lambda,
                             const std::vector<double>& diff, double b,
                             const BmiConfig& cfg) {
  const int m = static_cast<int>(diff.size());
  const int n = m + 2;  // x_0..x_{m-1}, u, t
  std::vector<std::vector<double>> a_mat(2 * m, std::vector<double>(n, 0.0));
  std::vector<double> rhs(2 * m, 0.0);
  for (int i = 0; i < m; ++i) {
    std::vector<double>& row = a_mat[i];
    for (int j = 0; j < m; ++j) row[j] = lambda[i][j];
    row[i] += b * diff[i];
    row[m] = 1.0;       // u
    row[m + 1] = -1.0;  // t
    rhs[i] = -1.0 - b * diff[i] * cfg.a_min;
    double scale = 0.0;
    for (double x : row) scale = std::max(scale, std::abs(x));
    scale = std::max(scale, std::abs(rhs[i]));
    for (double& x : row) x /= scale;
    rhs[i] /= scale;
  }
  for (int i = 0; i < m; ++i) {
    a_mat[m + i][i] = 1.0;
    rhs[m + i] = cfg.a_max - cfg.a_min;
  }
  std::vector<double> obj(n, 0.0);
  obj[m] = 1.0;
  obj[m + 1] = -1.0;

  LpResult lp = solve_lp_max(a_mat, rhs, obj);
  FixedBSolution sol;
  if (lp.status != LpStatus::kOptimal) return sol;
  sol.solved = true;
  sol.slack = lp.objective;
  sol.a.resize(m);
  for (int i = 0; i < m; ++i) sol.a[i] = lp.x[i] + cfg.a_min;
  return sol;
}

}  // namespace

std::optional<Certificate> bmi_feasibility(
    const std::vector<std::vector<double>>& lambda, double scr_r,
    const std::vector<double>& scr_f, const BmiConfig& cfg) {
  const int m = static_cast<int>(scr_f.size());
  std::vector<double> diff(m);
  for (int i = 0; i < m; ++i) diff[i] = scr_r - scr_f[i];

  double best_valid_slack = -kInf;
  std::vector<double> best_a;
  double best_b = 0.0;

  // Probes one b: solves the LP and, if the exact substitution confirms
  // every LHS <= -1 + tol, remembers the best such certificate.
  auto probe = [&](double b) {
    FixedBSolution sol = solve_fixed_b(lambda, diff, b, cfg);
    if (!sol.solved) return -kInf;
    std::vector<double> lhs = bmi_lhs(lambda, diff, b, sol.a);
    double worst = *std::max_element(lhs.begin(), lhs.end());
    if (worst <= -1.0 + cfg.slack_tol && sol.slack > best_valid_slack) {
      best_valid_slack = sol.slack;
      best_a = sol.a;
      best_b = b;
    }
    return sol.slack;
  };

  // Log-spaced sweep over b, tracking the most promising point.
  const double log_lo = std::log(cfg.b_min);
  const double log_hi = std::log(cfg.b_max);
  const int points = std::max(cfg.b_points, 2);
  int best_idx = 0;
  double best_sweep = -kInf;
  for (int j = 0; j < points; ++j) {
    double lb = log_lo + (log_hi - log_lo) * j / (points - 1);
    double s = probe(std::exp(lb));
    if (s > best_sweep) {
      best_sweep = s;
      best_idx = j;
    }
  }

  // Golden-section refinement of the slack over log b around the best
  // sweep point (probe() keeps collecting valid certificates).
  {
    double span = (log_hi - log_lo) / (points - 1);
    double lo = log_lo + span * std::max(best_idx - 1, 0);
    double hi = log_lo + span * std::min(best_idx + 1, points - 1);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = probe(std::exp(x1));
    double f2 = probe(std::exp(x2));
    for (int it = 0; it < cfg.refine_iters; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = probe(std::exp(x2));
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = probe(std::exp(x1));
      }
    }
  }

  if (best_a.empty()) return std::nullopt;
  Certificate cert;
  cert.a = best_a;
  cert.b = best_b;
  cert.slacks = bmi_lhs(lambda, diff, best_b, best_a);
  return cert;
}

void certificate_constants(const FreewayModel& model, const InvariantBox& box,
                           const LyapunovWeights& weights,
                           const std::vector<double>& scr_f_hat, double scr_r,
                           Certificate& cert) {
  const int K = model.cell_count();
  const int m = model.mode_count();
  const double b = cert.b;
  double a_max = *std::max_element(cert.a.begin(), cert.a.end());
  double a_min = *std::min_element(cert.a.begin(), cert.a.end());
  cert.c = 1.0 / a_max;

  // Worst drift bracket over the slab n_1 <= critical density, evaluated
  // through the Theta-hat vertex minima.
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    double v = cert.a[i] * b * (scr_r - scr_f_hat[i]) + cert.a[i] * cert.c;
    for (int j = 0; j < m; ++j)
      v += model.lambda[i][j] * (cert.a[j] - cert.a[i]);
    worst = std::max(worst, std::abs(v));
  }
  worst = std::max(worst, 1e-300);

  double exponent = weights.big_gamma[0] * model.critical_density(0);
  for (int k = 1; k < K; ++k) exponent += weights.big_gamma[k] * box.ntop[k];
  cert.log_d = std::log(worst) + b * exponent;
  cert.d = std::exp(cert.log_d);

  double gamma_last = weights.big_gamma[K - 1];
  cert.log_mgf_bound =
      (cert.log_d - std::log(cert.c * a_min)) / (b * gamma_last);
  cert.mgf_bound = std::exp(cert.log_mgf_bound);
}

DriftCheckReport drift_check(const FreewayModel& model,
                             const std::vector<double>& r,
                             const InvariantBox& box,
                             const LyapunovWeights& weights,
                             const Certificate& cert, int samples,
                             std::uint64_t seed) {
  const int K = model.cell_count();
  const int m = model.mode_count();
  SplitMix64 rng(seed);
  DriftCheckReport report;

  const double n1_hi = model.critical_density(0) +
                       20.0 / (cert.b * weights.big_gamma[0]);
  std::vector<double> n(K);
  for (int s = 0; s < samples; ++s) {
    n[0] = rng.next_range(box.nbot[0], std::max(n1_hi, box.nbot[0]));
    for (int k = 1; k < K; ++k) n[k] = rng.next_range(box.nbot[k], box.ntop[k]);

    double expo = 0.0;
    for (int k = 0; k < K; ++k) expo += weights.big_gamma[k] * n[k];
    double grow = std::exp(cert.b * expo);

    for (int i = 0; i < m; ++i) {
      std::vector<double> g = vector_field(model, i, n, r);
      double gamma_g = 0.0;
      for (int k = 0; k < K; ++k) gamma_g += weights.big_gamma[k] * g[k];
      double bracket = cert.a[i] * cert.b * gamma_g + cert.a[i] * cert.c;
      for (int j = 0; j < m; ++j)
        bracket += model.lambda[i][j] * (cert.a[j] - cert.a[i]);
      // LV + cV - d, normalized by the offset scale.
      double excess = (grow * bracket - cert.d) / std::max(cert.d, 1.0);
      ++report.checks;
      if (excess > 1e-9) {
        ++report.violations;
        report.worst = std::max(report.worst, excess);
      }
    }
  }
  return report;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kUnstableCertified:
      return "UnstableCertified";
    case Verdict::kStableCertified:
      return "StableCertified";
    case Verdict::kAmbiguous:
      return "Ambiguous";
  }
  return "Ambiguous";
}

DecisionReport decide(const FreewayModel& model, const std::vector<double>& r,
                      const BmiConfig& cfg) {
  const int K = model.cell_count();
  const int m = model.mode_count();
  DecisionReport rep;

  std::vector<double> p = steady_state(model.lambda);
  InvariantBox box = build_invariant_box(model, r);
  SpillbackAdjustedCapacities adj = spillback_adjusted_capacities(model, r, box);
  NominalFlows nf = nominal_flows(model, r);

  rep.margins.resize(K);
  int worst_cell = 0;
  for (int k = 0; k < K; ++k) {
    double avg = 0.0;
    for (int i = 0; i < m; ++i) avg += p[i] * adj.stilde[i][k];
    rep.margins[k] = avg - nf.phi[k];
    if (rep.margins[k] < rep.margins[worst_cell]) worst_cell = k;
  }
  if (rep.margins[worst_cell] < 0.0) {
    rep.verdict = Verdict::kUnstableCertified;
    std::ostringstream s;
    s << "necessary condition fails at cell " << worst_cell + 1
      << ": average adjusted capacity is short by " << -rep.margins[worst_cell]
      << " veh/hr";
    rep.diagnostic = s.str();
    return rep;
  }

  try {
    LyapunovWeights weights = lyapunov_weights(model, r, p);
    VertexFlowMinima vm = vertex_flow_minima(model, r, box, weights);
    std::optional<Certificate> cert =
        bmi_feasibility(model.lambda, vm.scr_r, vm.scr_f, cfg);
    if (cert) {
      certificate_constants(model, box, weights, vm.scr_f_hat, vm.scr_r, *cert);
      rep.verdict = Verdict::kStableCertified;
      rep.certificate = std::move(cert);
      rep.diagnostic = "drift certificate found";
    } else {
      rep.verdict = Verdict::kAmbiguous;
      rep.diagnostic =
          "necessary condition holds but no drift certificate was found "
          "within the search budget";
    }
  } catch (const PrerequisiteViolatedError& e) {
    rep.verdict = Verdict::kAmbiguous;
    rep.diagnostic = e.what();
  } catch (const VertexBlowupError& e) {
    rep.verdict = Verdict::kAmbiguous;
    rep.diagnostic = e.what();
  }
  return rep;
}

}  // namespace ssctm
