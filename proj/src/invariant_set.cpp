#include "ssctm/invariant_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssctm/markov.hpp"
#include "ssctm/rng.hpp"
#include "ssctm/simulate.hpp"

namespace ssctm {

InvariantBox build_invariant_box(const FreewayModel& model,
                                 const std::vector<double>& r) {
  const int K = model.cell_count();
  const double v = model.cell.v;
  const double w = model.cell.w;
  const double n_max = model.cell.n_max;

  InvariantBox box;
  box.nbot.assign(K, 0.0);
  box.ntop.assign(K, std::numeric_limits<double>::infinity());

  // Lower boundaries, upstream to downstream: the limiting density when the
  // upstream feed is at its minimum and the downstream cell does not
  // constrain the discharge.
  box.nbot[0] = std::min(r[0] / v, model.cap_max(0) / v);
  for (int k = 1; k < K; ++k) {
    double feed = model.beta[k - 1] * box.nbot[k - 1] + r[k] / v;
    double worst = (model.beta[k - 1] * model.cap_min(k - 1) + r[k]) / v;
    box.nbot[k] = std::min({feed, worst, model.cap_max(k) / v});
  }

  if (K == 1) return box;

  // Upper boundaries, downstream to upstream.  Last cell: either the
  // maximal feed passes through uncongested, or the cell saturates to the
  // density where its worst-case discharge matches the receiving flow.
  {
    double feed = model.beta[K - 2] * model.cap_max(K - 2) + r[K - 1];
    box.ntop[K - 1] = feed <= model.cap_min(K - 1)
                          ? feed / v
                          : n_max - model.cap_min(K - 1) / w;
  }
  // Middle cells: discharge is additionally limited by the space the
  // downstream cell guarantees at its own upper boundary.
  for (int k = K - 2; k >= 1; --k) {
    double space = std::max(w * (n_max - box.ntop[k + 1]) - r[k + 1], 0.0);
    double out = std::min(model.cap_min(k), space / model.beta[k]);
    double feed = model.beta[k - 1] * model.cap_max(k - 1) + r[k];
    box.ntop[k] = feed <= out ? feed / v : n_max - out / w;
  }
  return box;
}

double distance_to_box(const InvariantBox& box, const std::vector<double>& n) {
  double sq = 0.0;
  for (int k = 0; k < box.cell_count(); ++k) {
    double lo = box.nbot[k] - n[k];
    double hi = n[k] - box.ntop[k];
    double excess = std::max({lo, hi, 0.0});
    sq += excess * excess;
  }
  return std::sqrt(sq);
}

namespace {

// Upper sampling limit for the unbounded first coordinate: beyond the
// critical density the sending flow saturates and the field is constant
// in n_1.
double n1_sample_cap(const FreewayModel& model, const InvariantBox& box) {
  return std::max(2.0 * model.critical_density(0), box.nbot[0] + 1.0);
}

}  // namespace

DirectionalityReport verify_boundary_directionality(
    const FreewayModel& model, const std::vector<double>& r,
    const InvariantBox& box, int samples_per_face, std::uint64_t seed,
    double tol) {
  const int K = model.cell_count();
  const int m = model.mode_count();
  DirectionalityReport report;
  SplitMix64 rng(seed);

  const double n1_hi = n1_sample_cap(model, box);
  auto sample_state = [&]() {
    std::vector<double> n(K);
    n[0] = rng.next_range(box.nbot[0], n1_hi);
    for (int k = 1; k < K; ++k) n[k] = rng.next_range(box.nbot[k], box.ntop[k]);
    return n;
  };

  // Faces: n_k = nbot_k for every cell, n_k = ntop_k for cells 2..K.
  for (int k = 0; k < K; ++k) {
    for (int side = 0; side < 2; ++side) {
      bool lower = side == 0;
      if (!lower && k == 0) continue;  // cell 1 has no upper face
      for (int s = 0; s < samples_per_face; ++s) {
        std::vector<double> n = sample_state();
        n[k] = lower ? box.nbot[k] : box.ntop[k];
        for (int i = 0; i < m; ++i) {
          double g = vector_field(model, i, n, r)[k];
          ++report.checks;
          bool outward = lower ? g < -tol : g > tol;
          if (outward)
            report.violations.push_back({i, k, lower, g, n});
        }
      }
    }
  }
  return report;
}

AttractionReport attraction_probe(const FreewayModel& model,
                                  const std::vector<double>& r,
                                  const InvariantBox& box,
                                  const std::vector<std::vector<double>>& starts,
                                  double T, std::uint64_t seed,
                                  const StepConfig& cfg) {
  AttractionReport report;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    SplitMix64 rng(derive_seed(seed, s));
    ModePath path = sample_mode_path(model.lambda, 0, T, rng);
    std::vector<double> n =
        integrate_mode_path(model, path, starts[s], r, cfg);
    double dist = distance_to_box(box, n);
    report.final_distances.push_back(dist);
    report.max_distance = std::max(report.max_distance, dist);
  }
  return report;
}

}  // namespace ssctm
