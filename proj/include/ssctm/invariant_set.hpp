#pragma once

#include <cstdint>
#include <vector>

#include "ssctm/dynamics.hpp"
#include "ssctm/model.hpp"

namespace ssctm {

// Rectangular invariant set [nbot_1, inf) x prod_k [nbot_k, ntop_k].  The
// first cell is an unbounded buffer, so ntop[0] is +infinity.
struct InvariantBox {
  std::vector<double> nbot;
  std::vector<double> ntop;

  int cell_count() const { return static_cast<int>(nbot.size()); }
};

// Builds the box from the model and inflow vector.  Lower boundaries are
// computed upstream to downstream, upper boundaries downstream to upstream
// (the upper recursion references the downstream neighbour's bound).
InvariantBox build_invariant_box(const FreewayModel& model,
                                 const std::vector<double>& r);

struct DirectionalityViolation {
  int mode = 0;
  int cell = 0;            // cell whose face was probed (0-based)
  bool lower_face = true;  // face n_k = nbot_k (else n_k = ntop_k)
  double rate = 0.0;       // offending component of G (sign points outward)
  std::vector<double> state;
};

struct DirectionalityReport {
  long long checks = 0;  // state-mode pairs evaluated
  std::vector<DirectionalityViolation> violations;

  bool ok() const { return violations.empty(); }
};

// Samples `samples_per_face` random states on every face of the box and
// verifies, for every mode, that the vector field does not point outward:
// G_k >= -tol on the n_k = nbot_k face, G_k <= tol on the n_k = ntop_k face.
// The unbounded n_1 axis is sampled up to twice the critical density (the
// field no longer depends on n_1 beyond that).
DirectionalityReport verify_boundary_directionality(
    const FreewayModel& model, const std::vector<double>& r,
    const InvariantBox& box, int samples_per_face, std::uint64_t seed,
    double tol = 1e-6);

struct AttractionReport {
  std::vector<double> final_distances;  // distance to the box per start state
  double max_distance = 0.0;
};

// Integrates each start state under an independently sampled mode path for
// T hours and reports the Euclidean distance from the final state to the
// box.  Distances near zero support the global-attraction property.
AttractionReport attraction_probe(const FreewayModel& model,
                                  const std::vector<double>& r,
                                  const InvariantBox& box,
                                  const std::vector<std::vector<double>>& starts,
                                  double T, std::uint64_t seed,
                                  const StepConfig& cfg = {});

// Euclidean distance from a state to the box (0 inside).
double distance_to_box(const InvariantBox& box, const std::vector<double>& n);

}  // namespace ssctm
