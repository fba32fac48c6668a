#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "ssctm/model.hpp"
#include "ssctm/rng.hpp"

namespace testutil {

inline std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

inline std::string models_dir() { return env_or("SSCTM_MODELS_DIR", "models"); }
inline std::string cli_bin() { return env_or("SSCTM_CLI_BIN", ""); }

inline std::filesystem::path test_tmp() {
  std::filesystem::path p = env_or("SSCTM_TEST_TMP", "test-tmp");
  std::filesystem::create_directories(p);
  return p;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  std::filesystem::path p = test_tmp() / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- reference models ------------------------------------------------------

// Two-cell freeway with an off-ramp after cell 1 and a fluctuating first
// capacity; the canonical small worked example.
inline ssctm::FreewayModel two_cell_model() {
  ssctm::FreewayModel m;
  m.beta = {0.75, 1.0};
  m.modes = {{6000, 6000}, {3000, 6000}};
  m.lambda = {{-1, 1}, {1, -1}};
  return m;
}

// Two-cell freeway where each cell independently loses half its capacity.
inline ssctm::FreewayModel four_mode_base_model() {
  ssctm::FreewayModel m;
  m.beta = {1.0, 1.0};
  m.modes = {{6000, 6000}, {3000, 6000}, {6000, 3000}, {3000, 3000}};
  m.lambda = {{-2, 1, 1, 0}, {1, -2, 0, 1}, {1, 0, -2, 1}, {0, 1, 1, -2}};
  return m;
}

// Same chain, but cell 2 is pinned to a fixed capacity f2 in every mode.
inline ssctm::FreewayModel four_mode_variant_model(double f2) {
  ssctm::FreewayModel m = four_mode_base_model();
  for (auto& row : m.modes) row[1] = f2;
  return m;
}

// Perfectly correlated two-mode fluctuations (both cells drop together).
inline ssctm::FreewayModel corr_case1_model() {
  ssctm::FreewayModel m;
  m.beta = {1.0, 1.0};
  m.modes = {{6000, 6000}, {3000, 3000}};
  m.lambda = {{-1, 1}, {1, -1}};
  return m;
}

// Perfectly anti-correlated fluctuations (one cell drops when the other
// recovers).
inline ssctm::FreewayModel corr_case2_model() {
  ssctm::FreewayModel m;
  m.beta = {1.0, 1.0};
  m.modes = {{6000, 3000}, {3000, 6000}};
  m.lambda = {{-1, 1}, {1, -1}};
  return m;
}

// ---- random instances ------------------------------------------------------

// Random well-posed model: K in [1, max_cells], m in [1, max_modes],
// capacities inside the fundamental-diagram bound, and a rate matrix built
// from a ring plus random shortcuts so the chain is always irreducible.
inline ssctm::FreewayModel random_model(ssctm::SplitMix64& rng,
                                        int max_cells = 4, int max_modes = 4) {
  ssctm::FreewayModel m;
  const int K = 1 + rng.next_index(max_cells);
  const int n_modes = 1 + rng.next_index(max_modes);

  m.beta.resize(K);
  for (int k = 0; k < K; ++k) m.beta[k] = rng.next_range(0.5, 1.0);

  const double bound = m.sbarmax();  // 6000 with the default cell params
  m.modes.assign(n_modes, std::vector<double>(K));
  for (int i = 0; i < n_modes; ++i)
    for (int k = 0; k < K; ++k) m.modes[i][k] = rng.next_range(1500.0, bound);

  m.lambda.assign(n_modes, std::vector<double>(n_modes, 0.0));
  if (n_modes > 1) {
    for (int i = 0; i < n_modes; ++i) {
      const int ring = (i + 1) % n_modes;
      m.lambda[i][ring] = rng.next_range(0.5, 3.0);
      for (int j = 0; j < n_modes; ++j) {
        if (j == i || j == ring) continue;
        if (rng.next_double() < 0.4) m.lambda[i][j] = rng.next_range(0.1, 2.0);
      }
      double row = 0.0;
      for (int j = 0; j < n_modes; ++j)
        if (j != i) row += m.lambda[i][j];
      m.lambda[i][i] = -row;
    }
  }
  return m;
}

// Random inflow whose nominal through-flow stays below frac times the
// worst-mode capacity of every cell, so the freeway can always drain.
// limit[k] caps the through-flow of cell k so that no cell downstream of k
// can be overloaded either, even before its own ramp adds traffic.
inline std::vector<double> random_inflow(ssctm::SplitMix64& rng,
                                         const ssctm::FreewayModel& m,
                                         double frac = 0.9) {
  const int K = m.cell_count();
  std::vector<double> limit(K);
  limit[K - 1] = frac * m.cap_min(K - 1);
  for (int k = K - 2; k >= 0; --k)
    limit[k] = std::min(frac * m.cap_min(k), limit[k + 1] / m.beta[k]);

  std::vector<double> r(K, 0.0);
  double carried = 0.0;  // nominal through-flow entering cell k
  for (int k = 0; k < K; ++k) {
    if (k > 0) carried *= m.beta[k - 1];
    const double room = limit[k] - carried;
    r[k] = room > 0 ? rng.next_range(0.0, room) : 0.0;
    carried += r[k];
  }
  return r;
}

// ---- CLI subprocess runner ---------------------------------------------------

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline CmdResult run_cli(const std::string& args,
                         const std::filesystem::path& workdir) {
  static int counter = 0;
  const auto tmp = test_tmp();
  const int id = ++counter;
  const auto out_f = tmp / ("cli-out-" + std::to_string(id) + ".txt");
  const auto err_f = tmp / ("cli-err-" + std::to_string(id) + ".txt");
  const std::string cmd = "cd '" + workdir.string() + "' && '" + cli_bin() +
                          "' " + args + " > '" + out_f.string() + "' 2> '" +
                          err_f.string() + "'";
  const int rc = std::system(cmd.c_str());
  CmdResult res;
  if (rc != -1 && WIFEXITED(rc)) res.exit_code = WEXITSTATUS(rc);
  res.out = read_file(out_f);
  res.err = read_file(err_f);
  std::filesystem::remove(out_f);
  std::filesystem::remove(err_f);
  return res;
}

}  // namespace testutil
