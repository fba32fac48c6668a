#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssctm/analysis.hpp"
#include "ssctm/errors.hpp"
#include "ssctm/invariant_set.hpp"
#include "ssctm/model_io.hpp"
#include "ssctm/rng.hpp"
#include "ssctm/simulate.hpp"
#include "ssctm/stability.hpp"
#include "ssctm/textfmt.hpp"

namespace fs = std::filesystem;

namespace {

using namespace ssctm;

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitUnstable = 3;
constexpr int kExitAmbiguous = 4;

std::uint64_t fnv1a64(const std::string& data,
                      std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex16(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::vector<double> parse_number_list(const std::string& text,
                                      const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      double x = std::stod(item, &pos);
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos])))
        ++pos;
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(x);
    } catch (const std::exception&) {
      throw Error(std::string("cannot parse ") + what + " value \"" + item +
                  "\"");
    }
  }
  if (out.empty())
    throw Error(std::string("empty ") + what + " list");
  return out;
}

GridSpec parse_grid(const std::string& text) {
  // "r1min:r1max:step,r2min:r2max:step"
  auto comma = text.find(',');
  if (comma == std::string::npos)
    throw Error("grid must be \"r1min:r1max:step,r2min:r2max:step\"");
  auto parse_axis = [](const std::string& axis, double out[3]) {
    std::stringstream ss(axis);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ':')) {
      if (i >= 3) throw Error("grid axis has more than three fields: " + axis);
      try {
        out[i++] = std::stod(item);
      } catch (const std::exception&) {
        throw Error("cannot parse grid number \"" + item + "\"");
      }
    }
    if (i != 3) throw Error("grid axis needs min:max:step, got: " + axis);
  };
  double a1[3], a2[3];
  parse_axis(text.substr(0, comma), a1);
  parse_axis(text.substr(comma + 1), a2);
  GridSpec grid;
  grid.r1_min = a1[0];
  grid.r1_max = a1[1];
  grid.r1_step = a1[2];
  grid.r2_min = a2[0];
  grid.r2_max = a2[1];
  grid.r2_step = a2[2];
  if (grid.count1() < 1 || grid.count2() < 1)
    throw Error("grid is empty; check min <= max and step > 0");
  return grid;
}

struct Options {
  std::string model_path;
  std::string r_text;
  std::string grid_text = "0:6000:30,0:3000:30";
  double onramp_cap = 3000.0;
  std::uint64_t seed = 42;
  double horizon = 10.0;
  double dt = 1e-3;
  int reps = 1;
  std::string out_dir = ".";
  int jobs = 0;
  bool force = false;
  std::string lams_text = "1,1.5,2";
  std::string dcaps_text = "0,1500,3000,4500,6000";
};

// Reads, parses, and validates the model; validation errors are fatal,
// warnings go to stderr.  The raw file text feeds the artifact hash.
FreewayModel load_checked(const std::string& path, std::string& text_out) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  text_out = buf.str();
  FreewayModel model = parse_model(text_out);
  ValidationReport rep = validate(model);
  for (const std::string& w : rep.warnings)
    std::cerr << "warning: " << w << "\n";
  if (!rep.ok()) {
    std::string msg = "model validation failed:";
    for (const std::string& e : rep.errors) msg += "\n  error: " + e;
    throw Error(msg);
  }
  return model;
}

// Deterministic artifact naming: <command>-<model stem>-<16-hex hash> where
// the hash covers the model text and every value-bearing option.  Worker
// count, output directory, and --force do not participate.
struct ArtifactSink {
  fs::path dir;
  bool force = false;
  std::string stem;
  std::string hash;

  ArtifactSink(const Options& o, const std::string& command,
               const std::string& model_text, const std::string& canon) {
    dir = o.out_dir;
    force = o.force;
    stem = o.model_path.empty() ? std::string("family")
                                : fs::path(o.model_path).stem().string();
    hash = hex16(fnv1a64(canon, fnv1a64(model_text)));
    (void)command;
  }

  fs::path write(const std::string& command, const std::string& ext,
                 const std::string& content) const {
    fs::create_directories(dir);
    fs::path p = dir / (command + "-" + stem + "-" + hash + "." + ext);
    if (fs::exists(p) && !force)
      throw Error("refusing to overwrite " + p.string() +
                  " (pass --force to allow)");
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << content;
    if (!out.flush())
      throw Error("failed while writing " + p.string());
    return p;
  }
};

std::vector<double> parse_inflow(const Options& o, const FreewayModel& model) {
  std::vector<double> r = parse_number_list(o.r_text, "inflow");
  if (static_cast<int>(r.size()) != model.cell_count()) {
    std::ostringstream s;
    s << "inflow vector has " << r.size() << " entries, model has "
      << model.cell_count() << " cells";
    throw Error(s.str());
  }
  for (double x : r)
    if (x < 0) throw Error("inflow entries must be nonnegative");
  return r;
}

std::string canon_kv(const std::string& key, const std::string& value) {
  return key + "=" + value + ";";
}

std::string canon_numbers(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += fmt_g17(xs[i]);
  }
  return s;
}

std::string grid_canon(const GridSpec& g) {
  return fmt_g17(g.r1_min) + ":" + fmt_g17(g.r1_max) + ":" +
         fmt_g17(g.r1_step) + "," + fmt_g17(g.r2_min) + ":" +
         fmt_g17(g.r2_max) + ":" + fmt_g17(g.r2_step);
}

// ---- commands -------------------------------------------------------------

int cmd_validate(const Options& o) {
  std::ifstream in(o.model_path);
  if (!in) throw Error("cannot open model file: " + o.model_path);
  std::stringstream buf;
  buf << in.rdbuf();
  FreewayModel model = parse_model(buf.str());
  ValidationReport rep = validate(model);
  for (const std::string& e : rep.errors) std::cout << "error: " << e << "\n";
  for (const std::string& w : rep.warnings)
    std::cout << "warning: " << w << "\n";
  if (!rep.ok()) return kExitBadInput;
  std::cout << "model OK: " << model.cell_count() << " cells, "
            << model.mode_count() << " modes\n";
  return kExitOk;
}

std::string certificate_json(const Certificate& cert, const std::string& ind) {
  std::string s = "{\n";
  s += ind + "  \"a\": [";
  for (std::size_t i = 0; i < cert.a.size(); ++i)
    s += (i ? ", " : "") + json_number(cert.a[i]);
  s += "],\n";
  s += ind + "  \"b\": " + json_number(cert.b) + ",\n";
  s += ind + "  \"c\": " + json_number(cert.c) + ",\n";
  s += ind + "  \"d\": " + json_number(cert.d) + ",\n";
  s += ind + "  \"log_d\": " + json_number(cert.log_d) + ",\n";
  s += ind + "  \"mgf_bound\": " + json_number(cert.mgf_bound) + ",\n";
  s += ind + "  \"log_mgf_bound\": " + json_number(cert.log_mgf_bound) + ",\n";
  s += ind + "  \"slacks\": [";
  for (std::size_t i = 0; i < cert.slacks.size(); ++i)
    s += (i ? ", " : "") + json_number(cert.slacks[i]);
  s += "]\n" + ind + "}";
  return s;
}

std::string verdict_json(const DecisionReport& rep) {
  std::string s = "{\n";
  s += "  \"verdict\": \"" + std::string(verdict_name(rep.verdict)) + "\",\n";
  s += "  \"margins\": [";
  for (std::size_t k = 0; k < rep.margins.size(); ++k)
    s += (k ? ", " : "") + json_number(rep.margins[k]);
  s += "],\n";
  s += "  \"certificate\": ";
  s += rep.certificate ? certificate_json(*rep.certificate, "  ") : "null";
  s += ",\n  \"diagnostic\": \"" + json_escape(rep.diagnostic) + "\"\n}\n";
  return s;
}

int cmd_decide(const Options& o) {
  std::string text;
  FreewayModel model = load_checked(o.model_path, text);
  std::vector<double> r = parse_inflow(o, model);
  DecisionReport rep = decide(model, r);
  std::cout << verdict_json(rep);
  switch (rep.verdict) {
    case Verdict::kStableCertified:
      return kExitOk;
    case Verdict::kUnstableCertified:
      return kExitUnstable;
    case Verdict::kAmbiguous:
      return kExitAmbiguous;
  }
  return kExitAmbiguous;
}

int cmd_region(const Options& o) {
  std::string text;
  FreewayModel model = load_checked(o.model_path, text);
  GridSpec grid = parse_grid(o.grid_text);

  RegionMap map = classify_region(model, grid, o.onramp_cap, BmiConfig{}, o.jobs);

  std::string csv = "r1,r2,verdict,margin_min\n";
  for (const RegionPoint& pt : map.points) {
    csv += fmt_g17(pt.r1) + "," + fmt_g17(pt.r2) + "," +
           point_class_name(pt.cls) + "," + fmt_g17(pt.margin_min) + "\n";
  }
  std::string canon = canon_kv("command", "region") +
                      canon_kv("grid", grid_canon(grid)) +
                      canon_kv("onramp_cap", fmt_g17(o.onramp_cap));
  ArtifactSink sink(o, "region", text, canon);
  fs::path p = sink.write("region", "csv", csv);
  std::cout << "region: " << map.points.size() << " points (stable "
            << map.stable << ", unstable " << map.unstable << ", ambiguous "
            << map.ambiguous << ", out-of-domain " << map.out_of_domain
            << ") -> " << p.string() << "\n";
  return kExitOk;
}

std::string point_json(const std::vector<double>& r) {
  if (r.empty()) return "null";
  std::string s = "[";
  for (std::size_t i = 0; i < r.size(); ++i)
    s += (i ? ", " : "") + json_number(r[i]);
  return s + "]";
}

int cmd_jmax(const Options& o) {
  std::string text;
  FreewayModel model = load_checked(o.model_path, text);
  GridSpec grid = parse_grid(o.grid_text);

  ThroughputBounds b =
      throughput_bounds(model, grid, o.onramp_cap, BmiConfig{}, o.jobs);

  std::string json = "{\n";
  json += "  \"j_upper\": " + json_number(b.j_upper) + ",\n";
  json += "  \"j_lower\": " + json_number(b.j_lower) + ",\n";
  json += "  \"arg_upper\": " + point_json(b.arg_upper) + ",\n";
  json += "  \"arg_lower\": " + point_json(b.arg_lower) + ",\n";
  json += "  \"grid\": \"" + json_escape(grid_canon(grid)) + "\",\n";
  json += "  \"onramp_cap\": " + json_number(o.onramp_cap) + "\n}\n";
  std::string canon = canon_kv("command", "jmax") +
                      canon_kv("grid", grid_canon(grid)) +
                      canon_kv("onramp_cap", fmt_g17(o.onramp_cap));
  ArtifactSink sink(o, "jmax", text, canon);
  fs::path p = sink.write("jmax", "json", json);
  std::cout << "jmax: " << fmt_g6(b.j_lower) << " <= Jmax <= "
            << fmt_g6(b.j_upper) << " veh-mi/hr -> " << p.string() << "\n";
  return kExitOk;
}

int cmd_sweep(const Options& o) {
  GridSpec grid = parse_grid(o.grid_text);
  std::vector<double> lams = parse_number_list(o.lams_text, "lambda");
  std::vector<double> dcaps = parse_number_list(o.dcaps_text, "capacity-drop");

  std::vector<SweepRow> rows =
      sweep_family(lams, dcaps, grid, o.onramp_cap, BmiConfig{}, o.jobs);

  std::string csv = "lambda,dF,j_upper,j_lower\n";
  for (const SweepRow& row : rows) {
    csv += fmt_g17(row.lam) + "," + fmt_g17(row.d_cap) + "," +
           fmt_g17(row.j_upper) + "," + fmt_g17(row.j_lower) + "\n";
  }
  std::string canon = canon_kv("command", "sweep") +
                      canon_kv("grid", grid_canon(grid)) +
                      canon_kv("onramp_cap", fmt_g17(o.onramp_cap)) +
                      canon_kv("lams", canon_numbers(lams)) +
                      canon_kv("dcaps", canon_numbers(dcaps));
  ArtifactSink sink(o, "sweep", "", canon);
  fs::path p = sink.write("sweep", "csv", csv);
  std::cout << "sweep: " << rows.size() << " rows -> " << p.string() << "\n";
  return kExitOk;
}

int cmd_simulate(const Options& o) {
  std::string text;
  FreewayModel model = load_checked(o.model_path, text);
  std::vector<double> r = parse_inflow(o, model);
  if (o.horizon <= 0) throw Error("--horizon must be positive");
  if (o.dt <= 0) throw Error("--dt must be positive");
  if (o.reps < 1) throw Error("--reps must be at least 1");

  StepConfig cfg;
  cfg.dt = o.dt;
  const int K = model.cell_count();

  // The trajectory artifact comes from replication stream 0; queue stats
  // (when requested) reuse the same stream for replication 0.
  HybridTrajectory traj = simulate(model, r, std::vector<double>(K, 0.0), 0,
                                   o.horizon, derive_seed(o.seed, 0), cfg, o.dt);
  std::string csv = "t,mode";
  for (int k = 0; k < K; ++k) csv += ",n_" + std::to_string(k + 1);
  csv += ",total\n";
  for (std::size_t j = 0; j < traj.t.size(); ++j) {
    csv += fmt_g17(traj.t[j]) + "," + std::to_string(traj.mode[j]);
    for (int k = 0; k < K; ++k) csv += "," + fmt_g17(traj.n[j][k]);
    csv += "," + fmt_g17(traj.total[j]) + "\n";
  }
  std::string canon = canon_kv("command", "simulate") +
                      canon_kv("r", canon_numbers(r)) +
                      canon_kv("seed", std::to_string(o.seed)) +
                      canon_kv("horizon", fmt_g17(o.horizon)) +
                      canon_kv("dt", fmt_g17(o.dt)) +
                      canon_kv("reps", std::to_string(o.reps));
  ArtifactSink sink(o, "simulate", text, canon);
  fs::path p = sink.write("simulate", "csv", csv);

  double max_total = 0.0;
  for (double x : traj.total) max_total = std::max(max_total, x);
  std::cout << "simulate: horizon " << fmt_g6(o.horizon) << " hr, final |N| "
            << fmt_g6(traj.total.back()) << " veh, max |N| "
            << fmt_g6(max_total) << " veh -> " << p.string() << "\n";

  if (o.reps >= 2) {
    QueueStats qs = queue_stats(model, r, o.reps, o.horizon, o.seed, cfg, o.jobs);
    std::cout << "queue stats: " << qs.reps << " reps, avg N1 "
              << fmt_g6(qs.avg_n1) << " veh, slope " << fmt_g6(qs.slope)
              << " veh/hr (95% CI [" << fmt_g6(qs.slope_ci_lo) << ", "
              << fmt_g6(qs.slope_ci_hi) << "]), max |N| "
              << fmt_g6(qs.max_total) << " veh\n";
  }
  return kExitOk;
}

int cmd_invariant_set(const Options& o) {
  std::string text;
  FreewayModel model = load_checked(o.model_path, text);
  std::vector<double> r = parse_inflow(o, model);

  InvariantBox box = build_invariant_box(model, r);
  const int K = model.cell_count();
  std::string json = "{\n  \"nbot\": [";
  for (int k = 0; k < K; ++k) json += (k ? ", " : "") + json_number(box.nbot[k]);
  json += "],\n  \"ntop\": [";
  for (int k = 1; k < K; ++k)
    json += (k > 1 ? ", " : "") + json_number(box.ntop[k]);
  json += "]\n}\n";
  std::string canon =
      canon_kv("command", "invariant-set") + canon_kv("r", canon_numbers(r));
  ArtifactSink sink(o, "invariant-set", text, canon);
  fs::path p = sink.write("invariant-set", "json", json);

  std::ostringstream s;
  s << "invariant set: [" << fmt_g6(box.nbot[0]) << ", inf)";
  for (int k = 1; k < K; ++k)
    s << " x [" << fmt_g6(box.nbot[k]) << ", " << fmt_g6(box.ntop[k]) << "]";
  std::cout << s.str() << " veh/mi -> " << p.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stability analysis for freeway traffic under Markovian "
               "capacity fluctuations"};
  app.require_subcommand(1);

  Options o;
  if (const char* env = std::getenv("SSCTM_JOBS")) o.jobs = std::atoi(env);

  auto add_artifact_opts = [&](CLI::App* sub) {
    sub->add_option("--out", o.out_dir, "output directory for artifacts");
    sub->add_flag("--force", o.force, "overwrite existing artifacts");
  };
  auto add_grid_opts = [&](CLI::App* sub) {
    sub->add_option("--grid", o.grid_text,
                    "inflow grid r1min:r1max:step,r2min:r2max:step (veh/hr)");
    sub->add_option("--onramp-cap", o.onramp_cap,
                    "maximum admissible on-ramp inflow r2 (veh/hr)");
    sub->add_option("--jobs", o.jobs,
                    "worker threads (default: SSCTM_JOBS or all cores)");
  };

  CLI::App* validate = app.add_subcommand("validate", "check a model file");
  validate->add_option("--model,-m", o.model_path, "model JSON file")
      ->required();

  CLI::App* decide = app.add_subcommand(
      "decide", "decide stability of an inflow vector (exit 0/3/4)");
  decide->add_option("--model,-m", o.model_path, "model JSON file")->required();
  decide->add_option("--r", o.r_text, "inflow vector, comma separated (veh/hr)")
      ->required();

  CLI::App* region = app.add_subcommand(
      "region", "classify an inflow grid into stable/unstable/ambiguous");
  region->add_option("--model,-m", o.model_path, "model JSON file")->required();
  add_grid_opts(region);
  add_artifact_opts(region);

  CLI::App* jmax = app.add_subcommand(
      "jmax", "throughput bounds over the inflow grid");
  jmax->add_option("--model,-m", o.model_path, "model JSON file")->required();
  add_grid_opts(jmax);
  add_artifact_opts(jmax);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "throughput bounds across the four-mode incident family");
  sweep->add_option("--lams", o.lams_text,
                    "incident arrival-rate multipliers, comma separated");
  sweep->add_option("--dcaps", o.dcaps_text,
                    "capacity drops in incident modes, comma separated (veh/hr)");
  add_grid_opts(sweep);
  add_artifact_opts(sweep);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo simulation of the hybrid dynamics");
  simulate->add_option("--model,-m", o.model_path, "model JSON file")
      ->required();
  simulate->add_option("--r", o.r_text, "inflow vector (veh/hr)")->required();
  simulate->add_option("--horizon", o.horizon, "simulation horizon (hr)");
  simulate->add_option("--dt", o.dt, "integration step (hr)");
  simulate->add_option("--reps", o.reps,
                       "replications for queue statistics (>= 2 to enable)");
  simulate->add_option("--seed", o.seed, "random seed");
  simulate->add_option("--jobs", o.jobs,
                       "worker threads (default: SSCTM_JOBS or all cores)");
  add_artifact_opts(simulate);

  CLI::App* invariant = app.add_subcommand(
      "invariant-set", "globally attracting invariant box for an inflow");
  invariant->add_option("--model,-m", o.model_path, "model JSON file")
      ->required();
  invariant->add_option("--r", o.r_text, "inflow vector (veh/hr)")->required();
  add_artifact_opts(invariant);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (validate->parsed()) return cmd_validate(o);
    if (decide->parsed()) return cmd_decide(o);
    if (region->parsed()) return cmd_region(o);
    if (jmax->parsed()) return cmd_jmax(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (invariant->parsed()) return cmd_invariant_set(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
