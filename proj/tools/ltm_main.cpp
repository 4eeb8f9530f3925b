// Command-line driver. Every subcommand is a thin adapter over the library;
// no numerical logic lives here. Exit codes: 0 success, 2 config error,
// 3 infeasible calibration, 4 data error, 5 internal error.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ltm/analysis.hpp"
#include "ltm/experiments.hpp"
#include "ltm/mechanism.hpp"
#include "ltm/mpc.hpp"
#include "ltm/noise.hpp"
#include "ltm/rng.hpp"
#include "ltm/sketch.hpp"

namespace {

using ltm::i32;
using ltm::i64;
using ltm::u64;
using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ltm::ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_config_json(const std::string& path,
                      const std::vector<std::string>& known_keys) {
  if (path.empty()) return json::object();
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ltm::ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ltm::ConfigError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : known_keys)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ltm::ConfigError("config: unknown key: " + it.key());
  }
  return j;
}

template <typename T>
void cfg_merge(const CLI::App* sub, const json& cfg, const char* flag,
               const char* key, T& value) {
  if (sub->count(flag) == 0 && cfg.contains(key)) {
    try {
      value = cfg.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ltm::ConfigError(std::string("config: bad value for ") + key +
                             ": " + e.what());
    }
  }
}

std::filesystem::path ensure_out_dir(const std::string& out) {
  std::filesystem::path p(out);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec)
    throw ltm::DataError("cannot create output directory: " + out + ": " +
                         ec.message());
  return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ltm::DataError("write failed: " + path.string());
}

double parse_double_or_throw(const std::string& text, const char* what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ltm::ConfigError(std::string("invalid number for ") + what + ": " +
                           text);
  return v;
}

// ---------------------------------------------------------------------------
// sweep-shaped subcommands (lowrank / ridge / sweep)
// ---------------------------------------------------------------------------

struct SweepFlags {
  CLI::App* sub = nullptr;
  i64 n = 0;
  i64 d = 0;
  i64 k = 0;
  i64 m = 0;
  i64 s = 0;
  double lambda = 10.0;
  std::string mu2;
  double epsilon = 1.0;
  double delta = 0.01;
  double p = 1.0;
  std::vector<std::string> mechanisms;
  i64 runs = 20;
  u64 seed = ltm::kDefaultMasterSeed;
  double noise_scale = 1.0;
  i64 laplace_m = 25;
  i64 t_clients = 0;
  double eta = 0.0;
  i64 threads = 0;
  std::string config;
  std::string out;
};

void add_sweep_flags(CLI::App* sub, SweepFlags& o, bool config_required) {
  o.sub = sub;
  sub->add_option("--n", o.n, "clients (single grid point)");
  sub->add_option("--d", o.d, "feature columns");
  sub->add_option("--k", o.k, "rank / sketch embedding dimension");
  sub->add_option("--m", o.m, "force sketch rows (0 = derived)");
  sub->add_option("--s", o.s, "force sketch sparsity (0 = derived)");
  sub->add_option("--lambda", o.lambda, "ridge regularizer");
  sub->add_option("--mu2", o.mu2, "planted-coefficient variance, number or n");
  sub->add_option("--epsilon", o.epsilon, "privacy budget epsilon");
  sub->add_option("--delta", o.delta, "privacy budget delta");
  sub->add_option("--p", o.p, "interpolation exponent for ltm-gaussian");
  sub->add_option("--mechanism", o.mechanisms,
                  "mechanism tag (repeatable): central, ltm-gaussian, "
                  "ltm-laplace, local");
  sub->add_option("--runs", o.runs, "runs per cell");
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--noise-scale", o.noise_scale,
                  "multiplier on every mechanism's noise variance");
  sub->add_option("--laplace-m", o.laplace_m,
                  "dense sketch rows for the pure-DP laplace arm");
  sub->add_option("--t-clients", o.t_clients, "tolerated corrupt clients");
  sub->add_option("--eta", o.eta, "entry-bound override (0 = measured)");
  sub->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  auto* cfg =
      sub->add_option("--config", o.config, "sweep config JSON (full schema)");
  if (config_required) cfg->required();
  sub->add_option("--out", o.out, "output directory for results + manifest");
}

ltm::SweepConfig build_sweep_config(const SweepFlags& o,
                                    const std::string& forced_experiment) {
  ltm::SweepConfig cfg;
  const bool from_file = !o.config.empty();
  if (from_file) cfg = ltm::sweep_config_from_json(read_text_file(o.config));
  if (!forced_experiment.empty()) cfg.experiment = forced_experiment;
  auto set = [&](const char* flag) { return o.sub->count(flag) > 0; };

  if (set("--n")) cfg.ns = {o.n};
  if (set("--d")) cfg.d = o.d;
  if (set("--k")) cfg.k = o.k;
  if (set("--m")) cfg.force_m = o.m;
  if (set("--s")) cfg.force_s = o.s;
  if (set("--lambda")) cfg.lambda = o.lambda;
  if (set("--mu2")) {
    if (o.mu2 == "n") {
      cfg.mu2_is_n = true;
    } else {
      cfg.mu2_is_n = false;
      cfg.mu2 = parse_double_or_throw(o.mu2, "--mu2");
    }
  }
  if (set("--epsilon")) cfg.epsilons = {o.epsilon};
  if (set("--delta")) cfg.delta = o.delta;
  if (set("--p")) cfg.ps = {o.p};
  if (set("--mechanism")) cfg.mechanisms = o.mechanisms;
  if (set("--runs")) cfg.runs = o.runs;
  if (set("--seed")) cfg.master_seed = o.seed;
  if (set("--noise-scale")) cfg.noise_scale = o.noise_scale;
  if (set("--laplace-m")) cfg.laplace_m = o.laplace_m;
  if (set("--t-clients")) cfg.t_clients = o.t_clients;
  if (set("--eta")) cfg.eta_override = o.eta;
  if (set("--threads")) cfg.threads = o.threads;

  if (!from_file) {
    // Single-cell convenience defaults.
    if (cfg.ns.empty()) cfg.ns = {2000};
    if (cfg.d == 0) cfg.d = forced_experiment == "regression" ? 10 : 20;
    if (!set("--mechanism")) cfg.mechanisms = {"ltm-gaussian"};
  }
  return cfg;
}

int run_sweep_like(const SweepFlags& o, const std::string& forced_experiment,
                   bool single_cell) {
  const ltm::SweepConfig cfg = build_sweep_config(o, forced_experiment);
  const std::vector<ltm::ResultRow> rows = ltm::run_sweep(cfg);
  if (!o.out.empty()) {
    const auto dir = ensure_out_dir(o.out);
    ltm::write_results_csv((dir / "results.csv").string(), rows);
    ltm::write_manifest((dir / "manifest.json").string(), cfg);
  }
  if (o.out.empty() || single_cell) {
    std::fputs(ltm::results_csv_text(rows).c_str(), stdout);
  } else {
    std::printf("wrote %s/results.csv (%zu rows)\n", o.out.c_str(),
                rows.size());
  }
  if (single_cell) {
    bool all_threshold = !rows.empty();
    for (const auto& row : rows)
      if (row.status != "threshold_regime") all_threshold = false;
    if (all_threshold)
      throw ltm::ThresholdRegime(
          "calibration infeasible at every requested cell");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sketch
// ---------------------------------------------------------------------------

struct SketchFlags {
  CLI::App* sub = nullptr;
  i64 n = 1000;
  i64 m = 0;
  i64 s = 0;
  i64 k = 0;
  u64 seed = ltm::kDefaultMasterSeed;
  std::string mode = "sparse";
  bool with_replacement = false;
  double alpha_s = 0.5;
  double beta = 0.01;
  std::string config;
  std::string out;
};

int run_sketch(const SketchFlags& o_in) {
  SketchFlags o = o_in;
  const json cfg = load_config_json(
      o.config, {"n", "m", "s", "k", "seed", "mode", "with_replacement",
                 "alpha_s", "beta"});
  cfg_merge(o.sub, cfg, "--n", "n", o.n);
  cfg_merge(o.sub, cfg, "--m", "m", o.m);
  cfg_merge(o.sub, cfg, "--s", "s", o.s);
  cfg_merge(o.sub, cfg, "--k", "k", o.k);
  cfg_merge(o.sub, cfg, "--seed", "seed", o.seed);
  cfg_merge(o.sub, cfg, "--mode", "mode", o.mode);
  cfg_merge(o.sub, cfg, "--with-replacement", "with_replacement",
            o.with_replacement);
  cfg_merge(o.sub, cfg, "--alpha-s", "alpha_s", o.alpha_s);
  cfg_merge(o.sub, cfg, "--beta", "beta", o.beta);

  ltm::SketchSpec spec;
  spec.n = o.n;
  spec.seed = o.seed;
  spec.with_replacement = o.with_replacement;
  if (o.mode == "dense") {
    spec.mode = ltm::SketchMode::kDenseRademacher;
    if (o.m == 0) throw ltm::ConfigError("sketch: dense mode requires --m");
    spec.m = o.m;
    if (o.s != 0 && o.s != o.m)
      throw ltm::ConfigError("sketch: dense mode requires s == m");
    spec.s = o.m;
  } else if (o.mode == "sparse") {
    spec.mode = ltm::SketchMode::kSparseOsnap;
    spec.m = o.m;
    spec.s = o.s;
    if (spec.m == 0 || spec.s == 0) {
      if (o.k < 1)
        throw ltm::ConfigError("sketch: give --m and --s, or --k to derive");
      ltm::OsnapParams params;
      params.k = o.k;
      params.alpha_s = o.alpha_s;
      params.beta = o.beta;
      const ltm::SketchDims dims = ltm::cohen_params(params);
      if (spec.m == 0) spec.m = dims.m;
      if (spec.s == 0) spec.s = dims.s;
    }
  } else {
    throw ltm::ConfigError("sketch: mode must be sparse or dense");
  }

  const ltm::SketchDecomposition dec = ltm::sample_sketch(spec);
  const std::vector<i64> loads = ltm::total_row_loads(dec);
  i64 load_min = loads.empty() ? 0 : loads[0];
  i64 load_max = load_min;
  for (i64 v : loads) {
    load_min = std::min(load_min, v);
    load_max = std::max(load_max, v);
  }
  json j;
  j["spec"] = json::parse(ltm::sketch_spec_to_json(spec));
  j["scale"] = dec.scale();
  j["nonzeros"] = spec.n * spec.s;
  j["row_load_min"] = load_min;
  j["row_load_max"] = load_max;
  j["row_load_mean"] =
      static_cast<double>(spec.n * spec.s) / static_cast<double>(spec.m);
  const std::string text = j.dump(2) + "\n";
  std::fputs(text.c_str(), stdout);
  if (!o.out.empty()) write_text(ensure_out_dir(o.out) / "sketch.json", text);
  return 0;
}

// ---------------------------------------------------------------------------
// frequency
// ---------------------------------------------------------------------------

struct FrequencyFlags {
  CLI::App* sub = nullptr;
  std::string family = "gaussian";
  i64 n = 1000;
  i64 k = 2;
  double eta = 1.0;
  double epsilon = 1.0;
  double delta = 0.01;
  i64 runs = 20;
  u64 seed = ltm::kDefaultMasterSeed;
  double sensitivity_exponent = -1.0;
  std::string config;
  std::string out;
};

int run_frequency(const FrequencyFlags& o_in) {
  FrequencyFlags o = o_in;
  const json cfg = load_config_json(
      o.config, {"family", "n", "k", "eta", "epsilon", "delta", "runs", "seed",
                 "sensitivity_exponent"});
  cfg_merge(o.sub, cfg, "--family", "family", o.family);
  cfg_merge(o.sub, cfg, "--n", "n", o.n);
  cfg_merge(o.sub, cfg, "--k", "k", o.k);
  cfg_merge(o.sub, cfg, "--eta", "eta", o.eta);
  cfg_merge(o.sub, cfg, "--epsilon", "epsilon", o.epsilon);
  cfg_merge(o.sub, cfg, "--delta", "delta", o.delta);
  cfg_merge(o.sub, cfg, "--runs", "runs", o.runs);
  cfg_merge(o.sub, cfg, "--seed", "seed", o.seed);
  cfg_merge(o.sub, cfg, "--sensitivity-exponent", "sensitivity_exponent",
            o.sensitivity_exponent);

  ltm::NoiseFamily family;
  if (o.family == "gaussian")
    family = ltm::NoiseFamily::kGaussian;
  else if (o.family == "gamma")
    family = ltm::NoiseFamily::kGammaDifference;
  else
    throw ltm::ConfigError("frequency: family must be gaussian or gamma");
  if (o.n < 1 || o.runs < 1)
    throw ltm::ConfigError("frequency: need n >= 1 and runs >= 1");

  // Synthetic client values, uniform in [-eta, eta].
  ltm::RandomStream values_stream(
      ltm::derive_seed(o.seed, ltm::StreamDomain::kData, 0));
  std::vector<double> values(static_cast<std::size_t>(o.n));
  for (auto& v : values) v = o.eta * (2.0 * values_stream.uniform01() - 1.0);
  const double f_exact = ltm::frequency_moment(values, o.k);

  const ltm::PrivacyBudget budget{o.epsilon, o.delta};
  const ltm::FrequencyCalibration cal = ltm::frequency_noise(
      family, o.eta, o.k, o.n, budget, o.sensitivity_exponent);

  double sum = 0.0, sum_sq = 0.0;
  for (i64 r = 0; r < o.runs; ++r) {
    const u64 run_seed = ltm::derive_seed(
        o.seed, ltm::StreamDomain::kExperiment, static_cast<u64>(r) + 1);
    const double err =
        ltm::frequency_pipeline(values, o.k, o.eta, cal, run_seed) - f_exact;
    sum += err;
    sum_sq += err * err;
  }
  const double runs_d = static_cast<double>(o.runs);
  ltm::ResultRow row;
  row.mechanism = "freq-" + o.family;
  row.p = std::numeric_limits<double>::quiet_NaN();
  row.epsilon = o.epsilon;
  row.n = o.n;
  row.metric = "freq_err";
  row.mean = sum / runs_d;
  row.std_dev = o.runs > 1
                    ? std::sqrt(std::max(
                          (sum_sq - sum * sum / runs_d) / (runs_d - 1.0), 0.0))
                    : 0.0;
  row.runs = o.runs;
  row.seed = o.seed;
  std::vector<ltm::ResultRow> rows{row};
  std::fputs(ltm::results_csv_text(rows).c_str(), stdout);

  if (!o.out.empty()) {
    const auto dir = ensure_out_dir(o.out);
    ltm::write_results_csv((dir / "results.csv").string(), rows);
    json manifest;
    manifest["family"] = o.family;
    manifest["n"] = o.n;
    manifest["k"] = o.k;
    manifest["eta"] = o.eta;
    manifest["epsilon"] = o.epsilon;
    manifest["delta"] = o.delta;
    manifest["runs"] = o.runs;
    manifest["seed"] = o.seed;
    manifest["sensitivity_exponent"] = o.sensitivity_exponent;
    manifest["f_exact"] = f_exact;
    manifest["aggregate_std_analytic"] =
        family == ltm::NoiseFamily::kGaussian
            ? std::sqrt(static_cast<double>(o.n) * cal.sigma2)
            : cal.gamma.scale * std::sqrt(2.0);
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// mpc-demo
// ---------------------------------------------------------------------------

struct MpcDemoFlags {
  CLI::App* sub = nullptr;
  i64 n = 500000;
  i64 d = 10;
  i64 s = 1;
  i64 m = 100;
  i32 servers = 3;
  i32 frac_bits = 16;
  double epsilon = 1.0;
  double delta = 0.01;
  std::string family = "gaussian";
  i64 t_clients = 0;
  double eta = 1.0;
  u64 seed = ltm::kDefaultMasterSeed;
  std::string config;
  std::string out;
};

int run_mpc_demo(const MpcDemoFlags& o_in) {
  MpcDemoFlags o = o_in;
  const json cfg = load_config_json(
      o.config, {"n", "d", "s", "m", "servers", "frac_bits", "epsilon",
                 "delta", "family", "t_clients", "eta", "seed"});
  cfg_merge(o.sub, cfg, "--n", "n", o.n);
  cfg_merge(o.sub, cfg, "--d", "d", o.d);
  cfg_merge(o.sub, cfg, "--s", "s", o.s);
  cfg_merge(o.sub, cfg, "--m", "m", o.m);
  cfg_merge(o.sub, cfg, "--servers", "servers", o.servers);
  cfg_merge(o.sub, cfg, "--frac-bits", "frac_bits", o.frac_bits);
  cfg_merge(o.sub, cfg, "--epsilon", "epsilon", o.epsilon);
  cfg_merge(o.sub, cfg, "--delta", "delta", o.delta);
  cfg_merge(o.sub, cfg, "--family", "family", o.family);
  cfg_merge(o.sub, cfg, "--t-clients", "t_clients", o.t_clients);
  cfg_merge(o.sub, cfg, "--eta", "eta", o.eta);
  cfg_merge(o.sub, cfg, "--seed", "seed", o.seed);

  const ltm::CommReport report =
      ltm::comm_report(o.n, o.d, o.s, o.m, o.servers);
  const std::string report_text = ltm::comm_report_to_json(report) + "\n";
  std::fputs(report_text.c_str(), stdout);
  if (o.out.empty()) return 0;

  ltm::NoiseFamily family;
  if (o.family == "gaussian")
    family = ltm::NoiseFamily::kGaussian;
  else if (o.family == "gamma")
    family = ltm::NoiseFamily::kGammaDifference;
  else
    throw ltm::ConfigError("mpc-demo: family must be gaussian or gamma");

  const auto dir = ensure_out_dir(o.out);
  ltm::DataMatrix data;
  data.rows = ltm::Matrix(o.n, o.d);
  ltm::RandomStream data_stream(
      ltm::derive_seed(o.seed, ltm::StreamDomain::kData, 0));
  for (i64 r = 0; r < o.n; ++r)
    for (i64 c = 0; c < o.d; ++c)
      data.rows(r, c) = o.eta * (2.0 * data_stream.uniform01() - 1.0);
  data.eta = o.eta;

  ltm::SketchSpec spec;
  spec.n = o.n;
  spec.m = o.m;
  spec.s = o.s;
  spec.mode = ltm::SketchMode::kSparseOsnap;
  spec.seed = ltm::derive_seed(o.seed, ltm::StreamDomain::kSketch, 0);
  const ltm::SketchDecomposition dec = ltm::sample_sketch(spec);

  ltm::MechanismConfig mech;
  mech.family = family;
  mech.budget = {o.epsilon, o.delta};
  mech.t_clients = o.t_clients;
  ltm::MpcConfig mpc;
  mpc.servers = o.servers;
  mpc.frac_bits = o.frac_bits;

  const ltm::MpcOutput mpc_out = ltm::mpc_pipeline(data, dec, mech, mpc, o.seed);
  const ltm::LtmOutput ref = ltm::ltm_pipeline(data, dec, mech, o.seed);
  const double max_diff =
      (mpc_out.sketch - ref.sketch).cwiseAbs().maxCoeff();
  const std::vector<i64> loads = ltm::total_row_loads(dec);
  i64 max_load = 0;
  for (i64 v : loads) max_load = std::max(max_load, v);
  const double quant_bound = dec.scale() * static_cast<double>(max_load) *
                             std::ldexp(1.0, -o.frac_bits - 1);

  ltm::SketchDumpMeta meta;
  meta.n = o.n;
  meta.d = o.d;
  meta.s = o.s;
  meta.m = o.m;
  ltm::write_sketch_columnar((dir / "sketch.bin").string(), mpc_out.sketch,
                             meta);
  json j;
  j["comm"] = json::parse(ltm::comm_report_to_json(mpc_out.comm));
  j["zeroed"] = mpc_out.zeroed;
  j["clipped_entries"] = mpc_out.clipped_entries;
  j["total_entries"] = mpc_out.total_entries;
  j["clip_fraction"] = mpc_out.clip_fraction;
  j["max_abs_diff_vs_plaintext"] = max_diff;
  j["quantization_bound"] = quant_bound;
  j["frac_bits"] = o.frac_bits;
  j["servers"] = o.servers;
  j["seed"] = o.seed;
  write_text(dir / "mpc.json", j.dump(2) + "\n");
  std::printf("wrote %s/sketch.bin and %s/mpc.json\n", o.out.c_str(),
              o.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear-transformation-model sketching simulator"};
  app.require_subcommand(1);

  SweepFlags lowrank_flags;
  add_sweep_flags(app.add_subcommand(
                      "lowrank", "single low-rank approximation experiment"),
                  lowrank_flags, false);
  lowrank_flags.sub->get_option("--k")->description(
      "target rank (default: d)");

  SweepFlags ridge_flags;
  add_sweep_flags(
      app.add_subcommand("ridge", "single ridge-regression experiment"),
      ridge_flags, false);

  SweepFlags sweep_flags;
  add_sweep_flags(app.add_subcommand("sweep", "full experiment grid"),
                  sweep_flags, true);

  SketchFlags sketch_flags;
  {
    auto* sub = app.add_subcommand("sketch", "sample a sketch, print summary");
    sketch_flags.sub = sub;
    sub->add_option("--n", sketch_flags.n, "columns (clients)");
    sub->add_option("--m", sketch_flags.m, "rows");
    sub->add_option("--s", sketch_flags.s, "nonzeros per column");
    sub->add_option("--k", sketch_flags.k, "derive m, s for this rank");
    sub->add_option("--seed", sketch_flags.seed, "sketch seed");
    sub->add_option("--mode", sketch_flags.mode, "sparse | dense");
    sub->add_flag("--with-replacement", sketch_flags.with_replacement,
                  "sample row indices with replacement (ablation)");
    sub->add_option("--alpha-s", sketch_flags.alpha_s, "embedding distortion");
    sub->add_option("--beta", sketch_flags.beta, "embedding failure mass");
    sub->add_option("--config", sketch_flags.config, "config JSON");
    sub->add_option("--out", sketch_flags.out, "output directory");
  }

  FrequencyFlags freq_flags;
  {
    auto* sub =
        app.add_subcommand("frequency", "scalar frequency-moment release");
    freq_flags.sub = sub;
    sub->add_option("--family", freq_flags.family, "gaussian | gamma");
    sub->add_option("--n", freq_flags.n, "clients");
    sub->add_option("--k", freq_flags.k, "moment order");
    sub->add_option("--eta", freq_flags.eta, "per-client value bound");
    sub->add_option("--epsilon", freq_flags.epsilon, "privacy epsilon");
    sub->add_option("--delta", freq_flags.delta, "privacy delta");
    sub->add_option("--runs", freq_flags.runs, "trials");
    sub->add_option("--seed", freq_flags.seed, "master seed");
    sub->add_option("--sensitivity-exponent", freq_flags.sensitivity_exponent,
                    "override the Delta exponent (default: k)");
    sub->add_option("--config", freq_flags.config, "config JSON");
    sub->add_option("--out", freq_flags.out, "output directory");
  }

  MpcDemoFlags mpc_flags;
  {
    auto* sub = app.add_subcommand(
        "mpc-demo", "communication report and simulated-server pipeline");
    mpc_flags.sub = sub;
    sub->add_option("--n", mpc_flags.n, "clients");
    sub->add_option("--d", mpc_flags.d, "features");
    sub->add_option("--s", mpc_flags.s, "sketch nonzeros per column");
    sub->add_option("--m", mpc_flags.m, "sketch rows");
    sub->add_option("--servers", mpc_flags.servers, "server count");
    sub->add_option("--frac-bits", mpc_flags.frac_bits,
                    "fixed-point fractional bits");
    sub->add_option("--epsilon", mpc_flags.epsilon, "privacy epsilon");
    sub->add_option("--delta", mpc_flags.delta, "privacy delta");
    sub->add_option("--family", mpc_flags.family, "gaussian | gamma");
    sub->add_option("--t-clients", mpc_flags.t_clients,
                    "tolerated corrupt clients");
    sub->add_option("--eta", mpc_flags.eta, "entry bound");
    sub->add_option("--seed", mpc_flags.seed, "master seed");
    sub->add_option("--config", mpc_flags.config, "config JSON");
    sub->add_option("--out", mpc_flags.out,
                    "run the simulated pipeline and write artifacts here");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  }

  try {
    if (lowrank_flags.sub->parsed())
      return run_sweep_like(lowrank_flags, "lowrank", true);
    if (ridge_flags.sub->parsed())
      return run_sweep_like(ridge_flags, "regression", true);
    if (sweep_flags.sub->parsed()) return run_sweep_like(sweep_flags, "", false);
    if (sketch_flags.sub->parsed()) return run_sketch(sketch_flags);
    if (freq_flags.sub->parsed()) return run_frequency(freq_flags);
    if (mpc_flags.sub->parsed()) return run_mpc_demo(mpc_flags);
    std::cerr << "error: config: no subcommand\n";
    return 2;
  } catch (const ltm::ThresholdRegime& e) {
    std::cerr << "error: threshold: " << e.what() << "\n";
    return 3;
  } catch (const ltm::ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const ltm::DataError& e) {
    std::cerr << "error: data: " << e.what() << "\n";
    return 4;
  } catch (const ltm::InternalError& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 5;
  }
}
