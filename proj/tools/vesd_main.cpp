// Command line front end. Every capability lives behind the C API in
// libvesd; this file only parses arguments, moves bytes between files and
// the library, and writes a run manifest for every invocation, failures
// included.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vesd.h"

namespace {

using nlohmann::json;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
  throw CliError{code, message};
}

std::string take_last_error() {
  const char* msg = vesd_last_error();
  return msg ? std::string(msg) : std::string("unknown error");
}

void check_status(int rc) {
  if (rc != VESD_OK) fail(rc, take_last_error());
}

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { vesd_string_free(s); }
  std::string str() const { return s ? std::string(s) : std::string(); }
};

struct OwnedBuffer {
  double* data = nullptr;
  int64_t len = 0;
  ~OwnedBuffer() { vesd_buffer_free(data); }
};

struct MatrixHandle {
  vesd_matrix* m = nullptr;
  ~MatrixHandle() { vesd_matrix_free(m); }
};

struct ReportHandle {
  vesd_report* r = nullptr;
  ~ReportHandle() { vesd_report_free(r); }
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(VESD_EINVAL, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  if (!f.good() && !f.eof()) fail(VESD_EINVAL, "cannot read " + path);
  return ss.str();
}

// Temp-and-rename so a failed run never leaves a partial artifact behind.
void write_file(const std::string& path, const std::string& content) {
  auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f || !(f << content) || !f.flush()) {
      std::remove(tmp.c_str());
      fail(VESD_EINVAL, "cannot write " + path);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    fail(VESD_EINVAL, "cannot write " + path);
  }
}

std::string hash_text(const std::string& config_text) {
  OwnedString h;
  check_status(vesd_config_hash(config_text.c_str(), &h.s));
  return h.str();
}

// ---------------------------------------------------------------- manifest

struct RunRecord {
  std::string command;
  std::vector<std::string> argv;
  std::string manifest_path;
  std::string config_hash;
  std::optional<uint64_t> seed;
  std::optional<int> jobs;
  std::vector<std::string> artifacts;
  json cell_seconds;
};

// Runs the body, then writes the manifest no matter how the body ended.
int run_command(RunRecord& rec, const std::function<void(RunRecord&)>& body) {
  auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  std::string error;
  try {
    body(rec);
  } catch (const CliError& e) {
    code = e.code == VESD_OK ? VESD_EFAIL : e.code;
    error = e.message;
  } catch (const std::exception& e) {
    code = VESD_EFAIL;
    error = e.what();
  }
  std::chrono::duration<double> wall = std::chrono::steady_clock::now() - t0;

  json f;
  f["command"] = rec.command;
  f["argv"] = rec.argv;
  if (!rec.config_hash.empty()) f["config_hash"] = rec.config_hash;
  if (rec.seed) f["seed"] = *rec.seed;
  if (rec.jobs) f["jobs"] = *rec.jobs;
  f["ok"] = (code == 0);
  f["exit_code"] = code;
  if (!error.empty()) f["error"] = error;
  f["artifacts"] = rec.artifacts;
  f["wall_time_sec"] = wall.count();
  if (!rec.cell_seconds.is_null()) f["cell_wall_time_sec"] = rec.cell_seconds;
  try {
    OwnedString m;
    check_status(vesd_manifest_json(f.dump().c_str(), &m.s));
    write_file(rec.manifest_path, m.str());
  } catch (const CliError& e) {
    std::fprintf(stderr, "vesd: manifest not written: %s\n", e.message.c_str());
  }

  if (code != 0) std::fprintf(stderr, "vesd: %s\n", error.c_str());
  return code;
}

// --------------------------------------------------------------- estimation

struct EstimateOpts {
  std::string data;
  std::string vector_path;
  std::string config;
  std::string out;
  std::string format = "json";
  int64_t response_col = -1;
  bool has_header = false;
  bool bin = false;
};

void load_matrix(const EstimateOpts& opts, MatrixHandle& h) {
  if (opts.bin)
    check_status(vesd_matrix_read_bin(opts.data.c_str(), &h.m));
  else
    check_status(
        vesd_matrix_read_csv(opts.data.c_str(), opts.has_header ? 1 : 0, &h.m));
}

void run_estimate(const std::string& kind, const EstimateOpts& opts,
                  RunRecord& rec) {
  std::string cfg_text = opts.config.empty() ? "{}" : slurp(opts.config);
  rec.config_hash = hash_text(cfg_text);

  MatrixHandle x;
  load_matrix(opts, x);

  ReportHandle rep;
  if (kind == "tau") {
    OwnedBuffer a;
    check_status(vesd_vector_read_csv(opts.vector_path.c_str(), &a.data, &a.len));
    check_status(
        vesd_estimate_tau(x.m, a.data, a.len, cfg_text.c_str(), &rep.r));
  } else if (kind == "sharpe") {
    check_status(vesd_estimate_sharpe(x.m, cfg_text.c_str(), &rep.r));
  } else {
    int64_t p = vesd_matrix_cols(x.m);
    int64_t n = vesd_matrix_rows(x.m);
    if (p < 2) fail(VESD_EINVAL, "mcc needs a response plus at least one column");
    int64_t rc = opts.response_col < 0 ? p - 1 : opts.response_col;
    if (rc >= p) fail(VESD_EINVAL, "response column out of range");
    std::vector<double> y(static_cast<size_t>(n));
    std::vector<double> xs(static_cast<size_t>(n * (p - 1)));
    for (int64_t i = 0; i < n; ++i) {
      int64_t k = 0;
      for (int64_t j = 0; j < p; ++j) {
        double v;
        vesd_matrix_get(x.m, i, j, &v);
        if (j == rc)
          y[static_cast<size_t>(i)] = v;
        else
          xs[static_cast<size_t>(i * (p - 1) + k++)] = v;
      }
    }
    MatrixHandle pred;
    check_status(vesd_matrix_create(xs.data(), n, p - 1, &pred.m));
    check_status(vesd_estimate_mcc(pred.m, y.data(), n, cfg_text.c_str(), &rep.r));
  }

  OwnedString body;
  if (opts.format == "csv")
    check_status(vesd_report_cdf_csv(rep.r, &body.s));
  else
    check_status(vesd_report_json(rep.r, 1, &body.s));
  write_file(opts.out, body.str());
  rec.artifacts.push_back(opts.out);

  std::printf("%s = %.6g  (n = %lld, p = %lld)\n", kind.c_str(),
              vesd_report_estimate(rep.r),
              static_cast<long long>(vesd_report_n(rep.r)),
              static_cast<long long>(vesd_report_p(rep.r)));
  std::printf("  raw = %.6g, kappa = %.6g, plug-in = %.6g, lp residual = %.3g\n",
              vesd_report_raw_estimate(rep.r), vesd_report_kappa(rep.r),
              vesd_report_plugin(rep.r), vesd_report_lp_residual(rep.r));
  std::printf("  report: %s\n", opts.out.c_str());
}

// --------------------------------------------------------------- simulation

struct SimulateOpts {
  std::string config;
  std::string out_dir;
  std::optional<uint64_t> seed;
  std::optional<int64_t> reps;
  int jobs = 0;
};

int resolve_jobs(int flag_jobs) {
  if (flag_jobs > 0) return flag_jobs;
  if (const char* env = std::getenv("VESD_JOBS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // keep the config's job count
}

// --seed / --reps apply to the whole batch: they replace the defaults and
// drop any per-scenario values so the new defaults win everywhere.
void apply_overrides(json& cfg, const SimulateOpts& opts) {
  if (!cfg.is_object()) return;
  auto set_key = [&](const char* key, json value) {
    cfg["defaults"][key] = value;
    if (cfg.contains("scenarios") && cfg["scenarios"].is_array())
      for (auto& sc : cfg["scenarios"])
        if (sc.is_object()) sc.erase(key);
  };
  if (opts.seed) set_key("seed", *opts.seed);
  if (opts.reps) set_key("reps", *opts.reps);
}

void run_simulate(const SimulateOpts& opts, RunRecord& rec) {
  json cfg = json::parse(slurp(opts.config), nullptr, false);
  if (cfg.is_discarded()) fail(VESD_EINVAL, "batch config is not valid JSON");
  apply_overrides(cfg, opts);
  std::string merged = cfg.dump();
  rec.config_hash = hash_text(merged);
  if (opts.seed)
    rec.seed = *opts.seed;
  else if (cfg.is_object() && cfg.contains("defaults") &&
           cfg["defaults"].contains("seed"))
    rec.seed = cfg["defaults"]["seed"].get<uint64_t>();
  int jobs = resolve_jobs(opts.jobs);
  rec.jobs = jobs > 0 ? jobs
                      : (cfg.is_object() ? cfg.value("jobs", 1) : 1);

  std::error_code ec;
  std::filesystem::create_directories(
      std::filesystem::path(opts.out_dir) / "cells", ec);
  if (ec) fail(VESD_EINVAL, "cannot create " + opts.out_dir);

  OwnedString csv, logs, secs;
  check_status(vesd_simulate(merged.c_str(), jobs, &csv.s, &logs.s, &secs.s));

  auto out_path = [&](const std::string& rel) {
    return (std::filesystem::path(opts.out_dir) / rel).string();
  };
  write_file(out_path("results.csv"), csv.str());
  rec.artifacts.push_back("results.csv");

  json log_map = json::parse(logs.str());
  for (const auto& [id, cell] : log_map.items()) {
    std::string rel = "cells/" + id + ".json";
    write_file(out_path(rel), cell.dump(2) + "\n");
    rec.artifacts.push_back(rel);
    const auto& row = cell.at("row");
    std::printf("%s: bias = %.4g, variance = %.4g, failed %lld/%lld\n",
                id.c_str(), row.at("bias").get<double>(),
                row.at("variance").get<double>(),
                row.at("failed").get<long long>(),
                row.at("reps").get<long long>());
  }
  rec.cell_seconds = json::parse(secs.str());
  std::printf("wrote %zu cell logs and results.csv under %s\n",
              log_map.size(), opts.out_dir.c_str());
}

// --------------------------------------------------------------- diagnostics

struct DiagnoseOpts {
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
  std::optional<int64_t> reps;
};

void run_diagnose(const DiagnoseOpts& opts, RunRecord& rec) {
  json cfg = opts.config.empty()
                 ? json::object()
                 : json::parse(slurp(opts.config), nullptr, false);
  if (cfg.is_discarded()) fail(VESD_EINVAL, "sweep config is not valid JSON");
  if (opts.seed) cfg["seed"] = *opts.seed;
  if (opts.reps) cfg["reps"] = *opts.reps;
  std::string merged = cfg.dump();
  rec.config_hash = hash_text(merged);
  if (cfg.contains("seed")) rec.seed = cfg["seed"].get<uint64_t>();

  OwnedString csv;
  check_status(vesd_diagnose_pinv_sweep(merged.c_str(), &csv.s));
  write_file(opts.out, csv.str());
  rec.artifacts.push_back(opts.out);

  // Per-rho digest: the plug-in wanders while pseudo-R^2 stays pinned at 1.
  struct Acc {
    double truth = 0, pinv_sum = 0, r2_dev = 0;
    int count = 0;
  };
  std::map<double, Acc> by_rho;
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string tok;
    std::vector<double> v;
    while (std::getline(fields, tok, ',')) v.push_back(std::stod(tok));
    if (v.size() != 7) continue;
    Acc& a = by_rho[v[0]];
    a.truth = v[4];
    a.pinv_sum += v[5];
    a.r2_dev = std::max(a.r2_dev, std::abs(v[6] - 1.0));
    ++a.count;
  }
  for (const auto& [rho, a] : by_rho)
    std::printf(
        "rho %.2f: truth tau = %.4g, plug-in mean = %.4g, max |R2 - 1| = %.2g\n",
        rho, a.truth, a.pinv_sum / a.count, a.r2_dev);
  std::printf("  table: %s\n", opts.out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  // All parallelism belongs to the replication fan-out; a threaded BLAS
  // underneath it would oversubscribe the pool.
  setenv("OPENBLAS_NUM_THREADS", "1", 0);

  CLI::App app{
      "estimators for precision-matrix quadratic forms when the dimension "
      "exceeds the sample count"};
  app.require_subcommand(1);
  app.set_version_flag("--version", []() { return std::string(vesd_version()); });

  EstimateOpts est;
  auto add_estimate = [&](const std::string& name, const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("--data", est.data, "sample matrix, one observation per row")
        ->required();
    cmd->add_option("--config", est.config, "run options JSON");
    cmd->add_option("--out", est.out, "report output path")->required();
    cmd->add_option("--format", est.format,
                    "json = full report, csv = recovered CDF table")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_flag("--has-header", est.has_header, "skip the first CSV line");
    cmd->add_flag("--bin", est.bin, "read --data as the binary matrix format");
    return cmd;
  };
  CLI::App* tau = add_estimate("tau", "a' S^-1 a for a known vector a");
  tau->add_option("--vector", est.vector_path, "CSV holding the vector a")
      ->required();
  add_estimate("sharpe", "optimal Sharpe ratio with bias correction");
  CLI::App* mcc =
      add_estimate("mcc", "squared multiple correlation with bias correction");
  mcc->add_option("--response-col", est.response_col,
                  "0-based response column (default: last)");

  SimulateOpts sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "run a batch of bias/variance cells");
  simulate->add_option("--config", sim.config, "batch config JSON")->required();
  simulate->add_option("--out", sim.out_dir, "output directory")->required();
  uint64_t sim_seed = 0;
  int64_t sim_reps = 0;
  simulate->add_option("--seed", sim_seed, "replace every scenario seed");
  simulate->add_option("--reps", sim_reps, "replace every replication count")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--jobs", sim.jobs, "worker count (default: VESD_JOBS, then config)")
      ->check(CLI::PositiveNumber);

  DiagnoseOpts diag;
  CLI::App* diagnose = app.add_subcommand(
      "diagnose-pinv", "pseudoinverse plug-in sweep on AR(1) covariances");
  diagnose->add_option("--config", diag.config, "sweep config JSON");
  diagnose->add_option("--out", diag.out, "CSV output path")->required();
  uint64_t diag_seed = 0;
  int64_t diag_reps = 0;
  diagnose->add_option("--seed", diag_seed, "sweep seed");
  diagnose->add_option("--reps", diag_reps, "replications per rho")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : VESD_EINVAL;
  }
  if (simulate->count("--seed")) sim.seed = sim_seed;
  if (simulate->count("--reps")) sim.reps = sim_reps;
  if (diagnose->count("--seed")) diag.seed = diag_seed;
  if (diagnose->count("--reps")) diag.reps = diag_reps;

  RunRecord rec;
  rec.argv.assign(argv, argv + argc);
  CLI::App* sub = app.get_subcommands().front();
  rec.command = sub->get_name();

  if (rec.command == "simulate") {
    rec.manifest_path =
        (std::filesystem::path(sim.out_dir) / "manifest.json").string();
    return run_command(rec, [&](RunRecord& r) { run_simulate(sim, r); });
  }
  if (rec.command == "diagnose-pinv") {
    rec.manifest_path = diag.out + ".manifest.json";
    return run_command(rec, [&](RunRecord& r) { run_diagnose(diag, r); });
  }
  rec.manifest_path = est.out + ".manifest.json";
  return run_command(rec,
                     [&](RunRecord& r) { run_estimate(rec.command, est, r); });
}
