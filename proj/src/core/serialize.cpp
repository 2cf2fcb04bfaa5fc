#include "core/serialize.hpp"

#include <json.hpp>

#include <cstdio>

#include "core/data_matrix.hpp"

namespace vesd {

using nlohmann::json;

std::string library_version() { return "0.1.0"; }

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

const char* kind_name(MomentKind k) {
  switch (k) {
    case MomentKind::known_a: return "known-a";
    case MomentKind::sharpe: return "sharpe";
    default: return "mcc";
  }
}

json moments_to_json(const MomentVector& mv) {
  json j;
  j["kind"] = kind_name(mv.kind);
  j["raw"] = mv.raw;
  if (mv.truncated)
    j["truncated"] = *mv.truncated;
  else
    j["truncated"] = nullptr;
  json breakdown = json::array();
  for (std::size_t i = 0; i < mv.breakdown.size(); ++i) {
    breakdown.push_back({{"j", i + 1},
                         {"lambda_part", mv.breakdown[i].lambda_part},
                         {"eta_part", mv.breakdown[i].eta_part}});
  }
  j["breakdown"] = breakdown;
  return j;
}

json parse_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  require(!j.is_discarded(), ErrorClass::invalid_input, "malformed JSON config");
  return j;
}

}  // namespace

std::string report_to_json(const EstimatorReport& rep, bool include_vesd) {
  json j;
  j["target"] = rep.target;
  j["estimate"] = rep.estimate;
  j["raw_estimate"] = rep.raw_estimate;
  j["kappa"] = rep.kappa;
  j["plugin_inverse"] = rep.plugin;
  j["n"] = rep.n;
  j["p"] = rep.p;
  j["psi"] = rep.psi;
  j["cn"] = rep.cn;
  j["interval"] = {rep.a0, rep.b0};
  j["h"] = rep.h;
  j["heuristic_interval"] = rep.heuristic_interval;
  j["moments"] = moments_to_json(rep.moments);
  j["diagnostics"] = {{"neg_moment_count", rep.neg_moment_count},
                      {"lp_residual", rep.lp_residual},
                      {"lp_iterations", rep.vesd.iterations},
                      {"weighted_lp", rep.vesd.weighted}};
  if (include_vesd) {
    j["vesd"] = {{"a0", rep.vesd.grid.a0},
                 {"b0", rep.vesd.grid.b0},
                 {"h", rep.vesd.grid.h},
                 {"points", rep.vesd.grid.points},
                 {"mass", std::vector<double>(
                              rep.vesd.q.data(),
                              rep.vesd.q.data() + rep.vesd.q.size())}};
  }
  return j.dump(2) + "\n";
}

std::string vesd_to_csv(const VesdEstimate& est) {
  std::string out = "grid_point,mass,cdf\n";
  double cdf = 0;
  for (std::size_t i = 0; i < est.grid.points.size(); ++i) {
    cdf += est.q(static_cast<Eigen::Index>(i));
    out += fmt17(est.grid.points[i]);
    out += ',';
    out += fmt17(est.q(static_cast<Eigen::Index>(i)));
    out += ',';
    out += fmt17(cdf);
    out += '\n';
  }
  return out;
}

std::string rows_to_csv(const std::vector<BiasVarianceRow>& rows) {
  std::string out =
      "id,target,model,cov_case,vector_setting,n,p,cn,reps,completed,failed,"
      "truth,mean_estimate,bias,variance,variance_single_rep,"
      "neg_moment_count,mean_lp_residual\n";
  for (const auto& r : rows) {
    out += r.id + ',' + r.target + ',' + r.model + ',' + r.cov_case + ',' +
           r.vector_setting + ',';
    out += std::to_string(r.n) + ',' + std::to_string(r.p) + ',';
    out += fmt17(r.cn);
    out += ',';
    out += std::to_string(r.reps) + ',' + std::to_string(r.completed) + ',' +
           std::to_string(r.failed) + ',';
    out += fmt17(r.truth);
    out += ',';
    out += fmt17(r.mean_estimate);
    out += ',';
    out += fmt17(r.bias);
    out += ',';
    out += fmt17(r.variance);
    out += ',';
    out += r.variance_single_rep ? "1" : "0";
    out += ',';
    out += std::to_string(r.neg_moment_count) + ',';
    out += fmt17(r.mean_lp_residual);
    out += '\n';
  }
  return out;
}

namespace {

json scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["id"] = cfg.id;
  j["target"] = cfg.target;
  j["model"] = to_string(cfg.model);
  j["cov_case"] = to_string(cfg.cov_case);
  j["vector_setting"] = to_string(cfg.vector_setting);
  j["n"] = cfg.n;
  j["p"] = cfg.p();
  j["cn"] = cfg.cn;
  j["reps"] = cfg.reps;
  j["seed"] = cfg.seed;
  j["k"] = cfg.run.k;
  j["delta"] = cfg.run.delta;
  if (cfg.run.heuristic_interval)
    j["interval"] = "heuristic";
  else
    j["interval"] = {cfg.run.a0, cfg.run.b0};
  j["h"] = cfg.run.h > 0 ? json(cfg.run.h) : json("auto");
  j["stabilized"] = cfg.run.stabilized;
  return j;
}

json row_to_json(const BiasVarianceRow& r) {
  // wall time intentionally left out: log bytes must not depend on timing
  json j;
  j["id"] = r.id;
  j["n"] = r.n;
  j["p"] = r.p;
  j["reps"] = r.reps;
  j["completed"] = r.completed;
  j["failed"] = r.failed;
  j["truth"] = r.truth;
  j["mean_estimate"] = r.mean_estimate;
  j["bias"] = r.bias;
  j["variance"] = r.variance;
  j["variance_single_rep"] = r.variance_single_rep;
  j["neg_moment_count"] = r.neg_moment_count;
  j["mean_lp_residual"] = r.mean_lp_residual;
  return j;
}

}  // namespace

std::string cell_log_to_json(const ScenarioConfig& cfg, const CellResult& cell) {
  json j;
  j["scenario"] = scenario_to_json(cfg);
  j["row"] = row_to_json(cell.row);
  json reps = json::array();
  for (const auto& o : cell.outcomes) {
    json r;
    r["rep"] = o.rep;
    r["ok"] = o.ok;
    if (o.ok) {
      r["estimate"] = o.estimate;
      r["kappa"] = o.kappa;
      r["lp_residual"] = o.lp_residual;
      r["neg_moments"] = o.neg_moments;
    } else {
      r["error"] = o.error;
    }
    reps.push_back(std::move(r));
  }
  j["replications"] = std::move(reps);
  return j.dump(2) + "\n";
}

namespace {

void apply_run_keys(const json& j, RunConfig& run) {
  if (j.contains("k")) run.k = j.at("k").get<int>();
  if (j.contains("delta")) run.delta = j.at("delta").get<double>();
  if (j.contains("interval")) {
    const auto& iv = j.at("interval");
    if (iv.is_string()) {
      require(iv.get<std::string>() == "heuristic", ErrorClass::invalid_input,
              "interval must be [a0,b0] or \"heuristic\"");
      run.heuristic_interval = true;
    } else {
      require(iv.is_array() && iv.size() == 2, ErrorClass::invalid_input,
              "interval must be [a0,b0] or \"heuristic\"");
      run.heuristic_interval = false;
      run.a0 = iv.at(0).get<double>();
      run.b0 = iv.at(1).get<double>();
    }
  }
  if (j.contains("h")) {
    const auto& h = j.at("h");
    if (h.is_string()) {
      require(h.get<std::string>() == "auto", ErrorClass::invalid_input,
              "h must be a number or \"auto\"");
      run.h = 0;
    } else {
      run.h = h.get<double>();
      require(run.h > 0, ErrorClass::invalid_input, "h must be positive");
    }
  }
  if (j.contains("stabilized")) run.stabilized = j.at("stabilized").get<bool>();
  if (j.contains("lp_iter_cap")) run.lp_iter_cap = j.at("lp_iter_cap").get<int>();
}

}  // namespace

RunConfig run_config_from_json_text(const std::string& text) {
  json j = parse_text(text);
  require(j.is_object(), ErrorClass::invalid_input,
          "config must be a JSON object");
  RunConfig run;
  apply_run_keys(j, run);
  return run;
}

BatchConfig batch_from_json_text(const std::string& text) {
  json j = parse_text(text);
  require(j.is_object() && j.contains("scenarios") && j["scenarios"].is_array(),
          ErrorClass::invalid_input, "batch config needs a scenarios array");
  require(!j["scenarios"].empty(), ErrorClass::invalid_input,
          "batch config has no scenarios");

  BatchConfig batch;
  if (j.contains("jobs")) batch.jobs = j.at("jobs").get<int>();

  RunConfig run_defaults;
  std::int64_t reps_default = 300;
  std::uint64_t seed_default = 0;
  std::string model_default = "gaussian-iid";
  if (j.contains("defaults")) {
    const json& d = j["defaults"];
    apply_run_keys(d, run_defaults);
    if (d.contains("reps")) reps_default = d.at("reps").get<std::int64_t>();
    if (d.contains("seed")) seed_default = d.at("seed").get<std::uint64_t>();
    if (d.contains("model")) model_default = d.at("model").get<std::string>();
  }

  std::size_t index = 0;
  for (const json& s : j["scenarios"]) {
    require(s.is_object(), ErrorClass::invalid_input,
            "scenario entries must be objects");
    ScenarioConfig cfg;
    cfg.run = run_defaults;
    apply_run_keys(s, cfg.run);
    cfg.reps = s.contains("reps") ? s.at("reps").get<std::int64_t>() : reps_default;
    cfg.seed = s.contains("seed") ? s.at("seed").get<std::uint64_t>()
                                  : mix_seed(seed_default, index);
    cfg.target = s.contains("target") ? s.at("target").get<std::string>() : "tau";
    cfg.model = sample_model_from_string(
        s.contains("model") ? s.at("model").get<std::string>() : model_default);
    require(s.contains("cov_case") && s.contains("vector_setting") &&
                s.contains("n") && s.contains("cn"),
            ErrorClass::invalid_input,
            "scenario needs cov_case, vector_setting, n, cn");
    cfg.cov_case = cov_case_from_string(s.at("cov_case").get<std::string>());
    cfg.vector_setting =
        vector_setting_from_string(s.at("vector_setting").get<std::string>());
    cfg.n = s.at("n").get<std::int64_t>();
    cfg.cn = s.at("cn").get<double>();

    if (cfg.cov_case == CovCase::custom) {
      require(s.contains("sigma_csv"), ErrorClass::invalid_input,
              "custom covariance needs sigma_csv");
      cfg.custom_sigma =
          read_csv_matrix(s.at("sigma_csv").get<std::string>(), false).x;
    }
    if (cfg.vector_setting == VectorSetting::custom) {
      if (s.contains("vector")) {
        const auto vec = s.at("vector").get<std::vector<double>>();
        cfg.custom_vector = Eigen::Map<const Eigen::VectorXd>(
            vec.data(), static_cast<Eigen::Index>(vec.size()));
      } else if (s.contains("vector_csv")) {
        cfg.custom_vector = read_csv_vector(s.at("vector_csv").get<std::string>());
      } else {
        fail(ErrorClass::invalid_input,
             "custom vector setting needs vector or vector_csv");
      }
    }

    cfg.id = s.contains("id")
                 ? s.at("id").get<std::string>()
                 : cfg.target + "-" + to_string(cfg.cov_case) + "-" +
                       to_string(cfg.vector_setting) + "-" +
                       to_string(cfg.model) + "-cn" + fmt17(cfg.cn) + "-n" +
                       std::to_string(cfg.n);
    for (const auto& prev : batch.scenarios)
      require(prev.id != cfg.id, ErrorClass::invalid_input,
              "duplicate scenario id: " + cfg.id);
    batch.scenarios.push_back(std::move(cfg));
    ++index;
  }
  return batch;
}

std::string config_hash(const std::string& json_text) {
  json j = parse_text(json_text);
  const std::string canon = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string manifest_to_json(const ManifestInfo& info) {
  json j;
  j["command"] = info.command;
  j["argv"] = info.argv;
  j["config_hash"] = info.config_hash;
  j["seed"] = info.seed;
  j["jobs"] = info.jobs;
  j["status"] = info.ok ? "ok" : "error";
  j["exit_code"] = info.exit_code;
  if (!info.ok) j["error"] = info.error_message;
  j["artifacts"] = info.artifacts;
  j["versions"] = {{"vesd", library_version()}};
  j["wall_time_sec"] = info.wall_time_sec;
  if (!info.cell_timings.empty()) {
    json t = json::object();
    for (const auto& [id, sec] : info.cell_timings) t[id] = sec;
    j["cell_wall_time_sec"] = std::move(t);
  }
  return j.dump(2) + "\n";
}

}  // namespace vesd
