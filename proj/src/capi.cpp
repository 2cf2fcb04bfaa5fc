// C binding: exception barrier, opaque handles and string marshalling around
// the core library.  Every entry point catches internally and reports through
// the thread-local error slot; no exception crosses the ABI.
#include "vesd.h"

#include <json.hpp>

#include <cstdlib>
#include <cstring>

#include "core/serialize.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return VESD_OK;
  } catch (const vesd::VesdError& e) {
    g_last_error = e.what();
    return e.exit_code();
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return VESD_EFAIL;
  } catch (...) {
    g_last_error = "unknown failure";
    return VESD_EFAIL;
  }
}

vesd::RunConfig parse_run_config(const char* config_json) {
  if (!config_json || !*config_json) return {};
  return vesd::run_config_from_json_text(config_json);
}

void require_arg(bool ok, const char* what) {
  vesd::require(ok, vesd::ErrorClass::invalid_input, what);
}

}  // namespace

struct vesd_matrix {
  vesd::DataMatrix m;
};

struct vesd_report {
  vesd::EstimatorReport rep;
};

extern "C" {

const char* vesd_version(void) {
  static const std::string v = vesd::library_version();
  return v.c_str();
}

const char* vesd_last_error(void) { return g_last_error.c_str(); }

int vesd_matrix_create(const double* data, int64_t n, int64_t p,
                       vesd_matrix** out) {
  return guarded([&] {
    require_arg(data && out, "null argument");
    require_arg(n >= 1 && p >= 1, "matrix dimensions must be positive");
    auto* h = new vesd_matrix;
    h->m.x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                            Eigen::Dynamic, Eigen::RowMajor>>(
        data, n, p);
    *out = h;
  });
}

int vesd_matrix_read_csv(const char* path, int has_header, vesd_matrix** out) {
  return guarded([&] {
    require_arg(path && out, "null argument");
    auto* h = new vesd_matrix;
    try {
      h->m = vesd::read_csv_matrix(path, has_header != 0);
    } catch (...) {
      delete h;
      throw;
    }
    *out = h;
  });
}

int vesd_matrix_read_bin(const char* path, vesd_matrix** out) {
  return guarded([&] {
    require_arg(path && out, "null argument");
    auto* h = new vesd_matrix;
    try {
      h->m = vesd::read_bin_matrix(path);
    } catch (...) {
      delete h;
      throw;
    }
    *out = h;
  });
}

int vesd_matrix_write_bin(const vesd_matrix* m, const char* path) {
  return guarded([&] {
    require_arg(m && path, "null argument");
    vesd::write_bin_matrix(m->m, path);
  });
}

int64_t vesd_matrix_rows(const vesd_matrix* m) { return m ? m->m.n() : 0; }

int64_t vesd_matrix_cols(const vesd_matrix* m) { return m ? m->m.p() : 0; }

int vesd_matrix_get(const vesd_matrix* m, int64_t row, int64_t col,
                    double* out) {
  return guarded([&] {
    require_arg(m && out, "null argument");
    require_arg(row >= 0 && row < m->m.n() && col >= 0 && col < m->m.p(),
                "index out of range");
    *out = m->m.x(row, col);
  });
}

void vesd_matrix_free(vesd_matrix* m) { delete m; }

int vesd_vector_read_csv(const char* path, double** out, int64_t* len) {
  return guarded([&] {
    require_arg(path && out && len, "null argument");
    Eigen::VectorXd v = vesd::read_csv_vector(path);
    auto* buf = static_cast<double*>(
        std::malloc(static_cast<std::size_t>(v.size()) * sizeof(double)));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, v.data(), static_cast<std::size_t>(v.size()) * sizeof(double));
    *out = buf;
    *len = v.size();
  });
}

void vesd_buffer_free(double* buf) { std::free(buf); }

int vesd_estimate_tau(const vesd_matrix* x, const double* a, int64_t a_len,
                      const char* config_json, vesd_report** out) {
  return guarded([&] {
    require_arg(x && a && out, "null argument");
    require_arg(a_len == x->m.p(), "direction length must match columns");
    Eigen::Map<const Eigen::VectorXd> av(a, a_len);
    auto* r = new vesd_report;
    try {
      r->rep = vesd::estimate_tau(x->m.x, av, parse_run_config(config_json));
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

int vesd_estimate_sharpe(const vesd_matrix* x, const char* config_json,
                         vesd_report** out) {
  return guarded([&] {
    require_arg(x && out, "null argument");
    auto* r = new vesd_report;
    try {
      r->rep = vesd::estimate_sharpe(x->m.x, parse_run_config(config_json));
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

int vesd_estimate_mcc(const vesd_matrix* x, const double* y, int64_t y_len,
                      const char* config_json, vesd_report** out) {
  return guarded([&] {
    require_arg(x && y && out, "null argument");
    require_arg(y_len == x->m.n(), "response length must match rows");
    Eigen::Map<const Eigen::VectorXd> yv(y, y_len);
    auto* r = new vesd_report;
    try {
      r->rep = vesd::estimate_mcc(x->m.x, yv, parse_run_config(config_json));
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

double vesd_report_estimate(const vesd_report* r) {
  return r ? r->rep.estimate : 0.0;
}

double vesd_report_raw_estimate(const vesd_report* r) {
  return r ? r->rep.raw_estimate : 0.0;
}

double vesd_report_kappa(const vesd_report* r) { return r ? r->rep.kappa : 0.0; }

double vesd_report_plugin(const vesd_report* r) {
  return r ? r->rep.plugin : 0.0;
}

double vesd_report_lp_residual(const vesd_report* r) {
  return r ? r->rep.lp_residual : 0.0;
}

int64_t vesd_report_n(const vesd_report* r) { return r ? r->rep.n : 0; }

int64_t vesd_report_p(const vesd_report* r) { return r ? r->rep.p : 0; }

int vesd_report_json(const vesd_report* r, int include_vesd, char** out) {
  return guarded([&] {
    require_arg(r && out, "null argument");
    *out = dup_string(vesd::report_to_json(r->rep, include_vesd != 0));
  });
}

int vesd_report_cdf_csv(const vesd_report* r, char** out) {
  return guarded([&] {
    require_arg(r && out, "null argument");
    *out = dup_string(vesd::vesd_to_csv(r->rep.vesd));
  });
}

void vesd_report_free(vesd_report* r) { delete r; }

void vesd_string_free(char* s) { std::free(s); }

int vesd_pseudo_r2(const vesd_matrix* x, const double* y, int64_t y_len,
                   double* out) {
  return guarded([&] {
    require_arg(x && y && out, "null argument");
    require_arg(y_len == x->m.n(), "response length must match rows");
    Eigen::Map<const Eigen::VectorXd> yv(y, y_len);
    *out = vesd::pseudo_r2_degenerate(x->m.x, yv);
  });
}

int vesd_pinv_quadratic(const vesd_matrix* x, const double* a, int64_t a_len,
                        double* out) {
  return guarded([&] {
    require_arg(x && a && out, "null argument");
    require_arg(a_len == x->m.p(), "direction length must match columns");
    Eigen::Map<const Eigen::VectorXd> av(a, a_len);
    *out = vesd::pseudoinverse_quadratic_form(x->m.x, av);
  });
}

int vesd_diagnose_pinv_sweep(const char* config_json, char** csv_out) {
  return guarded([&] {
    require_arg(csv_out, "null argument");
    json cfg = json::object();
    if (config_json && *config_json) {
      cfg = json::parse(config_json, nullptr, false);
      require_arg(!cfg.is_discarded() && cfg.is_object(),
                  "malformed sweep config");
    }
    const auto p = cfg.value("p", std::int64_t{200});
    const auto n = cfg.value("n", std::int64_t{100});
    const auto reps = cfg.value("reps", std::int64_t{10});
    const auto seed = cfg.value("seed", std::uint64_t{0});
    std::vector<double> rhos = {0.3, 0.4, 0.5, 0.6, 0.7};
    if (cfg.contains("rho")) rhos = cfg.at("rho").get<std::vector<double>>();
    const std::string setting = cfg.value("vector_setting", "dense2");

    require_arg(p > n && n >= 2, "sweep requires p > n >= 2");
    require_arg(reps >= 1, "reps must be positive");
    Eigen::VectorXd a =
        vesd::make_vector(vesd::vector_setting_from_string(setting), p);

    std::string csv = "rho,rep,n,p,truth_tau,pinv_quadratic,pseudo_r2\n";
    std::uint64_t draw = 0;
    for (double rho : rhos) {
      require_arg(rho >= 0.0 && rho < 1.0, "rho must lie in [0, 1)");
      Eigen::MatrixXd sigma(p, p);
      for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
          sigma(i, j) = std::pow(rho, std::abs(static_cast<double>(i - j)));
      Eigen::MatrixXd sqrt_sigma = vesd::covariance_sqrt(sigma);
      const double truth = vesd::truth_quadratic_form(sigma, a);
      for (std::int64_t rep = 0; rep < reps; ++rep, ++draw) {
        const std::uint64_t rep_seed = vesd::mix_seed(seed, draw);
        vesd::DataMatrix x = vesd::generate_sample_with_sqrt(
            vesd::SampleModel::gaussian_iid, sqrt_sigma,
            Eigen::VectorXd::Zero(p), n, vesd::mix_seed(rep_seed, 0));
        vesd::DataMatrix ynoise = vesd::generate_sample(
            vesd::SampleModel::gaussian_iid, Eigen::MatrixXd::Identity(1, 1),
            Eigen::VectorXd::Zero(1), n, vesd::mix_seed(rep_seed, 1));
        const double pinv = vesd::pseudoinverse_quadratic_form(x.x, a);
        const double r2 = vesd::pseudo_r2_degenerate(x.x, ynoise.x.col(0));
        csv += vesd::fmt17(rho);
        csv += ',' + std::to_string(rep) + ',' + std::to_string(n) + ',' +
               std::to_string(p) + ',';
        csv += vesd::fmt17(truth);
        csv += ',';
        csv += vesd::fmt17(pinv);
        csv += ',';
        csv += vesd::fmt17(r2);
        csv += '\n';
      }
    }
    *csv_out = dup_string(csv);
  });
}

int vesd_simulate(const char* config_json, int jobs_override,
                  char** results_csv, char** cell_logs_json,
                  char** cell_seconds_json) {
  return guarded([&] {
    require_arg(config_json && results_csv && cell_logs_json &&
                    cell_seconds_json,
                "null argument");
    vesd::BatchConfig batch = vesd::batch_from_json_text(config_json);
    if (jobs_override > 0) batch.jobs = jobs_override;
    vesd::BatchResult result = vesd::run_batch(batch);

    std::vector<vesd::BiasVarianceRow> rows;
    rows.reserve(result.cells.size());
    json logs = json::object();
    json seconds = json::object();
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
      const auto& cell = result.cells[i];
      rows.push_back(cell.row);
      logs[cell.row.id] =
          json::parse(vesd::cell_log_to_json(batch.scenarios[i], cell));
      seconds[cell.row.id] = cell.row.wall_time_sec;
    }
    std::string csv = vesd::rows_to_csv(rows);
    std::string logs_text = logs.dump(2) + "\n";
    std::string seconds_text = seconds.dump(2) + "\n";
    *results_csv = dup_string(csv);
    *cell_logs_json = dup_string(logs_text);
    *cell_seconds_json = dup_string(seconds_text);
  });
}

int vesd_config_hash(const char* config_json, char** out) {
  return guarded([&] {
    require_arg(config_json && out, "null argument");
    *out = dup_string(vesd::config_hash(config_json));
  });
}

int vesd_manifest_json(const char* fields_json, char** out) {
  return guarded([&] {
    require_arg(fields_json && out, "null argument");
    json f = json::parse(fields_json, nullptr, false);
    require_arg(!f.is_discarded() && f.is_object(), "malformed manifest fields");
    vesd::ManifestInfo info;
    info.command = f.value("command", "");
    if (f.contains("argv"))
      info.argv = f.at("argv").get<std::vector<std::string>>();
    info.config_hash = f.value("config_hash", "");
    info.seed = f.value("seed", std::uint64_t{0});
    info.jobs = f.value("jobs", 1);
    info.ok = f.value("ok", true);
    info.exit_code = f.value("exit_code", 0);
    info.error_message = f.value("error", "");
    if (f.contains("artifacts"))
      info.artifacts = f.at("artifacts").get<std::vector<std::string>>();
    info.wall_time_sec = f.value("wall_time_sec", 0.0);
    if (f.contains("cell_wall_time_sec"))
      for (const auto& [id, sec] : f.at("cell_wall_time_sec").items())
        info.cell_timings.emplace_back(id, sec.get<double>());
    *out = dup_string(vesd::manifest_to_json(info));
  });
}

}  // extern "C"
