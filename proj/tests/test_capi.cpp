// Exercises the C binding through the shared library only: handles, status
// codes, string marshalling.  Oracles are hand-computed; no core headers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <vesd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("/tmp/vesd_capi_" + name) {
    std::ofstream out(path, std::ios::binary);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

// Deterministic filler: uniform-ish on [-1.73, 1.73], so sample covariances
// are near identity and sit inside the default support interval.
std::vector<double> pseudo_data(int64_t n, int64_t p, uint64_t seed) {
  std::vector<double> v(static_cast<size_t>(n * p));
  uint64_t s = seed;
  for (auto& x : v) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    x = 1.73 * (static_cast<double>(static_cast<int64_t>(s)) / 9.223372036854776e18);
  }
  return v;
}

struct MatrixHandle {
  vesd_matrix* m = nullptr;
  ~MatrixHandle() { vesd_matrix_free(m); }
};

struct ReportHandle {
  vesd_report* r = nullptr;
  ~ReportHandle() { vesd_report_free(r); }
};

struct StringOut {
  char* s = nullptr;
  ~StringOut() { vesd_string_free(s); }
  std::string str() const { return s ? s : ""; }
};

}  // namespace

TEST_CASE("version and error slot") {
  CHECK(std::string(vesd_version()) == "0.1.0");
  double out;
  CHECK(vesd_pinv_quadratic(nullptr, nullptr, 0, &out) == VESD_EINVAL);
  CHECK(std::string(vesd_last_error()).find("null") != std::string::npos);
}

TEST_CASE("matrix creation is row-major and accessors bound-check") {
  const double data[6] = {1, 2, 3, 4, 5, 6};
  MatrixHandle h;
  REQUIRE(vesd_matrix_create(data, 2, 3, &h.m) == VESD_OK);
  CHECK(vesd_matrix_rows(h.m) == 2);
  CHECK(vesd_matrix_cols(h.m) == 3);
  double v;
  REQUIRE(vesd_matrix_get(h.m, 0, 2, &v) == VESD_OK);
  CHECK(v == 3.0);
  REQUIRE(vesd_matrix_get(h.m, 1, 0, &v) == VESD_OK);
  CHECK(v == 4.0);
  CHECK(vesd_matrix_get(h.m, 2, 0, &v) == VESD_EINVAL);
  CHECK(vesd_matrix_create(data, 0, 3, &h.m) == VESD_EINVAL);
}

TEST_CASE("csv and binary round trips") {
  TempFile csv("round.csv", "a,b\n1.5,2.5\n-3.25,4\n");
  MatrixHandle h;
  REQUIRE(vesd_matrix_read_csv(csv.path.c_str(), 1, &h.m) == VESD_OK);
  CHECK(vesd_matrix_rows(h.m) == 2);
  double v;
  vesd_matrix_get(h.m, 1, 0, &v);
  CHECK(v == -3.25);

  const std::string bin_path = "/tmp/vesd_capi_round.bin";
  REQUIRE(vesd_matrix_write_bin(h.m, bin_path.c_str()) == VESD_OK);
  MatrixHandle back;
  REQUIRE(vesd_matrix_read_bin(bin_path.c_str(), &back.m) == VESD_OK);
  for (int64_t i = 0; i < 2; ++i)
    for (int64_t j = 0; j < 2; ++j) {
      double x, y;
      vesd_matrix_get(h.m, i, j, &x);
      vesd_matrix_get(back.m, i, j, &y);
      CHECK(x == y);
    }
  std::remove(bin_path.c_str());

  TempFile ragged("ragged.csv", "1,2\n3\n");
  MatrixHandle bad;
  CHECK(vesd_matrix_read_csv(ragged.path.c_str(), 0, &bad.m) == VESD_EINVAL);
  CHECK(vesd_matrix_read_csv("/tmp/definitely_absent_vesd.csv", 0, &bad.m) ==
        VESD_EINVAL);
}

TEST_CASE("vector csv reads rows or columns") {
  TempFile col("vec.csv", "0.25\n-1.5\n3\n");
  double* buf = nullptr;
  int64_t len = 0;
  REQUIRE(vesd_vector_read_csv(col.path.c_str(), &buf, &len) == VESD_OK);
  REQUIRE(len == 3);
  CHECK(buf[0] == 0.25);
  CHECK(buf[2] == 3.0);
  vesd_buffer_free(buf);
}

TEST_CASE("tau estimation through the binding") {
  auto data = pseudo_data(40, 10, 17);
  MatrixHandle h;
  REQUIRE(vesd_matrix_create(data.data(), 40, 10, &h.m) == VESD_OK);
  std::vector<double> a(10, 0.0);
  a[0] = 1.0;

  ReportHandle rep;
  REQUIRE(vesd_estimate_tau(h.m, a.data(), 10, nullptr, &rep.r) == VESD_OK);
  CHECK(vesd_report_n(rep.r) == 40);
  CHECK(vesd_report_p(rep.r) == 10);
  CHECK(vesd_report_kappa(rep.r) == 1.0);
  CHECK(vesd_report_estimate(rep.r) ==
        vesd_report_kappa(rep.r) * vesd_report_plugin(rep.r));
  CHECK(std::isfinite(vesd_report_lp_residual(rep.r)));

  StringOut js;
  REQUIRE(vesd_report_json(rep.r, 0, &js.s) == VESD_OK);
  auto j = nlohmann::json::parse(js.str());
  CHECK(j["target"] == "tau");
  CHECK(j["moments"]["kind"] == "known-a");
  CHECK(j["moments"]["raw"].size() == 4);
  CHECK_FALSE(j.contains("vesd"));

  StringOut with_vesd;
  REQUIRE(vesd_report_json(rep.r, 1, &with_vesd.s) == VESD_OK);
  auto jv = nlohmann::json::parse(with_vesd.str());
  CHECK(jv.contains("vesd"));

  StringOut cdf;
  REQUIRE(vesd_report_cdf_csv(rep.r, &cdf.s) == VESD_OK);
  CHECK(cdf.str().rfind("grid_point,mass,cdf\n", 0) == 0);

  // config is honored
  ReportHandle k2;
  REQUIRE(vesd_estimate_tau(h.m, a.data(), 10, R"({"k": 2})", &k2.r) == VESD_OK);
  StringOut js2;
  vesd_report_json(k2.r, 0, &js2.s);
  CHECK(nlohmann::json::parse(js2.str())["moments"]["raw"].size() == 2);

  // and validated
  ReportHandle bad;
  CHECK(vesd_estimate_tau(h.m, a.data(), 10, R"({"k": 99})", &bad.r) ==
        VESD_EINVAL);
  CHECK(vesd_estimate_tau(h.m, a.data(), 4, nullptr, &bad.r) == VESD_EINVAL);
  std::vector<double> zero(10, 0.0);
  CHECK(vesd_estimate_tau(h.m, zero.data(), 10, nullptr, &bad.r) == VESD_EINVAL);
  CHECK(vesd_estimate_tau(h.m, a.data(), 10, R"({"lp_iter_cap": 1})", &bad.r) ==
        VESD_ESTALL);
}

TEST_CASE("sharpe and mcc status codes") {
  // two orthogonal rows: exactly zero mean signal
  const double ortho[8] = {1, 0, 0, 0, 0, 1, 0, 0};
  MatrixHandle h;
  REQUIRE(vesd_matrix_create(ortho, 2, 4, &h.m) == VESD_OK);
  ReportHandle rep;
  CHECK(vesd_estimate_sharpe(h.m, nullptr, &rep.r) == VESD_EZERO);
  CHECK(std::string(vesd_last_error()).find("signal") != std::string::npos);

  auto data = pseudo_data(60, 12, 23);
  MatrixHandle big;
  REQUIRE(vesd_matrix_create(data.data(), 60, 12, &big.m) == VESD_OK);
  // response strongly tied to the first coordinate
  std::vector<double> y(60);
  for (int i = 0; i < 60; ++i) {
    double x0;
    vesd_matrix_get(big.m, i, 0, &x0);
    y[static_cast<size_t>(i)] = 2.0 * x0;
  }
  ReportHandle mcc;
  REQUIRE(vesd_estimate_mcc(big.m, y.data(), 60, nullptr, &mcc.r) == VESD_OK);
  CHECK(vesd_report_estimate(mcc.r) >= 0.0);
  CHECK(vesd_report_estimate(mcc.r) <= 1.0);
  StringOut js;
  vesd_report_json(mcc.r, 0, &js.s);
  auto j = nlohmann::json::parse(js.str());
  CHECK(j["target"] == "mcc");
  CHECK(j.contains("raw_estimate"));

  ReportHandle bad;
  CHECK(vesd_estimate_mcc(big.m, y.data(), 10, nullptr, &bad.r) == VESD_EINVAL);
}

TEST_CASE("degenerate plug-in diagnostics by hand") {
  // 3 observations of 1 variable: S = sample variance = 1, tau = 1
  const double col[3] = {0.0, 1.0, 2.0};
  MatrixHandle thin;
  REQUIRE(vesd_matrix_create(col, 3, 1, &thin.m) == VESD_OK);
  const double one = 1.0;
  double out;
  REQUIRE(vesd_pinv_quadratic(thin.m, &one, 1, &out) == VESD_OK);
  CHECK(out == doctest::Approx(1.0).epsilon(1e-12));

  // centered rows +-(1,2,2): S = 2 r r', a = e1 -> 1 / (2 * 81)
  const double pm[6] = {1, 2, 2, -1, -2, -2};
  MatrixHandle rank1;
  REQUIRE(vesd_matrix_create(pm, 2, 3, &rank1.m) == VESD_OK);
  const double e1[3] = {1, 0, 0};
  REQUIRE(vesd_pinv_quadratic(rank1.m, e1, 3, &out) == VESD_OK);
  CHECK(out == doctest::Approx(1.0 / 162.0).epsilon(1e-12));

  // p > n: identically perfect fit
  auto data = pseudo_data(10, 25, 31);
  MatrixHandle wide;
  REQUIRE(vesd_matrix_create(data.data(), 10, 25, &wide.m) == VESD_OK);
  auto yv = pseudo_data(10, 1, 32);
  REQUIRE(vesd_pseudo_r2(wide.m, yv.data(), 10, &out) == VESD_OK);
  CHECK(std::abs(out - 1.0) < 1e-10);
  CHECK(vesd_pseudo_r2(thin.m, col, 3, &out) == VESD_EINVAL);
}

TEST_CASE("pseudoinverse sweep emits the documented table") {
  StringOut csv;
  REQUIRE(vesd_diagnose_pinv_sweep(
              R"({"p": 30, "n": 10, "rho": [0.3, 0.5], "reps": 2, "seed": 4})",
              &csv.s) == VESD_OK);
  const std::string text = csv.str();
  CHECK(text.rfind("rho,rep,n,p,truth_tau,pinv_quadratic,pseudo_r2\n", 0) == 0);
  // header + 2 rhos x 2 reps
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  // every pseudo_r2 field is 1 to printed precision
  size_t pos = text.find('\n') + 1;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    const std::string line = text.substr(pos, end - pos);
    const std::string r2 = line.substr(line.rfind(',') + 1);
    CHECK(std::abs(std::stod(r2) - 1.0) < 1e-10);
    pos = end + 1;
  }
  // deterministic
  StringOut again;
  REQUIRE(vesd_diagnose_pinv_sweep(
              R"({"p": 30, "n": 10, "rho": [0.3, 0.5], "reps": 2, "seed": 4})",
              &again.s) == VESD_OK);
  CHECK(text == again.str());

  StringOut bad;
  CHECK(vesd_diagnose_pinv_sweep(R"({"p": 10, "n": 10})", &bad.s) == VESD_EINVAL);
  CHECK(vesd_diagnose_pinv_sweep(R"({"rho": [1.5]})", &bad.s) == VESD_EINVAL);
}

TEST_CASE("simulation through the binding is deterministic") {
  const char* cfg = R"({
    "jobs": 1,
    "defaults": {"reps": 3, "seed": 5},
    "scenarios": [
      {"id": "cell-a", "target": "tau", "cov_case": "case2",
       "vector_setting": "dense2", "n": 20, "cn": 0.5},
      {"id": "cell-b", "target": "tau", "cov_case": "case1",
       "vector_setting": "sparse2", "n": 16, "cn": 1.25}
    ]
  })";
  StringOut csv1, logs1, secs1;
  REQUIRE(vesd_simulate(cfg, 0, &csv1.s, &logs1.s, &secs1.s) == VESD_OK);
  StringOut csv2, logs2, secs2;
  REQUIRE(vesd_simulate(cfg, 3, &csv2.s, &logs2.s, &secs2.s) == VESD_OK);
  CHECK(csv1.str() == csv2.str());
  CHECK(logs1.str() == logs2.str());

  auto logs = nlohmann::json::parse(logs1.str());
  REQUIRE(logs.contains("cell-a"));
  REQUIRE(logs.contains("cell-b"));
  CHECK(logs["cell-a"]["replications"].size() == 3);
  CHECK(logs["cell-a"]["row"]["completed"] == 3);
  auto secs = nlohmann::json::parse(secs1.str());
  CHECK(secs["cell-a"].is_number());
  // timings never appear in result bytes
  CHECK(csv1.str().find("wall") == std::string::npos);
  CHECK(logs1.str().find("wall") == std::string::npos);

  StringOut e1, e2, e3;
  CHECK(vesd_simulate(R"({"scenarios": []})", 0, &e1.s, &e2.s, &e3.s) ==
        VESD_EINVAL);
}

TEST_CASE("config hash and manifest rendering") {
  StringOut a, b, c;
  REQUIRE(vesd_config_hash(R"({"k": 4})", &a.s) == VESD_OK);
  REQUIRE(vesd_config_hash("{ \"k\" : 4 }", &b.s) == VESD_OK);
  REQUIRE(vesd_config_hash(R"({"k": 5})", &c.s) == VESD_OK);
  CHECK(a.str() == b.str());
  CHECK(a.str() != c.str());
  CHECK(a.str().size() == 16);
  StringOut bad;
  CHECK(vesd_config_hash("nope{", &bad.s) == VESD_EINVAL);

  StringOut manifest;
  REQUIRE(vesd_manifest_json(
              R"({"command": "tau", "argv": ["vesd", "tau"], "seed": 9,
                  "ok": true, "exit_code": 0, "artifacts": ["report.json"],
                  "wall_time_sec": 0.5})",
              &manifest.s) == VESD_OK);
  auto j = nlohmann::json::parse(manifest.str());
  CHECK(j["status"] == "ok");
  CHECK(j["versions"]["vesd"] == "0.1.0");
  CHECK(j["artifacts"][0] == "report.json");
}
