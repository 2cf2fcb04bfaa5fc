#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/serialize.hpp"
#include "test_util.hpp"

using namespace vesd;

TEST_CASE("covariance families match their definitions") {
  Eigen::MatrixXd c1 = make_covariance(CovCase::case1, 4);
  CHECK(c1.isDiagonal(0.0));
  CHECK(c1(0, 0) == doctest::Approx(3.0));
  CHECK(c1(1, 1) == doctest::Approx(3.5));
  CHECK(c1(2, 2) == doctest::Approx(4.0));
  CHECK(c1(3, 3) == doctest::Approx(4.5));

  Eigen::MatrixXd c2 = make_covariance(CovCase::case2, 3);
  Eigen::MatrixXd want(3, 3);
  want << 2.5, 0.8, 0.0, 0.8, 2.5, 0.8, 0.0, 0.8, 2.5;
  CHECK((c2 - want).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd c3 = make_covariance(CovCase::case3, 4);
  CHECK(c3(0, 0) == 3.0);
  CHECK(c3(1, 1) == 3.0);
  CHECK(c3(2, 2) == 1.5);
  CHECK(c3(3, 3) == 1.5);
  CHECK_THROWS_AS(make_covariance(CovCase::case3, 5), VesdError);

  Eigen::MatrixXd c4 = make_covariance(CovCase::case4, 2);
  CHECK(c4(0, 0) == doctest::Approx(2.0));
  CHECK(c4(0, 1) == doctest::Approx(0.6));
  CHECK(c4(1, 0) == doctest::Approx(0.6));

  CHECK_THROWS_AS(make_covariance(CovCase::custom, 4), VesdError);

  // every family is positive definite at working sizes
  for (auto c : {CovCase::case1, CovCase::case2, CovCase::case3, CovCase::case4}) {
    Eigen::MatrixXd s = make_covariance(c, 8);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    CHECK(es.eigenvalues().minCoeff() > 0.1);
  }
}

TEST_CASE("direction settings are unit vectors with the stated patterns") {
  Eigen::VectorXd d1 = make_vector(VectorSetting::dense1, 4);
  CHECK(d1(0) == doctest::Approx(std::sqrt(0.2)));
  CHECK(d1(3) == doctest::Approx(std::sqrt(0.3)));

  Eigen::VectorXd s1 = make_vector(VectorSetting::sparse1, 10);
  CHECK(s1(0) == doctest::Approx(1.0 / std::sqrt(8.0)));
  CHECK(s1(7) == doctest::Approx(1.0 / std::sqrt(8.0)));
  CHECK(s1(8) == 0.0);
  CHECK(s1(9) == 0.0);

  Eigen::VectorXd d2 = make_vector(VectorSetting::dense2, 5);
  for (int i = 0; i < 5; ++i) CHECK(d2(i) == doctest::Approx(1.0 / std::sqrt(5.0)));

  Eigen::VectorXd s2 = make_vector(VectorSetting::sparse2, 3);
  CHECK(s2(0) == 0.6);
  CHECK(s2(1) == 0.8);
  CHECK(s2(2) == 0.0);

  for (auto v : {VectorSetting::dense1, VectorSetting::sparse1,
                 VectorSetting::dense2, VectorSetting::sparse2})
    CHECK(make_vector(v, 12).norm() == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(make_vector(VectorSetting::dense1, 5), VesdError);
  CHECK_THROWS_AS(make_vector(VectorSetting::sparse1, 7), VesdError);
  CHECK_THROWS_AS(make_vector(VectorSetting::sparse2, 1), VesdError);
  CHECK_THROWS_AS(make_vector(VectorSetting::custom, 4), VesdError);
}

TEST_CASE("name round trips for the scenario enums") {
  CHECK(cov_case_from_string("case3") == CovCase::case3);
  CHECK(to_string(CovCase::case3) == "case3");
  CHECK(vector_setting_from_string("sparse2") == VectorSetting::sparse2);
  CHECK(sample_model_from_string("elliptical-gamma") ==
        SampleModel::elliptical_gamma);
  CHECK(to_string(SampleModel::gaussian_iid) == "gaussian-iid");
  CHECK_THROWS_AS(cov_case_from_string("case9"), VesdError);
  CHECK_THROWS_AS(sample_model_from_string("gaussian"), VesdError);
}

TEST_CASE("covariance square root reproduces the covariance") {
  Eigen::MatrixXd s = make_covariance(CovCase::case2, 6);
  Eigen::MatrixXd r = covariance_sqrt(s);
  CHECK((r - r.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r * r - s).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(covariance_sqrt(indefinite), VesdError);
}

TEST_CASE("sampling is reproducible and seed-sensitive") {
  Eigen::MatrixXd sigma = make_covariance(CovCase::case4, 6);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(6);
  for (auto model : {SampleModel::gaussian_iid, SampleModel::elliptical_gamma}) {
    DataMatrix a = generate_sample(model, sigma, mu, 15, 42);
    DataMatrix b = generate_sample(model, sigma, mu, 15, 42);
    DataMatrix c = generate_sample(model, sigma, mu, 15, 43);
    REQUIRE(a.n() == 15);
    REQUIRE(a.p() == 6);
    CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.x - c.x).cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("sampling honors the mean and the second-moment scale") {
  const int n = 4000, p = 10;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(p, p);
  Eigen::VectorXd mu = Eigen::VectorXd::LinSpaced(p, -1.0, 1.0);
  for (auto model : {SampleModel::gaussian_iid, SampleModel::elliptical_gamma}) {
    DataMatrix d = generate_sample(model, sigma, mu, n, 7);
    Eigen::VectorXd colmean = d.x.colwise().mean();
    CHECK((colmean - mu).cwiseAbs().maxCoeff() < 0.1);
    // E || x - mu ||^2 = trace(sigma) = p under both models
    const double avg =
        (d.x.rowwise() - mu.transpose()).rowwise().squaredNorm().mean();
    CHECK(avg == doctest::Approx(static_cast<double>(p)).epsilon(0.06));
  }
  CHECK_THROWS_AS(
      generate_sample(SampleModel::gaussian_iid, sigma, mu, 0, 7), VesdError);
}

TEST_CASE("quadratic-form truth on a worked example") {
  Eigen::MatrixXd s = make_covariance(CovCase::case4, 2);
  Eigen::VectorXd a(2);
  a << 0.6, 0.8;
  // inverse of [[2, .6], [.6, 2]] applied by hand: det = 3.64
  CHECK(truth_quadratic_form(s, a) == doctest::Approx(1.424 / 3.64).epsilon(1e-13));
  CHECK(truth_quadratic_form(Eigen::MatrixXd::Identity(2, 2), a) ==
        doctest::Approx(1.0));

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(truth_quadratic_form(indefinite, a), VesdError);
}

TEST_CASE("joint covariance embeds the regression target") {
  Eigen::MatrixXd sxx = make_covariance(CovCase::case4, 3);
  Eigen::VectorXd sxy(3);
  sxy << 0.4, 0.1, -0.2;
  Eigen::MatrixXd joint = joint_covariance(sxx, sxy);
  REQUIRE(joint.rows() == 4);
  CHECK(joint(0, 0) == 1.0);
  CHECK(joint(0, 2) == sxy(1));
  CHECK(joint(3, 0) == sxy(2));
  CHECK((joint.bottomRightCorner(3, 3) - sxx).cwiseAbs().maxCoeff() == 0.0);

  // cross-covariance too strong for a unit response variance: not a covariance
  Eigen::VectorXd toobig(3);
  toobig << 1.5, 0.0, 0.0;
  CHECK_THROWS_AS(joint_covariance(Eigen::MatrixXd::Identity(3, 3), toobig),
                  VesdError);
}

namespace {

ScenarioConfig tiny_tau_cell() {
  ScenarioConfig cfg;
  cfg.id = "desk";
  cfg.target = "tau";
  cfg.cov_case = CovCase::case2;
  cfg.vector_setting = VectorSetting::dense2;
  cfg.n = 24;
  cfg.cn = 0.5;
  cfg.reps = 6;
  cfg.seed = 2024;
  return cfg;
}

}  // namespace

TEST_CASE("cell resolution produces the documented inputs per target") {
  ScenarioConfig cfg = tiny_tau_cell();
  ResolvedCell cell = resolve_cell(cfg);
  Eigen::MatrixXd sigma = make_covariance(CovCase::case2, 12);
  CHECK((cell.sigma - sigma).cwiseAbs().maxCoeff() == 0.0);
  CHECK(cell.mu.isZero(0.0));
  CHECK(cell.truth ==
        doctest::Approx(truth_quadratic_form(sigma, cell.direction))
            .epsilon(1e-14));

  cfg.target = "sharpe";
  ResolvedCell sr = resolve_cell(cfg);
  CHECK((sr.mu - sr.direction).cwiseAbs().maxCoeff() == 0.0);

  cfg.target = "mcc";
  ResolvedCell mc = resolve_cell(cfg);
  REQUIRE(mc.sigma.rows() == 13);  // joint with the response in front
  const double rho2 = truth_quadratic_form(sigma, mc.direction);
  CHECK(mc.truth == doctest::Approx(rho2).epsilon(1e-14));
  CHECK(mc.truth < 1.0);

  cfg.target = "levy";
  CHECK_THROWS_AS(resolve_cell(cfg), VesdError);
}

TEST_CASE("custom covariance and direction pass through the cell") {
  ScenarioConfig cfg = tiny_tau_cell();
  cfg.cov_case = CovCase::custom;
  cfg.vector_setting = VectorSetting::custom;
  cfg.custom_sigma = 2.0 * Eigen::MatrixXd::Identity(12, 12);
  cfg.custom_vector = Eigen::VectorXd::Unit(12, 0) * 3.0;
  ResolvedCell cell = resolve_cell(cfg);
  CHECK(cell.truth == doctest::Approx(9.0 / 2.0));
  // dimension mismatches are rejected
  cfg.custom_vector = Eigen::VectorXd::Unit(5, 0);
  CHECK_THROWS_AS(resolve_cell(cfg), VesdError);
}

TEST_CASE("one replication is pure in the replication index") {
  ScenarioConfig cfg = tiny_tau_cell();
  ResolvedCell cell = resolve_cell(cfg);
  RepOutcome a = run_one_replication(cfg, cell, 3);
  RepOutcome b = run_one_replication(cfg, cell, 3);
  RepOutcome c = run_one_replication(cfg, cell, 4);
  CHECK(a.ok);
  CHECK(a.estimate == b.estimate);
  CHECK(a.estimate != c.estimate);
  CHECK(std::isfinite(a.estimate));
  CHECK(a.error.empty());
}

TEST_CASE("replication failures are captured, not thrown") {
  ScenarioConfig cfg = tiny_tau_cell();
  cfg.run.lp_iter_cap = 1;  // every replication stalls
  ResolvedCell cell = resolve_cell(cfg);
  RepOutcome out = run_one_replication(cfg, cell, 0);
  CHECK_FALSE(out.ok);
  CHECK(out.error.find("iteration cap") != std::string::npos);
}

TEST_CASE("cell runs are byte-stable across repeats and worker counts") {
  ScenarioConfig cfg = tiny_tau_cell();
  CellResult once = run_replications(cfg, 1);
  CellResult again = run_replications(cfg, 1);
  CellResult wide = run_replications(cfg, 3);
  CHECK(once.row.mean_estimate == again.row.mean_estimate);
  CHECK(once.row.variance == again.row.variance);
  CHECK(once.row.mean_estimate == wide.row.mean_estimate);
  CHECK(once.row.variance == wide.row.variance);
  CHECK(once.row.completed == 6);
  CHECK(once.row.failed == 0);
  REQUIRE(once.outcomes.size() == wide.outcomes.size());
  for (std::size_t i = 0; i < once.outcomes.size(); ++i)
    CHECK(once.outcomes[i].estimate == wide.outcomes[i].estimate);
  // the log serialization is bitwise identical as well
  CHECK(cell_log_to_json(cfg, once) == cell_log_to_json(cfg, wide));
  // bias = mean - truth by definition
  ResolvedCell cell = resolve_cell(cfg);
  CHECK(once.row.bias ==
        doctest::Approx(once.row.mean_estimate - cell.truth).epsilon(1e-15));
}

TEST_CASE("a single completed replication flags its variance") {
  ScenarioConfig cfg = tiny_tau_cell();
  cfg.reps = 1;
  CellResult r = run_replications(cfg, 1);
  CHECK(r.row.variance == 0.0);
  CHECK(r.row.variance_single_rep);
}

TEST_CASE("aggregation excludes failures and enforces the failure budget") {
  ScenarioConfig cfg = tiny_tau_cell();
  cfg.reps = 20;
  std::vector<RepOutcome> outs(20);
  for (int i = 0; i < 20; ++i) {
    outs[static_cast<std::size_t>(i)].rep = i;
    outs[static_cast<std::size_t>(i)].ok = true;
    outs[static_cast<std::size_t>(i)].estimate = 1.0 + 0.01 * i;
  }
  outs[4].ok = false;
  outs[4].error = "synthetic";

  BiasVarianceRow row = aggregate_outcomes(cfg, 1.0, outs);
  CHECK(row.completed == 19);
  CHECK(row.failed == 1);
  double mean = 0;
  for (int i = 0; i < 20; ++i)
    if (i != 4) mean += 1.0 + 0.01 * i;
  mean /= 19.0;
  CHECK(row.mean_estimate == doctest::Approx(mean).epsilon(1e-15));
  double var = 0;
  for (int i = 0; i < 20; ++i)
    if (i != 4) var += std::pow(1.0 + 0.01 * i - mean, 2);
  var /= 18.0;
  CHECK(row.variance == doctest::Approx(var).epsilon(1e-12));

  // three failures out of twenty crosses the 10% budget
  outs[7].ok = false;
  outs[11].ok = false;
  try {
    aggregate_outcomes(cfg, 1.0, outs);
    FAIL("expected an abort");
  } catch (const VesdError& e) {
    CHECK(e.exit_code() == 3);
    CHECK(std::string(e.what()).find("synthetic") != std::string::npos);
  }
}

TEST_CASE("a stalled cell aborts with the first failure message") {
  ScenarioConfig cfg = tiny_tau_cell();
  cfg.run.lp_iter_cap = 1;
  CHECK_THROWS_AS(run_replications(cfg, 2), VesdError);
}

TEST_CASE("batch configs parse with defaults, ids and seed derivation") {
  const std::string text = R"({
    "jobs": 2,
    "defaults": {"reps": 5, "seed": 99, "k": 3, "interval": [0.25, 6.0]},
    "scenarios": [
      {"target": "tau", "cov_case": "case2", "vector_setting": "dense1",
       "n": 40, "cn": 1.25},
      {"id": "named", "target": "sharpe", "cov_case": "case3",
       "vector_setting": "dense2", "n": 32, "cn": 0.75,
       "model": "elliptical-gamma", "reps": 7, "seed": 123,
       "stabilized": true, "h": 0.02}
    ]
  })";
  BatchConfig batch = batch_from_json_text(text);
  CHECK(batch.jobs == 2);
  REQUIRE(batch.scenarios.size() == 2);

  const ScenarioConfig& s0 = batch.scenarios[0];
  CHECK(s0.id == "tau-case2-dense1-gaussian-iid-cn1.25-n40");
  CHECK(s0.reps == 5);
  CHECK(s0.seed == mix_seed(99, 0));
  CHECK(s0.run.k == 3);
  CHECK(s0.run.a0 == 0.25);
  CHECK(s0.run.b0 == 6.0);
  CHECK(s0.p() == 50);

  const ScenarioConfig& s1 = batch.scenarios[1];
  CHECK(s1.id == "named");
  CHECK(s1.model == SampleModel::elliptical_gamma);
  CHECK(s1.seed == 123);
  CHECK(s1.reps == 7);
  CHECK(s1.run.h == 0.02);
  CHECK(s1.run.k == 3);  // inherited
  CHECK(s1.p() == 24);
}

TEST_CASE("batch configs reject duplicates and missing keys") {
  const std::string dup = R"({"scenarios": [
    {"id": "x", "cov_case": "case1", "vector_setting": "dense2", "n": 10, "cn": 2.0},
    {"id": "x", "cov_case": "case1", "vector_setting": "dense2", "n": 12, "cn": 2.0}
  ]})";
  CHECK_THROWS_AS(batch_from_json_text(dup), VesdError);
  const std::string missing = R"({"scenarios": [{"cov_case": "case1", "n": 10}]})";
  CHECK_THROWS_AS(batch_from_json_text(missing), VesdError);
  CHECK_THROWS_AS(batch_from_json_text(R"({"scenarios": []})"), VesdError);
  CHECK_THROWS_AS(batch_from_json_text("not json at all"), VesdError);
  const std::string needs_vec = R"({"scenarios": [
    {"cov_case": "case1", "vector_setting": "custom", "n": 10, "cn": 2.0}
  ]})";
  CHECK_THROWS_AS(batch_from_json_text(needs_vec), VesdError);
}

TEST_CASE("custom vectors parse inline") {
  const std::string text = R"({"scenarios": [
    {"cov_case": "case1", "vector_setting": "custom", "n": 10, "cn": 0.4,
     "vector": [0.6, 0.8, 0.0, 0.0]}
  ]})";
  BatchConfig batch = batch_from_json_text(text);
  REQUIRE(batch.scenarios[0].custom_vector.has_value());
  CHECK((*batch.scenarios[0].custom_vector)(1) == 0.8);
}

TEST_CASE("run configs parse every documented key") {
  RunConfig run = run_config_from_json_text(
      R"({"k": 5, "delta": 0.02, "interval": "heuristic", "h": "auto",
          "stabilized": false, "lp_iter_cap": 50})");
  CHECK(run.k == 5);
  CHECK(run.delta == 0.02);
  CHECK(run.heuristic_interval);
  CHECK(run.h == 0);
  CHECK_FALSE(run.stabilized);
  CHECK(run.lp_iter_cap == 50);
  CHECK_THROWS_AS(run_config_from_json_text(R"({"interval": "magic"})"), VesdError);
  CHECK_THROWS_AS(run_config_from_json_text(R"({"h": "fast"})"), VesdError);
  CHECK_THROWS_AS(run_config_from_json_text(R"([1,2])"), VesdError);
}

TEST_CASE("bias/variance rows serialize to the documented CSV shape") {
  BiasVarianceRow r;
  r.id = "desk";
  r.target = "tau";
  r.model = "gaussian-iid";
  r.cov_case = "case2";
  r.vector_setting = "dense2";
  r.n = 24;
  r.p = 12;
  r.cn = 0.5;
  r.reps = 6;
  r.completed = 6;
  r.failed = 0;
  r.truth = 0.5;
  r.mean_estimate = 0.525;
  r.bias = 0.025;
  r.variance = 0.0025;
  r.neg_moment_count = 1;
  r.mean_lp_residual = 1e-9;
  r.wall_time_sec = 123.0;  // must not appear anywhere in the bytes
  const std::string csv = rows_to_csv({r});
  CHECK(csv ==
        "id,target,model,cov_case,vector_setting,n,p,cn,reps,completed,failed,"
        "truth,mean_estimate,bias,variance,variance_single_rep,"
        "neg_moment_count,mean_lp_residual\n"
        "desk,tau,gaussian-iid,case2,dense2,24,12,0.5,6,6,0,0.5,0.52500000000000002,"
        "0.025000000000000001,0.0025000000000000001,0,1,1.0000000000000001e-09\n");
  CHECK(csv.find("123") == std::string::npos);
}

TEST_CASE("config hashes are canonical and discriminating") {
  const std::string a = R"({"k": 4, "delta": 0.01})";
  const std::string b = "{ \"delta\" : 0.01,   \"k\" : 4 }";
  const std::string c = R"({"k": 5, "delta": 0.01})";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("manifests carry status and never leak timings into results") {
  ManifestInfo info;
  info.command = "simulate";
  info.argv = {"vesd", "simulate", "--config", "x.json"};
  info.config_hash = "abc";
  info.seed = 7;
  info.jobs = 2;
  info.ok = false;
  info.exit_code = 4;
  info.error_message = "solver stall";
  info.artifacts = {"results.csv"};
  info.wall_time_sec = 1.5;
  info.cell_timings = {{"desk", 1.5}};
  const std::string text = manifest_to_json(info);
  CHECK(text.find("\"status\": \"error\"") != std::string::npos);
  CHECK(text.find("\"exit_code\": 4") != std::string::npos);
  CHECK(text.find("solver stall") != std::string::npos);
  CHECK(text.find("wall_time_sec") != std::string::npos);
  CHECK(text.find("\"desk\"") != std::string::npos);
}

TEST_CASE("a small batch runs end to end in scenario order") {
  const std::string text = R"({
    "jobs": 2,
    "defaults": {"reps": 3, "seed": 11},
    "scenarios": [
      {"id": "a", "target": "tau", "cov_case": "case1",
       "vector_setting": "sparse2", "n": 20, "cn": 0.6},
      {"id": "b", "target": "tau", "cov_case": "case4",
       "vector_setting": "dense2", "n": 16, "cn": 1.5}
    ]
  })";
  BatchConfig batch = batch_from_json_text(text);
  BatchResult result = run_batch(batch);
  REQUIRE(result.cells.size() == 2);
  CHECK(result.cells[0].row.id == "a");
  CHECK(result.cells[1].row.id == "b");
  CHECK(result.cells[0].row.completed == 3);
  CHECK(result.cells[1].row.completed == 3);
  // p > n cell still produces a finite estimate
  CHECK(std::isfinite(result.cells[1].row.mean_estimate));
  const std::string csv = rows_to_csv({result.cells[0].row, result.cells[1].row});
  CHECK(csv.find("\na,") != std::string::npos);
  CHECK(csv.find("\nb,") != std::string::npos);
}
