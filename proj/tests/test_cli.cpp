#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "cli.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace testing;
using loopgrad::cli::JobSpec;
using loopgrad::cli::run;
using loopgrad::io::json;

namespace {

std::string data(const std::string& name) { return std::string(LOOPGRAD_DATA_DIR) + "/" + name; }

JobSpec job(const std::string& command, const std::string& action = {}, const std::string& input = {}) {
  JobSpec j;
  j.command = command;
  j.action = action;
  j.input = input.empty() ? std::string{} : data(input);
  return j;
}

}  // namespace

TEST_CASE("selfcheck passes") {
  const auto r = run(job("selfcheck"));
  CHECK(r.exit_code == 0);
  CHECK(r.report["pass"].get<bool>());
  CHECK(r.report["schema"] == "loopgrad/1");
  for (const auto& c : r.report["checks"]) {
    CAPTURE(c["name"].get<std::string>());
    CHECK(c["pass"].get<bool>());
  }
}

TEST_CASE("normalize the shifted sl2 example") {
  const auto r = run(job("normalize", {}, "shifted_sl2.json"));
  REQUIRE(r.exit_code == 0);
  CHECK(r.report["K_prime"] == 1);
  CHECK(r.report["a_prime_is_identity"].get<bool>());
  CHECK(r.report["residuals"]["integrality"].get<double>() < 1e-10);
  const CMatrix g = loopgrad::io::matrix_from_json(r.report["monodromy"]["g"]);
  CHECK(max_abs(g + CMatrix::Identity(2, 2)) < 1e-10);
}

TEST_CASE("grading verify rejects the quarter shift") {
  const auto r = run(job("grading", "verify", "quarter_sl2.json"));
  CHECK(r.exit_code == 2);
  CHECK(r.report["status"] == "rejected");
  CHECK(r.report["error"] == "NonIntegerSpectrum");
  CHECK_FALSE(r.report["violated_condition"].get<std::string>().empty());
}

TEST_CASE("grading verify on the shifted example") {
  auto j = job("grading", "verify", "shifted_sl2.json");
  j.window = 3;
  const auto r = run(j);
  REQUIRE(r.exit_code == 0);
  CHECK(r.report["total_dim"] == 21);
  CHECK_FALSE(r.table.empty());
}

TEST_CASE("normalize the twisted and reparametrised examples") {
  const auto t = run(job("normalize", {}, "twisted_sl2_operator.json"));
  REQUIRE(t.exit_code == 0);
  CHECK(t.report["K_prime"] == 2);
  CHECK(t.report["dims"] == json::array({1, 2}));
  const auto w = run(job("normalize", {}, "wobbly_sl2.json"));
  REQUIRE(w.exit_code == 0);
  CHECK(w.report["K_prime"] == 1);
}

TEST_CASE("loop commands") {
  const auto v = run(job("loop", "validate", "twisted_sl2_element.json"));
  REQUIRE(v.exit_code == 0);
  CHECK(v.report["twist_residual"].get<double>() < 1e-9);
  const auto b = run(job("loop", "bracket", "sl3_bracket_pair.json"));
  REQUIRE(b.exit_code == 0);
  for (const auto& r : b.report["bracket_bound"]) CHECK(r["ok"].get<bool>());
}

TEST_CASE("classify and algebra commands") {
  auto c = job("classify");
  c.algebra = "A2";
  c.order = 3;
  const auto r = run(c);
  REQUIRE(r.exit_code == 0);
  CHECK(r.report["count"] == 2);
  CHECK(r.report["oracle_agreement"].get<bool>());

  auto a = job("algebra");
  a.algebra = "A3";
  const auto alg = run(a);
  REQUIRE(alg.exit_code == 0);
  CHECK(alg.report["dim"] == 15);

  a.algebra = "G2";
  CHECK(run(a).exit_code == 2);
}

TEST_CASE("errors map to exit codes") {
  CHECK(run(job("normalize", {}, "missing.json")).exit_code == 1);
  CHECK(run(job("normalize")).exit_code == 1);
  CHECK(run(job("frobnicate")).exit_code == 1);
  auto small = job("grading", "verify", "twisted_sl2_element.json");
  CHECK(run(small).exit_code == 1);
  auto neg = job("grading", "verify", "shifted_sl2.json");
  neg.tol = -1.0;
  CHECK(run(neg).exit_code == 1);
}

TEST_CASE("identical jobs give byte-identical reports") {
  for (std::uint64_t seed : {1u, 99u}) {
    auto j = job("selfcheck");
    j.seed = seed;
    CHECK(loopgrad::io::dump(run(j).report) == loopgrad::io::dump(run(j).report));
  }
  const auto n = job("normalize", {}, "wobbly_sl2.json");
  CHECK(loopgrad::io::dump(run(n).report) == loopgrad::io::dump(run(n).report));
}

TEST_CASE("json round trips") {
  Rng rng(61);
  const TwistPtr tw = make_twist(ad_roots(build_algebra("A2"), {0, 1, 2}, 3), 3);
  const LoopElement x = random_loop_element(tw, 3, rng);
  const json doc = loopgrad::io::loop_element_to_json(x);
  const LoopElement y = loopgrad::io::loop_element_from_json(doc, kDefaultTol);
  CHECK(mode_norm(x - y) < 1e-15);

  const std::vector<std::pair<double, double>> ab{{0.1, 0.3}};
  const GradingOperator Q(VectorFieldK::from_real_series(3, 1.5, ab), random_loop_element(tw, 2, rng));
  const GradingOperator P = loopgrad::io::operator_from_json(loopgrad::io::operator_to_json(Q), kDefaultTol);
  CHECK(mode_norm(P.eta() - Q.eta()) < 1e-15);
  for (double s : {0.2, 1.4}) CHECK(P.X()(s) == doctest::Approx(Q.X()(s)).epsilon(1e-15));

  json bad = doc;
  bad["schema"] = "other/2";
  const std::string path = "roundtrip_bad_schema.json";
  std::ofstream(path) << bad.dump();
  try {
    loopgrad::io::read_document(path);
    FAIL("wrong schema accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaError);
  }
  std::remove(path.c_str());
}

TEST_CASE("default tolerance from the environment") {
  ::setenv("LOOPGRAD_TOL", "1e-4", 1);
  CHECK(loopgrad::cli::default_tolerance(1e-6) == 1e-4);
  ::setenv("LOOPGRAD_TOL", "junk", 1);
  CHECK(loopgrad::cli::default_tolerance(1e-6) == 1e-6);
  ::unsetenv("LOOPGRAD_TOL");
  CHECK(loopgrad::cli::default_tolerance(1e-6) == 1e-6);
}
