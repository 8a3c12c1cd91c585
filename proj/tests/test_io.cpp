#include <doctest.h>

#include <sstream>

#include "selinf/errors.hpp"
#include "selinf/io.hpp"

using namespace selinf;

namespace {

Dataset from_text(const std::string& text, bool center = false, bool unit_norm = false) {
  std::istringstream in(text);
  return parse_dataset(in, "y", center, unit_norm);
}

}  // namespace

TEST_CASE("small CSV") {
  const Dataset d = from_text("a,b,y\n1,2,3\n4,5,6.5\n7,9,8\n");
  CHECK(d.n() == 3);
  CHECK(d.p() == 2);
  CHECK(d.names() == std::vector<std::string>{"a", "b"});
  CHECK(d.X()(2, 1) == 9);
  CHECK(d.y()[1] == 6.5);
}

TEST_CASE("response column anywhere, quoted headers, CRLF") {
  const Dataset d = from_text("\"y\",\"x, one\",x2\r\n1,2,3\r\n4,5,6\r\n\r\n");
  CHECK(d.names() == std::vector<std::string>{"x, one", "x2"});
  CHECK(d.y()[1] == 4);
  CHECK(d.X()(1, 0) == 5);
}

TEST_CASE("centering then unit norm") {
  const Dataset d = from_text("a,b,y\n1,2,3\n4,-5,6.5\n7,9,8\n2,2,1\n", true, true);
  for (Index j = 0; j < d.p(); ++j) {
    CHECK(std::abs(d.X().col(j).mean()) < 1e-10);
    CHECK(d.X().col(j).norm() == doctest::Approx(1).epsilon(1e-10));
  }
  CHECK(std::abs(d.y().mean()) < 1e-10);
}

TEST_CASE("CSV errors") {
  CHECK_THROWS_AS(parse_dataset("/nonexistent/file.csv", "y", false, false), DataError);
  CHECK_THROWS_AS(from_text(""), DataError);
  CHECK_THROWS_AS(from_text("a,b\n1,2\n"), DataError);
  CHECK_THROWS_AS(from_text("a,y\n1,2,3\n"), DataError);
  CHECK_THROWS_AS(from_text("a,y\n"), DataError);
  try {
    from_text("a,b,y\n1,2,3\n4,oops,6\n");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("'b'") != std::string::npos);
  }
  CHECK_THROWS_AS(from_text("a,b,y\n1,2,3\n4,,6\n"), DataError);
  CHECK_THROWS_AS(from_text("a,b,y\n1,2,3\n4,5,nan\n"), DataError);
  CHECK_THROWS_AS(from_text("a,b,y\n1,2,3\n1,5,6\n", true, true), DataError);
}

TEST_CASE("extended reals") {
  CHECK(json_real(kInf) == "+inf");
  CHECK(json_real(-kInf) == "-inf");
  CHECK(json_real(1.5) == 1.5);
  CHECK(json_real(std::nan("")).is_null());
  for (double x : {-kInf, kInf, 0.1, -3e-300}) CHECK(real_from_json(json_real(x)) == x);
  CHECK_THROWS_AS(real_from_json(Json("inf-ish")), DataError);
  CHECK(csv_real(kInf).empty());
  CHECK(std::stod(csv_real(0.1)) == 0.1);
}

TEST_CASE("path JSON round trip keeps knots bit for bit") {
  for (Method m : {Method::FS, Method::LAR, Method::LASSO}) {
    std::istringstream in("a,b,c,y\n1,2,0.3,3\n4,5,1,6.5\n7,9,-2,8\n2,2,5,1\n0,1,1,1\n");
    const Dataset d = parse_dataset(in, "y", true, true);
    const PathTrace t = run_path(m, d, 3);
    const PathTrace back = trace_from_json(Json::parse(to_json(t, d.names()).dump()));
    REQUIRE(back.size() == t.size());
    CHECK(back.method == m);
    for (std::size_t l = 0; l < t.size(); ++l) {
      CHECK(back.steps[l].variable == t.steps[l].variable);
      CHECK(back.steps[l].sign == t.steps[l].sign);
      CHECK(back.steps[l].knot == t.steps[l].knot);
      CHECK(back.steps[l].active_after == t.steps[l].active_after);
    }
  }
  CHECK_THROWS_AS(trace_from_json(Json::parse("{\"method\":\"lar\"}")), DataError);
}

TEST_CASE("inference result schema") {
  InferenceResult r;
  r.step = 2;
  r.variable = 1;
  r.sign = -1;
  r.p_value = 0.25;
  r.ci = Interval{-kInf, 3.0};
  r.test = TestKind::Spacing;
  r.conditioning = "knots";
  const Json j = to_json(r, {"a", "b"});
  for (const char* key : {"step", "variable", "sign", "p_value", "ci_low", "ci_high", "test", "conditioning"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["variable"] == "b");
  CHECK(j["variable_index"] == 1);
  CHECK(j["ci_low"] == "-inf");
  CHECK(j["test"] == "SPACING");
  const std::string csv = results_csv({r}, {"a", "b"});
  CHECK(csv.find("\n2,b,1,-1,0,0.25,,3,SPACING,one,knots\n") != std::string::npos);
}

TEST_CASE("simulation config from JSON") {
  const SimConfig c = sim_config_from_json(Json::parse(
      R"({"n": 20, "p": 6, "beta_star": [2, -1], "tests": ["tg", "spacing"], "sided": "two", "seed": 9})"));
  CHECK(c.beta_star.size() == 6);
  CHECK(c.beta_star[1] == -1);
  CHECK(c.beta_star.tail(4).isZero());
  CHECK(c.tests == std::vector<TestKind>{TestKind::TG_LAR, TestKind::Spacing});
  CHECK(c.sided == Sided::Two);
  CHECK(c.seed == 9);
  CHECK_NOTHROW(c.validate());
  CHECK_THROWS_AS(sim_config_from_json(Json::parse(R"({"p": 1, "beta_star": [1, 2]})")), DataError);
  CHECK_THROWS_AS(sim_config_from_json(Json::parse(R"({"n": "many"})")), DataError);
  const SimConfig x = sim_config_from_json(Json::parse(R"({"x": [[1, 0], [0, 1], [1, 1]]})"));
  CHECK(x.design == Design::Custom);
  CHECK(x.n == 3);
  CHECK(x.p == 2);
}

TEST_CASE("simulation report output is deterministic") {
  SimConfig c = sim_config_from_json(
      Json::parse(R"({"n": 15, "p": 6, "beta_star": [4], "n_reps": 20, "tests": ["tg", "covariance"],
                      "intervals": true, "seed": 4})"));
  c.threads = 1;
  const SimReport a = run_simulation(c);
  c.threads = 3;
  const SimReport b = run_simulation(c);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(records_csv(a) == records_csv(b));
  const Json j = to_json(a);
  CHECK(j["summaries"].size() == 6);
  CHECK(j["summaries"][0].contains("coverage"));
}
