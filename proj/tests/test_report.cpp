#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "slk/experiments.hpp"

using namespace slk;

namespace {

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

ExperimentConfig config(const std::string& command) {
  ExperimentConfig c;
  c.command = command;
  return c;
}

}  // namespace

TEST_CASE("tabular emission") {
  VerificationReport r;
  CHECK(emit(r, ReportFormat::table) == std::string(kCsvHeader) + "\n");
  for (int i = 0; i < 3; ++i) {
    AuditRecord a;
    a.audit_id = "a" + std::to_string(i);
    a.field_id = "f,with comma";
    a.pass = true;
    r.records.push_back(a);
  }
  const auto csv = emit(r, ReportFormat::table);
  CHECK(count_lines(csv) == 4);
  CHECK(csv.find("\"f,with comma\"") != std::string::npos);
}

TEST_CASE("structured round trip") {
  VerificationReport r;
  r.command = "symbol";
  r.config = {{"alpha", 0.7}, {"fields", {"cusp-0.3"}}};
  r.config_hash = fnv1a_hex(r.config.dump());
  AuditRecord a;
  a.audit_id = "x";
  a.field_id = "wave-1";
  a.alpha = 0.1 + 0.2;
  a.lhs = 1.0 / 3.0;
  a.rhs = std::numeric_limits<double>::infinity();
  a.constant = -std::numeric_limits<double>::infinity();
  a.score = 4.9e-324;
  a.seconds = 0.25;
  a.note = "unicode: Hölder";
  a.pass = false;
  r.records.push_back(a);
  r.table = {{"x", "q"}, {{0.0, 1e-300}, {-2.5, 3.0}}};
  r.timestamp = "2026-01-01T00:00:00Z";
  r.finalize();
  CHECK_FALSE(r.global_pass);
  const auto back = report_from_json(nlohmann::json::parse(emit(r, ReportFormat::structured)));
  CHECK(back == r);
  CHECK(body_hash(back) == body_hash(r));

  // Timestamp and runtimes do not enter the body.
  auto later = r;
  later.timestamp = "2027-01-01T00:00:00Z";
  later.records[0].seconds = 9.0;
  CHECK(body_hash(later) == body_hash(r));
  later.records[0].lhs = 0.5;
  CHECK(body_hash(later) != body_hash(r));
  CHECK_THROWS_AS(report_from_json(nlohmann::json{{"version", "x"}}), InvalidArgument);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("config validation") {
  auto c = config("symbol");
  c.alpha = 0.7;
  c.beta = 0.3;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.alpha = 1.7;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.alpha = 1.0;
  CHECK_NOTHROW(c.validate());
  c.tol.resolvent = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  CHECK_THROWS_AS(run(config("no-such-command")), InvalidArgument);
  auto g = config("solve");
  g.grids = {100};
  CHECK_THROWS_AS(g.validate(), InvalidArgument);
}

TEST_CASE("config json overrides and hash") {
  const auto base = config("apriori");
  const auto j = nlohmann::json::parse(R"({"alpha": 1.5, "kernel": {"name": "holder", "beta": 0.6},
                                           "tolerances": {"apriori_factor": 1.5}, "grids": [64, 128]})");
  const auto c = config_from_json(j, base);
  CHECK(c.alpha == 1.5);
  CHECK(c.kernel.name == "holder");
  CHECK(c.tol.apriori_factor == 1.5);
  CHECK(c.grids == std::vector<int>{64, 128});
  CHECK(c.beta == base.beta);
  CHECK(c.hash() != base.hash());
  const auto again = config_from_json(to_json(c));
  CHECK(again.hash() == c.hash());
  auto moved = c;
  moved.output = "elsewhere.json";
  CHECK(moved.hash() == c.hash());
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"alpha": "x"})")), InvalidArgument);
}

TEST_CASE("verify-holder covers the corpus") {
  const auto r = run(config("verify-holder"));
  CHECK(r.records.size() >= 12);
  for (const auto& a : r.records) {
    INFO(a.audit_id << " " << a.field_id << " " << a.note);
    CHECK(a.pass);
    CHECK(a.config_hash == r.config_hash);
  }
  CHECK(r.global_pass);
}

TEST_CASE("reruns are bit-identical") {
  for (const char* cmd : {"verify-differences", "symbol", "sharpness"}) {
    const auto a = run(config(cmd)), b = run(config(cmd));
    CHECK(report_body(a).dump() == report_body(b).dump());
    CHECK(body_hash(a) == body_hash(b));
  }
}

TEST_CASE("module errors carry the audit id") {
  auto c = config("solve");
  c.fields = {"no-such-field"};
  const auto r = run(c);
  REQUIRE(r.records.size() == 1);
  CHECK_FALSE(r.records[0].pass);
  CHECK(r.records[0].audit_id == "solve/no-such-field");
  CHECK(r.records[0].note.find("unknown field") != std::string::npos);
  CHECK_FALSE(r.global_pass);
}

TEST_CASE("files") {
  VerificationReport r;
  CHECK_THROWS_AS(emit_to_file(r, ReportFormat::table, "/nonexistent-dir/out.csv"), InvalidArgument);
  emit_to_file(r, ReportFormat::table, "slk_report_test.csv");
  std::ifstream is("slk_report_test.csv");
  std::stringstream ss;
  ss << is.rdbuf();
  CHECK(ss.str() == std::string(kCsvHeader) + "\n");
  std::remove("slk_report_test.csv");
  CHECK(parse_format("csv") == ReportFormat::table);
  CHECK_THROWS_AS(parse_format("xml"), InvalidArgument);
}

TEST_CASE("term ids") {
  CHECK(zero_order_term("const--2")(Point::Zero()) == -2.0);
  CHECK(drift_term("sin")(Point(M_PI / 2, 0))(0) == doctest::Approx(0.3));
  CHECK_THROWS_AS(zero_order_term("const-x"), InvalidArgument);
  CHECK_THROWS_AS(drift_term("nope"), InvalidArgument);
  CHECK_THROWS_AS(build_kernel({"nope"}, 0.8, 1), InvalidArgument);
  KernelConfig bad;
  bad.kappa1 = 2.0;
  bad.kappa2 = 1.0;
  CHECK_THROWS_AS(build_kernel(bad, 0.8, 1), InvalidArgument);
}
