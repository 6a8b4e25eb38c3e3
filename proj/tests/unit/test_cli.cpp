#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hypersde/expr.hpp"
#include "hypersde/reducibility.hpp"
#include "hypersde_cli/run.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using hypersde::cli::RunRequest;
using hypersde::cli::run;

namespace {

fs::path scratch(const std::string& name) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() / "hypersde-cli-tests" / info->name() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

hypersde::cli::RunResult go(const std::string& task, json cfg, const fs::path& out) {
  RunRequest r;
  r.task = task;
  r.config = std::move(cfg);
  r.out = out;
  return run(r);
}

const json lv_example = json::parse(R"({
  "model": "lv", "algebra": {"builtin": "Cp", "p": -1},
  "coefficients": {"a": [0.5, 0.1], "b": [1, 0.2], "G": [0.3, 0.1]},
  "Z0": [1, 0.5], "grid": {"T": 1, "steps": 512, "n_paths": 12}, "seed": 7
})");

// Runs the installed binary through the shell and captures stdout.
std::pair<int, std::string> shell(const std::string& args) {
  const std::string cmd = std::string(HYPERSDE_CLI_PATH) + " " + args + " 2>/dev/null";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe.get())) out += buf.data();
  const int status = pclose(pipe.release());
  return {WEXITSTATUS(status), out};
}

}  // namespace

TEST(Cli, VerifyAlgebraOnEllipticComplex) {
  const auto out = scratch("o");
  const auto r = go("verify-algebra", json::parse(R"({"algebra": {"builtin": "Cp", "p": -1}})"), out);
  ASSERT_EQ(r.exit_code, 0) << r.message;
  EXPECT_EQ(r.summary["status"], "ok");
  EXPECT_EQ(r.summary["pass"], true);
  EXPECT_EQ(r.summary["max_residual"], 0.0);
  const auto report = json::parse(slurp(out / "report.json"));
  for (const char* k : {"associativity", "commutativity", "identity"}) EXPECT_EQ(report["report"][k]["max_residual"], 0.0);
}

TEST(Cli, CompareLvIsByteReproducible) {
  const auto a = scratch("a"), b = scratch("b"), c = scratch("c");
  const auto ra = go("compare", lv_example, a);
  ASSERT_EQ(ra.exit_code, 0) << ra.message;
  const auto rb = go("compare", lv_example, b);
  ASSERT_EQ(rb.exit_code, 0);
  RunRequest req;
  req.task = "compare";
  req.config = lv_example;
  req.out = c;
  req.workers = 1;
  const auto rc = run(req);
  ASSERT_EQ(rc.exit_code, 0);
  for (const char* f : {"compare.csv", "closed.csv", "em.csv", "compare.svg"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(c / f)) << f;
  }
  json sa = ra.summary, sb = rb.summary;
  sa.erase("artifacts");
  sb.erase("artifacts");
  EXPECT_EQ(sa.dump(), sb.dump());
  EXPECT_LE(ra.summary["max_route_discrepancy"].get<double>(), 1e-9);
}

TEST(Cli, CheckReducibleSquareDiffusion) {
  const auto out = scratch("o");
  const auto r = go("check-reducible", json::parse(R"({"f": 0, "g": "z^2"})"), out);
  ASSERT_EQ(r.exit_code, 0) << r.message;
  EXPECT_EQ(r.summary["verdict"], "not_reducible");
  const auto report = json::parse(slurp(out / "report.json"));
  EXPECT_EQ(report["verdict"], "not_reducible");
  // Same verdict as the library checker on the default samples.
  const auto lib = hypersde::check_reducible_scalar(
      hypersde::expr::parse("0"), hypersde::expr::parse("x1^2"),
      hypersde::grid2(hypersde::linspace(0, 1, 5), hypersde::linspace(0.5, 2, 8)));
  EXPECT_EQ(report["verdict"], hypersde::to_string(lib.verdict));
}

TEST(Cli, ReductionArtifactForGbm) {
  const auto out = scratch("o");
  const auto r = go("check-reducible", json::parse(R"({"f": "0.7*z", "g": "0.4*z", "construct": true})"), out);
  ASSERT_EQ(r.exit_code, 0) << r.message;
  EXPECT_EQ(r.summary["verdict"], "reducible");
  const auto red = json::parse(slurp(out / "reduction.json"));
  for (double d : red["drift"]) EXPECT_NEAR(d, 0.7 / 0.4 - 0.2, 1e-6);
}

TEST(Cli, ExitCodes) {
  // 1: missing seed on a stochastic task, bad expressions, unknown model.
  json no_seed = lv_example;
  no_seed.erase("seed");
  EXPECT_EQ(go("compare", no_seed, scratch("a")).exit_code, 1);
  json bad_expr = json::parse(R"({"f": "sin(", "g": "z"})");
  const auto be = go("check-reducible", bad_expr, scratch("b"));
  EXPECT_EQ(be.exit_code, 1);
  EXPECT_FALSE(be.message.empty());
  json bad_model = lv_example;
  bad_model["model"] = "nope";
  EXPECT_EQ(go("compare", bad_model, scratch("c")).exit_code, 1);
  EXPECT_EQ(go("no-such-task", json::object(), scratch("d")).exit_code, 1);

  // 2: the LV bracket 1 - 2t is singular at t = 1/2.
  const json singular = json::parse(R"({
    "model": "lv", "algebra": {"builtin": "R"},
    "coefficients": {"a": [-2], "b": [0], "G": [0]}, "Z0": [1],
    "grid": {"T": 1, "steps": 8}, "seed": 1})");
  const auto s = go("solve-lv", singular, scratch("e"));
  EXPECT_EQ(s.exit_code, 2);
  EXPECT_EQ(s.summary["status"], "math_error");

  // 3: compare with an unattainable tolerance, and a non-commutative table.
  json strict = lv_example;
  strict["tolerances"] = {{"compare", 1e-12}};
  EXPECT_EQ(go("compare", strict, scratch("f")).exit_code, 3);
  const json table = json::parse(R"({"algebra": {"dim": 2, "gamma": [[[1, 0], [0, 1]], [[0, 0.9], [0.5, 0]]]}})");
  const auto t = go("verify-algebra", table, scratch("g"));
  EXPECT_EQ(t.exit_code, 3);
  EXPECT_EQ(t.summary["pass"], false);
}

TEST(Cli, SeedOverrideChangesPaths) {
  const auto a = scratch("a"), b = scratch("b");
  json cfg = lv_example;
  ASSERT_EQ(go("solve-lv", cfg, a).exit_code, 0);
  RunRequest req;
  req.task = "solve-lv";
  req.config = cfg;
  req.out = b;
  req.seed = 8;
  ASSERT_EQ(run(req).exit_code, 0);
  EXPECT_NE(slurp(a / "path.csv"), slurp(b / "path.csv"));
  EXPECT_EQ(slurp(a / "path.csv").substr(0, 9), "t,X1,X2\n0");
  EXPECT_NE(slurp(a / "path.svg").find("<svg"), std::string::npos);
}

TEST(Cli, LinearRoutesAgree) {
  const json cfg = json::parse(R"j({
    "model": "linear", "algebra": {"builtin": "Cp", "p": -1},
    "coefficients": {"f1": [0.1, "sin(t)"], "f2": [0.2, -0.1], "g1": [0.1, 0], "g2": [0.3, 0.1]},
    "Z0": [1, 0.5], "grid": {"steps": 256}, "seed": 4})j");
  const auto a = scratch("base"), b = scratch("cp");
  json base = cfg, cp = cfg;
  base["route"] = "base";
  cp["route"] = "cp";
  const auto ra = go("solve-linear", base, a), rb = go("solve-linear", cp, b);
  ASSERT_EQ(ra.exit_code, 0) << ra.message;
  ASSERT_EQ(rb.exit_code, 0) << rb.message;
  const auto ea = ra.summary["endpoint"], eb = rb.summary["endpoint"];
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(ea[i].get<double>(), eb[i].get<double>(), 1e-9);
}

TEST(Cli, ExpandWritesSymbolicSystem) {
  const auto out = scratch("o");
  const json cfg = json::parse(R"({
    "model": "linear", "algebra": {"builtin": "A3_4"},
    "coefficients": {"f1": [0, 0, 0], "f2": [1, 0, 0], "g1": [0, 0, 0], "g2": [0, 1, 0]}})");
  const auto r = go("expand", cfg, out);
  ASSERT_EQ(r.exit_code, 0) << r.message;
  const auto e = json::parse(slurp(out / "expansion.json"));
  EXPECT_EQ(e["n"], 3);
  EXPECT_EQ(e["drift"].size(), 3u);
  EXPECT_EQ(e["diffusion"].size(), 3u);
}

TEST(Cli, ConvergenceStudyArtifacts) {
  const auto out = scratch("o");
  const json cfg = json::parse(R"({
    "model": "linear", "algebra": {"builtin": "Cp", "p": -1},
    "coefficients": {"f1": [0, 0], "f2": [0.2, 0.1], "g1": [0, 0], "g2": [0.4, 0.2]},
    "Z0": [1, 0], "grid": {"n_paths": 60}, "study": {"base_steps": 32, "levels": 4}, "seed": 2})");
  const auto r = go("convergence", cfg, out);
  ASSERT_EQ(r.exit_code, 0) << r.message;
  const std::string csv = slurp(out / "study.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "level,dt,rms_error");
  const auto s = json::parse(slurp(out / "study.json"));
  EXPECT_EQ(s["steps"].size(), 4u);
  EXPECT_TRUE(fs::exists(out / "study.svg"));
}

TEST(Cli, CheckCpReportsBranch) {
  const auto out = scratch("o");
  const auto r = go("check-cp", json::parse(R"({"p": 0, "f1": "0.2*X", "f2": "0.2*Y", "g1": "X", "g2": "Y"})"), out);
  ASSERT_EQ(r.exit_code, 0) << r.message;
  EXPECT_EQ(r.summary["verdict"], "reducible");
  EXPECT_EQ(r.summary["hypercomplexifiable"], true);
}

TEST(CliBinary, OneLineSummaryAndExitStatus) {
  const auto dir = scratch("o");
  {
    std::ofstream(dir / "va.json") << R"({"algebra": {"builtin": "A3_4"}})";
  }
  const auto [code, out] = shell("verify-algebra --config " + (dir / "va.json").string() + " --out " +
                                 (dir / "out").string());
  EXPECT_EQ(code, 0);
  ASSERT_FALSE(out.empty());
  EXPECT_EQ(out.find('\n'), out.size() - 1);
  const auto j = json::parse(out);
  EXPECT_EQ(j["task"], "verify-algebra");
  EXPECT_EQ(j["exit_code"], 0);
  EXPECT_EQ(shell("verify-algebra --config " + (dir / "missing.json").string()).first, 1);
  EXPECT_EQ(shell("bogus-task --config x.json").first, 1);
  EXPECT_EQ(shell("--help").first, 0);
}
