#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mew/cli.hpp"
#include "mew/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixture(const char* name) { return std::string(MEW_FIXTURE_DIR) + "/" + name; }

struct RunResult {
  int rc = -1;
  std::string out, err;
};

RunResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "mewcheck");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  RunResult r;
  r.rc = mew::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mewcheck_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name) / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

mew::cli::RunConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return mew::cli::parse_config(in);
}

}  // namespace

TEST(Config, ParsesAllSections) {
  auto cfg = mew::cli::load_config(fixture("ex72.cfg"));
  EXPECT_EQ(cfg.p11, "(x*x - y*y)/2");
  EXPECT_EQ(cfg.p12, "x*y");
  ASSERT_TRUE(cfg.region.has_value());
  EXPECT_EQ(cfg.region->nx, 9);
  EXPECT_DOUBLE_EQ(cfg.region->xmin, -2.0);
  ASSERT_EQ(cfg.points.size(), 2u);
  EXPECT_DOUBLE_EQ(cfg.points[1].y, 1.0);
  EXPECT_DOUBLE_EQ(cfg.settings.tol_residual, 1e-8);
  EXPECT_EQ(cfg.mode, mew::Mode::Real);
  EXPECT_EQ(cfg.nodes().size(), 83u);
  EXPECT_EQ(mew::cli::load_config(fixture("ex73.cfg")).mode, mew::Mode::Complex);
}

TEST(Config, Errors) {
  EXPECT_THROW(mew::cli::load_config("/nonexistent/run.cfg"), mew::ConfigError);
  EXPECT_THROW(parse_text("[region]\nxmin = 0\n"), mew::ConfigError);
  EXPECT_THROW(parse_text("[structure]\nu = \"0\"\n[region]\nxmin = a\n"), mew::ConfigError);
  EXPECT_THROW(parse_text("[structure]\n[region]\nxmin=1\nxmax=0\nymin=0\nymax=1\nnx=3\nny=3\n"), mew::ConfigError);
  EXPECT_THROW(parse_text("[structure]\n[options]\nmode = imaginary\n"), mew::ConfigError);
  EXPECT_THROW(parse_text("[structure]\n[options]\norientation = 2\n"), mew::ConfigError);
  EXPECT_THROW(parse_text("[structure]\n[tolerances]\ntol_res_low = 1\ntol_res_high = 0.1\n"), mew::ConfigError);
  EXPECT_THROW(parse_text("[structure\n"), mew::ConfigError);
}

TEST(Config, ExpressionErrorsNameTheField) {
  auto cfg = parse_text("[structure]\nP12 = \"x+*y\"\n");
  try {
    cfg.structure();
    FAIL() << "expected ExprError";
  } catch (const mew::ExprError& e) {
    EXPECT_EQ(e.offset, 2u);
    const std::string msg = e.what();
    EXPECT_EQ(msg.rfind("P12: ", 0), 0u) << msg;
    EXPECT_EQ(msg.find("offset"), msg.rfind("offset")) << msg;
  }
}

TEST(Config, Points) {
  auto pts = mew::cli::parse_points(" 1, 0 ; -0.5,2.5;");
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_DOUBLE_EQ(pts[0].x, 1.0);
  EXPECT_DOUBLE_EQ(pts[1].x, -0.5);
  EXPECT_DOUBLE_EQ(pts[1].y, 2.5);
  EXPECT_THROW(mew::cli::parse_points("1 0"), mew::ConfigError);
  EXPECT_THROW(mew::cli::parse_points("1,zero"), mew::ConfigError);
  EXPECT_EQ(mew::cli::parse_orientation("+1"), 1);
  EXPECT_EQ(mew::cli::parse_orientation("-1"), -1);
}

TEST(Analyze, FixtureSummaries) {
  const std::map<std::string, std::string> expected{{"ex71.cfg", "summary: OBSTRUCTED"},
                                                    {"ex72.cfg", "summary: ADMITS (F = ±2)"},
                                                    {"ex73.cfg", "summary: NO REAL SOLUTION"},
                                                    {"flat.cfg", "summary: FLAT"}};
  for (const auto& [name, summary] : expected) {
    const fs::path dir = scratch("summary_" + name);
    const RunResult r = run({"analyze", "--config", fixture(name.c_str()), "--out", dir.string()});
    EXPECT_EQ(r.rc, 0) << name << ": " << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), summary) << name;
    EXPECT_TRUE(fs::exists(dir / "report.json"));
    EXPECT_TRUE(fs::exists(dir / "grid.csv"));
  }
}

TEST(Analyze, CsvAndJsonAgree) {
  const fs::path dir = scratch("csv_json");
  ASSERT_EQ(run({"analyze", "--config", fixture("ex72.cfg"), "--out", dir.string()}).rc, 0);
  const json report = json::parse(slurp(dir / "report.json"));
  std::istringstream csv(slurp(dir / "grid.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "x,y,verdict,res12,res13,res23,F_candidates,residual");
  std::size_t i = 0;
  while (std::getline(csv, line)) {
    ASSERT_LT(i, report["points"].size());
    const json& node = report["points"][i++];
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    ASSERT_GE(cells.size(), 3u);
    EXPECT_DOUBLE_EQ(std::stod(cells[0]), node["x"].get<double>());
    EXPECT_DOUBLE_EQ(std::stod(cells[1]), node["y"].get<double>());
    EXPECT_EQ(cells[2], node["verdict"].get<std::string>());
  }
  EXPECT_EQ(i, report["points"].size());
  EXPECT_EQ(report["metadata"]["command"], "analyze");
  EXPECT_EQ(report["region"]["nx"], 9);
}

TEST(Analyze, ReportsAreByteStable) {
  const fs::path a = scratch("stable_a"), b = scratch("stable_b");
  ASSERT_EQ(run({"analyze", "--config", fixture("ex71.cfg"), "--out", a.string()}).rc, 0);
  ASSERT_EQ(run({"analyze", "--config", fixture("ex71.cfg"), "--out", b.string()}).rc, 0);
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  EXPECT_EQ(slurp(a / "grid.csv"), slurp(b / "grid.csv"));
}

TEST(Analyze, PointsOverrideRegion) {
  const fs::path dir = scratch("points");
  const RunResult r = run({"analyze", "--config", fixture("ex72.cfg"), "--out", dir.string(), "--points", "1,0"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const json report = json::parse(slurp(dir / "report.json"));
  ASSERT_EQ(report["points"].size(), 1u);
  EXPECT_EQ(report["points"][0]["verdict"], "AdmitsRealCandidate");
  EXPECT_FALSE(report.contains("region"));
}

TEST(Analyze, ComplexModeListsComplexCandidates) {
  const fs::path dir = scratch("complex");
  ASSERT_EQ(run({"analyze", "--config", fixture("ex73.cfg"), "--out", dir.string(), "--points", "1,0"}).rc, 0);
  const json node = json::parse(slurp(dir / "report.json"))["points"][0];
  ASSERT_EQ(node["complex_candidates"].size(), 2u);
  for (const auto& z : node["complex_candidates"]) {
    EXPECT_NEAR(z[0].get<double>(), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(z[1].get<double>()), 2.0, 1e-8);
  }
}

TEST(ExitCodes, AllFour) {
  EXPECT_EQ(run({"verify", "--config", fixture("ex72.cfg"), "--alpha", "y; -x"}).rc, 0);
  EXPECT_EQ(run({"verify", "--config", fixture("ex72.cfg"), "--alpha", "x; y"}).rc, 1);
  EXPECT_EQ(run({"analyze", "--config", "/nonexistent/run.cfg"}).rc, 2);
  EXPECT_EQ(run({"analyze"}).rc, 2);
  EXPECT_EQ(run({"frobnicate"}).rc, 2);
  EXPECT_EQ(run({"verify", "--config", fixture("ex72.cfg"), "--alpha", "x"}).rc, 2);
  EXPECT_EQ(run({"analyze", "--config", fixture("ex72.cfg"), "--mode", "quaternion"}).rc, 2);
  EXPECT_EQ(run({"--help"}).rc, 0);

  const fs::path bad = write_config("bad_expr", "[structure]\nP12 = \"x+*y\"\n[points]\nlist = \"1,0\"\n");
  const RunResult r = run({"analyze", "--config", bad.string(), "--out", bad.parent_path().string()});
  EXPECT_EQ(r.rc, 3);
  EXPECT_NE(r.err.find("offset 2"), std::string::npos) << r.err;
  EXPECT_EQ(run({"verify", "--config", fixture("ex72.cfg"), "--alpha", "y; sin("}).rc, 3);
  EXPECT_EQ(run({"rescale", "--config", fixture("ex72.cfg"), "--omega", "x**"}).rc, 3);
}

TEST(Verify, ClosedForms) {
  const RunResult real = run({"verify", "--config", fixture("ex72.cfg"), "--alpha", "y; -x"});
  ASSERT_EQ(real.rc, 0) << real.err;
  const json doc = json::parse(real.out);
  EXPECT_TRUE(doc["passed"].get<bool>());
  EXPECT_LT(doc["max_relative_residual"].get<double>(), 1e-9);
  EXPECT_EQ(doc["points"].size(), 83u);

  const RunResult cplx = run({"verify", "--config", fixture("ex73.cfg"), "--alpha", "0; 0", "--alpha-im", "y; -x"});
  ASSERT_EQ(cplx.rc, 0) << cplx.err;
  EXPECT_LT(json::parse(cplx.out)["max_relative_residual"].get<double>(), 1e-9);

  // The imaginary part needs complex mode.
  EXPECT_EQ(run({"verify", "--config", fixture("ex72.cfg"), "--alpha", "0; 0", "--alpha-im", "y; -x"}).rc, 2);
}

TEST(Verify, WritesFileWithOut) {
  const fs::path dir = scratch("verify_out");
  ASSERT_EQ(run({"verify", "--config", fixture("ex72.cfg"), "--alpha", "y; -x", "--out", dir.string()}).rc, 0);
  EXPECT_TRUE(json::parse(slurp(dir / "verify.json"))["passed"].get<bool>());
}

TEST(Invariants, Dump) {
  const RunResult r = run({"invariants", "--config", fixture("ex73.cfg"), "--points", "1,0"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const json p = json::parse(r.out)["points"][0];
  EXPECT_FALSE(p["flat"].get<bool>());
  EXPECT_NEAR(p["sigma_over_rho"].get<double>(), 8.0, 1e-10);
  EXPECT_NEAR(p["mu"].get<double>(), 0.0, 1e-10);
  EXPECT_EQ(p["Y_abc"].size(), 8u);

  const RunResult flat = run({"invariants", "--config", fixture("flat.cfg"), "--points", "0.2,0.1"});
  ASSERT_EQ(flat.rc, 0);
  EXPECT_TRUE(json::parse(flat.out)["points"][0]["flat"].get<bool>());
}

TEST(Constraints, Dump) {
  const RunResult r = run({"constraints", "--config", fixture("ex72.cfg"), "--points", "1,0"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const json p = json::parse(r.out)["points"][0];
  std::vector<double> roots = p["common_real_roots"];
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0], -2.0, 1e-9);
  EXPECT_NEAR(roots[1], 2.0, 1e-9);
  EXPECT_EQ(p["resultants"].size(), 3u);
}

TEST(Rescale, ZeroIsIdentityAndYabcInvariant) {
  const std::string cfg = fixture("ex72.cfg");
  const std::string pts = "1,0; 0.5,-0.7";
  const json base = json::parse(run({"invariants", "--config", cfg, "--points", pts}).out);
  const json same = json::parse(run({"rescale", "--config", cfg, "--points", pts, "--omega", "0"}).out);
  const json moved = json::parse(run({"rescale", "--config", cfg, "--points", pts, "--omega", "0.3*x"}).out);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(same["points"][i]["rho"], base["points"][i]["rho"]);
    EXPECT_EQ(same["points"][i]["sigma"], base["points"][i]["sigma"]);
    const auto& y0 = base["points"][i]["Y_abc"];
    const auto& y1 = moved["points"][i]["Y_abc"];
    ASSERT_EQ(y0.size(), y1.size());
    for (std::size_t k = 0; k < y0.size(); ++k)
      EXPECT_NEAR(y1[k].get<double>(), y0[k].get<double>(), 1e-8) << "point " << i << " component " << k;
    EXPECT_NEAR(moved["points"][i]["u"].get<double>(), 0.3 * moved["points"][i]["x"].get<double>(), 1e-15);
  }
}
