#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gdh/cli.hpp"
#include "gdh/factorization.hpp"

using namespace gdh;

namespace {

struct Run {
  int code = 0;
  Json report;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.err = err.str();
  if (!out.str().empty()) r.report = Json::parse(out.str());
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("gdh_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string write(const std::string& name, const Json& j) {
    const auto p = (dir_ / name).string();
    std::ofstream(p) << j.dump();
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

Json interval_domain(int n) {
  Json cells = Json::array();
  for (int i = 0; i < n; ++i) cells.push_back({i});
  return {{"d", 1}, {"cells", cells}};
}

}  // namespace

TEST_F(CliTest, NormOfDeltaIsOne) {
  const auto k = write("k.json", to_json(Kernel::delta({0})));
  const auto d = write("d.json", interval_domain(10));
  const auto r = run({"norm", "--kernel", k, "--domain", d});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(r.report["result"]["value"].get<double>(), 1.0, 1e-8);
  EXPECT_EQ(r.report["command"], "norm");
  EXPECT_EQ(r.report["version"], kVersion);
  EXPECT_EQ(r.report["digest"].get<std::string>().size(), 16u);
}

TEST_F(CliTest, NormOfOnesOnTenCells) {
  const auto k = write("k.json", to_json(Kernel::constant(Box({-9}, {9}), 1.0)));
  const auto d = write("d.json", interval_domain(10));
  const auto r = run({"norm", "--kernel", k, "--domain", d});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(r.report["result"]["value"].get<double>(), 10.0, 1e-6);
  EXPECT_EQ(r.report["result"]["rows"], 10);
}

TEST_F(CliTest, ReportsAreDeterministic) {
  const auto k = write("k.json", to_json(Kernel(Box({-2}, {2}), {1.0, -0.5, 2.0, Complex(0, 1), 0.25})));
  const auto d = write("d.json", interval_domain(30));
  auto a = run({"norm", "--kernel", k, "--domain", d, "--seed", "7"});
  auto b = run({"norm", "--kernel", k, "--domain", d, "--seed", "7"});
  ASSERT_EQ(a.code, kExitOk);
  a.report.erase("wall_s");
  b.report.erase("wall_s");
  EXPECT_EQ(a.report, b.report);
  const auto c = run({"norm", "--kernel", k, "--domain", d, "--tol", "1e-9"});
  EXPECT_NE(a.report["digest"], c.report["digest"]);
  EXPECT_EQ(inputs_digest(Json::object()), "9bf65e00c699fdaf");
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"norm", "--kernel", path("missing.json"), "--domain", path("missing.json")}).code, kExitInput);
  const auto bad = path("bad.json");
  std::ofstream(bad) << "{ not json";
  const auto d = write("d.json", interval_domain(4));
  EXPECT_EQ(run({"norm", "--kernel", bad, "--domain", d}).code, kExitInput);
  EXPECT_EQ(run({"norm", "--kernel", d, "--domain", d}).code, kExitInput);
  EXPECT_EQ(run({"nonsense"}).code, kExitInput);
  EXPECT_EQ(run({"sweep", "--d", "3", "--n", "40", "--trials", "1"}).code, kExitResource);

  const auto k = write("k.json", to_json(Kernel(Box({-3}, {3}), {0.3, -1.0, 2.0, Complex(0, 1), 0.5, 1.5, -0.7})));
  const auto big = write("big.json", interval_domain(200));
  EXPECT_EQ(run({"norm", "--kernel", k, "--domain", big, "--tol", "1e-16", "--max-iter", "2"}).code,
            kExitNoConvergence);
}

TEST_F(CliTest, ExtendDelta) {
  const auto in = write("a.json", to_json(MultiSequence::delta(Window({2}))));
  const auto out = path("ext.json");
  const auto r = run({"extend", "--input", in, "--certify", "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(r.report["result"]["t_grid"].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(r.report["result"]["ratio"].get<double>(), 1.0, 1e-9);
  const auto ext = load_multisequence(out);
  EXPECT_EQ(ext.window().radii, std::vector<int>{8});
  EXPECT_EQ(run({"extend", "--input", in, "--ext-radius", "1"}).code, kExitInput);
}

TEST_F(CliTest, Factorize) {
  const auto lam = tent_grid(1, 32);
  CubeFunction g{1, 32, 0, std::vector<Complex>(lam.begin(), lam.end())};
  const auto in = write("g.json", to_json(g));
  const auto r = run({"factorize", "--input", in, "--kmax", "4", "--relaxed-margin"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_LE(r.report["result"]["residual_sup"].get<double>(), 1e-12);
  EXPECT_EQ(run({"factorize", "--input", in, "--kmax", "4"}).code, kExitInput);
}

TEST_F(CliTest, CertifyOnInterval) {
  const auto k = write("k.json", to_json(Kernel::delta({0})));
  const auto d = write("d.json", interval_domain(200));
  const auto r = run({"certify", "--kernel", k, "--domain", d, "--xi", "0", "--nu", "1", "--eps", "0.1,0.01"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.report["result"]["domain_kind"], "bounded");
  EXPECT_EQ(run({"certify", "--kernel", k, "--domain", d, "--xi", "0,0", "--nu", "1"}).code, kExitInput);
}

TEST_F(CliTest, HilbertDemo) {
  const auto r = run({"demo", "hilbert", "--sizes", "1,8,32"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto& rows = r.report["result"]["sections"];
  EXPECT_NEAR(rows[0]["norm"].get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(r.report["result"]["bounded_by_pi"].get<bool>());
  EXPECT_EQ(run({"demo", "hilbert", "--sizes", "8,4"}).code, kExitInput);
}

TEST_F(CliTest, SuiteAndList) {
  const auto junit = path("j.xml");
  const auto r = run({"suite", "--name", "trivial", "--count", "3", "--junit", junit});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.report["result"]["passed"].get<bool>());
  EXPECT_TRUE(std::filesystem::exists(junit));
  const auto l = run({"list"});
  ASSERT_EQ(l.code, kExitOk);
  EXPECT_FALSE(l.report["result"]["suites"].empty());
  EXPECT_FALSE(l.report["result"]["invariants"].empty());
  EXPECT_NE(run({"suite", "--name", "nope"}).code, kExitOk);
}
