#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dtph/cli.hpp"
#include "dtph/error.hpp"
#include "dtph/system_io.hpp"
#include "support.hpp"

using namespace dtph;
using namespace dtph::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ToolRun {
  int code = -1;
  std::string out, err;
};

ToolRun tool(std::vector<std::string> args) {
  args.insert(args.begin(), "dtph");
  std::ostringstream out, err;
  ToolRun r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("dtph_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write_system(const std::string& name, const DescriptorSystem& s) const {
    write_text_file(path(name), system_to_json(s).dump(2));
    return path(name);
  }

  std::string write(const std::string& name, const std::string& text) const {
    write_text_file(path(name), text);
    return path(name);
  }

  static json read_json(const std::string& p) {
    std::ifstream in(p);
    return json::parse(in);
  }

  fs::path dir_;
};

}  // namespace

TEST(ParseComplex, Forms) {
  EXPECT_EQ(cli::parse_complex("2"), Scalar(2, 0));
  EXPECT_EQ(cli::parse_complex("-0.5"), Scalar(-0.5, 0));
  EXPECT_EQ(cli::parse_complex("1+2j"), Scalar(1, 2));
  EXPECT_EQ(cli::parse_complex("1.5-0.25i"), Scalar(1.5, -0.25));
  EXPECT_EQ(cli::parse_complex("3j"), Scalar(0, 3));
  EXPECT_EQ(cli::parse_complex("-j"), Scalar(0, -1));
  EXPECT_EQ(cli::parse_complex("1e-3+2e+1j"), Scalar(1e-3, 20));
  EXPECT_EQ(cli::parse_complex(" 4 "), Scalar(4, 0));
  for (const char* bad : {"", "x", "1+", "1+2k", "2..", "j1"}) EXPECT_THROW(cli::parse_complex(bad), Error) << bad;
}

TEST_F(Cli, DiscretizeScalar) {
  const std::string in = write_system("c.json", DescriptorSystem::scalar(1, -1, 1, 1, 0, TimeDomain::Continuous));
  const ToolRun r = tool({"discretize", in, "--alpha", "2", "--out", path("d.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = read_json(path("d.json"));
  EXPECT_EQ(j["time_domain"], "discrete");
  EXPECT_EQ(j["operation"], "discretize");
  EXPECT_EQ(j["generator"], "dtph " + tool_version());
  EXPECT_EQ(j["input_hash"], load_system_file(in).hash);
  const SystemFile d = load_system_file(path("d.json"));
  EXPECT_NEAR(std::abs(d.system.A(0, 0) - 1.0 / 3.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(d.system.B(0, 0) - 2.0 / 3.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(d.system.C(0, 0) - 2.0 / 3.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(d.system.D(0, 0) - 1.0 / 3.0), 0.0, 1e-14);

  // discretizing a discrete system is a usage error
  EXPECT_EQ(tool({"discretize", path("d.json")}).code, cli::kUsageError);
}

TEST_F(Cli, CayleyTwiceRestores) {
  Matrix blk = random_matrix(4, 4, false);
  blk *= 0.5 / spectral_norm(blk);
  const DescriptorSystem s = DescriptorSystem::standard(blk.topLeftCorner(2, 2), blk.topRightCorner(2, 2),
                                                        blk.bottomLeftCorner(2, 2), blk.bottomRightCorner(2, 2));
  const std::string in = write_system("s.json", s);
  ASSERT_EQ(tool({"cayley", in, "--direction", "imp-to-scat", "--out", path("t.json")}).code, 0);
  ASSERT_EQ(tool({"cayley", path("t.json"), "--direction", "scat-to-imp", "--out", path("u.json")}).code, 0);
  const DescriptorSystem back = load_system_file(path("u.json")).system;
  EXPECT_LT((back.A - s.A).norm(), 1e-12);
  EXPECT_LT((back.B - s.B).norm(), 1e-12);
  EXPECT_LT((back.C - s.C).norm(), 1e-12);
  EXPECT_LT((back.D - s.D).norm(), 1e-12);

  // I + D singular
  const std::string bad = write_system("bad.json", DescriptorSystem::scalar(1, 0.5, 1, 1, -1));
  const ToolRun r = tool({"cayley", bad, "--direction", "imp-to-scat"});
  EXPECT_EQ(r.code, cli::kNumericalFailure);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(Cli, SimulateHalvingState) {
  const std::string in = write_system("h.json", DescriptorSystem::scalar(1, 0.5, 0.5, 0, 1));
  const ToolRun r = tool({"simulate", in, "--input", "zero", "--x0", "1", "--steps", "6", "--storage", "scattering",
                      "--out-csv", path("traj.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream csv(path("traj.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("# generator dtph", 0), 0u);
  EXPECT_NE(line.find(load_system_file(in).hash), std::string::npos);
  std::vector<double> xs;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#' || !std::isdigit(static_cast<unsigned char>(line[0]))) continue;
    std::istringstream is(line);
    std::string k, x;
    std::getline(is, k, ',');
    std::getline(is, x, ',');
    xs.push_back(std::stod(x));
  }
  ASSERT_EQ(xs.size(), 6u);
  for (std::size_t k = 0; k < xs.size(); ++k) EXPECT_DOUBLE_EQ(xs[k], std::ldexp(1.0, -static_cast<int>(k)));
  const json audit = json::parse(r.out);
  EXPECT_TRUE(audit["dissipative"].get<bool>());
}

TEST_F(Cli, SimulateReadsInputCsv) {
  const std::string in = write_system("s.json", DescriptorSystem::scalar(1, 0, 1, 1, 0));
  const std::string u = write("u.csv", "u0\n1\n2\n3\n");
  const ToolRun r = tool({"simulate", in, "--input", u});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# generator"), std::string::npos);
  // three input rows, steps requested beyond them
  EXPECT_EQ(tool({"simulate", in, "--input", u, "--steps", "5"}).code, cli::kUsageError);
  EXPECT_EQ(tool({"simulate", in, "--x0", "1,2"}).code, cli::kUsageError);
}

TEST_F(Cli, ClassifyOutputsAndAssertions) {
  const std::string in = write_system("z.json", DescriptorSystem::scalar(1, 0.5, 0.5, 0, 1));
  ToolRun r = tool({"classify", in, "--format", "json", "--out", path("rep.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j, read_json(path("rep.json")));
  EXPECT_EQ(j["verdicts"]["d-sKYP"]["value"], true);
  EXPECT_EQ(j["verdicts"]["d-spH"]["value"], false);
  EXPECT_EQ(j["generator"], "dtph " + tool_version());

  EXPECT_EQ(tool({"classify", in, "--assert", "d-sKYP,d-sPa,audit"}).code, 0);
  r = tool({"classify", in, "--format", "table", "--assert", "d-sKYP,d-spH"});
  EXPECT_EQ(r.code, cli::kAssertionFailed);
  EXPECT_NE(r.err.find("d-spH"), std::string::npos);
  EXPECT_EQ(tool({"classify", in, "--assert", "no-such-property"}).code, cli::kUsageError);
}

TEST_F(Cli, ToPh) {
  const std::string good = write_system("g.json", DescriptorSystem::scalar(1, 0, 1, 1, 0));
  ToolRun r = tool({"to-ph", good, "--assert"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_TRUE(j["is_ph"].get<bool>());
  EXPECT_TRUE(j.contains("weight"));
  EXPECT_TRUE(j.contains("A"));

  const std::string bad = write_system("b.json", DescriptorSystem::scalar(1, 0.5, 0.5, 0, 1));
  r = tool({"to-ph", bad, "--out", path("b_ph.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_FALSE(read_json(path("b_ph.json"))["is_ph"].get<bool>());
  EXPECT_EQ(tool({"to-ph", bad, "--assert"}).code, cli::kAssertionFailed);
}

TEST_F(Cli, TransferPointsAndRealness) {
  const std::string in = write_system("t.json", DescriptorSystem::scalar(1, 0.5, 1, 1, 0));
  ToolRun r = tool({"transfer", in, "--points", "2,1+1j,0.5", "--realness", "bounded"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_EQ(j["points"].size(), 3u);
  // T(z) = 1 / (z - 0.5)
  EXPECT_NEAR(j["points"][0]["T"][0][0].get<double>(), 1.0 / 1.5, 1e-14);
  EXPECT_TRUE(j["points"][2].contains("error"));
  EXPECT_TRUE(j["proper"]["proper"].get<bool>());
  // |T(1)| = 2 > 1
  EXPECT_FALSE(j["realness"]["bounded"]["holds_on_grid"].get<bool>());
  EXPECT_EQ(tool({"transfer", in, "--realness", "bounded", "--assert"}).code, cli::kAssertionFailed);
  EXPECT_EQ(tool({"--jobs", "2", "transfer", in, "--grid", "--realness", "none"}).code, 0);
}

TEST_F(Cli, UsageAndParseErrors) {
  EXPECT_EQ(tool({}).code, cli::kUsageError);
  EXPECT_EQ(tool({"frobnicate"}).code, cli::kUsageError);
  EXPECT_EQ(tool({"classify", path("missing.json")}).code, cli::kUsageError);
  EXPECT_EQ(tool({"classify", write("broken.json", "{\"A\": [[1]")}).code, cli::kUsageError);
  EXPECT_EQ(tool({"cayley", write_system("x.json", DescriptorSystem::scalar(1, 0.5, 1, 1, 0))}).code,
            cli::kUsageError);
  EXPECT_EQ(tool({"--tol-rank", "abc", "classify", path("x.json")}).code, cli::kUsageError);
  EXPECT_EQ(tool({"--help"}).code, 0);
  EXPECT_EQ(tool({"--version"}).code, 0);
}

TEST(CliData, NamedSystems) {
  const std::string dir = DTPH_DATA_DIR;
  const std::vector<std::pair<std::string, std::string>> expect = {
      {"uncontrollable_positive_real", "d-PR,audit"},
      {"uncontrollable_bounded_real", "d-BR,audit"},
      {"only_zero_storage", "d-sKYP,d-sPa,audit"},
      {"pure_algebraic", "regular,d-iPa"},
      {"lossless_shift", "d-spH,d-sKYP,d-BR,stable,audit"},
      {"nilpotent_shift", "regular"},
  };
  for (const auto& [name, props] : expect)
    EXPECT_EQ(tool({"classify", dir + "/" + name + ".json", "--format", "json", "--assert", props}).code, 0) << name;
  EXPECT_EQ(tool({"classify", dir + "/only_zero_storage.json", "--assert", "d-spH"}).code, cli::kAssertionFailed);
  EXPECT_EQ(tool({"classify", dir + "/uncontrollable_bounded_real.json", "--assert", "d-sKYP"}).code,
            cli::kAssertionFailed);
  EXPECT_EQ(tool({"classify", dir + "/jordan_block.json", "--assert", "stable"}).code, cli::kAssertionFailed);
  EXPECT_EQ(tool({"cayley", dir + "/pure_algebraic.json", "--direction", "imp-to-scat"}).code, cli::kNumericalFailure);
  EXPECT_EQ(tool({"discretize", dir + "/damped_oscillator.json", "--alpha", "20"}).code, 0);
}
