#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/asio.hpp>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "support/glb_fixtures.hpp"

namespace arreg::cli {
namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "arreg");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("arreg_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  std::filesystem::path dir_;
};

TEST_F(CliTest, SynthIsDeterministic) {
  const std::vector<std::string> base{"synth", "--dof", "yaw", "--frames", "90", "--seed", "42", "--noise-rot-deg",
                                      "2", "--noise-trans", "0.01"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", path("a.jsonl")});
  b.insert(b.end(), {"--out", path("b.jsonl")});
  ASSERT_EQ(run_cli(a).code, kOk);
  ASSERT_EQ(run_cli(b).code, kOk);
  const std::string text = slurp(path("a.jsonl"));
  EXPECT_EQ(text, slurp(path("b.jsonl")));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 91);
}

TEST_F(CliTest, SynthUsageErrors) {
  EXPECT_EQ(run_cli({"synth", "--max-deg", "0"}).code, kUsage);
  EXPECT_EQ(run_cli({"synth", "--frames", "1"}).code, kUsage);
  EXPECT_EQ(run_cli({"synth", "--dof", "sideways"}).code, kUsage);
  EXPECT_EQ(run_cli({"synth", "--scale-mismatch", "1.2"}).code, kUsage);
  EXPECT_EQ(run_cli({"synth", "--frames", "ten"}).code, kUsage);
  EXPECT_EQ(run_cli({}).code, kUsage);
  EXPECT_EQ(run_cli({"--help"}).code, kOk);
}

TEST_F(CliTest, SynthUnwritableOutputIsIoError) {
  EXPECT_EQ(run_cli({"synth", "--out", path("missing_dir/x.jsonl")}).code, kRuntime);
}

TEST_F(CliTest, ReplayNoiseFreeSelfSessionHasUnitIou) {
  ASSERT_EQ(run_cli({"synth", "--dof", "pitch", "--out", path("p.jsonl")}).code, kOk);
  const CliRun r = run_cli({"replay", path("p.jsonl"), "--auto-scale", "off"});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::istringstream csv(r.out);
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "seq,t_ms,dof_label,angle_deg,ratio_w,ratio_h,e_w_pct,e_h_pct,iou");
  int rows = 0;
  while (std::getline(csv, line)) {
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "1") << line;
    ++rows;
  }
  EXPECT_EQ(rows, 90);
  const auto summary = nlohmann::json::parse(r.err);
  EXPECT_EQ(summary["n_frames"], 90);
}

TEST_F(CliTest, ReplayOneShotRecoversScaleMismatch) {
  ASSERT_EQ(run_cli({"synth", "--dof", "yaw", "--scale-mismatch", "1.25,0.8", "--out", path("m.jsonl")}).code, kOk);
  ASSERT_EQ(run_cli({"replay", path("m.jsonl"), "--auto-scale", "oneshot", "--metrics", path("m.csv"), "--summary",
                     path("m.json")})
                .code,
            kOk);
  std::istringstream csv(slurp(path("m.csv")));
  std::string header, first;
  std::getline(csv, header);
  std::getline(csv, first);
  std::vector<std::string> cells;
  std::stringstream ss(first);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  ASSERT_EQ(cells.size(), 9u);
  EXPECT_LE(std::stod(cells[6]), 1e-4);
  EXPECT_LE(std::stod(cells[7]), 1e-4);
  EXPECT_TRUE(nlohmann::json::parse(slurp(path("m.json"))).contains("per_dof"));
}

TEST_F(CliTest, ReplayIsDeterministic) {
  ASSERT_EQ(run_cli({"synth", "--dof", "roll", "--noise-rot-deg", "2", "--seed", "3", "--out", path("r.jsonl")}).code,
            kOk);
  const CliRun a = run_cli({"replay", path("r.jsonl"), "--auto-scale", "continuous", "--alpha", "0.6"});
  const CliRun b = run_cli({"replay", path("r.jsonl"), "--auto-scale", "continuous", "--alpha", "0.6"});
  ASSERT_EQ(a.code, kOk);
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, ReplayCorruptLineSevenNamesTheLine) {
  ASSERT_EQ(run_cli({"synth", "--frames", "10", "--out", path("c.jsonl")}).code, kOk);
  std::istringstream in(slurp(path("c.jsonl")));
  std::ostringstream out;
  int n = 0;
  for (std::string line; std::getline(in, line);) {
    out << (++n == 7 ? std::string("{\"seq\": 6, \"pose\": [1, 2") : line) << '\n';
  }
  std::ofstream(path("c.jsonl"), std::ios::binary) << out.str();
  const CliRun r = run_cli({"replay", path("c.jsonl")});
  EXPECT_EQ(r.code, kInput);
  EXPECT_NE(r.err.find("line 7"), std::string::npos) << r.err;
}

TEST_F(CliTest, ReplayErrors) {
  EXPECT_EQ(run_cli({"replay", path("absent.jsonl")}).code, kRuntime);
  ASSERT_EQ(run_cli({"synth", "--frames", "4", "--out", path("s.jsonl")}).code, kOk);
  EXPECT_NE(run_cli({"replay", path("s.jsonl"), "--model", path("nope.glb")}).code, kOk);
  EXPECT_EQ(run_cli({"replay", path("s.jsonl"), "--auto-scale", "sometimes"}).code, kUsage);
  EXPECT_EQ(run_cli({"replay", path("s.jsonl"), "--alpha", "0"}).code, kUsage);
  std::ofstream(path("v.jsonl")) << R"({"format_version":9,"image_w":1,"image_h":1,"fov_v_deg":50,"model_ref":"x"})"
                                 << '\n';
  EXPECT_EQ(run_cli({"replay", path("v.jsonl")}).code, kInput);
}

TEST_F(CliTest, GlbInfo) {
  const auto bytes = fixtures::unit_cube_glb();
  std::ofstream(path("cube.glb"), std::ios::binary)
      .write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  const CliRun r = run_cli({"glb-info", path("cube.glb")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "8 vertices, AABB [-0.5,0.5]^3");
  EXPECT_NE(r.out.find("primitives: 1"), std::string::npos);

  std::ofstream(path("notglb.bin"), std::ios::binary) << "JSON and some other bytes";
  const CliRun bad = run_cli({"glb-info", path("notglb.bin")});
  EXPECT_EQ(bad.code, kInput);
  EXPECT_NE(bad.err.find("BadMagic"), std::string::npos) << bad.err;
  EXPECT_EQ(run_cli({"glb-info", path("missing.glb")}).code, kRuntime);
}

TEST_F(CliTest, ServeOnOccupiedPortExitsThree) {
  boost::asio::io_context io;
  boost::asio::ip::tcp::acceptor hog(io, {boost::asio::ip::make_address("127.0.0.1"), 0});
  const CliRun r = run_cli({"serve", "--port", std::to_string(hog.local_endpoint().port()), "--tcp-port", "0"});
  EXPECT_EQ(r.code, kRuntime);
}

}  // namespace
}  // namespace arreg::cli
