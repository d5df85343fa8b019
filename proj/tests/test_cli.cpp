// SPDX-License-Identifier: Apache-2.0
#include "cli_pipeline.hpp"

#include <gtest/gtest.h>

#include <illposed/illposed.hpp>

#include <filesystem>
#include <sstream>

using namespace illposed;
namespace fs = std::filesystem;

namespace {

struct Ran {
   int status;
   std::string out;
   std::string err;
};

Ran run(std::vector<std::string> args) {
   std::ostringstream out, err;
   const int status = cli::run(args, out, err);
   return {status, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
   void SetUp() override {
      const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
      dir = fs::temp_directory_path() / (std::string("illposed-cli-") + info->name());
      fs::remove_all(dir);
      fs::create_directories(dir);
   }
   void TearDown() override { fs::remove_all(dir); }

   std::string path(const char* name) const { return (dir / name).string(); }

   fs::path dir;
};

}  // namespace

TEST_F(CliTest, EverySubcommandIsDeterministic) {
   const auto results = pipeline::cli_determinism(dir);
   ASSERT_EQ(results.size(), 13U);
   for(const auto& [name, same] : results) {
      EXPECT_TRUE(same) << name;
   }
}

TEST_F(CliTest, PipelineSucceedsAndRoundtrips) {
   for(const auto& r : pipeline::run_cli_pipeline(dir)) {
      EXPECT_EQ(r.status, 0) << r.subcommand << ": " << r.err;
   }
   EXPECT_EQ(pipeline::slurp(dir / "sym.txt"), "deadbeef\n");
   EXPECT_EQ(pipeline::slurp(dir / "pke.txt"), "cafebabe\n");
   const std::string key = pipeline::slurp(dir / "sym.key");
   EXPECT_EQ(parse_error_key(Bytes(key.begin(), key.end())).params, ErrorParams::binomial(2, 0.5, 256));
   EXPECT_TRUE(pipeline::slurp(dir / "attack.csv").starts_with("# seed=03"));
   EXPECT_NE(pipeline::slurp(dir / "analogy.txt").find("op.present=1"), std::string::npos);
}

TEST_F(CliTest, SpectrumCsvShape) {
   ASSERT_EQ(run({"spectrum", "--n", "256", "--out", path("s.csv")}).status, 0);
   std::istringstream in(pipeline::slurp(dir / "s.csv"));
   std::string line;
   std::getline(in, line);
   EXPECT_EQ(line, "k,s_k");
   std::size_t rows = 0;
   double prev = 1e9;
   while(std::getline(in, line)) {
      ++rows;
      const auto comma = line.find(',');
      EXPECT_EQ(std::stoul(line.substr(0, comma)), rows);
      const double s = std::stod(line.substr(comma + 1));
      EXPECT_LT(s, prev);
      prev = s;
   }
   EXPECT_EQ(rows, 256U);
   const auto classified = run({"classify", "--csv", path("s.csv")});
   EXPECT_EQ(classified.status, 0);
   EXPECT_NE(classified.out.find("kind=mild"), std::string::npos);
}

TEST_F(CliTest, AmplifyTwiceIsIdentical) {
   const std::vector<std::string> args{"amplify", "--n", "256", "--sigma", "0.1", "--trials", "50", "--seed", "00"};
   const auto a = run(args);
   const auto b = run(args);
   EXPECT_EQ(a.status, 0);
   EXPECT_EQ(a.out, b.out);
   EXPECT_NE(a.out.find("seed=00"), std::string::npos);
   auto other = args;
   other.back() = "01";
   EXPECT_NE(run(other).out, a.out);
}

TEST_F(CliTest, SymmetricRoundtripWithExplicitLength) {
   ASSERT_EQ(run({"keygen-sym", "--n", "256", "--seed", "aa", "--out", path("k")}).status, 0);
   ASSERT_EQ(run({"encrypt-sym", "--key", path("k"), "--msg", "b", "--t", "3", "--encoding", "map1-haar", "--nonce",
                  "ffffffffffffffffffffffffffffffff", "--out", path("c")})
                .status,
             0);
   const auto d = run({"decrypt-sym", "--key", path("k"), "--in", path("c")});
   EXPECT_EQ(d.status, 0);
   EXPECT_EQ(d.out, "a\n");  // 101 -> hex of 1010
}

TEST_F(CliTest, UsageErrorsExitTwo) {
   EXPECT_EQ(run({}).status, 2);
   EXPECT_EQ(run({"frobnicate"}).status, 2);
   EXPECT_EQ(run({"spectrum", "--n", "0"}).status, 2);
   EXPECT_EQ(run({"spectrum", "--bogus"}).status, 2);
   EXPECT_EQ(run({"amplify", "--n", "64"}).status, 2);  // --sigma is required
   EXPECT_EQ(run({"encrypt-sym", "--msg", "aa"}).status, 2);
   EXPECT_EQ(run({"spectrum", "--help"}).status, 0);
}

TEST_F(CliTest, DomainErrorsExitOneAndNameTheInvariant) {
   auto floor = run({"keygen-sym", "--n", "32", "--seed", "01", "--out", path("k")});
   EXPECT_EQ(floor.status, 1);
   EXPECT_NE(floor.err.find("key-space floor"), std::string::npos);

   auto mod = run({"encode", "--msg", "a5", "--n", "60"});
   EXPECT_EQ(mod.status, 1);
   EXPECT_NE(mod.err.find("multiple of t"), std::string::npos);

   auto map1 = run({"encode", "--msg", "abcdef", "--encoding", "map1-fourier", "--n", "64"});
   EXPECT_EQ(map1.status, 1);
   EXPECT_NE(map1.err.find("Map1 enumeration infeasible"), std::string::npos);

   auto lwe = run({"lwe-demo", "--q", "16"});
   EXPECT_EQ(lwe.status, 1);
   EXPECT_NE(lwe.err.find("not prime"), std::string::npos);

   auto guard = run({"lwe-demo", "--q", "101", "--m", "4", "--n", "8", "--trials", "1"});
   EXPECT_EQ(guard.status, 1);
   EXPECT_NE(guard.err.find("exceeds"), std::string::npos);

   EXPECT_EQ(run({"attack", "--method", "ridge:3"}).status, 1);
   EXPECT_EQ(run({"decrypt-sym", "--key", path("missing"), "--in", path("missing")}).status, 1);
   EXPECT_EQ(run({"encrypt-sym", "--key", path("missing"), "--msg", "aa", "--nonce", "00", "--out", path("c")}).status,
             1);
}

TEST_F(CliTest, ConfigFileSuppliesOptions) {
   {
      std::ofstream cfg(dir / "run.toml");
      cfg << "[amplify]\nn = 64\nsigma = 0.05\ntrials = 4\nseed = \"0a\"\n";
   }
   const auto from_file = run({"--config", path("run.toml"), "amplify"});
   const auto from_flags = run({"amplify", "--n", "64", "--sigma", "0.05", "--trials", "4", "--seed", "0a"});
   EXPECT_EQ(from_file.status, 0) << from_file.err;
   EXPECT_EQ(from_file.out, from_flags.out);
}
