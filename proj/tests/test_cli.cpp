#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <sys/wait.h>

#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
};

// stderr is folded into stdout so messages can be checked too
Run run(const std::string& args) {
  const std::string cmd = std::string(BMMDET_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read(const fs::path& p) {
  const auto b = bmm::read_file_bytes(p);
  return {b.begin(), b.end()};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = bmm::testing::scratch_dir("cli");
    bmm::synth_corpus(dir_ / "corpus", 6, 11);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static std::string piece(int i) {
    char name[32];
    std::snprintf(name, sizeof(name), "piece-%04d.json", i);
    return (dir_ / "corpus" / name).string();
  }
  static fs::path dir_;
};
fs::path CliTest::dir_;

TEST_F(CliTest, CompareSelf) {
  const auto r = run("compare " + piece(0) + " " + piece(0));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["degree"].get<double>(), 1.0);
  EXPECT_EQ(j["params"]["l"], 16);
  EXPECT_FALSE(j["pairs"].empty());
}

TEST_F(CliTest, CompareEchoesFlags) {
  const auto r = run("compare " + piece(0) + " " + piece(1) + " --l 8 --r 0.5");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["params"]["l"], 8);
  EXPECT_EQ(j["params"]["r"], 0.5);
  EXPECT_GT(j["degree"].get<double>(), 0.0);
  EXPECT_LT(j["degree"].get<double>(), 1.0);
}

TEST_F(CliTest, ConfigFileThenFlags) {
  const auto cfg = dir_ / "cfg.json";
  bmm::write_file(cfg, R"({"l": 6, "theta": 0.7})");
  const auto r = run("compare " + piece(0) + " " + piece(1) + " --config " + cfg.string() + " --l 10");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["params"]["l"], 10);
  EXPECT_EQ(j["params"]["theta"], 0.7);
}

TEST_F(CliTest, ComparePretty) {
  const auto r = run("compare " + piece(2) + " " + piece(2) + " --pretty");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("plagiarism degree 1.0000"), std::string::npos);
}

TEST_F(CliTest, MissingFile) {
  const auto missing = (dir_ / "absent.mid").string();
  const auto r = run("compare " + missing + " " + piece(0));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("absent.mid"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run("compare " + piece(0) + " " + piece(0) + " --bogus").code, 3);
  EXPECT_EQ(run("compare " + piece(0) + " " + piece(0) + " --r 1.5").code, 3);
  EXPECT_EQ(run("rank " + piece(0) + " " + (dir_ / "corpus").string() + " --detector cosine").code, 3);
  EXPECT_EQ(run("").code, 3);
}

TEST_F(CliTest, RankTop) {
  const auto r = run("rank " + piece(3) + " " + (dir_ / "corpus").string() + " --top 1");
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  }
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].rfind("1\tpiece-0003\t", 0), 0u) << rows[0];
}

TEST_F(CliTest, RankUkkonenDescendingInUnitRange) {
  const auto corpus = (dir_ / "corpus").string();
  const auto r = run("rank " + piece(4) + " " + corpus + " --detector ukkonen --ngram 2");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("# detector=ukkonen"), std::string::npos);
  std::istringstream in(r.out);
  std::string line;
  double prev = 2.0;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const double s = std::stod(line.substr(line.rfind('\t') + 1));
    EXPECT_LE(s, prev);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    prev = s;
    ++n;
  }
  EXPECT_EQ(n, 6u);
  EXPECT_TRUE(fs::exists(bmm::stats_sidecar_path(corpus, 2)));
}

TEST_F(CliTest, GenAndEval) {
  const auto a = dir_ / "gen-a", b = dir_ / "gen-b";
  const auto corpus = (dir_ / "corpus").string();
  ASSERT_EQ(run("gen --corpus " + corpus + " --seed 5 --counts t=2,p=2,d=2 --out " + a.string()).code, 0);
  ASSERT_EQ(run("gen --corpus " + corpus + " --seed 5 --counts t=2,p=2,d=2 --out " + b.string()).code, 0);
  EXPECT_EQ(read(a / "manifest.json"), read(b / "manifest.json"));
  EXPECT_EQ(run("gen --corpus " + corpus + " --seed 5 --counts m=1 --out " + (dir_ / "gen-m").string()).code, 2);

  const auto r = run("eval --manifest " + (a / "manifest.json").string() +
                     " --detectors bmm,sum_common --json --out " + (dir_ / "table.json").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j, nlohmann::json::parse(read(dir_ / "table.json")));
  for (const char* d : {"bmm", "sum_common"}) {
    for (const char* t : {"transposition", "pitch_shift", "duration_variance"}) {
      EXPECT_EQ(j[d][t]["cases"], 2);
    }
  }
  const auto text = run("eval --manifest " + (a / "manifest.json").string());
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("ARI"), std::string::npos);
}

}  // namespace
