#include <gtest/gtest.h>

#include <random>

#include "bmm/eval.hpp"
#include "test_support.hpp"

namespace bmm {
namespace {

TEST(Rank, ScoresDescendingTiesById) {
  const std::vector<std::string> ids = {"c", "a", "b", "d"};
  const std::vector<double> scores = {0.5, 0.5, 0.9, 0.1};
  const auto r = rank_scores(ids, scores);
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[0].id, "b");
  EXPECT_EQ(r[1].id, "a");
  EXPECT_EQ(r[2].id, "c");
  EXPECT_EQ(r[3].id, "d");
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(r[i].rank, i + 1);
}

TEST(Rank, Exclusion) {
  const std::vector<std::string> ids = {"a", "b", "c"};
  const std::vector<double> scores = {0.1, 0.9, 0.5};
  const std::vector<bool> exclude = {false, true, false};
  const auto r = rank_scores(ids, scores, &exclude);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].id, "c");
}

TEST(Rank, IdenticalCandidateFirstForEveryDetector) {
  std::mt19937_64 gen(1);
  std::vector<MelodySequence> pool;
  for (int i = 0; i < 8; ++i) pool.push_back(testing::random_piece(gen, "c" + std::to_string(i), 30));
  Config cfg;
  cfg.clip_length = 8;
  cfg.threads = 2;
  for (auto d : {Detector::bmm, Detector::sum_common, Detector::ukkonen, Detector::tfidf, Detector::tversky}) {
    const auto r = rank_query(pool[3], pool, d, cfg);
    EXPECT_EQ(r[0].id, "c3") << to_string(d);
  }
}

TEST(Rank, SingleCandidateAndEmpty) {
  std::mt19937_64 gen(2);
  const std::vector<MelodySequence> one = {testing::random_piece(gen, "only", 10)};
  const auto r = rank_query(testing::random_piece(gen, "q", 10), one, Detector::bmm, Config{});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].rank, 1u);
  try {
    rank_query(one[0], std::vector<MelodySequence>{}, Detector::bmm, Config{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_input);
  }
}

TEST(Rank, UnknownDetector) {
  try {
    parse_detector("cosine");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_detector);
  }
  EXPECT_EQ(parse_detectors("bmm,tversky"), (std::vector<Detector>{Detector::bmm, Detector::tversky}));
}

TEST(Metrics, Examples) {
  EXPECT_EQ(ari(std::vector<std::size_t>{1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(ari(std::vector<std::size_t>{1, 1, 2}), 4.0 / 3.0);
  EXPECT_EQ(ari(std::vector<std::size_t>{5}), 5.0);
  EXPECT_DOUBLE_EQ(accuracy(std::vector<std::size_t>{1, 1, 2}), 2.0 / 3.0);
  EXPECT_EQ(accuracy(std::vector<std::size_t>{1}), 1.0);
  EXPECT_EQ(accuracy(std::vector<std::size_t>{3, 2}), 0.0);
  EXPECT_THROW(ari(std::vector<std::size_t>{}), Error);
  EXPECT_THROW(accuracy(std::vector<std::size_t>{}), Error);
}

TEST(Metrics, AccuracyOneIffAriOne) {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<std::size_t> rank(1, 3), len(1, 6);
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::size_t> r(len(gen));
    for (auto& x : r) x = rank(gen);
    EXPECT_EQ(accuracy(r) == 1.0, ari(r) == 1.0);
    EXPECT_GE(ari(r), 1.0);
    EXPECT_LE(accuracy(r), 1.0);
  }
}

TEST(Metrics, RanksInvariantUnderMonotoneTransform) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::string> ids;
  for (int i = 0; i < 20; ++i) ids.push_back("p" + std::to_string(i));
  for (int t = 0; t < 100; ++t) {
    std::vector<double> s(20), s2(20);
    for (std::size_t i = 0; i < 20; ++i) {
      s[i] = u(gen);
      s2[i] = std::exp(3.0 * s[i]) - 7.0;
    }
    const auto a = rank_scores(ids, s), b = rank_scores(ids, s2);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(a[i].id, b[i].id);
  }
}

class EvaluateTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = testing::scratch_dir("eval");
    synth_corpus(dir_ / "corpus", 8, 3);
    gen_dataset(dir_ / "corpus", dir_ / "cases", parse_counts("t=3,p=3,d=3"), 4);
  }
  static void TearDownTestSuite() { std::filesystem::remove_all(dir_); }
  static std::filesystem::path dir_;
};
std::filesystem::path EvaluateTest::dir_;

TEST_F(EvaluateTest, TableShape) {
  Config cfg;
  const auto detectors = parse_detectors("bmm,ukkonen");
  const auto t = evaluate(load_manifest(dir_ / "cases" / "manifest.json"), detectors, cfg);
  EXPECT_EQ(t.corpus_size, 8u);
  EXPECT_TRUE(t.errors.empty());
  ASSERT_EQ(t.cases.size(), 9u);
  for (const auto& c : t.cases) {
    EXPECT_EQ(c.ranks.size(), 2u);
    EXPECT_EQ(c.pool_size, c.type == PlagiarismType::transposition ? 8u : 7u);
    for (auto [d, r] : c.ranks) {
      EXPECT_GE(r, 1u);
      EXPECT_LE(r, c.pool_size);
    }
  }
  const auto j = table_to_json(t);
  for (const char* d : {"bmm", "ukkonen"}) {
    EXPECT_EQ(j[d].size(), 4u);  // three types plus "all"
    EXPECT_EQ(j[d]["all"]["cases"], 9);
    EXPECT_FALSE(j[d].contains("melody_change"));
  }
  EXPECT_EQ(j["corpus_size"], 8);
  EXPECT_NE(table_to_text(t).find("transposition"), std::string::npos);
}

TEST_F(EvaluateTest, Deterministic) {
  Config cfg;
  cfg.threads = 1;
  const auto m = load_manifest(dir_ / "cases" / "manifest.json");
  const auto detectors = parse_detectors("bmm,tfidf");
  const auto a = table_to_json(evaluate(m, detectors, cfg)).dump();
  cfg.threads = 4;
  EXPECT_EQ(table_to_json(evaluate(m, detectors, cfg)).dump(), a);
}

TEST_F(EvaluateTest, MissingOriginalIsRecorded) {
  auto m = load_manifest(dir_ / "cases" / "manifest.json");
  m.cases[0].original = "nope.json";
  const auto t = evaluate(m, std::vector<Detector>{Detector::bmm}, Config{});
  ASSERT_EQ(t.errors.size(), 1u);
  EXPECT_NE(t.errors[0].message.find("nope.json"), std::string::npos);
  EXPECT_TRUE(t.cases[0].ranks.empty());
}

TEST(Evaluate, SinglePieceCorpusRanksFirst) {
  const auto dir = testing::scratch_dir("eval-one");
  synth_corpus(dir / "corpus", 1, 5);
  gen_dataset(dir / "corpus", dir / "cases", parse_counts("t=2"), 1);
  const auto t = evaluate(load_manifest(dir / "cases" / "manifest.json"), parse_detectors("bmm,sum_common"), Config{});
  for (auto d : t.detectors) {
    const std::array one{PlagiarismType::transposition};
    const auto m = t.metrics(d, one);
    ASSERT_TRUE(m);
    EXPECT_EQ(m->ari, 1.0);
    EXPECT_EQ(m->acc, 1.0);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace bmm
