#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bmm/ngram.hpp"
#include "test_support.hpp"

namespace bmm {
namespace {

EncodedSequence intervals(std::vector<int> d, std::string id = "e") {
  EncodedSequence e;
  e.id = std::move(id);
  for (int x : d) e.elements.push_back({x, 0.0, false});
  return e;
}

NGramProfile counts(std::map<NGram, std::size_t> c, std::string id = "p") {
  return NGramProfile{std::move(id), 1, std::move(c)};
}

template <typename F>
void expect_code(ErrorCode code, F&& f) {
  try {
    f();
    FAIL() << "no throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code);
  }
}

TEST(Profile, CountsWindows) {
  const auto p = profile(intervals({2, 2, -4, 2, 2}), 2);
  EXPECT_EQ(p.total(), 4u);
  EXPECT_EQ(p.count({2, 2}), 2u);
  EXPECT_EQ(p.count({2, -4}), 1u);
  EXPECT_EQ(p.count({-4, 2}), 1u);
  EXPECT_EQ(p.count({0, 0}), 0u);
}

TEST(Profile, ShorterThanOrder) {
  EXPECT_EQ(profile(intervals({1, 2}), 3).total(), 0u);
}

TEST(Profile, InvalidOrder) {
  expect_code(ErrorCode::invalid_order, [] { profile(intervals({1}), 0); });
}

TEST(Profile, TotalProperty) {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 100; ++t) {
    const auto e = encode_relative(testing::random_piece(gen, "p", 2 + t % 40));
    for (std::size_t n = 1; n <= 5; ++n) {
      const auto expected = e.size() >= n ? e.size() - n + 1 : 0;
      EXPECT_EQ(profile(e, n).total(), expected);
    }
  }
}

TEST(SumCommon, Examples) {
  const auto a = counts({{{1}, 2}, {{2}, 1}});
  EXPECT_DOUBLE_EQ(sum_common(a, a), 1.0);
  EXPECT_EQ(sum_common(a, counts({{{3}, 4}})), 0.0);
  EXPECT_EQ(sum_common(a, counts({})), 0.0);
  // shared {1}: 2 + 1 out of 2 + 1 + 1 + 5
  EXPECT_DOUBLE_EQ(sum_common(a, counts({{{1}, 1}, {{7}, 5}})), 3.0 / 9.0);
  expect_code(ErrorCode::both_empty, [] { sum_common(counts({}), counts({})); });
}

TEST(Ukkonen, Examples) {
  EXPECT_DOUBLE_EQ(ukkonen(counts({{{5}, 2}}), counts({{{5}, 1}})), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(ukkonen(counts({{{5}, 2}}), counts({{{5}, 2}})), 1.0);
  EXPECT_EQ(ukkonen(counts({{{5}, 2}}), counts({{{6}, 2}})), 0.0);
  expect_code(ErrorCode::both_empty, [] { ukkonen(counts({}), counts({})); });
}

CorpusStats stats_of(std::vector<NGramProfile> ps) { return build_stats(ps); }

TEST(Idf, Values) {
  const auto s = stats_of({counts({{{1}, 1}, {{2}, 1}}), counts({{{1}, 3}})});
  EXPECT_DOUBLE_EQ(idf(s, {1}), 0.0);
  EXPECT_DOUBLE_EQ(idf(s, {2}), std::log(2.0));
  EXPECT_DOUBLE_EQ(idf(s, {9}), std::log(2.0));
  for (const auto& [g, df] : s.doc_freq) {
    EXPECT_GE(df, 1u);
    EXPECT_LE(df, s.corpus_size);
  }
}

TEST(Tfidf, Examples) {
  // corpus of 4 where {1} and {2} each appear once: both idf ln 4
  const auto a = counts({{{1}, 1}});
  const auto b = counts({{{1}, 1}, {{2}, 1}});
  const auto s = stats_of({a, counts({{{2}, 1}}), counts({{{3}, 1}}), counts({{{3}, 1}})});
  EXPECT_NEAR(tfidf_correlation(a, b, s), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(tfidf_correlation(a, a, s), 1.0, 1e-12);
  EXPECT_EQ(tfidf_correlation(a, counts({{{3}, 1}}), s), 0.0);
}

TEST(Tversky, Examples) {
  const auto a = counts({{{1}, 1}});
  const auto b = counts({{{1}, 1}, {{2}, 1}});
  const auto s = stats_of({a, counts({{{2}, 1}}), counts({{{3}, 1}}), counts({{{3}, 1}})});
  EXPECT_NEAR(tversky_equal(a, b, s), 0.5, 1e-12);
  EXPECT_NEAR(tversky_equal(b, b, s), 1.0, 1e-12);
  const auto everywhere = stats_of({a, a});
  expect_code(ErrorCode::all_zero_weights, [&] { tversky_equal(a, a, everywhere); });
}

TEST(Measures, SymmetricAndBounded) {
  std::mt19937_64 gen(9);
  std::vector<NGramProfile> ps;
  for (int i = 0; i < 30; ++i) ps.push_back(profile(encode_relative(testing::random_piece(gen, "p", 3 + i)), 2));
  const auto s = build_stats(ps);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = 0; j < ps.size(); ++j) {
      for (auto f : {+[](const NGramProfile& a, const NGramProfile& b, const CorpusStats&) { return sum_common(a, b); },
                     +[](const NGramProfile& a, const NGramProfile& b, const CorpusStats&) { return ukkonen(a, b); },
                     +[](const NGramProfile& a, const NGramProfile& b, const CorpusStats& st) {
                       return tfidf_correlation(a, b, st);
                     },
                     +[](const NGramProfile& a, const NGramProfile& b, const CorpusStats& st) {
                       return tversky_equal(a, b, st);
                     }}) {
        const double x = f(ps[i], ps[j], s);
        EXPECT_NEAR(x, f(ps[j], ps[i], s), 1e-12);
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, 1.0 + 1e-12);
      }
    }
  }
}

TEST(Stats, JsonRoundTrip) {
  std::mt19937_64 gen(10);
  std::vector<NGramProfile> ps;
  for (int i = 0; i < 10; ++i) ps.push_back(profile(encode_relative(testing::random_piece(gen, "p" + std::to_string(i), 20)), 3));
  const auto s = build_stats(ps);
  const auto back = stats_from_json(stats_to_json(s));
  EXPECT_EQ(back.order, s.order);
  EXPECT_EQ(back.corpus_size, s.corpus_size);
  EXPECT_EQ(back.doc_freq, s.doc_freq);
  EXPECT_EQ(back.ids, s.ids);
  EXPECT_EQ(detail::ngram_key({2, 0, -4}), "2,0,-4");
  EXPECT_EQ(detail::parse_ngram_key("2,0,-4"), (NGram{2, 0, -4}));
}

TEST(Stats, SidecarFile) {
  const auto dir = testing::scratch_dir("sidecar");
  const auto corpus = dir / "corpus";
  std::filesystem::create_directories(corpus);
  const auto path = stats_sidecar_path(corpus, 3);
  EXPECT_EQ(path.parent_path(), dir);
  const auto s = stats_of({counts({{{1}, 1}}), counts({{{2}, 2}})});
  save_stats(s, path);
  EXPECT_EQ(load_stats(path).doc_freq, s.doc_freq);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace bmm
