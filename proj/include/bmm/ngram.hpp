#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bmm/encode.hpp"
#include "bmm/error.hpp"
#include "bmm/notelist.hpp"

namespace bmm {

/// Contiguous run of interval (dpitch) values.
using NGram = std::vector<int>;

struct NGramProfile {
  std::string id;
  std::size_t order = 3;
  std::map<NGram, std::size_t> counts;

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& [g, c] : counts) t += c;
    return t;
  }
  std::size_t count(const NGram& g) const {
    auto it = counts.find(g);
    return it == counts.end() ? 0 : it->second;
  }
};

/// Document frequencies over a reference corpus.
struct CorpusStats {
  std::size_t order = 3;
  std::size_t corpus_size = 0;
  std::map<NGram, std::size_t> doc_freq;
  /// Piece ids the statistics were built from.
  std::vector<std::string> ids;
};

inline NGramProfile profile(const EncodedSequence& enc, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::invalid_order, "n-gram order must be >= 1");
  NGramProfile p;
  p.id = enc.id;
  p.order = n;
  if (enc.size() < n) return p;
  for (std::size_t s = 0; s + n <= enc.size(); ++s) {
    NGram g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = enc.elements[s + k].dpitch;
    ++p.counts[g];
  }
  return p;
}

inline CorpusStats build_stats(std::span<const NGramProfile> profiles) {
  CorpusStats stats;
  stats.corpus_size = profiles.size();
  if (!profiles.empty()) stats.order = profiles.front().order;
  for (const auto& p : profiles) {
    stats.ids.push_back(p.id);
    for (const auto& [g, c] : p.counts) ++stats.doc_freq[g];
  }
  return stats;
}

/// ln(corpus size / document frequency); unseen n-grams count as frequency 1.
inline double idf(const CorpusStats& stats, const NGram& g) {
  if (stats.corpus_size == 0) return 0.0;
  auto it = stats.doc_freq.find(g);
  const std::size_t df = it == stats.doc_freq.end() ? 1 : it->second;
  return std::log(static_cast<double>(stats.corpus_size) / static_cast<double>(df));
}

/// Share of all n-gram occurrences that belong to n-grams found in both pieces.
inline double sum_common(const NGramProfile& a, const NGramProfile& b) {
  const auto total = a.total() + b.total();
  if (total == 0) throw Error(ErrorCode::both_empty, "both n-gram profiles are empty");
  std::size_t shared = 0;
  for (const auto& [g, ca] : a.counts) {
    const auto cb = b.count(g);
    if (cb > 0) shared += ca + cb;
  }
  return static_cast<double>(shared) / static_cast<double>(total);
}

/// One minus the normalised L1 difference of the count vectors.
inline double ukkonen(const NGramProfile& a, const NGramProfile& b) {
  const auto total = a.total() + b.total();
  if (total == 0) throw Error(ErrorCode::both_empty, "both n-gram profiles are empty");
  std::size_t diff = 0;
  for (const auto& [g, ca] : a.counts) {
    const auto cb = b.count(g);
    diff += ca > cb ? ca - cb : cb - ca;
  }
  for (const auto& [g, cb] : b.counts) {
    if (a.counts.find(g) == a.counts.end()) diff += cb;
  }
  return 1.0 - static_cast<double>(diff) / static_cast<double>(total);
}

/// Cosine of count * IDF vectors; 0 when either vector vanishes.
inline double tfidf_correlation(const NGramProfile& a, const NGramProfile& b, const CorpusStats& stats) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [g, ca] : a.counts) {
    const double w = idf(stats, g);
    const double va = static_cast<double>(ca) * w;
    na += va * va;
    dot += va * static_cast<double>(b.count(g)) * w;
  }
  for (const auto& [g, cb] : b.counts) {
    const double vb = static_cast<double>(cb) * idf(stats, g);
    nb += vb * vb;
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Tversky ratio model with alpha = beta = 1 over n-gram sets, each n-gram
/// weighted by its IDF.
inline double tversky_equal(const NGramProfile& a, const NGramProfile& b, const CorpusStats& stats) {
  double common = 0.0, only_a = 0.0, only_b = 0.0;
  for (const auto& [g, ca] : a.counts) {
    (b.counts.contains(g) ? common : only_a) += idf(stats, g);
  }
  for (const auto& [g, cb] : b.counts) {
    if (!a.counts.contains(g)) only_b += idf(stats, g);
  }
  const double denom = common + only_a + only_b;
  if (denom == 0.0) throw Error(ErrorCode::all_zero_weights, "every n-gram has zero IDF weight");
  return common / denom;
}

namespace detail {

inline std::string ngram_key(const NGram& g) {
  std::string s;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(g[i]);
  }
  return s;
}

inline NGram parse_ngram_key(const std::string& key) {
  NGram g;
  std::stringstream in(key);
  std::string part;
  try {
    while (std::getline(in, part, ',')) g.push_back(std::stoi(part));
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::syntax_error, "bad n-gram key '" + key + "'");
  }
  return g;
}

}  // namespace detail

inline nlohmann::json stats_to_json(const CorpusStats& stats) {
  nlohmann::json df = nlohmann::json::object();
  for (const auto& [g, c] : stats.doc_freq) df[detail::ngram_key(g)] = c;
  return {{"order", stats.order}, {"corpus_size", stats.corpus_size}, {"ids", stats.ids}, {"doc_freq", std::move(df)}};
}

inline CorpusStats stats_from_json(const nlohmann::json& j) {
  CorpusStats stats;
  try {
    stats.order = j.at("order").get<std::size_t>();
    stats.corpus_size = j.at("corpus_size").get<std::size_t>();
    stats.ids = j.at("ids").get<std::vector<std::string>>();
    for (const auto& [key, value] : j.at("doc_freq").items()) {
      const auto c = value.get<std::size_t>();
      if (c < 1 || c > stats.corpus_size) throw Error(ErrorCode::range_error, "document frequency out of range");
      stats.doc_freq[detail::parse_ngram_key(key)] = c;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::syntax_error, std::string("corpus stats: ") + e.what());
  }
  return stats;
}

/// Sidecar path for a corpus directory: `<dir>.ngram<n>.json` next to it.
inline std::filesystem::path stats_sidecar_path(const std::filesystem::path& corpus_dir, std::size_t order) {
  auto dir = corpus_dir;
  if (!dir.has_filename()) dir = dir.parent_path();
  return dir.parent_path() / (dir.filename().string() + ".ngram" + std::to_string(order) + ".json");
}

inline void save_stats(const CorpusStats& stats, const std::filesystem::path& path) {
  write_file(path, stats_to_json(stats).dump() + "\n");
}

inline CorpusStats load_stats(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return stats_from_json(nlohmann::json::parse(bytes.begin(), bytes.end()));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::syntax_error, path.string() + ": " + e.what());
  }
}

}  // namespace bmm
