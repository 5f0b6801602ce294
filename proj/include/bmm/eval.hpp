#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bmm/config.hpp"
#include "bmm/datagen.hpp"
#include "bmm/encode.hpp"
#include "bmm/error.hpp"
#include "bmm/match.hpp"
#include "bmm/ngram.hpp"
#include "bmm/notelist.hpp"
#include "bmm/parallel.hpp"

namespace bmm {

enum class Detector { bmm, sum_common, ukkonen, tfidf, tversky };

inline constexpr std::string_view to_string(Detector d) {
  switch (d) {
    case Detector::bmm: return "bmm";
    case Detector::sum_common: return "sum_common";
    case Detector::ukkonen: return "ukkonen";
    case Detector::tfidf: return "tfidf";
    case Detector::tversky: return "tversky";
  }
  return "unknown";
}

inline Detector parse_detector(std::string_view s) {
  for (auto d : {Detector::bmm, Detector::sum_common, Detector::ukkonen, Detector::tfidf, Detector::tversky}) {
    if (s == to_string(d)) return d;
  }
  throw Error(ErrorCode::unknown_detector, "unknown detector '" + std::string(s) + "'");
}

inline std::vector<Detector> parse_detectors(std::string_view list) {
  std::vector<Detector> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    auto comma = list.find(',', pos);
    if (comma == std::string_view::npos) comma = list.size();
    const auto item = list.substr(pos, comma - pos);
    if (!item.empty()) out.push_back(parse_detector(item));
    pos = comma + 1;
  }
  if (out.empty()) throw Error(ErrorCode::unknown_detector, "no detectors given");
  return out;
}

inline bool uses_ngrams(Detector d) { return d != Detector::bmm; }

/// Candidate features computed once and reused across queries.
struct CandidatePool {
  std::vector<std::string> ids;
  /// Empty when the candidate could not be segmented (fewer than 2 notes).
  std::vector<std::vector<Clip>> clips;
  std::vector<NGramProfile> profiles;
  CorpusStats stats;
};

inline CandidatePool prepare_pool(std::span<const MelodySequence> candidates, const Config& cfg,
                                  const CorpusStats* stats = nullptr) {
  CandidatePool pool;
  for (const auto& c : candidates) {
    pool.ids.push_back(c.id);
    if (c.notes.size() < 2) {
      pool.clips.emplace_back();
      pool.profiles.push_back(NGramProfile{c.id, cfg.ngram_order, {}});
      continue;
    }
    const auto enc = encode_relative(c);
    pool.clips.push_back(segment(enc, cfg.clip_length, cfg.overlap));
    pool.profiles.push_back(profile(enc, cfg.ngram_order));
  }
  pool.stats = stats ? *stats : build_stats(pool.profiles);
  return pool;
}

/// Scores the query against each pooled candidate. Pairs a measure cannot
/// score (empty profiles, all-zero IDF, unsegmentable candidate) get 0.
/// Query-side failures propagate.
inline std::vector<double> score_pool(const MelodySequence& query, const CandidatePool& pool, Detector detector,
                                      const Config& cfg, unsigned threads = 1) {
  const auto enc = encode_relative(query);
  const auto query_clips = segment(enc, cfg.clip_length, cfg.overlap);
  const auto query_profile = profile(enc, cfg.ngram_order);
  std::vector<double> scores(pool.ids.size(), 0.0);
  parallel_for(pool.ids.size(), threads, [&](std::size_t i) {
    try {
      switch (detector) {
        case Detector::bmm: {
          if (pool.clips[i].empty()) return;
          const auto graph = build_graph(query_clips, pool.clips[i], cfg.cost);
          scores[i] = solve_assignment(graph, cfg.top_q).degree;
          break;
        }
        case Detector::sum_common: scores[i] = sum_common(query_profile, pool.profiles[i]); break;
        case Detector::ukkonen: scores[i] = ukkonen(query_profile, pool.profiles[i]); break;
        case Detector::tfidf: scores[i] = tfidf_correlation(query_profile, pool.profiles[i], pool.stats); break;
        case Detector::tversky: scores[i] = tversky_equal(query_profile, pool.profiles[i], pool.stats); break;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::both_empty && e.code() != ErrorCode::all_zero_weights) throw;
      scores[i] = 0.0;
    }
  });
  return scores;
}

struct RankedCandidate {
  std::string id;
  double score = 0.0;
  std::size_t rank = 0;
};

/// Orders candidates by descending score, ties by ascending id; rank is the
/// 1-based position. Indices flagged in `exclude` are left out.
inline std::vector<RankedCandidate> rank_scores(std::span<const std::string> ids, std::span<const double> scores,
                                                const std::vector<bool>* exclude = nullptr) {
  std::vector<RankedCandidate> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (exclude && (*exclude)[i]) continue;
    out.push_back({ids[i], scores[i], 0});
  }
  std::sort(out.begin(), out.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

inline std::vector<RankedCandidate> rank_query(const MelodySequence& query, std::span<const MelodySequence> candidates,
                                               Detector detector, const Config& cfg,
                                               const CorpusStats* stats = nullptr) {
  if (candidates.empty()) throw Error(ErrorCode::empty_input, "no candidates to rank");
  const auto pool = prepare_pool(candidates, cfg, stats);
  const auto scores = score_pool(query, pool, detector, cfg, resolve_threads(cfg.threads));
  return rank_scores(pool.ids, scores);
}

/// Average Ranking Index: mean rank of the true source.
inline double ari(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw Error(ErrorCode::empty_list, "no ranks");
  double sum = 0.0;
  for (auto r : ranks) sum += static_cast<double>(r);
  return sum / static_cast<double>(ranks.size());
}

/// Fraction of cases whose true source ranked first.
inline double accuracy(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw Error(ErrorCode::empty_list, "no ranks");
  const auto hits = std::count(ranks.begin(), ranks.end(), std::size_t{1});
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

// ---------------------------------------------------------------------------
// Manifest evaluation

struct CaseOutcome {
  std::string derived;
  PlagiarismType type = PlagiarismType::transposition;
  /// Rank of the true original per detector; absent where scoring failed.
  std::map<Detector, std::size_t> ranks;
  std::size_t pool_size = 0;
};

struct CaseError {
  std::string derived;
  std::string detector;
  std::string message;
};

struct TypeMetrics {
  double ari = 0.0;
  double acc = 0.0;
  std::size_t cases = 0;
};

struct EvaluationTable {
  std::vector<Detector> detectors;
  std::size_t corpus_size = 0;
  std::vector<CaseOutcome> cases;
  std::vector<CaseError> errors;
  Config config;

  std::vector<std::size_t> ranks(Detector d, std::span<const PlagiarismType> types) const {
    std::vector<std::size_t> out;
    for (const auto& c : cases) {
      if (std::find(types.begin(), types.end(), c.type) == types.end()) continue;
      if (auto it = c.ranks.find(d); it != c.ranks.end()) out.push_back(it->second);
    }
    return out;
  }

  std::optional<TypeMetrics> metrics(Detector d, std::span<const PlagiarismType> types) const {
    const auto r = ranks(d, types);
    if (r.empty()) return std::nullopt;
    return TypeMetrics{ari(r), accuracy(r), r.size()};
  }
};

inline constexpr std::array kAllTypes = {PlagiarismType::transposition, PlagiarismType::pitch_shift,
                                         PlagiarismType::duration_variance, PlagiarismType::melody_change};

/// Ranks every case's derived piece against the manifest's corpus. The case's
/// host is removed from its candidate pool, since the host legitimately
/// contains most of the query.
inline EvaluationTable evaluate(const DatasetManifest& manifest, std::span<const Detector> detectors,
                                const Config& cfg) {
  namespace fs = std::filesystem;
  const auto corpus = load_corpus(manifest.corpus_dir);
  if (corpus.pieces.empty()) throw Error(ErrorCode::missing_file, "corpus " + manifest.corpus_dir.string() + " is empty");
  std::map<std::string, std::size_t> by_file;
  for (std::size_t i = 0; i < corpus.paths.size(); ++i) by_file[fs::path(corpus.paths[i]).filename().string()] = i;

  const auto pool = prepare_pool(corpus.pieces, cfg);

  EvaluationTable table;
  table.detectors.assign(detectors.begin(), detectors.end());
  table.corpus_size = corpus.pieces.size();
  table.config = cfg;
  table.cases.resize(manifest.cases.size());
  std::vector<std::vector<CaseError>> errors(manifest.cases.size());

  parallel_for(manifest.cases.size(), cfg.threads, [&](std::size_t k) {
    const auto& entry = manifest.cases[k];
    auto& outcome = table.cases[k];
    outcome.derived = entry.derived;
    outcome.type = entry.type;
    auto fail = [&](std::string_view detector, const std::string& message) {
      errors[k].push_back({entry.derived, std::string(detector), message});
    };

    const auto orig = by_file.find(entry.original);
    if (orig == by_file.end()) {
      fail("*", to_string(ErrorCode::missing_file).data() + std::string(": original ") + entry.original + " not in corpus");
      return;
    }
    std::vector<bool> exclude(corpus.pieces.size(), false);
    if (entry.host) {
      if (auto h = by_file.find(*entry.host); h != by_file.end() && h->second != orig->second) exclude[h->second] = true;
    }
    outcome.pool_size = corpus.pieces.size() - static_cast<std::size_t>(std::count(exclude.begin(), exclude.end(), true));

    MelodySequence query;
    try {
      query = load_piece(manifest.derived_path(entry));
    } catch (const Error& e) {
      fail("*", e.what());
      return;
    }
    for (auto d : detectors) {
      try {
        const auto scores = score_pool(query, pool, d, cfg, 1);
        const auto ranked = rank_scores(pool.ids, scores, &exclude);
        const auto& truth = corpus.pieces[orig->second].id;
        for (const auto& r : ranked) {
          if (r.id == truth) {
            outcome.ranks[d] = r.rank;
            break;
          }
        }
      } catch (const Error& e) {
        fail(to_string(d), e.what());
      }
    }
  });
  for (auto& per_case : errors) {
    for (auto& e : per_case) table.errors.push_back(std::move(e));
  }
  return table;
}

inline nlohmann::json table_to_json(const EvaluationTable& t) {
  nlohmann::json out = nlohmann::json::object();
  for (auto d : t.detectors) {
    nlohmann::json per_type = nlohmann::json::object();
    for (auto type : kAllTypes) {
      const std::array one{type};
      if (auto m = t.metrics(d, one)) {
        per_type[std::string(to_string(type))] = {{"ari", m->ari}, {"acc", m->acc}, {"cases", m->cases}};
      }
    }
    if (auto m = t.metrics(d, kAllTypes)) {
      per_type["all"] = {{"ari", m->ari}, {"acc", m->acc}, {"cases", m->cases}};
    }
    out[std::string(to_string(d))] = std::move(per_type);
  }
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& e : t.errors) errors.push_back({{"case", e.derived}, {"detector", e.detector}, {"error", e.message}});
  out["errors"] = std::move(errors);
  out["corpus_size"] = t.corpus_size;
  out["params"] = to_json(t.config);
  out["version"] = kVersion;
  return out;
}

inline std::string table_to_text(const EvaluationTable& t) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %-18s %6s %8s %7s\n", "detector", "type", "cases", "ARI", "Acc");
  out += line;
  for (auto d : t.detectors) {
    auto row = [&](std::string_view label, std::span<const PlagiarismType> types) {
      if (auto m = t.metrics(d, types)) {
        std::snprintf(line, sizeof(line), "%-12s %-18s %6zu %8.3f %7.3f\n", std::string(to_string(d)).c_str(),
                      std::string(label).c_str(), m->cases, m->ari, m->acc);
        out += line;
      }
    };
    for (auto type : kAllTypes) {
      const std::array one{type};
      row(to_string(type), one);
    }
    row("all", kAllTypes);
  }
  std::snprintf(line, sizeof(line), "corpus size %zu, %zu case error(s)\n", t.corpus_size, t.errors.size());
  out += line;
  return out;
}

}  // namespace bmm
