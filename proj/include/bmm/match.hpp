#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bmm/align.hpp"
#include "bmm/assignment.hpp"
#include "bmm/config.hpp"
#include "bmm/encode.hpp"
#include "bmm/error.hpp"
#include "bmm/melody.hpp"

namespace bmm {

/// Complete bipartite graph between two clip lists. The left side is never
/// smaller than the right side.
struct SimilarityGraph {
  std::vector<Clip> left;
  std::vector<Clip> right;
  /// weights(i, j) = similarity of left[i] and right[j], in (0, 1].
  Matrix<double> weights;
  /// True when the sides were exchanged relative to the build_graph call.
  bool swapped = false;
};

/// Inclusive note-index range inside one piece.
struct NoteSpan {
  std::string id;
  std::size_t first = 0;
  std::size_t last = 0;
};

struct MatchedPair {
  std::size_t left = 0;
  std::size_t right = 0;
  double weight = 0.0;
  NoteSpan left_span;
  NoteSpan right_span;
};

struct MatchReport {
  std::string left_id;
  std::string right_id;
  std::vector<MatchedPair> pairs;
  double degree = 0.0;

  double total_weight() const {
    double s = 0.0;
    for (const auto& p : pairs) s += p.weight;
    return s;
  }
};

inline SimilarityGraph build_graph(std::span<const Clip> a, std::span<const Clip> b, const CostParams& p) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::empty_input, "both clip lists must be non-empty");
  SimilarityGraph g;
  g.swapped = b.size() > a.size();
  const auto& left = g.swapped ? b : a;
  const auto& right = g.swapped ? a : b;
  g.left.assign(left.begin(), left.end());
  g.right.assign(right.begin(), right.end());
  g.weights = Matrix<double>(g.left.size(), g.right.size());
  for (std::size_t i = 0; i < g.left.size(); ++i) {
    for (std::size_t j = 0; j < g.right.size(); ++j) {
      g.weights(i, j) = edge_weight(edit_distance(g.left[i], g.right[j], p));
    }
  }
  return g;
}

/// Mean of the highest ceil(q * N) weights.
inline double plagiarism_degree(std::span<const double> weights, double q = 1.0) {
  if (weights.empty()) throw Error(ErrorCode::empty_matching, "no matched edges to aggregate");
  if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorCode::invalid_params, "q must be in (0, 1]");
  std::vector<double> sorted(weights.begin(), weights.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double want = std::ceil(q * static_cast<double>(sorted.size()) - 1e-9);
  const auto keep = std::clamp<std::size_t>(static_cast<std::size_t>(want), 1, sorted.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < keep; ++i) sum += sorted[i];
  return sum / static_cast<double>(keep);
}

inline NoteSpan span_of(const Clip& c) {
  const auto [first, last] = c.note_range();
  return {c.id, first, last};
}

/// Maximum-weight matching that covers every right-side clip. Pairs come
/// back ordered by right index.
inline MatchReport solve_assignment(const SimilarityGraph& g, double top_q = 1.0) {
  MatchReport report;
  if (!g.left.empty()) report.left_id = g.left.front().id;
  if (!g.right.empty()) report.right_id = g.right.front().id;
  const auto left_of_right = max_weight_assignment(g.weights);
  std::vector<double> weights;
  for (std::size_t j = 0; j < left_of_right.size(); ++j) {
    const auto i = left_of_right[j];
    MatchedPair pair{i, j, g.weights(i, j), span_of(g.left[i]), span_of(g.right[j])};
    weights.push_back(pair.weight);
    report.pairs.push_back(std::move(pair));
  }
  report.degree = plagiarism_degree(weights, top_q);
  return report;
}

/// Full pipeline for one pair of pieces. In the returned report "left"
/// always refers to `a` and "right" to `b`.
inline MatchReport compare_pieces(const MelodySequence& a, const MelodySequence& b, const Config& cfg) {
  const auto clips_a = segment(encode_relative(a), cfg.clip_length, cfg.overlap);
  const auto clips_b = segment(encode_relative(b), cfg.clip_length, cfg.overlap);
  const auto graph = build_graph(clips_a, clips_b, cfg.cost);
  auto report = solve_assignment(graph, cfg.top_q);
  if (graph.swapped) {
    std::swap(report.left_id, report.right_id);
    for (auto& p : report.pairs) {
      std::swap(p.left, p.right);
      std::swap(p.left_span, p.right_span);
    }
  }
  std::sort(report.pairs.begin(), report.pairs.end(),
            [](const MatchedPair& x, const MatchedPair& y) { return std::pair(x.left, x.right) < std::pair(y.left, y.right); });
  return report;
}

inline nlohmann::json report_to_json(const MatchReport& report, const Config& cfg) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back({
        {"left_span", {p.left_span.first, p.left_span.last}},
        {"right_span", {p.right_span.first, p.right_span.last}},
        {"weight", p.weight},
        {"suspect", p.weight >= cfg.suspect_threshold},
    });
  }
  return {
      {"version", kVersion},
      {"left_id", report.left_id},
      {"right_id", report.right_id},
      {"degree", report.degree},
      {"pairs", std::move(pairs)},
      {"params", to_json(cfg)},
  };
}

}  // namespace bmm
