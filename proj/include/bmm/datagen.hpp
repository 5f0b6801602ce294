#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bmm/error.hpp"
#include "bmm/melody.hpp"
#include "bmm/notelist.hpp"
#include "bmm/rng.hpp"

namespace bmm {

enum class PlagiarismType { transposition, pitch_shift, duration_variance, melody_change };

inline constexpr std::array kGeneratedTypes = {PlagiarismType::transposition, PlagiarismType::pitch_shift,
                                               PlagiarismType::duration_variance};

inline std::string_view to_string(PlagiarismType t) {
  switch (t) {
    case PlagiarismType::transposition: return "transposition";
    case PlagiarismType::pitch_shift: return "pitch_shift";
    case PlagiarismType::duration_variance: return "duration_variance";
    case PlagiarismType::melody_change: return "melody_change";
  }
  return "unknown";
}

/// Accepts full names and the one-letter forms t, p, d, m.
inline PlagiarismType parse_plagiarism_type(std::string_view s) {
  if (s == "transposition" || s == "t") return PlagiarismType::transposition;
  if (s == "pitch_shift" || s == "p") return PlagiarismType::pitch_shift;
  if (s == "duration_variance" || s == "d") return PlagiarismType::duration_variance;
  if (s == "melody_change" || s == "m") return PlagiarismType::melody_change;
  throw Error(ErrorCode::unsupported_type, "unknown plagiarism type '" + std::string(s) + "'");
}

struct PlagiarismCase {
  PlagiarismType type = PlagiarismType::transposition;
  std::string original_id;
  std::string derived_id;
  std::optional<std::string> host_id;
  /// Everything needed to reproduce the derived piece from its inputs.
  nlohmann::json params = nlohmann::json::object();
  MelodySequence derived;
};

inline constexpr std::size_t kMinTranspositionNotes = 5;
inline constexpr std::size_t kMinFragmentSourceNotes = 8;

namespace detail {

inline bool same_notes(const std::vector<Note>& a, const std::vector<Note>& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](const Note& x, const Note& y) { return x.pitch == y.pitch && x.duration == y.duration; });
}

inline MelodySequence assemble(std::string id, std::vector<Note> notes, std::vector<TimeSignature> grid) {
  MelodySequence seq;
  seq.id = std::move(id);
  seq.notes = std::move(notes);
  seq.time_signatures = normalized_grid(std::move(grid));
  resequence_onsets(seq.notes);
  return derive_downbeats(std::move(seq));
}

/// Contiguous fragment covering 30-60% of the notes (at least 2).
inline std::pair<std::size_t, std::size_t> pick_fragment(std::size_t notes, Rng& rng) {
  const double frac = rng.uniform_real(0.3, 0.6);
  auto len = static_cast<std::size_t>(std::lround(frac * static_cast<double>(notes)));
  len = std::clamp<std::size_t>(len, 2, notes);
  const auto start = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(notes - len)));
  return {start, len};
}

inline void check_fragment_inputs(const MelodySequence& orig, const MelodySequence& host) {
  if (orig.notes.size() < kMinFragmentSourceNotes) {
    throw Error(ErrorCode::too_short, "original '" + orig.id + "' needs at least 8 notes");
  }
  if (host.notes.empty()) throw Error(ErrorCode::too_short, "host '" + host.id + "' has no notes");
  if (orig.id == host.id) throw Error(ErrorCode::invalid_params, "host must differ from the original");
}

inline MelodySequence embed(const std::string& id, const MelodySequence& host, std::vector<Note> fragment,
                            std::size_t insert_at) {
  std::vector<Note> notes(host.notes.begin(), host.notes.begin() + static_cast<std::ptrdiff_t>(insert_at));
  notes.insert(notes.end(), fragment.begin(), fragment.end());
  notes.insert(notes.end(), host.notes.begin() + static_cast<std::ptrdiff_t>(insert_at), host.notes.end());
  return assemble(id, std::move(notes), host.time_signatures);
}

}  // namespace detail

/// Cuts the original into 3-5 segments at random note boundaries and
/// reassembles them in a shuffled, non-identity order.
inline PlagiarismCase gen_transposition(const MelodySequence& orig, std::uint64_t seed, std::string derived_id = {}) {
  const auto n = orig.notes.size();
  if (n < kMinTranspositionNotes) throw Error(ErrorCode::too_short, "original '" + orig.id + "' needs at least 5 notes");
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const auto segments = static_cast<std::size_t>(rng.uniform_int(3, 5));
    std::vector<std::size_t> boundaries(n - 1);
    std::iota(boundaries.begin(), boundaries.end(), 1);
    rng.shuffle(std::span(boundaries));
    std::vector<std::size_t> cuts(boundaries.begin(), boundaries.begin() + static_cast<std::ptrdiff_t>(segments - 1));
    std::sort(cuts.begin(), cuts.end());

    std::vector<std::size_t> order(segments);
    std::iota(order.begin(), order.end(), 0);
    while (std::is_sorted(order.begin(), order.end())) rng.shuffle(std::span(order));

    std::vector<std::size_t> edges{0};
    edges.insert(edges.end(), cuts.begin(), cuts.end());
    edges.push_back(n);
    std::vector<Note> notes;
    for (auto s : order) {
      notes.insert(notes.end(), orig.notes.begin() + static_cast<std::ptrdiff_t>(edges[s]),
                   orig.notes.begin() + static_cast<std::ptrdiff_t>(edges[s + 1]));
    }
    if (detail::same_notes(notes, orig.notes)) continue;

    PlagiarismCase c;
    c.type = PlagiarismType::transposition;
    c.original_id = orig.id;
    c.derived_id = derived_id.empty() ? orig.id + "-transposition" : std::move(derived_id);
    c.params = {{"seed", seed}, {"segments", segments}, {"cuts", cuts}, {"order", order}};
    c.derived = detail::assemble(c.derived_id, std::move(notes), orig.time_signatures);
    return c;
  }
  throw Error(ErrorCode::too_short, "original '" + orig.id + "' is too uniform to rearrange");
}

/// Shifts a fragment of the original by a non-zero interval of up to 11
/// semitones and inserts it into the host at a random note boundary.
inline PlagiarismCase gen_pitch_shift(const MelodySequence& orig, const MelodySequence& host, std::uint64_t seed,
                                      std::string derived_id = {}) {
  detail::check_fragment_inputs(orig, host);
  Rng rng(seed);
  const auto [start, len] = detail::pick_fragment(orig.notes.size(), rng);
  std::vector<Note> fragment(orig.notes.begin() + static_cast<std::ptrdiff_t>(start),
                             orig.notes.begin() + static_cast<std::ptrdiff_t>(start + len));
  const auto [lo, hi] = std::minmax_element(fragment.begin(), fragment.end(),
                                            [](const Note& a, const Note& b) { return a.pitch < b.pitch; });
  std::vector<int> shifts;
  for (int s = -11; s <= 11; ++s) {
    if (s != 0 && lo->pitch + s >= 0 && hi->pitch + s <= 127) shifts.push_back(s);
  }
  if (shifts.empty()) throw Error(ErrorCode::no_valid_shift, "fragment of '" + orig.id + "' cannot be shifted in range");
  const int shift = shifts[rng.index(shifts.size())];
  for (auto& note : fragment) note.pitch += shift;
  const auto insert_at = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(host.notes.size())));

  PlagiarismCase c;
  c.type = PlagiarismType::pitch_shift;
  c.original_id = orig.id;
  c.host_id = host.id;
  c.derived_id = derived_id.empty() ? orig.id + "-pitch_shift" : std::move(derived_id);
  c.params = {{"seed", seed}, {"fragment", {start, start + len - 1}}, {"shift", shift},
              {"insert_at", insert_at}, {"host", host.id}};
  c.derived = detail::embed(c.derived_id, host, std::move(fragment), insert_at);
  return c;
}

inline constexpr std::array<Beat, 4> kDurationFactors = {Beat(1, 2), Beat(3, 4), Beat(3, 2), Beat(2)};

/// Scales every duration of a fragment by one factor from {1/2, 3/4, 3/2, 2}
/// and inserts it into the host.
inline PlagiarismCase gen_duration_variance(const MelodySequence& orig, const MelodySequence& host,
                                            std::uint64_t seed, std::string derived_id = {}) {
  detail::check_fragment_inputs(orig, host);
  Rng rng(seed);
  const auto [start, len] = detail::pick_fragment(orig.notes.size(), rng);
  std::vector<Note> fragment(orig.notes.begin() + static_cast<std::ptrdiff_t>(start),
                             orig.notes.begin() + static_cast<std::ptrdiff_t>(start + len));
  const Beat factor = kDurationFactors[rng.index(kDurationFactors.size())];
  for (auto& note : fragment) note.duration *= factor;
  const auto insert_at = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(host.notes.size())));

  PlagiarismCase c;
  c.type = PlagiarismType::duration_variance;
  c.original_id = orig.id;
  c.host_id = host.id;
  c.derived_id = derived_id.empty() ? orig.id + "-duration_variance" : std::move(derived_id);
  c.params = {{"seed", seed}, {"fragment", {start, start + len - 1}}, {"factor", beat_to_json(factor)},
              {"insert_at", insert_at}, {"host", host.id}};
  c.derived = detail::embed(c.derived_id, host, std::move(fragment), insert_at);
  return c;
}

// ---------------------------------------------------------------------------
// Manifests

struct CaseEntry {
  PlagiarismType type = PlagiarismType::transposition;
  /// Relative to the corpus directory.
  std::string original;
  /// Relative to the manifest's directory.
  std::string derived;
  /// Relative to the corpus directory.
  std::optional<std::string> host;
  nlohmann::json params = nlohmann::json::object();
};

struct DatasetManifest {
  std::uint64_t seed = 0;
  std::filesystem::path corpus_dir;
  /// Directory the manifest file lives in; derived paths resolve against it.
  std::filesystem::path base_dir;
  std::vector<CaseEntry> cases;

  std::filesystem::path original_path(const CaseEntry& c) const { return corpus_dir / c.original; }
  std::filesystem::path derived_path(const CaseEntry& c) const { return base_dir / c.derived; }
};

inline nlohmann::json manifest_to_json(const DatasetManifest& m) {
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& c : m.cases) {
    nlohmann::json entry = {{"type", to_string(c.type)}, {"original", c.original}, {"derived", c.derived}};
    if (c.host) entry["host"] = *c.host;
    entry["params"] = c.params;
    cases.push_back(std::move(entry));
  }
  return {{"seed", m.seed}, {"corpus", m.corpus_dir.generic_string()}, {"cases", std::move(cases)}};
}

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  DatasetManifest m;
  m.base_dir = path.parent_path();
  try {
    const auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
    m.seed = j.value("seed", std::uint64_t{0});
    std::filesystem::path corpus = j.at("corpus").get<std::string>();
    m.corpus_dir = corpus.is_absolute() ? corpus : m.base_dir / corpus;
    for (const auto& e : j.at("cases")) {
      CaseEntry c;
      c.type = parse_plagiarism_type(e.at("type").get<std::string>());
      c.original = e.at("original").get<std::string>();
      c.derived = e.at("derived").get<std::string>();
      if (e.contains("host")) c.host = e.at("host").get<std::string>();
      c.params = e.value("params", nlohmann::json::object());
      m.cases.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::syntax_error, path.string() + ": " + e.what());
  }
  return m;
}

/// Requested number of cases per generated type.
struct CaseCounts {
  std::size_t transposition = 0;
  std::size_t pitch_shift = 0;
  std::size_t duration_variance = 0;

  std::size_t of(PlagiarismType t) const {
    switch (t) {
      case PlagiarismType::transposition: return transposition;
      case PlagiarismType::pitch_shift: return pitch_shift;
      case PlagiarismType::duration_variance: return duration_variance;
      case PlagiarismType::melody_change: return 0;
    }
    return 0;
  }
};

/// Parses "t=2,p=2,d=2" (long type names also accepted). Melody change is
/// rejected because it cannot be generated here.
inline CaseCounts parse_counts(std::string_view text) {
  CaseCounts counts;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const auto item = text.substr(pos, comma - pos);
    pos = comma + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::invalid_params, "count entry '" + std::string(item) + "' needs '='");
    const auto type = parse_plagiarism_type(item.substr(0, eq));
    std::size_t value = 0;
    try {
      value = std::stoul(std::string(item.substr(eq + 1)));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::invalid_params, "bad count in '" + std::string(item) + "'");
    }
    switch (type) {
      case PlagiarismType::transposition: counts.transposition = value; break;
      case PlagiarismType::pitch_shift: counts.pitch_shift = value; break;
      case PlagiarismType::duration_variance: counts.duration_variance = value; break;
      case PlagiarismType::melody_change:
        throw Error(ErrorCode::unsupported_type, "melody_change cases cannot be generated; supply them via a manifest");
    }
  }
  return counts;
}

/// Generates cases from every piece in `corpus_dir`, writing derived pieces
/// (note-list format) and manifest.json into `out_dir`. Originals are dealt
/// round-robin from a seeded shuffle of the eligible pieces, so each type
/// spreads its cases over the corpus; hosts are any other piece.
inline DatasetManifest gen_dataset(const std::filesystem::path& corpus_dir, const std::filesystem::path& out_dir,
                                   const CaseCounts& counts, std::uint64_t seed) {
  namespace fs = std::filesystem;
  const auto corpus = load_corpus(corpus_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir)) throw Error(ErrorCode::io_error, "cannot create " + out_dir.string());

  DatasetManifest manifest;
  manifest.seed = seed;
  manifest.corpus_dir = fs::weakly_canonical(corpus_dir);
  manifest.base_dir = out_dir;

  auto file_name = [&](std::size_t piece) { return fs::path(corpus.paths[piece]).filename().string(); };

  std::size_t case_index = 0;
  for (const auto type : kGeneratedTypes) {
    const auto wanted = counts.of(type);
    if (wanted == 0) continue;
    const auto min_notes = type == PlagiarismType::transposition ? kMinTranspositionNotes : kMinFragmentSourceNotes;
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < corpus.pieces.size(); ++i) {
      if (corpus.pieces[i].notes.size() >= min_notes) eligible.push_back(i);
    }
    const bool needs_host = type != PlagiarismType::transposition;
    if (eligible.empty() || (needs_host && corpus.pieces.size() < 2)) {
      throw Error(ErrorCode::insufficient_corpus,
                  "corpus " + corpus_dir.string() + " has too few usable pieces for " + std::string(to_string(type)));
    }
    Rng deal(Rng::derive(seed, 1000 + static_cast<std::uint64_t>(type)));
    deal.shuffle(std::span(eligible));

    for (std::size_t k = 0; k < wanted; ++k, ++case_index) {
      const auto case_seed = Rng::derive(seed, case_index);
      const auto orig = eligible[k % eligible.size()];
      char name[64];
      std::snprintf(name, sizeof(name), "%s-%04zu", std::string(to_string(type)).c_str(), k);
      const std::string derived_id = name;

      PlagiarismCase c;
      std::optional<std::size_t> host;
      if (type == PlagiarismType::transposition) {
        c = gen_transposition(corpus.pieces[orig], case_seed, derived_id);
      } else {
        Rng pick(Rng::derive(case_seed, 7));
        auto h = pick.index(corpus.pieces.size() - 1);
        if (h >= orig) ++h;
        host = h;
        c = type == PlagiarismType::pitch_shift
                ? gen_pitch_shift(corpus.pieces[orig], corpus.pieces[h], case_seed, derived_id)
                : gen_duration_variance(corpus.pieces[orig], corpus.pieces[h], case_seed, derived_id);
      }
      const auto derived_file = derived_id + ".json";
      write_file(out_dir / derived_file, serialize_notelist(c.derived));

      CaseEntry entry;
      entry.type = type;
      entry.original = file_name(orig);
      entry.derived = derived_file;
      if (host) entry.host = file_name(*host);
      entry.params = std::move(c.params);
      manifest.cases.push_back(std::move(entry));
    }
  }
  write_file(out_dir / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");
  return manifest;
}

// ---------------------------------------------------------------------------
// Synthetic corpus

/// Random diatonic melody with repeated and sequenced motifs, 40-80 notes.
inline MelodySequence synth_melody(std::string id, std::uint64_t seed) {
  static constexpr std::array<int, 7> major = {0, 2, 4, 5, 7, 9, 11};
  static constexpr std::array<int, 7> minor = {0, 2, 3, 5, 7, 8, 10};
  static constexpr std::array<int, 11> steps = {-4, -2, -1, -1, 0, 1, 1, 1, 2, 3, 5};
  static constexpr std::array<Beat, 8> durations = {Beat(1, 2), Beat(1, 2), Beat(1), Beat(1),
                                                    Beat(1), Beat(3, 2), Beat(2), Beat(1, 4)};
  Rng rng(seed);
  const auto& scale = rng.uniform01() < 0.6 ? major : minor;
  const int tonic = static_cast<int>(rng.uniform_int(55, 67));
  const auto target = static_cast<std::size_t>(rng.uniform_int(40, 80));

  struct Step {
    int move;
    Beat dur;
  };
  auto make_motif = [&] {
    std::vector<Step> motif(static_cast<std::size_t>(rng.uniform_int(4, 8)));
    for (auto& s : motif) s = {steps[rng.index(steps.size())], durations[rng.index(durations.size())]};
    return motif;
  };
  std::vector<std::vector<Step>> motifs{make_motif(), make_motif()};

  auto pitch_of = [&](int degree) {
    const int octave = degree >= 0 ? degree / 7 : -((-degree + 6) / 7);
    return tonic + 12 * octave + scale[static_cast<std::size_t>(degree - 7 * octave)];
  };

  MelodySequence seq;
  seq.id = std::move(id);
  if (rng.uniform01() < 0.25) seq.time_signatures = {TimeSignature{Beat(0), Beat(3)}};
  int degree = 0;
  while (seq.notes.size() < target) {
    const double roll = rng.uniform01();
    if (roll < 0.3) motifs.push_back(make_motif());
    const auto& motif = motifs[roll < 0.3 ? motifs.size() - 1 : rng.index(motifs.size())];
    for (const auto& s : motif) {
      degree += s.move;
      // keep within roughly two octaves around the tonic
      if (degree > 10) degree -= 7;
      if (degree < -5) degree += 7;
      Note n;
      n.pitch = pitch_of(degree);
      n.duration = s.dur;
      seq.notes.push_back(n);
    }
  }
  seq.notes.resize(target);
  resequence_onsets(seq.notes);
  return derive_downbeats(std::move(seq));
}

/// Writes `count` synthetic melodies named piece-0000.json ... into `dir`.
inline std::vector<std::filesystem::path> synth_corpus(const std::filesystem::path& dir, std::size_t count,
                                                       std::uint64_t seed) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::io_error, "cannot create " + dir.string());
  std::vector<std::filesystem::path> paths;
  for (std::size_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "piece-%04zu", i);
    const auto path = dir / (std::string(name) + ".json");
    write_file(path, serialize_notelist(synth_melody(name, Rng::derive(seed, i))));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace bmm
