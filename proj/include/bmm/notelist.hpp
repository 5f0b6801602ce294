#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bmm/error.hpp"
#include "bmm/melody.hpp"
#include "bmm/midi.hpp"

namespace bmm {

using json = nlohmann::json;

namespace detail {

inline std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

/// Locates the line on which the `index`-th note object starts, for messages.
inline std::size_t note_line(std::string_view text, std::size_t index) {
  const auto key = text.find("\"notes\"");
  if (key == std::string_view::npos) return 1;
  auto pos = text.find('[', key);
  std::size_t seen = 0;
  int depth = 0;
  for (; pos != std::string_view::npos && pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c == '{') {
      if (depth == 0 && seen++ == index) return line_of(text, pos);
      ++depth;
    } else if (c == '}') {
      --depth;
    }
  }
  return 1;
}

inline bool is_power_of_two(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace detail

/// Beats are written as JSON numbers when binary-exact, otherwise as "p/q".
inline json beat_to_json(const Beat& b) {
  if (detail::is_power_of_two(b.denominator()) && b.denominator() <= (std::int64_t{1} << 20)) {
    if (b.denominator() == 1) return b.numerator();
    return to_double(b);
  }
  return std::to_string(b.numerator()) + "/" + std::to_string(b.denominator());
}

inline Beat beat_from_json(const json& j, const std::string& what) {
  if (j.is_number_integer()) return Beat(j.get<std::int64_t>());
  if (j.is_number()) return beat_from_double(j.get<double>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return beat_from_double(std::stod(s));
      const auto num = std::stoll(s.substr(0, slash));
      const auto den = std::stoll(s.substr(slash + 1));
      if (den == 0) throw Error(ErrorCode::range_error, what + ": zero denominator");
      return Beat(num, den);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::syntax_error, what + ": bad number '" + s + "'");
    }
  }
  throw Error(ErrorCode::syntax_error, what + ": expected a number");
}

/// Parses the JSON note-list interchange format. Notes are back-to-back;
/// per-note "downbeat" overrides the grid-derived flag.
inline MelodySequence parse_notelist(std::string_view text, std::string default_id = {}) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::syntax_error,
                "line " + std::to_string(detail::line_of(text, e.byte > 0 ? e.byte - 1 : 0)) + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::syntax_error, "line 1: top level must be an object");

  MelodySequence seq;
  seq.id = std::move(default_id);
  if (auto it = doc.find("id"); it != doc.end()) {
    if (!it->is_string()) throw Error(ErrorCode::syntax_error, "line 1: \"id\" must be a string");
    seq.id = it->get<std::string>();
  }

  if (auto it = doc.find("timesig"); it != doc.end()) {
    if (!it->is_array()) throw Error(ErrorCode::syntax_error, "\"timesig\" must be an array");
    seq.time_signatures.clear();
    for (const auto& entry : *it) {
      if (!entry.is_object() || !entry.contains("beats")) {
        throw Error(ErrorCode::syntax_error, "timesig entry needs \"beats\"");
      }
      TimeSignature ts;
      ts.at = entry.contains("at") ? beat_from_json(entry["at"], "timesig.at") : Beat(0);
      ts.beats = beat_from_json(entry["beats"], "timesig.beats");
      if (ts.beats <= Beat(0) || ts.at < Beat(0)) throw Error(ErrorCode::range_error, "timesig entry out of range");
      seq.time_signatures.push_back(ts);
    }
    seq.time_signatures = normalized_grid(std::move(seq.time_signatures));
  }

  const auto notes = doc.find("notes");
  if (notes == doc.end() || !notes->is_array()) {
    throw Error(ErrorCode::syntax_error, "line 1: missing \"notes\" array");
  }
  std::vector<std::pair<std::size_t, bool>> explicit_downbeats;
  for (std::size_t i = 0; i < notes->size(); ++i) {
    const auto& rec = (*notes)[i];
    const auto where = "line " + std::to_string(detail::note_line(text, i)) + ": note " + std::to_string(i);
    if (!rec.is_object() || !rec.contains("pitch") || !rec.contains("dur")) {
      throw Error(ErrorCode::syntax_error, where + " needs \"pitch\" and \"dur\"");
    }
    if (!rec["pitch"].is_number_integer()) throw Error(ErrorCode::syntax_error, where + ": pitch must be an integer");
    Note n;
    const auto pitch = rec["pitch"].get<std::int64_t>();
    if (pitch < 0 || pitch > 127) {
      throw Error(ErrorCode::range_error, where + ": pitch " + std::to_string(pitch) + " outside 0-127");
    }
    n.pitch = static_cast<int>(pitch);
    try {
      n.duration = beat_from_json(rec["dur"], where + " dur");
    } catch (const Error& e) {
      if (e.code() == ErrorCode::range_error) throw Error(ErrorCode::range_error, where + ": bad duration");
      throw;
    }
    if (n.duration <= Beat(0)) throw Error(ErrorCode::range_error, where + ": duration must be positive");
    if (auto db = rec.find("downbeat"); db != rec.end()) {
      if (!db->is_boolean()) throw Error(ErrorCode::syntax_error, where + ": downbeat must be a boolean");
      explicit_downbeats.emplace_back(i, db->get<bool>());
    }
    seq.notes.push_back(n);
  }
  if (seq.notes.empty()) throw Error(ErrorCode::empty_melody, "note list is empty");

  resequence_onsets(seq.notes);
  seq = derive_downbeats(std::move(seq));
  for (auto [index, flag] : explicit_downbeats) seq.notes[index].downbeat = flag;
  return seq;
}

/// Writes `seq` in the note-list format. Onsets are implied by durations, so
/// gaps between notes (rests) are not represented.
inline std::string serialize_notelist(const MelodySequence& seq) {
  json doc;
  doc["id"] = seq.id;
  json grid = json::array();
  for (const auto& ts : seq.time_signatures) {
    grid.push_back({{"at", beat_to_json(ts.at)}, {"beats", beat_to_json(ts.beats)}});
  }
  doc["timesig"] = std::move(grid);
  json notes = json::array();
  for (const auto& n : seq.notes) {
    notes.push_back({{"pitch", n.pitch}, {"dur", beat_to_json(n.duration)}, {"downbeat", n.downbeat}});
  }
  doc["notes"] = std::move(notes);
  return doc.dump() + "\n";
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

inline PieceManifest describe_piece(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  const bool is_midi = bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4, "MThd");
  return {path.string(), is_midi ? PieceFormat::midi : PieceFormat::notelist, path.stem().string()};
}

/// Loads a MIDI or note-list file, chosen by content. The id defaults to the
/// file stem; a note-list "id" field takes precedence.
inline MelodySequence load_piece(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  const auto stem = path.stem().string();
  if (bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4, "MThd")) {
    return parse_midi(bytes, stem);
  }
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  return parse_notelist(text, stem);
}

struct Corpus {
  std::vector<MelodySequence> pieces;
  std::vector<std::string> paths;
  /// (path, reason) for files that could not be ingested.
  std::vector<std::pair<std::string, std::string>> skipped;
};

inline bool is_piece_file(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  const auto name = p.filename().string();
  if (name.empty() || name.front() == '.') return false;
  if (name == "manifest.json") return false;
  return ext == ".mid" || ext == ".midi" || ext == ".json";
}

/// Loads every piece file directly inside `dir`, in filename order.
inline Corpus load_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::missing_file, "corpus directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_piece_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  Corpus corpus;
  std::set<std::string> ids;
  for (const auto& f : files) {
    try {
      auto piece = load_piece(f);
      if (!ids.insert(piece.id).second) {
        corpus.skipped.emplace_back(f.string(), "duplicate id " + piece.id);
        continue;
      }
      corpus.pieces.push_back(std::move(piece));
      corpus.paths.push_back(f.string());
    } catch (const Error& e) {
      corpus.skipped.emplace_back(f.string(), e.what());
    }
  }
  return corpus;
}

}  // namespace bmm
