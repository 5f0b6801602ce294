#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "bmm/error.hpp"

namespace bmm {

/// Exact position or length in quarter-note beats.
using Beat = boost::rational<std::int64_t>;

inline double to_double(const Beat& b) {
  return static_cast<double>(b.numerator()) / static_cast<double>(b.denominator());
}

/// Closest rational to `x` by continued fractions, stopping once the error
/// drops below 1e-9 or the denominator would exceed 10^6. Decimal inputs such
/// as 3.999 and 0.1 come back exact; 0.3333333333 becomes 1/3.
inline Beat beat_from_double(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::range_error, "non-finite beat value");
  const bool negative = x < 0;
  double rest = std::fabs(x);
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  const double target = rest;
  for (int iter = 0; iter < 64; ++iter) {
    const double whole = std::floor(rest);
    if (whole > 9.0e12) break;
    const auto a = static_cast<std::int64_t>(whole);
    const std::int64_t p2 = a * p1 + p0;
    const std::int64_t q2 = a * q1 + q0;
    if (q2 > 1'000'000) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    if (std::fabs(target - static_cast<double>(p1) / static_cast<double>(q1)) < 1e-9) break;
    const double frac = rest - whole;
    if (frac <= 0) break;
    rest = 1.0 / frac;
  }
  if (q1 == 0) throw Error(ErrorCode::range_error, "beat value out of range");
  return Beat(negative ? -p1 : p1, q1);
}

struct Note {
  int pitch = 60;
  Beat duration{1};
  bool downbeat = false;
  Beat onset{0};

  friend bool operator==(const Note&, const Note&) = default;
};

/// A measure grid entry: from beat `at` onward, measures are `beats` long.
struct TimeSignature {
  Beat at{0};
  Beat beats{4};

  friend bool operator==(const TimeSignature&, const TimeSignature&) = default;
};

struct MelodySequence {
  std::string id;
  std::vector<Note> notes;
  std::vector<TimeSignature> time_signatures{TimeSignature{}};

  friend bool operator==(const MelodySequence&, const MelodySequence&) = default;
};

enum class PieceFormat { midi, notelist };

struct PieceManifest {
  std::string path;
  PieceFormat format = PieceFormat::notelist;
  std::string id;
};

inline void check_note(const Note& n) {
  if (n.pitch < 0 || n.pitch > 127) {
    throw Error(ErrorCode::range_error, "pitch " + std::to_string(n.pitch) + " outside 0-127");
  }
  if (n.duration <= Beat(0)) throw Error(ErrorCode::range_error, "duration must be positive");
}

/// Throws unless every note is in range and onsets strictly increase.
inline void validate(const MelodySequence& seq) {
  for (std::size_t i = 0; i < seq.notes.size(); ++i) {
    check_note(seq.notes[i]);
    if (seq.notes[i].onset < Beat(0)) throw Error(ErrorCode::range_error, "negative onset");
    if (i > 0 && !(seq.notes[i - 1].onset < seq.notes[i].onset)) {
      throw Error(ErrorCode::range_error, "onsets not strictly increasing at note " + std::to_string(i));
    }
  }
}

/// Sorted, de-duplicated grid; an empty map becomes 4/4 from beat 0.
inline std::vector<TimeSignature> normalized_grid(std::vector<TimeSignature> grid) {
  std::erase_if(grid, [](const TimeSignature& ts) { return ts.beats <= Beat(0); });
  std::stable_sort(grid.begin(), grid.end(),
                   [](const TimeSignature& a, const TimeSignature& b) { return a.at < b.at; });
  // a later entry at the same beat replaces the earlier one
  std::vector<TimeSignature> out;
  for (const auto& ts : grid) {
    if (!out.empty() && out.back().at == ts.at) {
      out.back() = ts;
    } else {
      out.push_back(ts);
    }
  }
  if (out.empty() || out.front().at > Beat(0)) out.insert(out.begin(), TimeSignature{});
  return out;
}

inline bool is_measure_start(const std::vector<TimeSignature>& grid, const Beat& onset) {
  const TimeSignature* active = nullptr;
  for (const auto& ts : grid) {
    if (ts.at <= onset) active = &ts;
  }
  if (active == nullptr) return false;
  const Beat measures = (onset - active->at) / active->beats;
  return measures.denominator() == 1;
}

/// Sets each note's downbeat flag from the measure grid: true iff the onset
/// lands exactly on a measure start of the signature active at that onset.
inline MelodySequence derive_downbeats(MelodySequence seq) {
  const auto grid = normalized_grid(seq.time_signatures);
  for (auto& note : seq.notes) note.downbeat = is_measure_start(grid, note.onset);
  return seq;
}

/// Onsets rebuilt back-to-back from durations, starting at beat 0.
inline void resequence_onsets(std::vector<Note>& notes) {
  Beat at{0};
  for (auto& n : notes) {
    n.onset = at;
    at += n.duration;
  }
}

inline MelodySequence transpose(MelodySequence seq, int semitones) {
  for (auto& n : seq.notes) {
    n.pitch += semitones;
    check_note(n);
  }
  return seq;
}

/// Multiplies every duration and onset by `factor`; downbeats re-derived
/// against the unchanged measure grid.
inline MelodySequence scale_durations(MelodySequence seq, const Beat& factor) {
  if (factor <= Beat(0)) throw Error(ErrorCode::range_error, "scale factor must be positive");
  for (auto& n : seq.notes) {
    n.duration *= factor;
    n.onset *= factor;
  }
  return derive_downbeats(std::move(seq));
}

}  // namespace bmm
