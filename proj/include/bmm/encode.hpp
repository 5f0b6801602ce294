#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "bmm/error.hpp"
#include "bmm/melody.hpp"

namespace bmm {

/// Transition between two neighbouring notes.
struct Element {
  int dpitch = 0;
  double dlogdur = 0.0;
  bool downbeat = false;

  friend bool operator==(const Element&, const Element&) = default;
};

/// Equality used by the alignment copy rule; downbeat flags are ignored.
inline bool same_transition(const Element& a, const Element& b) {
  return a.dpitch == b.dpitch && a.dlogdur == b.dlogdur;
}

struct EncodedSequence {
  std::string id;
  std::vector<Element> elements;

  std::size_t size() const { return elements.size(); }

  /// Element k spans notes k and k + 1 of the source melody.
  static std::pair<std::size_t, std::size_t> note_span(std::size_t element) {
    return {element, element + 1};
  }
};

struct Clip {
  std::string id;
  std::size_t start = 0;
  std::vector<Element> elements;

  std::size_t length() const { return elements.size(); }

  /// Inclusive note-index range covered by this clip.
  std::pair<std::size_t, std::size_t> note_range() const {
    return {start, start + elements.size()};
  }
};

/// log2 of an exact duration ratio. The ratio is reduced first so that the
/// same ratio always yields the same double, whatever the absolute tempo.
inline double log2_ratio(const Beat& later, const Beat& earlier) {
  const Beat ratio = later / earlier;
  return std::log2(static_cast<double>(ratio.numerator())) - std::log2(static_cast<double>(ratio.denominator()));
}

inline EncodedSequence encode_relative(const MelodySequence& seq) {
  if (seq.notes.size() < 2) {
    throw Error(ErrorCode::too_short, "piece '" + seq.id + "' needs at least 2 notes to encode");
  }
  EncodedSequence enc;
  enc.id = seq.id;
  enc.elements.reserve(seq.notes.size() - 1);
  for (std::size_t k = 0; k + 1 < seq.notes.size(); ++k) {
    const auto& a = seq.notes[k];
    const auto& b = seq.notes[k + 1];
    enc.elements.push_back({b.pitch - a.pitch, log2_ratio(b.duration, a.duration), b.downbeat});
  }
  return enc;
}

/// Clip start offsets for a sequence of `length` elements. Windows advance
/// by max(1, round(clip_length * (1 - overlap))); a final window ending on
/// the last element is added when the stride skips past it.
inline std::vector<std::size_t> clip_starts(std::size_t length, std::size_t clip_length, double overlap) {
  if (clip_length < 2) throw Error(ErrorCode::invalid_params, "clip length must be at least 2");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw Error(ErrorCode::invalid_params, "overlap rate must be in [0, 1)");
  if (length == 0) throw Error(ErrorCode::invalid_params, "cannot segment an empty sequence");
  if (length < clip_length) return {0};
  const auto raw = std::lround(static_cast<double>(clip_length) * (1.0 - overlap));
  const std::size_t step = raw < 1 ? 1 : static_cast<std::size_t>(raw);
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + clip_length <= length; s += step) starts.push_back(s);
  if (starts.back() != length - clip_length) starts.push_back(length - clip_length);
  return starts;
}

inline std::vector<Clip> segment(const EncodedSequence& enc, std::size_t clip_length, double overlap) {
  const auto starts = clip_starts(enc.size(), clip_length, overlap);
  std::vector<Clip> clips;
  clips.reserve(starts.size());
  for (auto s : starts) {
    const auto len = std::min(clip_length, enc.size() - s);
    Clip c;
    c.id = enc.id;
    c.start = s;
    c.elements.assign(enc.elements.begin() + static_cast<std::ptrdiff_t>(s),
                      enc.elements.begin() + static_cast<std::ptrdiff_t>(s + len));
    clips.push_back(std::move(c));
  }
  return clips;
}

}  // namespace bmm
