#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bmm/error.hpp"
#include "bmm/melody.hpp"

namespace bmm {

namespace detail {

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const { return pos_ >= bytes_.size(); }
  std::size_t pos() const { return pos_; }

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u16() {
    std::uint32_t hi = u8();
    return (hi << 8) | u8();
  }
  std::uint32_t u32() {
    std::uint32_t hi = u16();
    return (hi << 16) | u16();
  }
  std::uint32_t vlq() {
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t b = u8();
      value = (value << 7) | (b & 0x7F);
      if ((b & 0x80) == 0) return value;
    }
    throw Error(ErrorCode::malformed_file, "variable-length quantity longer than 4 bytes");
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::malformed_file, "unexpected end of data at byte " + std::to_string(pos_));
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct RawNote {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  int pitch = 0;
};

struct RawTimeSignature {
  std::uint64_t tick = 0;
  Beat beats{4};
};

inline void read_track(std::span<const std::uint8_t> data, std::vector<RawNote>& notes,
                       std::vector<RawTimeSignature>& signatures) {
  ByteReader in(data);
  std::uint64_t tick = 0;
  std::uint8_t running = 0;
  // open note-ons per (channel, pitch), closed first-in first-out
  std::map<std::pair<int, int>, std::vector<std::uint64_t>> open;

  auto close = [&](int channel, int pitch) {
    auto it = open.find({channel, pitch});
    if (it == open.end() || it->second.empty()) return;
    const std::uint64_t start = it->second.front();
    it->second.erase(it->second.begin());
    if (channel != 9 && tick > start) notes.push_back({start, tick, pitch});
  };

  while (!in.done()) {
    tick += in.vlq();
    std::uint8_t status = in.u8();
    int have = 0;
    std::uint8_t d[2] = {0, 0};
    if (status < 0x80) {
      if (running == 0) throw Error(ErrorCode::malformed_file, "data byte without running status");
      d[0] = status;
      have = 1;
      status = running;
    }
    if (status == 0xFF) {
      const std::uint8_t type = in.u8();
      const auto payload = in.take(in.vlq());
      if (type == 0x58 && payload.size() >= 2) {
        const int numerator = payload[0];
        const int denom_pow = payload[1];
        if (numerator > 0 && denom_pow < 16) {
          signatures.push_back({tick, Beat(numerator * 4, std::int64_t{1} << denom_pow)});
        }
      }
      if (type == 0x2F) break;
      continue;
    }
    if (status == 0xF0 || status == 0xF7) {
      in.take(in.vlq());
      continue;
    }
    if (status >= 0xF0) throw Error(ErrorCode::malformed_file, "unexpected system message in track");

    running = status;
    const int kind = status & 0xF0;
    const int channel = status & 0x0F;
    const int data_len = (kind == 0xC0 || kind == 0xD0) ? 1 : 2;
    for (; have < data_len; ++have) d[have] = in.u8();

    if (kind == 0x90 && d[1] > 0) {
      open[{channel, d[0]}].push_back(tick);
    } else if (kind == 0x80 || kind == 0x90) {
      close(channel, d[0]);
    }
  }
  // notes left sounding at the end of the track close there
  for (auto& [key, starts] : open) {
    for (auto start : starts) {
      if (key.first != 9 && tick > start) notes.push_back({start, tick, key.second});
    }
  }
}

}  // namespace detail

/// Parses a Standard MIDI File (format 0 or 1, ticks-per-quarter timing) and
/// reduces it to a monophonic melody: at each onset the highest pitch wins,
/// and a note is cut short where the next kept onset begins. Channel 10
/// (index 9) is skipped. Downbeats come from the file's time signatures.
inline MelodySequence parse_midi(std::span<const std::uint8_t> bytes, std::string id = {}) {
  detail::ByteReader in(bytes);
  const auto magic = in.take(4);
  if (!std::equal(magic.begin(), magic.end(), "MThd")) {
    throw Error(ErrorCode::malformed_file, "missing MThd header");
  }
  const std::uint32_t header_len = in.u32();
  if (header_len < 6) throw Error(ErrorCode::malformed_file, "header chunk too short");
  const auto header = in.take(header_len);
  const std::uint32_t format = (header[0] << 8) | header[1];
  const std::uint32_t division = (header[4] << 8) | header[5];
  if (format > 1) throw Error(ErrorCode::malformed_file, "SMF format " + std::to_string(format) + " not supported");
  if (division & 0x8000) throw Error(ErrorCode::unsupported_division, "SMPTE time division");
  if (division == 0) throw Error(ErrorCode::malformed_file, "zero ticks per quarter");

  std::vector<detail::RawNote> raw;
  std::vector<detail::RawTimeSignature> signatures;
  while (!in.done()) {
    const auto tag = in.take(4);
    const std::uint32_t len = in.u32();
    const auto body = in.take(len);
    if (std::equal(tag.begin(), tag.end(), "MTrk")) detail::read_track(body, raw, signatures);
  }

  // skyline: highest pitch per onset tick
  std::map<std::uint64_t, detail::RawNote> top;
  for (const auto& n : raw) {
    auto [it, inserted] = top.try_emplace(n.start, n);
    if (!inserted && n.pitch > it->second.pitch) it->second = n;
  }
  if (top.empty()) throw Error(ErrorCode::empty_melody, "no melodic notes found");

  const auto tpq = static_cast<std::int64_t>(division);
  MelodySequence seq;
  seq.id = std::move(id);
  for (auto it = top.begin(); it != top.end(); ++it) {
    auto next = std::next(it);
    std::uint64_t end = it->second.end;
    if (next != top.end()) end = std::min(end, next->first);
    Note note;
    note.pitch = it->second.pitch;
    note.onset = Beat(static_cast<std::int64_t>(it->first), tpq);
    note.duration = Beat(static_cast<std::int64_t>(end - it->first), tpq);
    seq.notes.push_back(note);
  }

  std::stable_sort(signatures.begin(), signatures.end(),
                   [](const auto& a, const auto& b) { return a.tick < b.tick; });
  seq.time_signatures.clear();
  for (const auto& ts : signatures) {
    seq.time_signatures.push_back({Beat(static_cast<std::int64_t>(ts.tick), tpq), ts.beats});
  }
  seq.time_signatures = normalized_grid(std::move(seq.time_signatures));
  return derive_downbeats(std::move(seq));
}

}  // namespace bmm
