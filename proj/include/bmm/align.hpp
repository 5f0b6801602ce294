#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "bmm/encode.hpp"
#include "bmm/error.hpp"

namespace bmm {

struct CostParams {
  /// Substitution multiplier applied when both elements sit on downbeats.
  double k_down = 2.0;
  double c_ins = 1.0;
  double c_del = 1.0;
  /// Cost per semitone of interval mismatch.
  double pitch_scale = 1.0;
  /// Cost per unit of log2 duration-ratio mismatch.
  double dur_scale = 1.0;
  /// Divide the raw distance by the longer clip's length.
  bool normalize_by_length = true;
  /// Magnitude-based substitution; when false, each mismatching channel
  /// costs its full scale regardless of the size of the mismatch.
  bool note_distance = true;

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0; };
    if (!(std::isfinite(k_down) && k_down >= 1.0)) throw Error(ErrorCode::invalid_params, "k_down must be >= 1");
    if (!positive(c_ins) || !positive(c_del)) throw Error(ErrorCode::invalid_params, "insert/delete costs must be > 0");
    if (!positive(pitch_scale) || !positive(dur_scale)) throw Error(ErrorCode::invalid_params, "cost scales must be > 0");
  }
};

inline double substitution_cost(const Element& x, const Element& y, const CostParams& p) {
  const double coeff = (x.downbeat && y.downbeat) ? p.k_down : 1.0;
  double pitch = std::abs(x.dpitch - y.dpitch);
  double dur = std::fabs(x.dlogdur - y.dlogdur);
  if (!p.note_distance) {
    pitch = pitch > 0 ? 1.0 : 0.0;
    dur = dur > 0 ? 1.0 : 0.0;
  }
  return coeff * (p.pitch_scale * pitch + p.dur_scale * dur);
}

/// Full (|u|+1) x (|w|+1) alignment table, row-major.
class DpTable {
 public:
  DpTable(std::size_t rows, std::size_t cols) : cols_(cols), cells_(rows * cols, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return cells_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }
  std::size_t rows() const { return cols_ == 0 ? 0 : cells_.size() / cols_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t cols_;
  std::vector<double> cells_;
};

inline DpTable fill_table(std::span<const Element> u, std::span<const Element> w, const CostParams& p) {
  DpTable d(u.size() + 1, w.size() + 1);
  for (std::size_t i = 1; i <= u.size(); ++i) d.at(i, 0) = d.at(i - 1, 0) + p.c_del;
  for (std::size_t j = 1; j <= w.size(); ++j) d.at(0, j) = d.at(0, j - 1) + p.c_ins;
  for (std::size_t i = 1; i <= u.size(); ++i) {
    for (std::size_t j = 1; j <= w.size(); ++j) {
      const auto& a = u[i - 1];
      const auto& b = w[j - 1];
      if (same_transition(a, b)) {
        d.at(i, j) = d.at(i - 1, j - 1);
      } else {
        d.at(i, j) = std::min({d.at(i - 1, j) + p.c_del, d.at(i, j - 1) + p.c_ins,
                               d.at(i - 1, j - 1) + substitution_cost(a, b, p)});
      }
    }
  }
  return d;
}

inline double edit_distance(std::span<const Element> u, std::span<const Element> w, const CostParams& p) {
  if (u.empty() || w.empty()) throw Error(ErrorCode::empty_clip, "edit distance needs non-empty clips");
  const auto table = fill_table(u, w, p);
  const double raw = table.at(u.size(), w.size());
  if (!p.normalize_by_length) return raw;
  return raw / static_cast<double>(std::max(u.size(), w.size()));
}

inline double edit_distance(const Clip& u, const Clip& w, const CostParams& p) {
  return edit_distance(std::span<const Element>(u.elements), std::span<const Element>(w.elements), p);
}

/// Maps a distance to a similarity in (0, 1]: ln(1 + e^-d) / ln 2.
inline double edge_weight(double d) {
  return std::log1p(std::exp(-d)) / std::numbers::ln2;
}

}  // namespace bmm
