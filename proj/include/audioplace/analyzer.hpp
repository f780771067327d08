#pragma once

// Per (element, candidate bin) utilities: probability that a cue played from
// the bin is perceived in the element's bin, and how far the cue's cone of
// confusion stays from every other element.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "audioplace/angles.hpp"
#include "audioplace/confusion_model.hpp"
#include "audioplace/layout.hpp"

namespace audioplace {

struct Weights {
  double blur = 0.9;
  double cone = 0.1;
};

struct AnalyzerOptions {
  Weights weights;
  ConeMode cone_mode = ConeMode::point_plus_mirror;
};

/// P(v | s): a cue played at bin `s` is perceived in the bin containing `v`.
inline double blur_probability(const ConfusionModel& model, Azimuth v, BinIndex s) {
  return model.probability(s, model.grid().bin_of(v));
}

/// Smallest angular distance from the cone of a cue at `s` to any element
/// other than `element_index`. 180 for a single-element layout.
inline double cone_distance(const Layout& layout, std::size_t element_index, Azimuth s,
                            ConeMode mode = ConeMode::point_plus_mirror) {
  if (element_index >= layout.size()) throw std::out_of_range("element index");
  if (layout.size() == 1) return 180.0;
  const auto points = cone_points(s, mode);
  double best = 180.0;
  for (std::size_t j = 0; j < layout.size(); ++j) {
    if (j == element_index) continue;
    for (const Azimuth p : points) {
      best = std::min(best, angular_distance(p, layout[j].visual_azimuth));
    }
  }
  return best;
}

/// n x bin_count utilities, row i for layout element i.
class ScoreMatrix {
 public:
  ScoreMatrix(Layout layout, BinGrid grid, std::vector<double> values,
              AnalyzerOptions options = {})
      : layout_(std::move(layout)), grid_(grid), values_(std::move(values)), options_(options) {
    if (values_.size() != layout_.size() * static_cast<std::size_t>(grid_.bin_count())) {
      throw std::invalid_argument("score matrix size does not match layout and bin grid");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw std::invalid_argument("score matrix entries must be finite");
    }
  }

  std::size_t rows() const { return layout_.size(); }
  int cols() const { return grid_.bin_count(); }

  double operator()(std::size_t element, int bin) const {
    return values_[element * static_cast<std::size_t>(cols()) + bin];
  }

  const Layout& layout() const { return layout_; }
  const BinGrid& grid() const { return grid_; }
  const AnalyzerOptions& options() const { return options_; }
  const std::vector<double>& values() const { return values_; }

 private:
  Layout layout_;
  BinGrid grid_;
  std::vector<double> values_;
  AnalyzerOptions options_;
};

/// Entry (i, s) = w_blur * P(v_i | s) + w_cone * D(v_i, center(s)) / 180.
inline ScoreMatrix build_score_matrix(const ConfusionModel& model, const Layout& layout,
                                      AnalyzerOptions options = {}) {
  const auto& w = options.weights;
  if (!(w.blur >= 0.0) || !(w.cone >= 0.0) || !std::isfinite(w.blur) || !std::isfinite(w.cone)) {
    throw std::invalid_argument("weights must be finite and non-negative");
  }
  const BinGrid& grid = model.grid();
  const int bins = grid.bin_count();
  std::vector<double> values(layout.size() * static_cast<std::size_t>(bins));
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const Azimuth v = layout[i].visual_azimuth;
    for (int s = 0; s < bins; ++s) {
      const double p = blur_probability(model, v, BinIndex{s});
      const double d = cone_distance(layout, i, grid.center(BinIndex{s}), options.cone_mode);
      values[i * bins + s] = w.blur * p + w.cone * (d / 180.0);
    }
  }
  return ScoreMatrix(layout, grid, std::move(values), options);
}

}  // namespace audioplace
