#pragma once

// Listener confusion model P(perceived bin | true bin) over azimuth bins.
// Rows are indexed by the true (played) bin, columns by the perceived bin.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "audioplace/angles.hpp"
#include "audioplace/errors.hpp"
#include "audioplace/random.hpp"

namespace audioplace {

struct Region {
  std::string name;
  double start_deg = 0.0;  // inclusive
  double end_deg = 0.0;    // exclusive; may wrap past 360
  double blur_sd_deg = 1.0;
  double flip_probability = 0.0;
};

enum class Integration {
  closed_form,  // exact wrapped-Gaussian bin masses
  monte_carlo,  // samples_per_bin draws per row, seeded
};

struct SyntheticModelParams {
  int bin_size_deg = 12;
  std::vector<Region> regions;
  std::uint64_t seed = 0;
  Integration integration = Integration::closed_form;
  int samples_per_bin = 150;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  /// Region whose arc contains `a`. Requires validate() to have passed.
  const Region& region_of(Azimuth a) const;
};

/// Default region boundaries with the given per-region parameters, in the
/// order front, right, back, left.
inline std::vector<Region> standard_regions(const double (&sd)[4], const double (&flip)[4]) {
  return {{"front", -36.0, 36.0, sd[0], flip[0]},
          {"right", 36.0, 144.0, sd[1], flip[1]},
          {"back", 144.0, 216.0, sd[2], flip[2]},
          {"left", 216.0, 324.0, sd[3], flip[3]}};
}

enum class ProvenanceKind { empirical_file, raw_trials, synthetic, in_memory };

struct Provenance {
  ProvenanceKind kind = ProvenanceKind::in_memory;
  std::string source;  // file path, when loaded
  std::optional<SyntheticModelParams> params;
};

struct LoadOptions {
  double row_tolerance = 1e-6;
  bool renormalize = false;
};

class ConfusionModel {
 public:
  /// Validates entries in [0, 1] and row sums within `row_tolerance` of 1.
  /// With `renormalize`, rows with positive mass are rescaled instead of
  /// rejected. `source` labels errors.
  ConfusionModel(int bin_size_deg, std::vector<double> row_major, Provenance provenance = {},
                 LoadOptions options = {}, const std::string& source = "matrix");

  const BinGrid& grid() const { return grid_; }
  int bin_size_deg() const { return grid_.bin_size_deg(); }
  int bin_count() const { return grid_.bin_count(); }
  const Provenance& provenance() const { return provenance_; }

  double operator()(int true_bin, int perceived_bin) const {
    return matrix_[static_cast<std::size_t>(true_bin) * bin_count() + perceived_bin];
  }
  double probability(BinIndex true_bin, BinIndex perceived_bin) const {
    return (*this)(true_bin.index, perceived_bin.index);
  }

  std::vector<double> row(int true_bin) const {
    const auto begin = matrix_.begin() + static_cast<std::ptrdiff_t>(true_bin) * bin_count();
    return {begin, begin + bin_count()};
  }

  const std::vector<double>& row_major() const { return matrix_; }

  /// Unnormalized cumulative row, for inverse-CDF sampling.
  const double* cumulative_row(int true_bin) const {
    return cdf_.data() + static_cast<std::size_t>(true_bin) * bin_count();
  }

 private:
  BinGrid grid_;
  std::vector<double> matrix_;
  std::vector<double> cdf_;
  Provenance provenance_;
};

// ---------------------------------------------------------------------------
// Construction

inline ConfusionModel::ConfusionModel(int bin_size_deg, std::vector<double> row_major,
                                      Provenance provenance, LoadOptions options,
                                      const std::string& source)
    : grid_(bin_size_deg), matrix_(std::move(row_major)), provenance_(std::move(provenance)) {
  const int n = grid_.bin_count();
  if (matrix_.size() != static_cast<std::size_t>(n) * n) {
    throw InputError(source, "expected " + std::to_string(n) + "x" + std::to_string(n) +
                                 " matrix for bin size " + std::to_string(bin_size_deg) +
                                 ", got " + std::to_string(matrix_.size()) + " entries");
  }
  for (int r = 0; r < n; ++r) {
    double sum = 0.0;
    for (int c = 0; c < n; ++c) {
      const double p = matrix_[static_cast<std::size_t>(r) * n + c];
      if (!std::isfinite(p) || p < 0.0 || p > 1.0 + options.row_tolerance) {
        throw MatrixCellError(source, r, c, "probability out of [0, 1]");
      }
      sum += p;
    }
    if (std::fabs(sum - 1.0) > options.row_tolerance) {
      if (!options.renormalize || sum <= 0.0) {
        std::ostringstream msg;
        msg << std::setprecision(10) << "row is not stochastic (sums to " << sum << ")";
        throw MatrixCellError(source, r, -1, msg.str());
      }
      for (int c = 0; c < n; ++c) matrix_[static_cast<std::size_t>(r) * n + c] /= sum;
    }
  }
  cdf_.resize(matrix_.size());
  for (int r = 0; r < n; ++r) {
    double acc = 0.0;
    for (int c = 0; c < n; ++c) {
      acc += matrix_[static_cast<std::size_t>(r) * n + c];
      cdf_[static_cast<std::size_t>(r) * n + c] = acc;
    }
  }
}

inline ConfusionModel identity_model(int bin_size_deg) {
  const int n = BinGrid(bin_size_deg).bin_count();
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i) * n + i] = 1.0;
  return ConfusionModel(bin_size_deg, std::move(m));
}

// ---------------------------------------------------------------------------
// Matrix CSV: "bin_size_deg,<int>" then one line per true bin.

inline ConfusionModel parse_model_csv(std::istream& in, const std::string& source,
                                      LoadOptions options = {}) {
  std::string line;
  if (!std::getline(in, line)) throw InputError(source, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string key = "bin_size_deg,";
  if (line.rfind(key, 0) != 0) {
    throw InputError(source + ":line 1", "expected header 'bin_size_deg,<int>'");
  }
  int bin_size = 0;
  {
    const std::string value = line.substr(key.size());
    std::size_t used = 0;
    try {
      bin_size = std::stoi(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || bin_size <= 0 || 360 % bin_size != 0) {
      throw InputError(source + ":line 1", "invalid bin size '" + value + "'");
    }
  }
  const int n = 360 / bin_size;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * n);
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= n) {
      throw MatrixCellError(source, row, -1,
                            "too many rows (expected " + std::to_string(n) + ")");
    }
    std::stringstream cells(line);
    std::string cell;
    int col = 0;
    while (std::getline(cells, cell, ',')) {
      if (col >= n) {
        throw MatrixCellError(source, row, col,
                              "too many columns (expected " + std::to_string(n) + ")");
      }
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      while (used < cell.size() && (cell[used] == ' ' || cell[used] == '\t')) ++used;
      if (used == 0 || used != cell.size()) {
        throw MatrixCellError(source, row, col, "malformed number '" + cell + "'");
      }
      values.push_back(v);
      ++col;
    }
    if (!line.empty() && line.back() == ',') {
      throw MatrixCellError(source, row, col, "trailing comma");
    }
    if (col != n) {
      throw MatrixCellError(source, row, col,
                            "expected " + std::to_string(n) + " columns, got " +
                                std::to_string(col));
    }
    ++row;
  }
  if (row != n) {
    throw InputError(source, "expected " + std::to_string(n) + " data rows, got " +
                                 std::to_string(row));
  }
  return ConfusionModel(bin_size, std::move(values),
                        Provenance{ProvenanceKind::empirical_file, source, std::nullopt}, options,
                        source);
}

inline ConfusionModel load_model(const std::string& path, LoadOptions options = {}) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open model file");
  return parse_model_csv(in, path, options);
}

inline void write_model_csv(std::ostream& out, const ConfusionModel& model) {
  const int n = model.bin_count();
  out << "bin_size_deg," << model.bin_size_deg() << '\n';
  char buf[32];
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", model(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

/// Aggregates raw trials ("true_azimuth_deg,predicted_azimuth_deg" per line)
/// into a row-normalized matrix. Every true bin needs at least one trial.
inline ConfusionModel ingest_raw_trials(std::istream& in, int bin_size_deg,
                                        const std::string& source) {
  const BinGrid grid(bin_size_deg);
  const int n = grid.bin_count();
  std::vector<double> counts(static_cast<std::size_t>(n) * n, 0.0);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "true_azimuth_deg,predicted_azimuth_deg") {
        throw InputError(source + ":line 1",
                         "expected header 'true_azimuth_deg,predicted_azimuth_deg'");
      }
      continue;
    }
    const auto comma = line.find(',');
    double t = 0.0, p = 0.0;
    try {
      if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
        throw std::invalid_argument("fields");
      }
      std::size_t u1 = 0, u2 = 0;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      t = std::stod(a, &u1);
      p = std::stod(b, &u2);
      if (u1 != a.size() || u2 != b.size() || !std::isfinite(t) || !std::isfinite(p)) {
        throw std::invalid_argument("number");
      }
    } catch (const std::exception&) {
      throw InputError(source + ":line " + std::to_string(line_no),
                       "expected two finite numbers, got '" + line + "'");
    }
    const int tb = grid.bin_of(Azimuth(t)).index;
    const int pb = grid.bin_of(Azimuth(p)).index;
    counts[static_cast<std::size_t>(tb) * n + pb] += 1.0;
  }
  for (int r = 0; r < n; ++r) {
    double sum = 0.0;
    for (int c = 0; c < n; ++c) sum += counts[static_cast<std::size_t>(r) * n + c];
    if (sum == 0.0) {
      throw MatrixCellError(source, r, -1, "no trials for this true bin");
    }
    for (int c = 0; c < n; ++c) counts[static_cast<std::size_t>(r) * n + c] /= sum;
  }
  return ConfusionModel(bin_size_deg, std::move(counts),
                        Provenance{ProvenanceKind::raw_trials, source, std::nullopt},
                        LoadOptions{1e-9, false}, source);
}

inline ConfusionModel ingest_raw_trials_file(const std::string& path, int bin_size_deg) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open raw-trials file");
  return ingest_raw_trials(in, bin_size_deg, path);
}

// ---------------------------------------------------------------------------
// Synthetic model

inline void SyntheticModelParams::validate() const {
  if (bin_size_deg <= 0 || 360 % bin_size_deg != 0) {
    throw std::invalid_argument("bin_size_deg must divide 360");
  }
  if (regions.empty()) throw std::invalid_argument("at least one region is required");
  if (integration == Integration::monte_carlo && samples_per_bin < 1) {
    throw std::invalid_argument("samples_per_bin must be >= 1");
  }
  for (const auto& r : regions) {
    if (!std::isfinite(r.start_deg) || !std::isfinite(r.end_deg)) {
      throw std::invalid_argument("region '" + r.name + "' has non-finite boundaries");
    }
    if (!(r.blur_sd_deg > 0.0) || !std::isfinite(r.blur_sd_deg)) {
      throw std::invalid_argument("region '" + r.name + "' blur_sd_deg must be > 0");
    }
    if (!(r.flip_probability >= 0.0 && r.flip_probability <= 1.0)) {
      throw std::invalid_argument("region '" + r.name + "' flip_probability must be in [0, 1]");
    }
  }
  if (regions.size() == 1) {
    if (normalize_degrees(regions[0].start_deg) != normalize_degrees(regions[0].end_deg)) {
      throw std::invalid_argument("a single region must cover the full circle");
    }
    return;
  }
  // Contiguous cover: sorted by start, each region ends where the next begins.
  std::vector<std::pair<double, double>> arcs;
  double total = 0.0;
  for (const auto& r : regions) {
    const double s = normalize_degrees(r.start_deg);
    const double e = normalize_degrees(r.end_deg);
    const double len = normalize_degrees(e - s);
    if (len == 0.0) throw std::invalid_argument("region '" + r.name + "' is empty");
    arcs.emplace_back(s, e);
    total += len;
  }
  std::sort(arcs.begin(), arcs.end());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const double next_start = arcs[(i + 1) % arcs.size()].first;
    if (std::fabs(arcs[i].second - next_start) > 1e-9) {
      throw std::invalid_argument("regions do not partition the circle (gap or overlap at " +
                                  std::to_string(arcs[i].second) + " deg)");
    }
  }
  if (std::fabs(total - 360.0) > 1e-9) {
    throw std::invalid_argument("regions do not partition the circle");
  }
}

inline const Region& SyntheticModelParams::region_of(Azimuth a) const {
  if (regions.size() == 1) return regions.front();
  for (const auto& r : regions) {
    if (in_arc(a, r.start_deg, r.end_deg)) return r;
  }
  throw std::logic_error("azimuth not covered by any region");
}

namespace detail {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Mass of a wrapped normal N(mean, sd) over [lo, hi) on the circle.
inline double wrapped_normal_mass(double lo, double hi, double mean, double sd) {
  const int wraps = static_cast<int>(std::ceil(12.0 * sd / 360.0)) + 1;
  double mass = 0.0;
  for (int m = -wraps; m <= wraps; ++m) {
    const double shift = 360.0 * m - mean;
    mass += normal_cdf((hi + shift) / sd) - normal_cdf((lo + shift) / sd);
  }
  return mass;
}

}  // namespace detail

/// Two-ridge model: each true bin is perceived as a wrapped Gaussian around
/// its center (probability 1 - p_flip) or around the front-back mirror of the
/// center (probability p_flip), with the region's blur SD. Rows are
/// normalized.
inline ConfusionModel synthesize_model(const SyntheticModelParams& params) {
  params.validate();
  const BinGrid grid(params.bin_size_deg);
  const int n = grid.bin_count();
  const double size = grid.bin_size_deg();
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  for (int t = 0; t < n; ++t) {
    const Azimuth center = grid.center(BinIndex{t});
    const Azimuth mirrored = mirror_front_back(center);
    const Region& region = params.region_of(center);
    double* row = m.data() + static_cast<std::size_t>(t) * n;
    if (params.integration == Integration::closed_form) {
      for (int k = 0; k < n; ++k) {
        const double lo = k * size, hi = lo + size;
        row[k] = (1.0 - region.flip_probability) *
                     detail::wrapped_normal_mass(lo, hi, center.degrees(), region.blur_sd_deg) +
                 region.flip_probability *
                     detail::wrapped_normal_mass(lo, hi, mirrored.degrees(), region.blur_sd_deg);
      }
    } else {
      RandomStream rng(params.seed, static_cast<std::uint64_t>(t));
      for (int i = 0; i < params.samples_per_bin; ++i) {
        const bool flip = rng.uniform() < region.flip_probability;
        const double mean = flip ? mirrored.degrees() : center.degrees();
        const Azimuth x(mean + region.blur_sd_deg * rng.normal());
        row[grid.bin_of(x).index] += 1.0;
      }
    }
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += row[k];
    for (int k = 0; k < n; ++k) row[k] /= sum;
  }
  return ConfusionModel(params.bin_size_deg, std::move(m),
                        Provenance{ProvenanceKind::synthetic, {}, params},
                        LoadOptions{1e-9, false}, "synthetic");
}

// ---------------------------------------------------------------------------
// Queries

/// Draws a perceived bin for a cue played at `true_bin`.
inline BinIndex sample_perceived(const ConfusionModel& model, BinIndex true_bin,
                                 RandomStream& rng) {
  const int n = model.bin_count();
  const double* cdf = model.cumulative_row(true_bin.index);
  const double x = rng.uniform() * cdf[n - 1];
  const auto it = std::upper_bound(cdf, cdf + n, x);
  return BinIndex{static_cast<int>(std::min<std::ptrdiff_t>(it - cdf, n - 1))};
}

/// Fraction of perceived bins v whose best source bin argmax_s P(v|s) is v
/// itself. Scans columns; ties go to the lowest source bin.
inline double diagonal_argmax_fraction(const ConfusionModel& model) {
  const int n = model.bin_count();
  int hits = 0;
  for (int v = 0; v < n; ++v) {
    int best = 0;
    for (int s = 1; s < n; ++s) {
      if (model(s, v) > model(best, v)) best = s;
    }
    hits += best == v;
  }
  return static_cast<double>(hits) / n;
}

/// Shannon entropy of each row, in bits.
inline std::vector<double> row_entropies_bits(const ConfusionModel& model) {
  const int n = model.bin_count();
  std::vector<double> out(n, 0.0);
  for (int r = 0; r < n; ++r) {
    double h = 0.0;
    for (int c = 0; c < n; ++c) {
      const double p = model(r, c);
      if (p > 0.0) h -= p * std::log2(p);
    }
    out[r] = h;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic params JSON

inline nlohmann::ordered_json to_json(const SyntheticModelParams& p) {
  nlohmann::ordered_json regions = nlohmann::ordered_json::array();
  for (const auto& r : p.regions) {
    regions.push_back({{"name", r.name},
                       {"start_deg", r.start_deg},
                       {"end_deg", r.end_deg},
                       {"blur_sd_deg", r.blur_sd_deg},
                       {"flip_probability", r.flip_probability}});
  }
  return {{"bin_size_deg", p.bin_size_deg},
          {"seed", p.seed},
          {"integration", p.integration == Integration::closed_form ? "closed_form" : "monte_carlo"},
          {"samples_per_bin", p.samples_per_bin},
          {"regions", regions}};
}

inline SyntheticModelParams params_from_json(const nlohmann::json& j, const std::string& source) {
  SyntheticModelParams p;
  try {
    if (!j.is_object()) throw InputError(source, "expected a JSON object");
    p.bin_size_deg = j.value("bin_size_deg", 12);
    p.seed = j.value("seed", std::uint64_t{0});
    p.samples_per_bin = j.value("samples_per_bin", 150);
    const std::string integration = j.value("integration", std::string("closed_form"));
    if (integration == "closed_form") {
      p.integration = Integration::closed_form;
    } else if (integration == "monte_carlo") {
      p.integration = Integration::monte_carlo;
    } else {
      throw InputError(source + ":integration", "unknown integration '" + integration + "'");
    }
    if (!j.contains("regions") || !j.at("regions").is_array()) {
      throw InputError(source + ":regions", "missing regions array");
    }
    for (std::size_t i = 0; i < j.at("regions").size(); ++i) {
      const auto& r = j.at("regions").at(i);
      const std::string where = source + ":regions[" + std::to_string(i) + "]";
      if (!r.is_object()) throw InputError(where, "expected an object");
      for (const char* key : {"start_deg", "end_deg", "blur_sd_deg", "flip_probability"}) {
        if (!r.contains(key) || !r.at(key).is_number()) {
          throw InputError(where, std::string("missing numeric field '") + key + "'");
        }
      }
      p.regions.push_back({r.value("name", std::string("region") + std::to_string(i)),
                           r.at("start_deg").get<double>(), r.at("end_deg").get<double>(),
                           r.at("blur_sd_deg").get<double>(),
                           r.at("flip_probability").get<double>()});
    }
    p.validate();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(source, e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(source, e.what());
  }
  return p;
}

inline SyntheticModelParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open params file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path, e.what());
  }
  return params_from_json(j, path);
}

}  // namespace audioplace
