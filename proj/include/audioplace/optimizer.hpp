#pragma once

// Order-preserving assignment of layout elements to distinct sound bins.
//
// Elements are taken in layout order (ascending visual azimuth). A cut
// rotation r relabels bin b as (b - r) mod B; an assignment is feasible under
// cut r when the relabeled bins are strictly increasing in element order.
// Every assignment that keeps the circular order of the elements is feasible
// under at least one cut, so maximizing over all cuts covers exactly the
// non-crossing, non-overlapping assignments.
//
// Tie-break shared by every solver: lowest cut rotation first, then the
// lexicographically smallest relabeled bin sequence.

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "audioplace/analyzer.hpp"
#include "audioplace/errors.hpp"

namespace audioplace {

enum class SolverKind { dp_exact, brute_force, colocated };

inline std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::dp_exact: return "dp_exact";
    case SolverKind::brute_force: return "brute_force";
    case SolverKind::colocated: return "colocated";
  }
  return "unknown";
}

struct Assignment {
  std::string id;
  Azimuth visual_azimuth;
  BinIndex sound_bin;
  Azimuth sound_azimuth;  // bin center
  double elevation_deg = 0.0;
  double score = 0.0;
  std::optional<std::string> label;
};

struct PlacementSolution {
  std::vector<Assignment> assignments;  // layout order
  double objective = 0.0;
  SolverKind solver = SolverKind::dp_exact;
  int cut_rotation = 0;
  double solve_time_ms = 0.0;
  std::vector<std::string> warnings;

  std::vector<int> bins() const {
    std::vector<int> out;
    out.reserve(assignments.size());
    for (const auto& a : assignments) out.push_back(a.sound_bin.index);
    return out;
  }
};

struct SolveOptions {
  /// Forbid bins whose center is farther than this from the element's
  /// visual azimuth. Off by default.
  std::optional<double> max_displacement_deg;
};

namespace detail {

inline constexpr double kForbidden = -std::numeric_limits<double>::infinity();

inline std::vector<char> allowed_bins(const ScoreMatrix& scores, const SolveOptions& options) {
  const std::size_t n = scores.rows();
  const int bins = scores.cols();
  std::vector<char> allowed(n * bins, 1);
  if (!options.max_displacement_deg) return allowed;
  const double limit = *options.max_displacement_deg;
  if (!(limit >= 0.0)) throw std::invalid_argument("max displacement must be >= 0");
  for (std::size_t i = 0; i < n; ++i) {
    for (int s = 0; s < bins; ++s) {
      const double d =
          angular_distance(scores.grid().center(BinIndex{s}), scores.layout()[i].visual_azimuth);
      allowed[i * bins + s] = d <= limit + 1e-9;
    }
  }
  return allowed;
}

inline PlacementSolution make_solution(const ScoreMatrix& scores, const std::vector<int>& bins,
                                       SolverKind solver, int cut) {
  PlacementSolution sol;
  sol.solver = solver;
  sol.cut_rotation = cut;
  double total = 0.0;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const Element& e = scores.layout()[i];
    const double score = scores(i, bins[i]);
    total += score;
    sol.assignments.push_back({e.id, e.visual_azimuth, BinIndex{bins[i]},
                               scores.grid().center(BinIndex{bins[i]}), e.elevation_deg, score,
                               e.label});
  }
  sol.objective = total;
  return sol;
}

/// Left-to-right sum, the one definition of an assignment's objective.
inline double objective_of(const ScoreMatrix& scores, const std::vector<int>& bins) {
  double total = 0.0;
  for (std::size_t i = 0; i < bins.size(); ++i) total += scores(i, bins[i]);
  return total;
}

inline void check_feasible_size(const ScoreMatrix& scores) {
  if (scores.rows() == 0) throw InfeasibleError("empty layout");
  if (scores.rows() > static_cast<std::size_t>(scores.cols())) {
    throw InfeasibleError(std::to_string(scores.rows()) + " elements do not fit into " +
                          std::to_string(scores.cols()) + " distinct bins");
  }
}

}  // namespace detail

/// Exact optimum by dynamic programming over (element, relabeled bin) for
/// each cut rotation. O(n * B^2) total.
inline PlacementSolution solve(const ScoreMatrix& scores, const SolveOptions& options = {}) {
  const auto start = std::chrono::steady_clock::now();
  detail::check_feasible_size(scores);
  const std::size_t n = scores.rows();
  const int bins = scores.cols();
  const auto allowed = detail::allowed_bins(scores, options);

  // best_from[i][j]: best total of elements i..n-1 with element i at
  // relabeled bin j. suffix[i][j] = max over k >= j of best_from[i][k].
  std::vector<double> best_from(n * bins), suffix((n + 1) * (bins + 1), detail::kForbidden);
  std::optional<std::vector<int>> best_bins;
  double best_objective = detail::kForbidden;
  int best_cut = 0;

  for (int cut = 0; cut < bins; ++cut) {
    const auto abs_bin = [&](int rel) { return (rel + cut) % bins; };
    for (std::size_t ii = n; ii-- > 0;) {
      for (int j = bins - 1; j >= 0; --j) {
        const int b = abs_bin(j);
        double value = detail::kForbidden;
        if (allowed[ii * bins + b]) {
          const double rest = ii + 1 == n ? 0.0 : suffix[(ii + 1) * (bins + 1) + j + 1];
          if (rest != detail::kForbidden) value = scores(ii, b) + (ii + 1 == n ? 0.0 : rest);
        }
        best_from[ii * bins + j] = value;
        suffix[ii * (bins + 1) + j] = std::max(value, suffix[ii * (bins + 1) + j + 1]);
      }
    }
    const double cut_best = suffix[0];
    if (cut_best == detail::kForbidden) continue;

    std::vector<int> rel(n);
    int from = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double target = suffix[i * (bins + 1) + from];
      int j = from;
      while (best_from[i * bins + j] != target) ++j;
      rel[i] = j;
      from = j + 1;
    }
    std::vector<int> absolute(n);
    for (std::size_t i = 0; i < n; ++i) absolute[i] = abs_bin(rel[i]);
    const double objective = detail::objective_of(scores, absolute);
    if (!best_bins || objective > best_objective) {
      best_bins = std::move(absolute);
      best_objective = objective;
      best_cut = cut;
    }
  }
  if (!best_bins) throw InfeasibleError("no assignment satisfies the displacement limit");
  auto sol = detail::make_solution(scores, *best_bins, SolverKind::dp_exact, best_cut);
  sol.solve_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

/// Exhaustive enumeration over every cut and every strictly increasing
/// relabeled sequence, in lexicographic order. Verification oracle for
/// solve(); refuses n > 5 or more than 36 bins.
inline PlacementSolution brute_force_solve(const ScoreMatrix& scores,
                                           const SolveOptions& options = {}) {
  constexpr std::size_t kMaxElements = 5;
  constexpr int kMaxBins = 36;
  if (scores.rows() > kMaxElements || scores.cols() > kMaxBins) {
    throw std::invalid_argument("brute force limited to n <= 5 and bin_count <= 36");
  }
  const auto start = std::chrono::steady_clock::now();
  detail::check_feasible_size(scores);
  const std::size_t n = scores.rows();
  const int bins = scores.cols();
  const auto allowed = detail::allowed_bins(scores, options);

  std::optional<std::vector<int>> best_bins;
  double best_objective = detail::kForbidden;
  int best_cut = 0;
  std::vector<int> rel(n), absolute(n);

  for (int cut = 0; cut < bins; ++cut) {
    // Odometer over strictly increasing rel[0] < rel[1] < ... < rel[n-1].
    for (std::size_t i = 0; i < n; ++i) rel[i] = static_cast<int>(i);
    while (true) {
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i) {
        absolute[i] = (rel[i] + cut) % bins;
        ok = ok && allowed[i * bins + absolute[i]];
      }
      if (ok) {
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) objective += scores(i, absolute[i]);
        if (!best_bins || objective > best_objective) {
          best_bins = absolute;
          best_objective = objective;
          best_cut = cut;
        }
      }
      std::size_t k = n;
      while (k > 0 && rel[k - 1] == bins - static_cast<int>(n - (k - 1))) --k;
      if (k == 0) break;
      ++rel[k - 1];
      for (std::size_t i = k; i < n; ++i) rel[i] = rel[i - 1] + 1;
    }
  }
  if (!best_bins) throw InfeasibleError("no assignment satisfies the displacement limit");
  auto sol = detail::make_solution(scores, *best_bins, SolverKind::brute_force, best_cut);
  sol.solve_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

/// Baseline: every cue plays from its element's own visual bin.
inline PlacementSolution colocated_solution(const ScoreMatrix& scores) {
  std::vector<int> bins;
  for (const auto& e : scores.layout().elements()) {
    bins.push_back(scores.grid().bin_of(e.visual_azimuth).index);
  }
  auto sol = detail::make_solution(scores, bins, SolverKind::colocated, 0);
  for (std::size_t i = 1; i < bins.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (bins[i] == bins[j]) {
        sol.warnings.push_back("elements '" + scores.layout()[j].id + "' and '" +
                               scores.layout()[i].id + "' share visual bin " +
                               std::to_string(bins[i]));
      }
    }
  }
  return sol;
}

/// True when bins are pairwise distinct and strictly increasing after
/// relabeling by the solution's cut rotation.
inline bool preserves_order(const PlacementSolution& sol, int bin_count) {
  int prev = -1;
  for (const auto& a : sol.assignments) {
    const int rel = ((a.sound_bin.index - sol.cut_rotation) % bin_count + bin_count) % bin_count;
    if (rel <= prev) return false;
    prev = rel;
  }
  return true;
}

inline nlohmann::ordered_json to_json(const PlacementSolution& sol, bool include_timing = true) {
  nlohmann::ordered_json assignments = nlohmann::ordered_json::array();
  for (const auto& a : sol.assignments) {
    nlohmann::ordered_json item{{"id", a.id},
                                {"visual_azimuth_deg", a.visual_azimuth.degrees()},
                                {"sound_azimuth_deg", a.sound_azimuth.degrees()},
                                {"bin", a.sound_bin.index},
                                {"elevation_deg", a.elevation_deg},
                                {"score", a.score}};
    if (a.label) item["label"] = *a.label;
    assignments.push_back(std::move(item));
  }
  nlohmann::ordered_json j{{"solver", to_string(sol.solver)},
                           {"objective", sol.objective},
                           {"cut_rotation", sol.cut_rotation},
                           {"assignments", assignments}};
  if (include_timing) j["solve_time_ms"] = sol.solve_time_ms;
  if (!sol.warnings.empty()) j["warnings"] = sol.warnings;
  return j;
}

}  // namespace audioplace
