#pragma once

// Monte-Carlo virtual listener.
//
// A trial picks a target element uniformly, plays its cue from the placed
// bin, samples a perceived bin from the confusion model and attributes the
// cue to the element nearest the perceived bin's center. Trial t draws only
// from RandomStream(seed, t), so results do not depend on the thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "audioplace/angles.hpp"
#include "audioplace/confusion_model.hpp"
#include "audioplace/layout.hpp"
#include "audioplace/optimizer.hpp"
#include "audioplace/random.hpp"

namespace audioplace {

struct TrialRecord {
  std::size_t target = 0;  // layout index
  BinIndex sound_bin;
  BinIndex perceived_bin;
  std::size_t chosen = 0;  // layout index
  bool correct = false;
  double circular_error_deg = 0.0;
  double adjusted_error_deg = 0.0;
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample SD (n - 1); 0 when fewer than two samples
};

struct ElementAccuracy {
  std::string id;
  std::int64_t trials = 0;
  std::int64_t correct = 0;
  double accuracy = 0.0;
};

struct SimulationReport {
  std::string strategy;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double accuracy_stderr = 0.0;  // binomial normal approximation
  std::vector<ElementAccuracy> per_element;
  std::vector<std::vector<std::int64_t>> confusion;  // [target][chosen]
  MeanSd circular_error;
  MeanSd adjusted_error;
  MeanSd cone_effect;
  std::vector<TrialRecord> records;  // empty unless requested
};

struct SimulationOptions {
  std::int64_t trials = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool keep_records = false;
  std::string strategy = "placement";
};

/// Element whose visual azimuth is nearest to `perceived`; ties go to the
/// earlier element in layout order.
inline std::size_t nearest_element_index(const Layout& layout, Azimuth perceived) {
  std::size_t best = 0;
  double best_d = angular_distance(perceived, layout[0].visual_azimuth);
  for (std::size_t i = 1; i < layout.size(); ++i) {
    const double d = angular_distance(perceived, layout[i].visual_azimuth);
    if (d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

inline const std::string& nearest_element_decision(const Layout& layout, Azimuth perceived) {
  return layout[nearest_element_index(layout, perceived)].id;
}

namespace detail {

class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  MeanSd result() const {
    return {mean_, n_ > 1 ? std::sqrt(m2_ / static_cast<double>(n_ - 1)) : 0.0};
  }
  std::int64_t count() const { return n_; }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline double adjusted_error(Azimuth perceived, Azimuth truth) {
  return std::min(angular_distance(perceived, truth),
                  angular_distance(mirror_front_back(perceived), truth));
}

}  // namespace detail

inline SimulationReport run_simulation(const ConfusionModel& model, const Layout& layout,
                                       const PlacementSolution& placement,
                                       const SimulationOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (placement.assignments.size() != layout.size()) {
    throw std::invalid_argument("placement does not match layout size");
  }
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (placement.assignments[i].id != layout[i].id) {
      throw std::invalid_argument("placement element '" + placement.assignments[i].id +
                                  "' does not match layout element '" + layout[i].id + "'");
    }
    if (!model.grid().contains(placement.assignments[i].sound_bin)) {
      throw std::invalid_argument("placement bin outside the model's bin grid");
    }
  }
  const BinGrid& grid = model.grid();
  const auto total = static_cast<std::size_t>(options.trials);
  std::vector<TrialRecord> records(total);

  const auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      RandomStream rng(options.seed, t);
      TrialRecord& r = records[t];
      r.target = static_cast<std::size_t>(rng.below(layout.size()));
      r.sound_bin = placement.assignments[r.target].sound_bin;
      r.perceived_bin = sample_perceived(model, r.sound_bin, rng);
      const Azimuth perceived = grid.center(r.perceived_bin);
      r.chosen = nearest_element_index(layout, perceived);
      r.correct = r.chosen == r.target;
      const Azimuth truth = layout[r.target].visual_azimuth;
      r.circular_error_deg = angular_distance(perceived, truth);
      r.adjusted_error_deg = detail::adjusted_error(perceived, truth);
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, 256));
  if (threads == 1 || total < 2 * threads) {
    run_range(0, total);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(total, begin + chunk);
      if (begin < end) workers.emplace_back(run_range, begin, end);
    }
  }

  // Sequential reduction in trial order keeps sums independent of threading.
  SimulationReport report;
  report.strategy = options.strategy;
  report.trials = options.trials;
  report.seed = options.seed;
  const std::size_t n = layout.size();
  report.confusion.assign(n, std::vector<std::int64_t>(n, 0));
  report.per_element.resize(n);
  for (std::size_t i = 0; i < n; ++i) report.per_element[i].id = layout[i].id;
  detail::RunningStats circ, adj, cone;
  std::int64_t correct = 0;
  for (const auto& r : records) {
    ++report.confusion[r.target][r.chosen];
    ++report.per_element[r.target].trials;
    if (r.correct) {
      ++correct;
      ++report.per_element[r.target].correct;
    }
    circ.add(r.circular_error_deg);
    adj.add(r.adjusted_error_deg);
    cone.add(r.circular_error_deg - r.adjusted_error_deg);
  }
  for (auto& e : report.per_element) {
    e.accuracy = e.trials ? static_cast<double>(e.correct) / static_cast<double>(e.trials) : 0.0;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(options.trials);
  report.accuracy_stderr =
      std::sqrt(report.accuracy * (1.0 - report.accuracy) / static_cast<double>(options.trials));
  report.circular_error = circ.result();
  report.adjusted_error = adj.result();
  report.cone_effect = cone.result();
  if (options.keep_records) report.records = std::move(records);
  return report;
}

// ---------------------------------------------------------------------------
// Single-source localization statistics by region of the true azimuth.

struct RegionStatistics {
  std::string name;
  std::int64_t samples = 0;
  MeanSd circular_error;
  MeanSd adjusted_error;
  MeanSd cone_effect;
};

struct RegionBounds {
  std::string name;
  double start_deg;
  double end_deg;
};

inline std::vector<RegionBounds> standard_region_bounds() {
  return {{"front", -36.0, 36.0}, {"right", 36.0, 144.0}, {"back", 144.0, 216.0},
          {"left", 216.0, 324.0}};
}

/// For every true bin, draws `trials_per_bin` perceived bins and aggregates
/// errors by the region containing the true bin's center. The last entry is
/// "all".
inline std::vector<RegionStatistics> table1_statistics(
    const ConfusionModel& model, std::int64_t trials_per_bin, std::uint64_t seed,
    const std::vector<RegionBounds>& regions = standard_region_bounds()) {
  if (trials_per_bin < 1) throw std::invalid_argument("trials_per_bin must be >= 1");
  const BinGrid& grid = model.grid();
  std::vector<detail::RunningStats> circ(regions.size() + 1), adj(regions.size() + 1),
      cone(regions.size() + 1);
  const std::size_t all = regions.size();
  for (int t = 0; t < grid.bin_count(); ++t) {
    const Azimuth truth = grid.center(BinIndex{t});
    std::size_t region = all;
    for (std::size_t k = 0; k < regions.size(); ++k) {
      if (in_arc(truth, regions[k].start_deg, regions[k].end_deg)) {
        region = k;
        break;
      }
    }
    RandomStream rng(seed, static_cast<std::uint64_t>(t));
    for (std::int64_t i = 0; i < trials_per_bin; ++i) {
      const Azimuth perceived = grid.center(sample_perceived(model, BinIndex{t}, rng));
      const double c = angular_distance(perceived, truth);
      const double a = detail::adjusted_error(perceived, truth);
      // bins outside every region count toward "all" only
      for (const std::size_t k : {region, all}) {
        circ[k].add(c);
        adj[k].add(a);
        cone[k].add(c - a);
        if (region == all) break;
      }
    }
  }
  std::vector<RegionStatistics> out;
  for (std::size_t k = 0; k <= regions.size(); ++k) {
    out.push_back({k < regions.size() ? regions[k].name : "all", circ[k].count(), circ[k].result(),
                   adj[k].result(), cone[k].result()});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::ordered_json to_json(const MeanSd& m) { return {{"mean", m.mean}, {"sd", m.sd}}; }

inline nlohmann::ordered_json to_json(const SimulationReport& r) {
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (const auto& e : r.per_element) {
    per.push_back({{"id", e.id}, {"trials", e.trials}, {"correct", e.correct},
                   {"accuracy", e.accuracy}});
  }
  return {{"strategy", r.strategy},
          {"trials", r.trials},
          {"seed", r.seed},
          {"accuracy", r.accuracy},
          {"accuracy_stderr", r.accuracy_stderr},
          {"per_element", per},
          {"confusion_counts", r.confusion},
          {"mean_circular_error_deg", r.circular_error.mean},
          {"mean_adjusted_error_deg", r.adjusted_error.mean},
          {"cone_effect_deg", r.cone_effect.mean},
          {"circular_error", to_json(r.circular_error)},
          {"adjusted_error", to_json(r.adjusted_error)},
          {"cone_effect", to_json(r.cone_effect)}};
}

inline nlohmann::ordered_json to_json(const std::vector<RegionStatistics>& stats) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : stats) {
    arr.push_back({{"region", s.name},
                   {"samples", s.samples},
                   {"circular_error", to_json(s.circular_error)},
                   {"adjusted_error", to_json(s.adjusted_error)},
                   {"cone_effect", to_json(s.cone_effect)}});
  }
  return arr;
}

/// Per-trial dump: trial,target,sound_bin,perceived_bin,chosen,correct,circ_err,adj_err
inline void write_trials_csv(std::ostream& out, const SimulationReport& report,
                             const Layout& layout) {
  out << "trial,target,sound_bin,perceived_bin,chosen,correct,circ_err,adj_err\n";
  char buf[64];
  for (std::size_t t = 0; t < report.records.size(); ++t) {
    const auto& r = report.records[t];
    out << t << ',' << layout[r.target].id << ',' << r.sound_bin.index << ','
        << r.perceived_bin.index << ',' << layout[r.chosen].id << ',' << (r.correct ? 1 : 0);
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", r.circular_error_deg, r.adjusted_error_deg);
    out << buf;
  }
}

}  // namespace audioplace
