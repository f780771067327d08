#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "audioplace/calibration.hpp"
#include "audioplace/simulator.hpp"
#include "support/oracles.hpp"

using namespace audioplace;

namespace {

ConfusionModel pure_mirror_model() {
  SyntheticModelParams p;
  p.regions = standard_regions({1e-6, 1e-6, 1e-6, 1e-6}, {1.0, 1.0, 1.0, 1.0});
  return synthesize_model(p);
}

SimulationOptions opts(std::int64_t trials, std::uint64_t seed, unsigned threads = 1) {
  SimulationOptions o;
  o.trials = trials;
  o.seed = seed;
  o.threads = threads;
  return o;
}

}  // namespace

TEST(NearestElement, PicksClosestWithOrderTieBreak) {
  const Layout two = oracle::make_layout({30, 150});
  EXPECT_EQ(nearest_element_decision(two, Azimuth(40)), "e0");
  EXPECT_EQ(nearest_element_decision(two, Azimuth(90)), "e0");
  EXPECT_EQ(nearest_element_decision(two, Azimuth(100)), "e1");
  const Layout three = oracle::make_layout({0, 120, 240});
  EXPECT_EQ(nearest_element_decision(three, Azimuth(300)), "e0");
}

TEST(RunSimulation, PerfectListenerIsAlwaysRight) {
  const ConfusionModel model = identity_model(12);
  const Layout layout = oracle::make_layout({6, 18, 100, 250});
  const ScoreMatrix scores = build_score_matrix(model, layout);
  const SimulationReport r = run_simulation(model, layout, colocated_solution(scores), opts(5000, 1));
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_LE(r.circular_error.mean, 6.0);
  EXPECT_LE(r.adjusted_error.mean, 6.0);
  for (const auto& e : r.per_element) EXPECT_EQ(e.accuracy, 1.0);
}

TEST(RunSimulation, PureMirrorSwapsMirroredPair) {
  const ConfusionModel model = pure_mirror_model();
  const Layout layout = oracle::make_layout({30, 150});
  const ScoreMatrix scores = build_score_matrix(model, layout);
  const SimulationReport r =
      run_simulation(model, layout, colocated_solution(scores), opts(10000, 3));
  EXPECT_EQ(r.accuracy, 0.0);
  EXPECT_EQ(r.confusion[0][1] + r.confusion[1][0], 10000);
  EXPECT_NEAR(r.adjusted_error.mean, 0.0, 1e-9);
}

TEST(RunSimulation, AccuracyMatchesExactExpectation) {
  const ConfusionModel model = calibrated_model();
  const std::vector<double> v{6, 18, 140, 222, 300};
  const Layout layout = oracle::make_layout(v);
  const ScoreMatrix scores = build_score_matrix(model, layout);
  for (const auto& placement : {colocated_solution(scores), solve(scores)}) {
    const SimulationReport r = run_simulation(model, layout, placement, opts(100000, 8));
    const double exact = oracle::exact_accuracy(model, v, placement.bins());
    EXPECT_NEAR(r.accuracy, exact, 4.0 * std::sqrt(exact * (1 - exact) / 100000));
  }
}

TEST(RunSimulation, ReproducibleAcrossRunsAndThreadCounts) {
  const ConfusionModel model = calibrated_model();
  const Layout layout = oracle::make_layout({10, 80, 200});
  const PlacementSolution placement = solve(build_score_matrix(model, layout));
  const auto base = to_json(run_simulation(model, layout, placement, opts(20000, 5, 1))).dump();
  for (unsigned threads : {1u, 2u, 3u, 8u}) {
    EXPECT_EQ(to_json(run_simulation(model, layout, placement, opts(20000, 5, threads))).dump(),
              base)
        << threads;
  }
  EXPECT_NE(to_json(run_simulation(model, layout, placement, opts(20000, 6))).dump(), base);
}

TEST(RunSimulation, RecordsAreConsistent) {
  const ConfusionModel model = calibrated_model();
  const Layout layout = oracle::make_layout({30, 150, 270});
  const PlacementSolution placement = solve(build_score_matrix(model, layout));
  SimulationOptions o = opts(3000, 9, 4);
  o.keep_records = true;
  const SimulationReport r = run_simulation(model, layout, placement, o);
  ASSERT_EQ(r.records.size(), 3000u);
  std::int64_t correct = 0;
  for (const auto& t : r.records) {
    ASSERT_LT(t.chosen, layout.size());
    ASSERT_LE(t.adjusted_error_deg, t.circular_error_deg);
    ASSERT_EQ(t.sound_bin, placement.assignments[t.target].sound_bin);
    correct += t.correct;
  }
  EXPECT_DOUBLE_EQ(r.accuracy, correct / 3000.0);
  EXPECT_GE(r.cone_effect.mean, 0.0);

  std::ostringstream csv;
  write_trials_csv(csv, r, layout);
  const std::string text = csv.str();
  EXPECT_EQ(text.rfind("trial,target,sound_bin,perceived_bin,chosen,correct,circ_err,adj_err\n", 0),
            0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3001);
}

TEST(RunSimulation, SingleElementAlwaysIdentified) {
  const ConfusionModel model = calibrated_model();
  const Layout layout = oracle::make_layout({77});
  const ScoreMatrix scores = build_score_matrix(model, layout);
  EXPECT_EQ(run_simulation(model, layout, colocated_solution(scores), opts(2000, 1)).accuracy, 1.0);
}

TEST(RunSimulation, RejectsBadInput) {
  const ConfusionModel model = identity_model(12);
  const Layout layout = oracle::make_layout({10, 20});
  const PlacementSolution p = colocated_solution(build_score_matrix(model, layout));
  EXPECT_THROW(run_simulation(model, layout, p, opts(0, 1)), std::invalid_argument);
  EXPECT_THROW(run_simulation(model, oracle::make_layout({10}), p, opts(10, 1)),
               std::invalid_argument);
}

TEST(RunSimulation, OptimizedBeatsRandomFeasiblePlacementOnAverage) {
  const ConfusionModel model = calibrated_model();
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> az(0.0, 360.0);
  std::uniform_int_distribution<int> bin(0, 29);
  double optimized_total = 0.0, random_total = 0.0;
  for (int layout_index = 0; layout_index < 100; ++layout_index) {
    std::vector<double> v(2 + layout_index % 4);
    for (auto& x : v) x = az(rng);
    std::sort(v.begin(), v.end());
    const Layout layout = oracle::make_layout(v);
    const ScoreMatrix scores = build_score_matrix(model, layout);
    const PlacementSolution opt = solve(scores);
    // random order-preserving placement by rejection
    std::vector<int> bins(v.size());
    do {
      for (auto& b : bins) b = bin(rng);
    } while (!oracle::cyclic_order_ok(bins));
    PlacementSolution random = opt;
    for (std::size_t i = 0; i < bins.size(); ++i) random.assignments[i].sound_bin = BinIndex{bins[i]};
    optimized_total += run_simulation(model, layout, opt, opts(2000, layout_index)).accuracy;
    random_total += run_simulation(model, layout, random, opts(2000, layout_index)).accuracy;
  }
  EXPECT_GT(optimized_total / 100.0, random_total / 100.0);
}

TEST(Table1, PerfectListenerHasOnlyQuantizationError) {
  const auto stats = table1_statistics(identity_model(12), 50, 1);
  ASSERT_EQ(stats.size(), 5u);
  for (const auto& s : stats) {
    EXPECT_LE(s.circular_error.mean, 6.0);
    EXPECT_NEAR(s.cone_effect.mean, 0.0, 1e-12);
  }
  EXPECT_EQ(stats.back().name, "all");
  EXPECT_EQ(stats.back().samples, 30 * 50);
}

TEST(Table1, PureMirrorMatchesClosedForm) {
  // Closed form (scripts/closed_form_oracles.py): perceived = mirror of the
  // true bin center, so adjusted error is 0 and circular error is the mean
  // |180 - 2 theta| over each region's bin centers.
  const auto stats = table1_statistics(pure_mirror_model(), 20, 1);
  const double expected[] = {144.0, 53.333333333333336, 144.0, 53.333333333333336, 89.6};
  for (std::size_t k = 0; k < stats.size(); ++k) {
    EXPECT_NEAR(stats[k].circular_error.mean, expected[k], 1e-9) << stats[k].name;
    EXPECT_NEAR(stats[k].adjusted_error.mean, 0.0, 1e-9) << stats[k].name;
  }
}

TEST(Table1, SampledMeansConvergeToExpectation) {
  const ConfusionModel model = calibrated_model();
  const auto stats = table1_statistics(model, 2000, 4);
  const double bounds[4][2] = {{-36, 36}, {36, 144}, {144, 216}, {216, 324}};
  for (int k = 0; k < 4; ++k) {
    const auto e = oracle::expected_errors(model, bounds[k][0], bounds[k][1]);
    const double se = stats[k].circular_error.sd / std::sqrt(static_cast<double>(stats[k].samples));
    EXPECT_NEAR(stats[k].circular_error.mean, e.circular, 4 * se) << stats[k].name;
    EXPECT_NEAR(stats[k].adjusted_error.mean, e.adjusted, 4 * se) << stats[k].name;
  }
}

TEST(Table1, Deterministic) {
  const ConfusionModel model = calibrated_model();
  EXPECT_EQ(to_json(table1_statistics(model, 100, 3)).dump(),
            to_json(table1_statistics(model, 100, 3)).dump());
  EXPECT_THROW(table1_statistics(model, 0, 3), std::invalid_argument);
}
