#include <random>

#include <gtest/gtest.h>

#include "audioplace/analyzer.hpp"
#include "audioplace/calibration.hpp"
#include "support/oracles.hpp"

using namespace audioplace;

namespace {

ConfusionModel pure_mirror_model() {
  SyntheticModelParams p;
  p.regions = standard_regions({1e-6, 1e-6, 1e-6, 1e-6}, {1.0, 1.0, 1.0, 1.0});
  return synthesize_model(p);
}

}  // namespace

TEST(Layout, SortsByAzimuthAndRejectsBadInput) {
  const Layout layout({{"b", Azimuth(200), 0, {}}, {"a", Azimuth(30), 5, "Slack"}});
  EXPECT_EQ(layout[0].id, "a");
  EXPECT_EQ(layout[1].id, "b");
  EXPECT_EQ(layout[0].label.value(), "Slack");
  EXPECT_DOUBLE_EQ(layout[0].elevation_deg, 5.0);

  EXPECT_THROW(Layout({}), InputError);
  EXPECT_THROW(Layout({{"a", Azimuth(1), 0, {}}, {"a", Azimuth(2), 0, {}}}), InputError);
}

TEST(Layout, DuplicateAzimuthsArePerturbedInIdOrder) {
  const Layout layout({{"z", Azimuth(30), 0, {}},
                       {"y", Azimuth(30), 0, {}},
                       {"x", Azimuth(30), 0, {}},
                       {"w", Azimuth(30.001), 0, {}}});
  ASSERT_EQ(layout.size(), 4u);
  for (std::size_t i = 1; i < layout.size(); ++i) {
    EXPECT_LT(layout[i - 1].visual_azimuth, layout[i].visual_azimuth);
  }
  EXPECT_EQ(layout[0].id, "x");
  EXPECT_DOUBLE_EQ(layout[0].visual_azimuth.degrees(), 30.0);
  EXPECT_FALSE(layout.perturbed_ids().empty());
}

TEST(Layout, JsonParsingReportsPaths) {
  const auto j = nlohmann::json::parse(
      R"({"elements":[{"id":"a","azimuth_deg":30.0,"elevation_deg":0.0,"label":"Slack"},
                      {"id":"b","azimuth_deg":-150}]})");
  const Layout layout = layout_from_json(j, "l.json");
  EXPECT_DOUBLE_EQ(layout[1].visual_azimuth.degrees(), 210.0);

  try {
    layout_from_json(nlohmann::json::parse(R"({"elements":[{"id":"a"}]})"), "l.json");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.where(), "l.json:elements[0].azimuth_deg");
  }
  EXPECT_THROW(layout_from_json(nlohmann::json::parse("[]"), "l.json"), InputError);
  EXPECT_THROW(layout_from_json(nlohmann::json::parse(R"({"elements":[]})"), "l.json"),
               InputError);
}

TEST(BlurProbability, IdentityModel) {
  const ConfusionModel m = identity_model(12);
  const Azimuth v(7 * 12 + 3);
  EXPECT_DOUBLE_EQ(blur_probability(m, v, BinIndex{7}), 1.0);
  EXPECT_DOUBLE_EQ(blur_probability(m, v, BinIndex{8}), 0.0);
}

TEST(BlurProbability, ReadsSourceRowPerceivedColumn) {
  const ConfusionModel m = calibrated_model();
  // v at 0 deg (bin 0), s = bin of 348 deg (bin 29): cell (row 29, col 0)
  EXPECT_EQ(blur_probability(m, Azimuth(0), bin_of(Azimuth(348), 12)), m(29, 0));
  EXPECT_EQ(blur_probability(m, Azimuth(100), BinIndex{3}), m(3, 8));
}

TEST(ConeDistance, MirrorCollisionIsZero) {
  const Layout layout = oracle::make_layout({30, 150});
  EXPECT_DOUBLE_EQ(cone_distance(layout, 0, Azimuth(30)), 0.0);
}

TEST(ConeDistance, PointPlusMirrorExample) {
  // cone of 6 deg is {6, 174}; nearest to 150 is 174 at 24 deg
  const Layout layout = oracle::make_layout({30, 150});
  EXPECT_DOUBLE_EQ(cone_distance(layout, 0, Azimuth(6)), 24.0);
}

TEST(ConeDistance, MirrorOnlyIgnoresThePointItself) {
  const Layout layout = oracle::make_layout({30, 40});
  // s = 40: the point itself sits on element 1, its mirror 140 is 100 away
  EXPECT_DOUBLE_EQ(cone_distance(layout, 0, Azimuth(40), ConeMode::point_plus_mirror), 0.0);
  EXPECT_DOUBLE_EQ(cone_distance(layout, 0, Azimuth(40), ConeMode::mirror_only), 100.0);
}

TEST(ConeDistance, SingleElementIsSafest) {
  const Layout layout = oracle::make_layout({123});
  for (int s = 0; s < 360; s += 17) EXPECT_DOUBLE_EQ(cone_distance(layout, 0, Azimuth(s)), 180.0);
}

TEST(ScoreMatrix, BlurOnlyIdentityIsIndicator) {
  const Layout layout = oracle::make_layout({6, 100, 250});
  const ScoreMatrix scores = build_score_matrix(identity_model(12), layout, {{1.0, 0.0}});
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const int vb = bin_of(layout[i].visual_azimuth, 12).index;
    for (int s = 0; s < 30; ++s) EXPECT_EQ(scores(i, s), s == vb ? 1.0 : 0.0);
  }
}

TEST(ScoreMatrix, ConeOnlyDependsOnGeometry) {
  const Layout layout = oracle::make_layout({30, 150});
  const ScoreMatrix a = build_score_matrix(identity_model(12), layout, {{0.0, 1.0}});
  const ScoreMatrix b = build_score_matrix(calibrated_model(), layout, {{0.0, 1.0}});
  EXPECT_EQ(a.values(), b.values());
  // element 0's worst bins put the cone on element 1 (bins 2 and 12)
  EXPECT_DOUBLE_EQ(a(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(a(0, 12), 0.0);
  double best = 0.0;
  for (int s = 0; s < 30; ++s) best = std::max(best, a(0, s));
  EXPECT_GT(best, 0.3);
}

TEST(ScoreMatrix, SideBySideMatchesDirectEvaluation) {
  const std::vector<double> v{6.0, 18.0};
  const Layout layout = oracle::make_layout(v);
  const ConfusionModel model = calibrated_model();
  const ScoreMatrix scores = build_score_matrix(model, layout);
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (int s = 0; s < 30; ++s) {
      EXPECT_NEAR(scores(i, s), oracle::direct_score(model, v, i, s, 0.9, 0.1), 1e-15)
          << i << "," << s;
    }
  }
}

TEST(ScoreMatrix, RandomLayoutsMatchDirectEvaluationInBothConeModes) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> az(0.0, 360.0);
  const ConfusionModel model = calibrated_model();
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> v(1 + trial % 6);
    for (auto& x : v) x = az(rng);
    std::sort(v.begin(), v.end());
    const Layout layout = oracle::make_layout(v);
    for (const bool mirror_only : {false, true}) {
      const ScoreMatrix scores = build_score_matrix(
          model, layout,
          {{0.7, 0.3}, mirror_only ? ConeMode::mirror_only : ConeMode::point_plus_mirror});
      for (std::size_t i = 0; i < v.size(); ++i) {
        for (int s = 0; s < 30; ++s) {
          const double expected =
              v.size() == 1 ? 0.7 * model(s, static_cast<int>(v[0] / 12)) + 0.3
                            : oracle::direct_score(model, v, i, s, 0.7, 0.3, mirror_only);
          ASSERT_NEAR(scores(i, s), expected, 1e-12);
        }
      }
    }
  }
}

TEST(ScoreMatrix, BoundedAndPure) {
  const Layout layout = oracle::make_layout({10, 50, 170, 300});
  const ScoreMatrix a = build_score_matrix(pure_mirror_model(), layout, {{0.9, 0.1}});
  const ScoreMatrix b = build_score_matrix(pure_mirror_model(), layout, {{0.9, 0.1}});
  EXPECT_EQ(a.values(), b.values());
  for (double x : a.values()) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
  }
  EXPECT_THROW(build_score_matrix(identity_model(12), layout, {{-0.1, 0.1}}),
               std::invalid_argument);
}
