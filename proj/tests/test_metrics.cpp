#include <gtest/gtest.h>

#include <queue>
#include <random>

#include "crackpath/metrics.hpp"
#include "support.hpp"

using namespace crackpath;

namespace {

BinaryRaster from_rows(const std::vector<std::string>& rows) {
  BinaryRaster r(rows.size(), "crack");
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) r.at(i, j) = rows[i][j] == '#';
  return r;
}

BinaryRaster random_raster(std::mt19937_64& rng, std::size_t n, double density) {
  std::bernoulli_distribution on(density);
  BinaryRaster r(n, "crack");
  for (auto& v : r.values) v = on(rng);
  return r;
}

// Flood fill from every unvisited crack pixel; counts components and checks
// whether the single one touches column 0.
bool oracle_continuous(const BinaryRaster& r) {
  const int n = static_cast<int>(r.n);
  std::vector<int> seen(r.values.size(), 0);
  int components = 0;
  bool touches = false;
  for (int s = 0; s < n * n; ++s) {
    if (!r.values[s] || seen[s]) continue;
    ++components;
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const int p = q.front();
      q.pop();
      if (p % n == 0) touches = true;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int i = p / n + di, j = p % n + dj;
          if (i < 0 || j < 0 || i >= n || j >= n) continue;
          const int t = i * n + j;
          if (r.values[t] && !seen[t]) {
            seen[t] = 1;
            q.push(t);
          }
        }
    }
  }
  return components == 1 && touches;
}

DisplacementGrid uniform_grid(std::size_t n, double ux, double uy) {
  return {FieldRaster(n, "ux", ux), FieldRaster(n, "uy", uy)};
}

}  // namespace

TEST(F1, Examples) {
  const auto truth = from_rows({"###.", "....", "....", "...."});
  EXPECT_EQ(f1_score(truth, truth).f1, 1.0);
  EXPECT_EQ(f1_score(BinaryRaster(4, "crack"), truth).f1, 0.0);
  EXPECT_EQ(f1_score(BinaryRaster(4, "crack"), BinaryRaster(4, "crack")).f1, 1.0);

  BinaryRaster t(4, "crack"), p(4, "crack");
  for (int k = 0; k < 9; ++k) t.values[k] = 1;
  for (int k = 0; k < 8; ++k) p.values[k] = 1;
  p.values[12] = 1;
  const auto rep = f1_score(p, t);
  EXPECT_EQ(rep.tp, 8u);
  EXPECT_EQ(rep.fp, 1u);
  EXPECT_EQ(rep.fn, 1u);
  EXPECT_EQ(rep.tn, 6u);
  EXPECT_EQ(rep.wrong_pixels, 2u);
  EXPECT_DOUBLE_EQ(rep.f1, 16.0 / 18.0);
}

TEST(F1, ShapeMismatch) {
  EXPECT_CRACKPATH_ERROR(f1_score(BinaryRaster(4, "a"), BinaryRaster(5, "b")), ErrorCode::ShapeMismatch);
}

TEST(F1, MatchesPixelwiseOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = random_raster(rng, 16, 0.05 + 0.9 * (trial % 10) / 10.0);
    const auto t = random_raster(rng, 16, 0.3);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t k = 0; k < p.values.size(); ++k) {
      tp += p.values[k] && t.values[k];
      fp += p.values[k] && !t.values[k];
      fn += !p.values[k] && t.values[k];
    }
    const double expected = tp + fp + fn == 0 ? 1.0 : 2.0 * tp / (2.0 * tp + fp + fn);
    const auto rep = f1_score(p, t);
    ASSERT_EQ(rep.tp, tp);
    ASSERT_EQ(rep.fp, fp);
    ASSERT_EQ(rep.fn, fn);
    ASSERT_EQ(rep.f1, expected);
  }
}

TEST(Continuity, Examples) {
  EXPECT_TRUE(is_continuous(from_rows({"....", "####", "....", "...."})));
  EXPECT_FALSE(is_continuous(from_rows({"....", "##.#", "....", "...."})));
  EXPECT_FALSE(is_continuous(from_rows({"....", ".###", "....", "...."})));
  EXPECT_FALSE(is_continuous(BinaryRaster(4, "crack")));
  EXPECT_TRUE(is_continuous(from_rows({"#...", ".#..", "..#.", "...#"})));
}

TEST(Continuity, MatchesFloodFillOracle) {
  std::mt19937_64 rng(23);
  int positives = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto r = random_raster(rng, 16, trial % 2 ? 0.08 : 0.55);
    const bool expected = oracle_continuous(r);
    positives += expected;
    ASSERT_EQ(is_continuous(r), expected) << trial;
  }
  EXPECT_GT(positives, 50);
}

TEST(Continuity, ComponentLabels) {
  const auto r = from_rows({"#..#", "#..#", "....", ".##."});
  std::vector<int> labels;
  EXPECT_EQ(label_components(r, &labels), 3u);
  EXPECT_EQ(labels[0], labels[4]);
  EXPECT_NE(labels[0], labels[3]);
  EXPECT_EQ(labels[1], 0);
}

TEST(Classify, Semantics) {
  // 20 truth pixels along row 5
  BinaryRaster truth(20, "crack");
  for (std::size_t j = 0; j < 20; ++j) truth.at(5, j) = 1;

  // discontinuous prediction with F1 = 0.95 is still Incorrect
  BinaryRaster broken = truth;
  broken.at(5, 10) = 0;
  broken.at(5, 11) = 0;
  ASSERT_NEAR(f1_score(broken, truth).f1, 36.0 / 38.0, 1e-15);
  EXPECT_FALSE(is_continuous(broken));
  EXPECT_EQ(classify(broken, truth), PathLabel::Incorrect);

  // continuous, truth row plus extra pixels on row 6: F1 = 40 / (40 + extra)
  auto with_extra = [&](std::size_t extra) {
    BinaryRaster p = truth;
    for (std::size_t j = 0; j < extra; ++j) p.at(6, j) = 1;
    return p;
  };
  EXPECT_NEAR(f1_score(with_extra(4), truth).f1, 40.0 / 44.0, 1e-15);
  EXPECT_EQ(classify(with_extra(4), truth), PathLabel::Correct);
  EXPECT_NEAR(f1_score(with_extra(10), truth).f1, 0.8, 1e-15);
  EXPECT_EQ(classify(with_extra(10), truth), PathLabel::PlausibleAlternative);
  EXPECT_EQ(classify(truth, truth), PathLabel::Correct);
  // the cutoff itself counts as Correct
  EXPECT_EQ(classify(with_extra(10), truth, 0.8), PathLabel::Correct);
}

TEST(Classify, LabelsPartitionCollection) {
  std::mt19937_64 rng(31);
  std::vector<MetricsReport> reports;
  for (int k = 0; k < 300; ++k) {
    const auto p = random_raster(rng, 12, 0.4);
    const auto t = random_raster(rng, 12, 0.4);
    reports.push_back(evaluate_pair(p, t));
    EXPECT_EQ(reports.back().continuous, is_continuous(p));
    EXPECT_EQ(reports.back().label, classify(p, t));
  }
  const auto s = summarize(reports);
  EXPECT_EQ(s.count, 300u);
  EXPECT_NEAR(s.fraction_correct + s.fraction_plausible + s.fraction_incorrect, 1.0, 1e-12);
}

TEST(ThresholdSweep, MonotoneAndLimits) {
  std::mt19937_64 rng(41);
  std::vector<PredictionPair> pairs;
  for (int k = 0; k < 200; ++k) {
    auto t = random_raster(rng, 10, 0.5);
    auto p = t;
    std::bernoulli_distribution flip(0.02 * (k % 10));
    for (auto& v : p.values) v = flip(rng) ? !v : v;
    pairs.push_back({p, t});
  }
  std::vector<double> cutoffs;
  for (int k = 0; k <= 20; ++k) cutoffs.push_back(k / 20.0);
  const auto curve = threshold_sweep(pairs, cutoffs);
  for (std::size_t k = 1; k < curve.size(); ++k) EXPECT_LE(curve[k], curve[k - 1]);
  std::size_t continuous = 0;
  for (const auto& pr : pairs) continuous += is_continuous(pr.pred);
  EXPECT_DOUBLE_EQ(curve.front(), static_cast<double>(continuous) / pairs.size());

  std::vector<PredictionPair> perfect{{from_rows({"##", ".."}), from_rows({"##", ".."})}};
  for (double v : threshold_sweep(perfect, cutoffs)) EXPECT_EQ(v, 1.0);
  EXPECT_CRACKPATH_ERROR(threshold_sweep(std::vector<PredictionPair>{}, cutoffs), ErrorCode::EmptyCollection);
}

TEST(DisplacementErrors, HandExample) {
  const std::vector<DisplacementGrid> truth{uniform_grid(4, 3.0, 4.0)};
  const std::vector<DisplacementGrid> pred{uniform_grid(4, 3.05, 4.0)};
  const auto e = displacement_errors(pred, truth);
  EXPECT_NEAR(e.mae_x[0], 0.05, 1e-15);
  EXPECT_EQ(e.mae_y[0], 0.0);
  EXPECT_NEAR(e.mae_total[0], 0.05, 1e-15);
  EXPECT_DOUBLE_EQ(e.normalizer, 5.0);
  EXPECT_NEAR(e.ape[0], 0.01, 1e-15);
  EXPECT_NEAR(e.mape, 0.01, 1e-15);
}

TEST(DisplacementErrors, IdenticalAndScaleInvariant) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<DisplacementGrid> truth, pred, truth2, pred2;
  for (int s = 0; s < 5; ++s) {
    DisplacementGrid t = uniform_grid(6, 0.0, 0.0), p = t;
    for (std::size_t k = 0; k < 36; ++k) {
      t.ux.values[k] = g(rng);
      t.uy.values[k] = g(rng);
      p.ux.values[k] = t.ux.values[k] + 0.1 * g(rng);
      p.uy.values[k] = t.uy.values[k] + 0.1 * g(rng);
    }
    truth.push_back(t);
    pred.push_back(p);
    for (auto* grid : {&t, &p})
      for (auto* c : {&grid->ux, &grid->uy})
        for (auto& v : c->values) v *= 2.0;
    truth2.push_back(t);
    pred2.push_back(p);
  }
  EXPECT_EQ(displacement_errors(truth, truth).mape, 0.0);
  EXPECT_NEAR(displacement_errors(pred2, truth2).mape, displacement_errors(pred, truth).mape, 1e-14);
}

TEST(DisplacementErrors, Failures) {
  const std::vector<DisplacementGrid> none;
  EXPECT_CRACKPATH_ERROR(displacement_errors(none, none), ErrorCode::EmptyCollection);
  const std::vector<DisplacementGrid> zero{uniform_grid(3, 0, 0)};
  EXPECT_CRACKPATH_ERROR(displacement_errors(zero, zero), ErrorCode::ZeroNormalizer);
  const std::vector<DisplacementGrid> a{uniform_grid(3, 1, 0)}, b{uniform_grid(4, 1, 0)};
  EXPECT_CRACKPATH_ERROR(displacement_errors(a, b), ErrorCode::ShapeMismatch);
}
