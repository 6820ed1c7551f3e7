#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "dsketch/analysis/histogram.hpp"
#include "dsketch/analysis/metrics.hpp"
#include "dsketch/analysis/report.hpp"
#include "dsketch/analysis/stats.hpp"
#include "dsketch/analysis/temporal.hpp"
#include "dsketch/core/error.hpp"
#include "dsketch/core/sketch_io.hpp"
#include "test_support.hpp"

namespace dsketch {
namespace {

using testing::arc_points;
using testing::line_points;
using testing::make_sketch;
using testing::make_stroke;

Sketch line_sketch(Vec2 a, Vec2 b, Group g = Group::kNovice) {
  return make_sketch({make_stroke({a, b})}, g);
}

TEST(Histogram, ClampsOutOfRangeIntoEndBins) {
  Histogram h = Histogram::uniform(0, 1, 5);
  for (double v : {-3.0, 0.0, 0.99, 1.0, 4.5, 5.0, 99.0}) h.add(v);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{3, 1, 0, 0, 3}));
  EXPECT_EQ(h.total(), 7u);
  const auto d = h.density();
  EXPECT_NEAR(d[0], 3.0 / 7.0, 1e-12);
  EXPECT_THROW(Histogram::uniform(0, 0, 3), Error);
}

TEST(Validity, Thresholds) {
  EXPECT_TRUE(is_valid_drawing(2.1));
  EXPECT_FALSE(is_valid_drawing(1.1 * 0.5 + 0.5));
  EXPECT_TRUE(is_valid_drawing(1.1 * 0.6 + 0.6));
  EXPECT_FALSE(is_valid_drawing(1.2));
}

TEST(ValidStrokes, OnOffAndHalf) {
  const Sketch tracing = line_sketch({100, 100}, {300, 100}, Group::kTracing);
  const Sketch drawn = make_sketch({make_stroke({{120, 100}, {280, 100}}),
                                    make_stroke({{120, 300}, {280, 300}}),
                                    make_stroke({{200, 100}, {200, 200}, {300, 200}})});
  const auto rates = stroke_overlap_rates(drawn, tracing);
  EXPECT_DOUBLE_EQ(rates[0], 1.0);
  EXPECT_DOUBLE_EQ(rates[1], 0.0);
  const auto flags = valid_strokes(drawn, tracing);
  EXPECT_TRUE(flags[0]);
  EXPECT_FALSE(flags[1]);
  EXPECT_FALSE(flags[2]);
  // third stroke: 100 px leg off the line plus a 100 px leg under it
  const Sketch half = make_sketch({make_stroke({{100, 100}, {199, 100}, {199, 104}, {298, 104}})});
  EXPECT_NEAR(stroke_overlap_rates(half, tracing)[0], 0.5, 0.05);
  EXPECT_FALSE(valid_strokes(half, tracing)[0]);
}

TEST(ValidStrokes, ThresholdIsInclusiveAtEightyPercent) {
  // 100-pixel stroke; tolerance 1 makes tracing x in [0, k] cover stroke x in [0, k + 1].
  const Sketch stroke = line_sketch({0, 10}, {99, 10});
  ASSERT_EQ(rasterize(stroke, 1, true).foreground_count(), 100u);
  auto rate_with = [&](double end) {
    return stroke_overlap_rates(stroke, line_sketch({0, 10}, {end, 10}, Group::kTracing))[0];
  };
  EXPECT_DOUBLE_EQ(rate_with(77), 0.79);
  EXPECT_DOUBLE_EQ(rate_with(78), 0.80);
  EXPECT_DOUBLE_EQ(rate_with(79), 0.81);
  EXPECT_FALSE(valid_strokes(stroke, line_sketch({0, 10}, {77, 10}))[0]);
  EXPECT_TRUE(valid_strokes(stroke, line_sketch({0, 10}, {78, 10}))[0]);
}

TEST(ClosestDistance, IdenticalAndParallel) {
  const Sketch a = line_sketch({100, 100}, {300, 100});
  const Histogram same = closest_distance_histogram({a}, {a});
  EXPECT_EQ(same.counts[0], same.total());
  const Histogram shifted = closest_distance_histogram({a}, {line_sketch({100, 105}, {300, 105})});
  EXPECT_EQ(shifted.counts[5], shifted.total());
  EXPECT_EQ(shifted.total(), 201u);
  EXPECT_THROW(closest_distance_histogram({}, {a}), Error);
}

TEST(ClosestDistance, MatchesAllPairsScan) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<RasterImage> from, to;
    for (int k = 0; k < 2; ++k) from.push_back(testing::random_raster(rng, 16, 12, 0.1));
    for (int k = 0; k < 3; ++k) to.push_back(testing::random_raster(rng, 16, 12, 0.05));
    to[0].set(3, 3);
    std::vector<double> expected;
    for (const auto& f : from)
      for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 16; ++x) {
          if (!f.foreground(x, y)) continue;
          double best = 1e300;
          for (const auto& t : to)
            for (int v = 0; v < 12; ++v)
              for (int u = 0; u < 16; ++u)
                if (t.foreground(u, v)) best = std::min(best, std::hypot(u - x, v - y));
          expected.push_back(best);
        }
    const auto got = closest_distances(from, to);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
  }
}

TEST(Cdr, Examples) {
  const Sketch a = testing::object_sketch();
  EXPECT_EQ(compute_cdr({a, a, a}), rasterize(a, 1, true));
  const Sketch far1 = line_sketch({100, 100}, {300, 100});
  const Sketch far2 = line_sketch({100, 200}, {300, 200});
  EXPECT_EQ(compute_cdr({far1, far2}).foreground_count(), 0u);
  const Sketch near2 = line_sketch({100, 102}, {300, 102});
  RasterImage uni = rasterize(far1, 1, true);
  draw_stroke(uni, near2.strokes[0], 1);
  EXPECT_EQ(compute_cdr({far1, near2}, 3.0), uni);
  EXPECT_THROW(compute_cdr(std::vector<Sketch>{a}), Error);
}

TEST(Cdr, MatchesPerPixelRuleAndIsMonotone) {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<RasterImage> d;
    for (int k = 0; k < 3; ++k) d.push_back(testing::random_raster(rng, 14, 10, 0.15));
    for (auto& r : d) r.set(5, 5);
    const double rho = 1.0 + trial % 3;
    const RasterImage cdr = compute_cdr(d, rho);
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 14; ++x) {
        bool on = false, all = true;
        for (const auto& r : d) {
          on = on || r.foreground(x, y);
          bool near = false;
          for (int v = 0; v < 10; ++v)
            for (int u = 0; u < 14; ++u)
              near = near || (r.foreground(u, v) && std::hypot(u - x, v - y) <= rho);
          all = all && near;
        }
        ASSERT_EQ(cdr.foreground(x, y), on && all) << x << "," << y;
      }
    const RasterImage wider = compute_cdr(d, rho + 1);
    for (std::size_t i = 0; i < cdr.pixels.size(); ++i)
      if (cdr.pixels[i] == kForeground) ASSERT_EQ(wider.pixels[i], kForeground);
  }
}

MultiLevelRegistration manual_levels(const Sketch& original, const Sketch& stroke_level) {
  MultiLevelRegistration m;
  m.original = original;
  m.pixel_level = stroke_level;
  m.sketch_level.sketch = original;
  m.stroke_level.sketch = stroke_level;
  m.stroke_level.transforms.assign(original.strokes.size(), SimilarityTransform::identity());
  m.stroke_level.fallback.assign(original.strokes.size(), false);
  return m;
}

Sketch five_lines(Group g = Group::kTracing) {
  std::vector<Stroke> s;
  for (int i = 0; i < 5; ++i) s.push_back(make_stroke({{100.0, 100.0 + 50 * i}, {300.0, 100.0 + 50 * i}}));
  return make_sketch(s, g);
}

TEST(ScaffoldErrors, PerfectDrawingHasNoError) {
  const Sketch t = testing::object_sketch();
  const DrawingErrors e = scaffold_errors(register_multi_level(t, t), t);
  for (double v : {e.e_gr, e.e_gt, e.e_gs, e.e_lr, e.e_lt, e.e_ls, e.e_p}) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(ScaffoldErrors, GlobalScale) {
  const Sketch t = testing::object_sketch();
  const Sketch small = transform_sketch(t, SimilarityTransform{0, 1 / 1.14, 0, 0});
  const DrawingErrors e = scaffold_errors(register_multi_level(small, t), t);
  EXPECT_NEAR(e.e_gs, 0.14, 1e-9);
  EXPECT_NEAR(e.e_gr, 0.0, 1e-9);
  // scaling about the canvas origin moves the object center by 0.14 * c
  const RasterImage r = rasterize(t, 1, true);
  double sx = 0, sy = 0, n = 0;
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      if (r.pixels[std::size_t(y * r.width + x)] == kForeground) sx += x, sy += y, ++n;
  EXPECT_NEAR(e.e_gt, 0.14 * std::hypot(sx / n, sy / n), 1e-6);
}

TEST(ScaffoldErrors, TranslationIsMeasuredAboutObjectCenter) {
  const Sketch t = testing::object_sketch();
  const Vec2 c = object_center(t);
  // rotation about the object center leaves no translation there
  const SimilarityTransform about{20, 1, 0, 0};
  const SimilarityTransform rot{20, 1, (c - about.apply(c)).x, (c - about.apply(c)).y};
  const DrawingErrors e = scaffold_errors(register_multi_level(transform_sketch(t, rot.inverse()), t), t);
  EXPECT_NEAR(e.e_gr, 20, 1e-6);
  EXPECT_NEAR(e.e_gt, 0, 1e-6);
}

TEST(ScaffoldErrors, PixelInaccuracyCountsStrokes) {
  const Sketch t = five_lines();
  Sketch drawn = five_lines(Group::kNovice);
  for (int i : {1, 3})
    for (auto& p : drawn.strokes[std::size_t(i)].points) p.y += 20;
  EXPECT_DOUBLE_EQ(scaffold_errors(manual_levels(drawn, drawn), t).e_p, 0.4);
  // order of strokes does not matter
  Sketch shuffled = drawn;
  std::swap(shuffled.strokes[0], shuffled.strokes[3]);
  std::swap(shuffled.strokes[1], shuffled.strokes[4]);
  EXPECT_DOUBLE_EQ(scaffold_errors(manual_levels(shuffled, shuffled), t).e_p, 0.4);
  // one more incorrect stroke adds exactly 1/5
  for (auto& p : drawn.strokes[0].points) p.y += 20;
  EXPECT_DOUBLE_EQ(scaffold_errors(manual_levels(drawn, drawn), t).e_p, 0.6);
}

TEST(ScaffoldErrors, StrokeTermsAreRelativeToGlobal) {
  const Sketch t = five_lines();
  MultiLevelRegistration m = manual_levels(t, t);
  m.sketch_level.transform = {10, 1.1, 5, 5};
  for (auto& s : m.stroke_level.transforms) s = m.sketch_level.transform;
  m.stroke_level.transforms[2] = SimilarityTransform{0, 1, 12, 0}.after(m.sketch_level.transform);
  m.stroke_level.fallback[4] = true;
  const DrawingErrors e = scaffold_errors(m, t);
  EXPECT_NEAR(e.e_lt, 12.0 / 4.0, 1e-9);
  EXPECT_NEAR(e.e_lr, 0.0, 1e-9);
  EXPECT_NEAR(e.e_gr, 10.0, 1e-12);
  const Vec2 c = object_center(t);
  EXPECT_NEAR(e.e_gt, norm(m.sketch_level.transform.apply(c) - c), 1e-12);
}

TEST(PixelDisplacement, Examples) {
  const Sketch a = testing::object_sketch();
  EXPECT_EQ(pixel_displacement_histogram(a, a).counts[0], a.point_count());
  Sketch b = a;
  for (auto& s : b.strokes)
    for (auto& p : s.points) p.x += 3, p.y += 4;
  const Histogram h = pixel_displacement_histogram(a, b);
  EXPECT_EQ(h.counts[5], a.point_count());
  const Sketch w = testing::warp_sketch(a, 6, 0.1, 0.5);
  double direct = 0;
  for (std::size_t i = 0; i < a.strokes.size(); ++i)
    for (std::size_t k = 0; k < a.strokes[i].points.size(); ++k)
      direct += std::hypot(a.strokes[i].points[k].x - w.strokes[i].points[k].x,
                           a.strokes[i].points[k].y - w.strokes[i].points[k].y);
  EXPECT_NEAR(mean(point_displacements(a, w)), direct / double(a.point_count()), 1e-9);
  b.strokes.pop_back();
  EXPECT_THROW(pixel_displacement_histogram(a, b), Error);
}

// Student t two-sided tail by Simpson integration of the density.
double t_tail_oracle(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
  auto f = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  const int n = 20000;
  const double h = std::abs(t) / n;
  double s = f(0) + f(std::abs(t));
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(i * h);
  return 1.0 - 2.0 * s * h / 3.0;
}

double rank_oracle(const std::vector<double>& v, std::size_t i) {
  double less = 0, equal = 0;
  for (double x : v) less += x < v[i], equal += x == v[i];
  return less + (equal + 1) / 2;
}

TEST(Spearman, PerfectMonotone) {
  std::vector<double> x{3, 1, 4, 1.5, 9, 2.6, 5};
  std::vector<double> y, z;
  for (double v : x) y.push_back(2 + 3 * v), z.push_back(7 - 0.5 * v);
  EXPECT_DOUBLE_EQ(spearman(x, x).rho, 1.0);
  EXPECT_DOUBLE_EQ(spearman(x, y).rho, 1.0);
  EXPECT_DOUBLE_EQ(spearman(x, z).rho, -1.0);
  EXPECT_EQ(spearman(x, z).p, 0.0);
}

TEST(Spearman, MatchesRankOracle) {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> val(0, 6), len(5, 8);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = len(rng);
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) x[i] = val(rng), y[i] = val(rng);
    std::vector<double> rx(n), ry(n);
    for (int i = 0; i < n; ++i) rx[i] = rank_oracle(x, i), ry[i] = rank_oracle(y, i);
    const double m = (n + 1) / 2.0;
    double sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < n; ++i)
      sxy += (rx[i] - m) * (ry[i] - m), sxx += (rx[i] - m) * (rx[i] - m), syy += (ry[i] - m) * (ry[i] - m);
    if (sxx == 0 || syy == 0) {
      EXPECT_THROW(spearman(x, y), Error);
      continue;
    }
    const double rho = sxy / std::sqrt(sxx * syy);
    const Correlation c = spearman(x, y);
    EXPECT_DOUBLE_EQ(c.rho, rho);
    if (std::abs(rho) < 1) {
      const double t = rho * std::sqrt((n - 2) / (1 - rho * rho));
      EXPECT_NEAR(c.p, t_tail_oracle(t, n - 2), 1e-6);
    }
    ++checked;
  }
  EXPECT_GT(checked, 250);
}

TEST(Spearman, RejectsShortOrConstantInput) {
  EXPECT_THROW(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), Error);
  EXPECT_THROW(spearman(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{2, 2, 2, 2, 2}), Error);
}

TEST(MannWhitney, Examples) {
  const std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> b;
  for (double v : a) b.push_back(v + 100);
  EXPECT_NEAR(mann_whitney_u(a, a).p, 1.0, 1e-12);
  EXPECT_LT(mann_whitney_u(a, b).p, 0.001);
  EXPECT_EQ(mann_whitney_u(a, b).u, 0.0);
  EXPECT_EQ(mann_whitney_u(b, a).u, 100.0);
  EXPECT_THROW(mann_whitney_u(std::vector<double>{1, 1, 1}, std::vector<double>{1, 1, 1}), Error);
  EXPECT_THROW(mann_whitney_u(std::vector<double>{1, 2}, a), Error);
}

TEST(MannWhitney, UMatchesPairCounting) {
  std::mt19937 rng(12);
  std::uniform_int_distribution<int> val(0, 5), len(3, 8);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(len(rng)), b(len(rng));
    for (auto& v : a) v = val(rng);
    for (auto& v : b) v = val(rng);
    double u = 0;
    for (double x : a)
      for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    bool all_equal = true;
    for (double x : a) all_equal = all_equal && x == a[0];
    for (double y : b) all_equal = all_equal && y == a[0];
    if (all_equal) continue;
    EXPECT_EQ(mann_whitney_u(a, b).u, u);
  }
}

Stroke timed_stroke(const std::vector<Vec2>& pts, double t0, double speed, double pressure = 0.5) {
  Stroke s;
  double t = t0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) t += distance(pts[i - 1], pts[i]) / speed;
    s.points.push_back({pts[i].x, pts[i].y, t, pressure});
  }
  return s;
}

TEST(Temporal, LeftToRightStrokeIsPositiveInX) {
  const Sketch s = make_sketch({timed_stroke({{100, 300}, {700, 300}}, 0, 1)});
  const TemporalProfile p = temporal_profile(s);
  EXPECT_EQ(p.of(TemporalFeature::kX).cls, CorrelationClass::kPositive);
  EXPECT_EQ(p.of(TemporalFeature::kY).cls, CorrelationClass::kNone);
  EXPECT_EQ(p.of(TemporalFeature::kPressure).cls, CorrelationClass::kNone);
  EXPECT_DOUBLE_EQ(p.stroke_x.positive, 1.0);
  EXPECT_DOUBLE_EQ(p.stroke_y.none, 1.0);
}

TEST(Temporal, ConstantSpeedFillGivesEvenBins) {
  std::vector<Vec2> path;
  for (int row = 0; row < 50; ++row) {
    const double y = 100 + 4 * row;
    if (row % 2 == 0) path.insert(path.end(), {{100, y}, {500, y}});
    else path.insert(path.end(), {{500, y}, {100, y}});
  }
  const Sketch s = make_sketch({timed_stroke(path, 0, 2.0)});
  const TemporalProfile p = temporal_profile(s);
  const auto [lo, hi] = std::minmax_element(p.bin_counts.begin(), p.bin_counts.end());
  EXPECT_GT(*lo, 0u);
  EXPECT_LE(double(*hi) / double(*lo), 1.2);
  EXPECT_EQ(p.of(TemporalFeature::kY).cls, CorrelationClass::kPositive);
}

TEST(Temporal, PressureTrendAndCenterDistance) {
  Stroke s = timed_stroke(arc_points({400, 400}, 50, 0, 6.2, 200), 0, 1);
  for (std::size_t i = 0; i < s.points.size(); ++i) s.points[i].pressure = 0.1 + 0.8 * double(i) / 200;
  Stroke out = timed_stroke(arc_points({400, 400}, 150, 0, 6.2, 400), s.points.back().t + 50, 1);
  const Sketch sk = make_sketch({s, out});
  const TemporalProfile p = temporal_profile(sk);
  EXPECT_EQ(p.of(TemporalFeature::kCenterDist).cls, CorrelationClass::kPositive);
}

TEST(Temporal, ZeroDurationFails) {
  const Sketch s = make_sketch({timed_stroke({{100, 300}, {700, 300}}, 5, 1e300)});
  EXPECT_THROW(temporal_profile(s), Error);
}

TEST(Temporal, PixelsKeepEarliestTime) {
  const Sketch s = make_sketch({timed_stroke({{100, 100}, {200, 100}}, 0, 1),
                                timed_stroke({{200, 100}, {100, 100}}, 500, 1)});
  const auto px = timed_pixels(s, true);
  EXPECT_EQ(px.size(), 101u);
  for (const auto& p : px) {
    EXPECT_NEAR(p.t, p.x - 100.0, 1e-9);
    EXPECT_EQ(p.stroke, 0);
  }
}

std::vector<Stroke> arcs_of_increasing_complexity() {
  std::vector<Stroke> s;
  for (int i = 0; i < 5; ++i)
    s.push_back(make_stroke(arc_points({150.0 + 120 * i, 300}, 40, 0, 0.5 + 0.9 * i, 40)));
  return s;
}

TEST(Ordering, SimplicityIncreasingAndDecreasing) {
  auto s = arcs_of_increasing_complexity();
  for (std::size_t i = 1; i < s.size(); ++i)
    ASSERT_LT(stroke_complexity(s[i - 1]), stroke_complexity(s[i]));
  EXPECT_DOUBLE_EQ(ordering_costs(make_sketch(s)).simplicity, 0.0);
  std::reverse(s.begin(), s.end());
  EXPECT_DOUBLE_EQ(ordering_costs(make_sketch(s)).simplicity, 1.0);
}

TEST(Ordering, SimplicityOfOrderAndReverseSumToOne) {
  auto s = arcs_of_increasing_complexity();
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(s.begin(), s.end(), rng);
    auto r = s;
    std::reverse(r.begin(), r.end());
    EXPECT_NEAR(ordering_costs(make_sketch(s)).simplicity + ordering_costs(make_sketch(r)).simplicity,
                1.0, 1e-12);
  }
}

TEST(Ordering, ChainHasZeroProximity) {
  const Sketch s = make_sketch({make_stroke({{100, 100}, {200, 100}}), make_stroke({{200, 100}, {200, 250}}),
                                make_stroke({{200, 250}, {90, 260}})});
  EXPECT_DOUBLE_EQ(ordering_costs(s).proximity, 0.0);
  const Sketch gap = make_sketch({make_stroke({{0, 0}, {10, 0}}), make_stroke({{10, 800}, {20, 800}})});
  EXPECT_NEAR(ordering_costs(gap).proximity, 800 / std::hypot(800, 800), 1e-12);
}

TEST(Ordering, CollinearityAndAnchoring) {
  const Stroke l1 = make_stroke(line_points({100, 100}, {200, 100}, 10));
  const Stroke l2 = make_stroke(line_points({205, 100}, {300, 100}, 10));
  const Stroke other = make_stroke(line_points({100, 600}, {100, 700}, 10));
  EXPECT_DOUBLE_EQ(ordering_costs(make_sketch({l1, l2, other})).collinearity, 0.0);
  EXPECT_DOUBLE_EQ(ordering_costs(make_sketch({l1, other, l2})).collinearity, 1.0);

  const Stroke base = make_stroke(line_points({100, 400}, {300, 400}, 20));
  const Stroke post = make_stroke(line_points({200, 401}, {200, 500}, 10));
  EXPECT_DOUBLE_EQ(ordering_costs(make_sketch({base, post})).anchoring, 0.0);
  EXPECT_DOUBLE_EQ(ordering_costs(make_sketch({post, base})).anchoring, 1.0);
}

TEST(Ordering, SingleStrokeWarns) {
  const OrderingCosts c = ordering_costs(make_sketch({make_stroke({{1, 1}, {50, 50}})}));
  EXPECT_TRUE(c.warning);
  EXPECT_EQ(c.simplicity + c.proximity + c.collinearity + c.anchoring, 0.0);
}

TEST(CompareLineImage, IdentitySupersetAndSwap) {
  const Sketch s = testing::object_sketch();
  const RasterImage r = rasterize(s, 1, true);
  const LineImageScore same = compare_line_image(r, s);
  EXPECT_DOUBLE_EQ(same.precision, 1.0);
  EXPECT_DOUBLE_EQ(same.recall, 1.0);

  RasterImage clutter = r;
  std::size_t added = 0;
  for (int y = 700; y < 800 && added < r.foreground_count(); y += 2)
    for (int x = 0; x < 800 && added < r.foreground_count(); ++x, ++added) clutter.set(x, y);
  const LineImageScore sup = compare_line_image(clutter, s);
  EXPECT_DOUBLE_EQ(sup.recall, 1.0);
  EXPECT_DOUBLE_EQ(sup.precision, 0.5);

  const Sketch w = testing::warp_sketch(s, 4, 0.2, 0.9);
  const LineImageScore ab = compare_line_image(rasterize(w, 1, true), s, 0);
  const LineImageScore ba = compare_line_image(r, w, 0);
  EXPECT_DOUBLE_EQ(ab.precision, ba.recall);
  EXPECT_DOUBLE_EQ(ab.recall, ba.precision);
  EXPECT_THROW(compare_line_image(RasterImage(800, 800), s), Error);
}

std::string slurp(const std::filesystem::path& p) { return read_text_file(p); }

class ReportTest : public ::testing::Test {
 protected:
  std::filesystem::path dir = std::filesystem::temp_directory_path() /
                              ("dsketch_report_" + std::to_string(::getpid()));
  void TearDown() override { std::filesystem::remove_all(dir); }
};

TEST_F(ReportTest, EmptyReportIsHeaderOnly) {
  emit_report({}, dir);
  EXPECT_EQ(slurp(dir / "drawings.csv"), std::string(kDrawingsCsvHeader) + "\n");
  EXPECT_EQ(slurp(dir / "histograms.csv"), std::string(kHistogramsCsvHeader) + "\n");
  EXPECT_EQ(slurp(dir / "temporal.csv"), std::string(kTemporalCsvHeader) + "\n");
  EXPECT_EQ(slurp(dir / "ordering.csv"), std::string(kOrderingCsvHeader) + "\n");
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
}

AnalysisReport one_drawing_report() {
  const Sketch t = testing::object_sketch();
  const Sketch s = testing::warp_sketch(t, 3, 0.1, 0.2);
  DrawingAnalysis d;
  d.prompt_id = "chair, 01";
  d.user_id = "u7";
  d.e_star = 1.9;
  d.valid = true;
  d.strokes = s.strokes.size();
  d.valid_strokes = 2;
  d.errors = scaffold_errors(register_multi_level(s, t), t);
  d.temporal = temporal_profile(s);
  d.ordering = ordering_costs(s);
  AnalysisReport r;
  r.drawings.push_back(d);
  Histogram h = kDistanceBins.make();
  h.add(2.5);
  r.histograms.push_back({"novice", "closest_distance", h});
  return r;
}

std::size_t lines(const std::string& s) { return std::size_t(std::count(s.begin(), s.end(), '\n')); }

TEST_F(ReportTest, OneDrawingOneRowAndDeterministic) {
  const AnalysisReport r = one_drawing_report();
  emit_report(r, dir);
  const std::string drawings = slurp(dir / "drawings.csv");
  EXPECT_EQ(lines(drawings), 2u);
  EXPECT_NE(drawings.find("\"chair, 01\",u7,novice,0,1.9,1,"), std::string::npos);
  EXPECT_EQ(lines(slurp(dir / "temporal.csv")), 1u + kTemporalFeatures.size());
  EXPECT_EQ(lines(slurp(dir / "histograms.csv")), 1u + kDistanceBins.bins);
  EXPECT_EQ(lines(slurp(dir / "ordering.csv")), 5u);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(summary["drawings"], 1);

  std::vector<std::string> first;
  for (const auto& e : std::filesystem::directory_iterator(dir)) first.push_back(slurp(e.path()));
  emit_report(r, dir);
  std::size_t i = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) EXPECT_EQ(slurp(e.path()), first[i++]);
}

TEST_F(ReportTest, UnwritableDirectoryFails) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "file", "x");
  try {
    emit_report({}, dir / "file" / "sub");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace dsketch
