#include <gtest/gtest.h>
#include <png.h>

#include <filesystem>
#include <random>
#include <regex>

#include "dsketch/core/distance.hpp"
#include "dsketch/core/error.hpp"
#include "dsketch/core/export.hpp"
#include "dsketch/core/raster.hpp"
#include "dsketch/core/sketch_io.hpp"
#include "test_support.hpp"

namespace dsketch {
namespace {

using testing::make_sketch;
using testing::make_stroke;
namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("dsketch_core_" + name);
  fs::create_directories(p);
  return p;
}

constexpr const char* kThreePoints = R"({
  "prompt_id": "chair_01", "user_id": "u7", "group": "novice", "canvas": [800, 800],
  "strokes": [{"kind": "content", "width": 2.0,
               "points": [[10, 10, 0, 0.5], [20, 10, 5, 0.6], [30, 15, 9, 0.7]]}]
})";

TEST(SketchIo, LoadsSimpleStroke) {
  const Sketch s = parse_sketch(kThreePoints);
  ASSERT_EQ(s.strokes.size(), 1u);
  EXPECT_EQ(s.strokes[0].points.size(), 3u);
  EXPECT_EQ(s.prompt_id, "chair_01");
  EXPECT_EQ(s.group, Group::kNovice);
  EXPECT_DOUBLE_EQ(s.strokes[0].width, 2.0);
}

TEST(SketchIo, RemovesCoincidentConsecutivePoints) {
  const Sketch s = parse_sketch(R"({"prompt_id": "p", "user_id": "u", "group": "tracing",
    "canvas": [800, 800], "strokes": [{"kind": "content", "width": 1,
    "points": [[10, 10, 0, 1], [10, 10, 1, 1], [20, 10, 2, 1], [30, 10, 3, 1]]}]})");
  ASSERT_EQ(s.strokes.size(), 1u);
  EXPECT_EQ(s.strokes[0].points.size(), 3u);
}

TEST(SketchIo, DropsStrokesShorterThanTwoPixels) {
  const Sketch s = parse_sketch(R"({"prompt_id": "p", "user_id": "u", "group": "tracing",
    "strokes": [{"kind": "content", "width": 1, "points": [[10, 10, 0, 1], [11, 10, 2, 1]]},
                {"kind": "content", "width": 1, "points": [[5, 5, 0, 1]]},
                {"kind": "scaffold", "width": 1, "points": [[0, 0, 3, 1], [9, 0, 4, 1]]}]})");
  ASSERT_EQ(s.strokes.size(), 1u);
  EXPECT_EQ(s.strokes[0].kind, StrokeKind::kScaffold);
}

TEST(SketchIo, MalformedJsonReportsLine) {
  try {
    parse_sketch("{\n\"prompt_id\": \"p\",\n\"user_id\": ,\n}", {}, "bad.json");
    FAIL() << "expected a format error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
    EXPECT_NE(std::string(e.what()).find("bad.json:3"), std::string::npos) << e.what();
  }
}

TEST(SketchIo, MissingFieldNamesIt) {
  try {
    parse_sketch(R"({"prompt_id": "p", "user_id": "u", "group": "novice",
      "strokes": [{"kind": "content", "points": [[1, 2, 3]]}]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
    EXPECT_NE(std::string(e.what()).find("strokes[0].points[0]"), std::string::npos) << e.what();
  }
}

TEST(SketchIo, NonMonotoneTimestampsNameStroke) {
  try {
    parse_sketch(R"({"prompt_id": "p", "user_id": "u", "group": "novice", "strokes": [
      {"kind": "content", "width": 1, "points": [[0, 0, 0, 1], [10, 0, 5, 1]]},
      {"kind": "content", "width": 1, "points": [[0, 0, 9, 1], [10, 0, 7, 1]]}]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_NE(std::string(e.what()).find("stroke 1"), std::string::npos) << e.what();
  }
}

TEST(SketchIo, UnknownKeysSurviveRoundTrip) {
  const Sketch s = parse_sketch(R"({"prompt_id": "p", "user_id": "u", "group": "professional",
    "device": {"name": "tablet"}, "strokes": [{"kind": "content", "width": 1, "color": "red",
    "points": [[0, 0, 0, 1], [10, 0, 5, 1]]}]})");
  const nlohmann::json j = sketch_to_json(s);
  EXPECT_EQ(j["device"]["name"], "tablet");
  EXPECT_EQ(j["strokes"][0]["color"], "red");
  const Sketch again = sketch_from_json(j);
  EXPECT_EQ(again.extra, s.extra);
  EXPECT_EQ(again.strokes[0].extra, s.strokes[0].extra);
}

TEST(SketchIo, LoadSaveLoadIsFixedPoint) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coord(0, 800), pr(0, 1), dt(0, 30);
  const fs::path dir = temp_dir("roundtrip");
  for (int trial = 0; trial < 20; ++trial) {
    Sketch s = make_sketch({});
    const int strokes = 1 + trial % 5;
    double t = 0;
    for (int k = 0; k < strokes; ++k) {
      Stroke st;
      st.kind = k % 3 == 2 ? StrokeKind::kScaffold : StrokeKind::kContent;
      st.width = 1.5;
      for (int i = 0; i < 8; ++i) {
        st.points.push_back({coord(rng), coord(rng), t, pr(rng)});
        t += dt(rng);
      }
      s.strokes.push_back(st);
    }
    const fs::path p = dir / "s.json";
    save_sketch(s, p);
    const Sketch a = load_sketch(p);
    save_sketch(a, p);
    const Sketch b = load_sketch(p);
    ASSERT_EQ(a.strokes.size(), b.strokes.size());
    for (std::size_t i = 0; i < a.strokes.size(); ++i) {
      ASSERT_EQ(a.strokes[i].points.size(), b.strokes[i].points.size());
      EXPECT_EQ(a.strokes[i].kind, b.strokes[i].kind);
      for (std::size_t k = 0; k < a.strokes[i].points.size(); ++k) {
        EXPECT_NEAR(a.strokes[i].points[k].x, b.strokes[i].points[k].x, 1e-9);
        EXPECT_NEAR(a.strokes[i].points[k].y, b.strokes[i].points[k].y, 1e-9);
        EXPECT_NEAR(a.strokes[i].points[k].t, b.strokes[i].points[k].t, 1e-9);
        EXPECT_NEAR(a.strokes[i].points[k].pressure, b.strokes[i].points[k].pressure, 1e-9);
      }
    }
  }
}

TEST(SketchIo, MissingFileIsIoError) {
  try {
    load_sketch("/nonexistent/dir/x.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(Rasterize, HorizontalWidthOneRun) {
  const Sketch s = make_sketch({make_stroke({{10, 400}, {790, 400}})});
  const RasterImage r = rasterize(s, 1, true);
  EXPECT_EQ(r.foreground_count(), 781u);
  for (int x = 10; x <= 790; ++x) EXPECT_TRUE(r.foreground(x, 400));
}

TEST(Rasterize, WidthThreeMatchesCapsuleOracle) {
  const Sketch s = make_sketch({make_stroke({{10, 400}, {790, 400}})});
  const RasterImage r = rasterize(s, 3, true);
  // Brute force over the whole canvas: pixel centre inside the capsule.
  std::size_t expected = 0;
  for (int y = 0; y < 800; ++y) {
    for (int x = 0; x < 800; ++x) {
      const double cx = std::clamp(double(x), 10.0, 790.0);
      const double d2 = (x - cx) * (x - cx) + (y - 400.0) * (y - 400.0);
      if (d2 <= 1.5 * 1.5) ++expected;
    }
  }
  EXPECT_EQ(expected, 3u * 781u + 6u);
  EXPECT_EQ(r.foreground_count(), expected);
}

TEST(Rasterize, RandomSegmentsMatchCapsuleOracle) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> coord(-5, 69);
  for (int trial = 0; trial < 30; ++trial) {
    const Vec2 a{coord(rng), coord(rng)}, b{coord(rng), coord(rng)};
    const int width = 1 + trial % 4;
    const Sketch s = make_sketch({make_stroke({a, b})}, Group::kNovice, 64, 64);
    const RasterImage r = rasterize(s, width, true);
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        const Vec2 p{double(x), double(y)};
        const Vec2 ab = b - a;
        const double u = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
        const double d = norm(p - (a + ab * u));
        const double r2 = 0.5 * width;
        if (std::abs(d - r2) < 1e-6) continue;  // boundary ties
        EXPECT_EQ(r.foreground(x, y), d < r2) << x << "," << y;
      }
    }
  }
}

TEST(Rasterize, EmptySketchIsBackground) {
  const RasterImage r = rasterize(make_sketch({}), 2, true);
  EXPECT_EQ(r.foreground_count(), 0u);
  EXPECT_EQ(r.pixels.size(), 800u * 800u);
}

TEST(Rasterize, ContentOnlySkipsScaffold) {
  const Sketch s = make_sketch({make_stroke({{10, 10}, {100, 10}}),
                                make_stroke({{10, 50}, {100, 50}}, 100, 10, StrokeKind::kScaffold)});
  EXPECT_EQ(rasterize(s, 1, true).foreground_count(), 91u);
  EXPECT_EQ(rasterize(s, 1, false).foreground_count(), 182u);
}

TEST(Rasterize, MonotoneInWidthAndDeterministic) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> coord(0, 200);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vec2> pts;
    for (int i = 0; i < 12; ++i) pts.push_back({coord(rng), coord(rng)});
    const Sketch s = make_sketch({make_stroke(pts)}, Group::kNovice, 200, 200);
    for (int w = 1; w < 6; ++w) {
      const RasterImage a = rasterize(s, w, true);
      const RasterImage b = rasterize(s, w + 1, true);
      EXPECT_EQ(a, rasterize(s, w, true));
      for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        if (a.pixels[i] == kForeground) ASSERT_EQ(b.pixels[i], kForeground);
      }
    }
  }
}

TEST(Resample, StraightSegment) {
  const Stroke s = make_stroke({{0, 0}, {10, 0}});
  const Stroke r = resample_stroke(s, 2.0);
  ASSERT_EQ(r.points.size(), 6u);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(r.points[i].x, 2.0 * i, 1e-12);
  EXPECT_NEAR(r.points[3].t, 6.0, 1e-12);  // t interpolated by arc length
}

TEST(Resample, LShapeKeepsCorner) {
  const Stroke s = make_stroke({{0, 0}, {5, 0}, {5, 5}});
  const Stroke r = resample_stroke(s, 5.0);
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_EQ(r.points[1].pos(), (Vec2{5, 0}));
}

TEST(Resample, ZeroLengthUnchanged) {
  Stroke s = make_stroke({{3, 3}, {3, 3}});
  const Stroke r = resample_stroke(s, 1.0);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_EQ(r.points[0], s.points[0]);
}

TEST(Resample, RandomPolylinesStayOnPathAndKeepLength) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> coord(0, 300), sp(0.3, 25);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> pts;
    for (int i = 0; i < 7; ++i) pts.push_back({coord(rng), coord(rng)});
    const Stroke s = make_stroke(pts);
    const double spacing = sp(rng);
    const Stroke r = resample_stroke(s, spacing);
    EXPECT_EQ(r.points.front(), s.points.front());
    EXPECT_EQ(r.points.back(), s.points.back());
    EXPECT_NEAR(arc_length(r), arc_length(s), 1e-6 * arc_length(s));
    const Sketch orig = make_sketch({s});
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      EXPECT_LE(testing::distance_to_polylines(r.points[i].pos(), orig), 0.5);
      if (i > 0) EXPECT_LE(distance(r.points[i - 1].pos(), r.points[i].pos()), spacing + 1e-9);
    }
    // Chain midpoints also lie on the original path.
    for (std::size_t i = 1; i < r.points.size(); ++i) {
      const Vec2 mid = (r.points[i - 1].pos() + r.points[i].pos()) * 0.5;
      EXPECT_LE(testing::distance_to_polylines(mid, orig), 0.5);
    }
  }
}

TEST(DistanceTransform, SinglePixelCorner) {
  RasterImage img(4, 4);
  img.set(0, 0);
  const DistanceField d = distance_transform(img);
  EXPECT_DOUBLE_EQ(d.at(3, 3), std::sqrt(18.0));
  EXPECT_DOUBLE_EQ(d.at(0, 0), 0.0);
}

TEST(DistanceTransform, FullForegroundIsZero) {
  RasterImage img(7, 5);
  std::fill(img.pixels.begin(), img.pixels.end(), kForeground);
  for (double v : distance_transform(img).values) EXPECT_EQ(v, 0.0);
}

TEST(DistanceTransform, EmptyRasterFails) {
  try {
    distance_transform(RasterImage(8, 8));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmpty);
    EXPECT_STREQ(e.what(), "empty raster");
  }
}

TEST(DistanceTransform, MatchesBruteForceUpTo64) {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> dim(1, 64);
  std::uniform_real_distribution<double> dens(0.001, 0.2);
  for (int trial = 0; trial < 150; ++trial) {
    const int w = dim(rng), h = dim(rng);
    RasterImage img = testing::random_raster(rng, w, h, dens(rng));
    if (img.foreground_count() == 0) img.set(w / 2, h / 2);
    const DistanceField d = distance_transform(img);
    const auto oracle = testing::brute_force_edt(img);
    for (std::size_t i = 0; i < oracle.size(); ++i) ASSERT_NEAR(d.values[i], oracle[i], 1e-9);
    // 1-Lipschitz between 4-neighbours.
    for (int y = 0; y < h; ++y)
      for (int x = 0; x + 1 < w; ++x) ASSERT_LE(std::abs(d.at(x, y) - d.at(x + 1, y)), 1.0 + 1e-9);
  }
}

TEST(Export, SvgHasOnePathPerStrokeInOrder) {
  const Sketch s = make_sketch({make_stroke({{1.25, 2.5}, {100.125, 3}}),
                                make_stroke({{7, 8}, {9, 10}, {11, 12.3456}}, 100, 5,
                                            StrokeKind::kScaffold)});
  const std::string svg = svg_string(s);
  EXPECT_NE(svg.find("viewBox=\"0 0 800 800\""), std::string::npos);
  // Independent reader: pull every d="..." attribute and parse M/L pairs.
  const std::regex path_re(R"re(<path class="(\w+)"[^>]* d="([^"]*)")re");
  const std::regex num_re(R"([-+]?[0-9]*\.?[0-9]+)");
  std::vector<std::string> kinds;
  std::vector<std::vector<double>> coords;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), path_re); it != std::sregex_iterator(); ++it) {
    kinds.push_back((*it)[1]);
    const std::string d = (*it)[2];
    std::vector<double> nums;
    for (auto n = std::sregex_iterator(d.begin(), d.end(), num_re); n != std::sregex_iterator(); ++n) {
      nums.push_back(std::stod(n->str()));
    }
    coords.push_back(nums);
  }
  ASSERT_EQ(kinds.size(), 2u);
  EXPECT_EQ(kinds[0], "content");
  EXPECT_EQ(kinds[1], "scaffold");
  for (std::size_t k = 0; k < 2; ++k) {
    ASSERT_EQ(coords[k].size(), 2 * s.strokes[k].points.size());
    for (std::size_t i = 0; i < s.strokes[k].points.size(); ++i) {
      EXPECT_NEAR(coords[k][2 * i], s.strokes[k].points[i].x, 1e-3);
      EXPECT_NEAR(coords[k][2 * i + 1], s.strokes[k].points[i].y, 1e-3);
    }
  }
}

TEST(Export, PngDecodesToSameForegroundCount) {
  const Sketch s = make_sketch({make_stroke({{10, 10}, {200, 150}, {40, 300}})}, Group::kNovice, 320, 320);
  const RasterImage r = rasterize(s, 2, true);
  const fs::path p = temp_dir("png") / "r.png";
  export_png(r, p);
  // Decode with libpng's simplified reader directly.
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  ASSERT_TRUE(png_image_begin_read_from_file(&image, p.c_str()));
  EXPECT_EQ(image.format & PNG_FORMAT_FLAG_COLOR, 0u);
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  ASSERT_TRUE(png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr));
  EXPECT_EQ(std::size_t(std::count(buf.begin(), buf.end(), 0)), r.foreground_count());
  EXPECT_EQ(std::size_t(std::count(buf.begin(), buf.end(), 255)), buf.size() - r.foreground_count());
  EXPECT_EQ(read_png(p), r);
}

TEST(Export, UnwritablePathIsIoError) {
  try {
    export_svg(make_sketch({}), "/nonexistent/dir/out.svg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace dsketch
