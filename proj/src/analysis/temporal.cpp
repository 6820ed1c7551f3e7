#include "dsketch/analysis/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dsketch/analysis/stats.hpp"
#include "dsketch/core/error.hpp"
#include "dsketch/core/raster.hpp"

namespace dsketch {

std::string_view to_string(CorrelationClass c) {
  switch (c) {
    case CorrelationClass::kPositive: return "positive";
    case CorrelationClass::kNegative: return "negative";
    case CorrelationClass::kNone: return "none";
  }
  return "none";
}

std::string_view to_string(TemporalFeature f) {
  switch (f) {
    case TemporalFeature::kBinCount: return "bin_count";
    case TemporalFeature::kX: return "x";
    case TemporalFeature::kY: return "y";
    case TemporalFeature::kCenterDist: return "center_dist";
    case TemporalFeature::kPressure: return "pressure";
  }
  return "";
}

CorrelationClass classify(double rho, double p, double alpha) {
  if (!(p < alpha)) return CorrelationClass::kNone;
  if (rho > 0) return CorrelationClass::kPositive;
  if (rho < 0) return CorrelationClass::kNegative;
  return CorrelationClass::kNone;
}

const FeatureCorrelation& TemporalProfile::of(TemporalFeature f) const {
  for (const auto& c : correlations)
    if (c.feature == f) return c;
  fail(ErrorCode::kInvalidArgument, "feature not in profile");
}

namespace {

bool included(const Stroke& s, bool content_only) { return !content_only || s.is_content(); }

void stroke_timed_pixels(const Stroke& stroke, int stroke_index, int width, int height,
                         std::vector<TimedPixel>& out) {
  const auto& p = stroke.points;
  auto segment = [&](const Point& a, const Point& b) {
    for_each_capsule_pixel(width, height, a.pos(), b.pos(), 0.5, [&](int x, int y, double u) {
      out.push_back({x, y, a.t + u * (b.t - a.t), a.pressure + u * (b.pressure - a.pressure),
                     stroke_index});
    });
  };
  if (p.size() == 1) segment(p[0], p[0]);
  for (std::size_t i = 1; i < p.size(); ++i) segment(p[i - 1], p[i]);
}

// Keeps the earliest entry per pixel, row-major order.
void keep_earliest(std::vector<TimedPixel>& px) {
  std::sort(px.begin(), px.end(), [](const TimedPixel& a, const TimedPixel& b) {
    if (a.y != b.y) return a.y < b.y;
    if (a.x != b.x) return a.x < b.x;
    if (a.t != b.t) return a.t < b.t;
    return a.stroke < b.stroke;
  });
  px.erase(std::unique(px.begin(), px.end(),
                       [](const TimedPixel& a, const TimedPixel& b) { return a.x == b.x && a.y == b.y; }),
           px.end());
}

FeatureCorrelation correlate(TemporalFeature f, const std::vector<double>& t,
                             const std::vector<double>& v) {
  FeatureCorrelation c;
  c.feature = f;
  try {
    const Correlation r = spearman(t, v);
    c.rho = r.rho;
    c.p = r.p;
    c.cls = classify(r.rho, r.p);
  } catch (const Error&) {
    c.cls = CorrelationClass::kNone;  // undefined correlation
  }
  return c;
}

DirectionFractions fractions(const std::vector<CorrelationClass>& cls) {
  DirectionFractions f;
  if (cls.empty()) return f;
  for (CorrelationClass c : cls) {
    if (c == CorrelationClass::kPositive) f.positive += 1;
    else if (c == CorrelationClass::kNegative) f.negative += 1;
    else f.none += 1;
  }
  const double n = double(cls.size());
  f.positive /= n;
  f.negative /= n;
  f.none /= n;
  return f;
}

}  // namespace

std::vector<TimedPixel> timed_pixels(const Sketch& sketch, bool content_only) {
  std::vector<TimedPixel> px;
  for (std::size_t i = 0; i < sketch.strokes.size(); ++i)
    if (included(sketch.strokes[i], content_only))
      stroke_timed_pixels(sketch.strokes[i], int(i), sketch.canvas_width, sketch.canvas_height, px);
  keep_earliest(px);
  return px;
}

TemporalProfile temporal_profile(const Sketch& sketch, bool content_only) {
  double t0 = std::numeric_limits<double>::infinity(), t1 = -t0;
  for (const Stroke& s : sketch.strokes) {
    if (!included(s, content_only)) continue;
    for (const Point& p : s.points) {
      t0 = std::min(t0, p.t);
      t1 = std::max(t1, p.t);
    }
  }
  if (!(t1 > t0)) fail(ErrorCode::kInvalidArgument, "drawing has zero duration");
  const double duration = t1 - t0;

  const std::vector<TimedPixel> px = timed_pixels(sketch, content_only);
  TemporalProfile prof;
  for (const TimedPixel& p : px) {
    const int b = std::clamp(int(std::floor((p.t - t0) / duration * kTemporalBins)), 0, kTemporalBins - 1);
    ++prof.bin_counts[std::size_t(b)];
  }
  std::vector<double> idx, counts;
  for (int b = 0; b < kTemporalBins; ++b) {
    idx.push_back(b);
    counts.push_back(double(prof.bin_counts[std::size_t(b)]));
  }
  prof.correlations.push_back(correlate(TemporalFeature::kBinCount, idx, counts));

  const Vec2 c = centroid(sketch, content_only);
  std::vector<double> t, x, y, d, pr;
  for (const TimedPixel& p : px) {
    t.push_back(p.t);
    x.push_back(p.x);
    y.push_back(p.y);
    d.push_back(distance({double(p.x), double(p.y)}, c));
    pr.push_back(p.pressure);
  }
  prof.correlations.push_back(correlate(TemporalFeature::kX, t, x));
  prof.correlations.push_back(correlate(TemporalFeature::kY, t, y));
  prof.correlations.push_back(correlate(TemporalFeature::kCenterDist, t, d));
  prof.correlations.push_back(correlate(TemporalFeature::kPressure, t, pr));

  std::vector<CorrelationClass> sx, sy;
  for (std::size_t i = 0; i < sketch.strokes.size(); ++i) {
    if (!included(sketch.strokes[i], content_only)) continue;
    std::vector<TimedPixel> own;
    stroke_timed_pixels(sketch.strokes[i], int(i), sketch.canvas_width, sketch.canvas_height, own);
    keep_earliest(own);
    std::vector<double> st, ox, oy;
    for (const TimedPixel& p : own) {
      st.push_back(p.t);
      ox.push_back(p.x);
      oy.push_back(p.y);
    }
    sx.push_back(correlate(TemporalFeature::kX, st, ox).cls);
    sy.push_back(correlate(TemporalFeature::kY, st, oy).cls);
  }
  prof.stroke_x = fractions(sx);
  prof.stroke_y = fractions(sy);
  return prof;
}

// ---------------------------------------------------------------------------
// Ordering guidelines

namespace {

// Points every `spacing` px of arc length from the start, plus the end point.
std::vector<Vec2> uniform_samples(const Stroke& stroke, double spacing) {
  const auto& p = stroke.points;
  std::vector<Vec2> out;
  if (p.empty()) return out;
  out.push_back(p[0].pos());
  double next = spacing, walked = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const Vec2 a = p[i - 1].pos(), b = p[i].pos();
    const double len = distance(a, b);
    while (len > 0 && next <= walked + len) {
      out.push_back(a + (b - a) * ((next - walked) / len));
      next += spacing;
    }
    walked += len;
  }
  if (distance(out.back(), p.back().pos()) > 1e-9) out.push_back(p.back().pos());
  return out;
}

}  // namespace

double stroke_complexity(const Stroke& stroke, double spacing) {
  if (!(spacing > 0)) fail(ErrorCode::kInvalidArgument, "resample spacing must be > 0");
  const std::vector<Vec2> r = uniform_samples(stroke, spacing);
  std::vector<Vec2> seg;
  for (std::size_t i = 1; i < r.size(); ++i) {
    const Vec2 d = r[i] - r[i - 1];
    if (squared_norm(d) > 1e-18) seg.push_back(d);
  }
  if (seg.size() < 2) return 0.0;
  double turning = 0;
  for (std::size_t i = 1; i < seg.size(); ++i)
    turning += std::atan2(std::abs(cross(seg[i - 1], seg[i])), dot(seg[i - 1], seg[i]));
  return arc_length(stroke) * turning / double(seg.size() - 1);
}

namespace {

// Outward unit direction at the start (at_end = false) or end of the stroke,
// taken over roughly `length` px of arc. Zero when undefined.
Vec2 end_tangent(const Stroke& s, bool at_end, double length) {
  const auto& p = s.points;
  const std::size_t n = p.size();
  if (n < 2) return {0, 0};
  auto at = [&](std::size_t k) { return at_end ? p[n - 1 - k].pos() : p[k].pos(); };
  double walked = 0;
  Vec2 inner = at(0);
  for (std::size_t k = 1; k < n; ++k) {
    walked += distance(at(k - 1), at(k));
    inner = at(k);
    if (walked >= length) break;
  }
  const Vec2 d = at(0) - inner;
  const double l = norm(d);
  return l > 1e-12 ? d * (1.0 / l) : Vec2{0, 0};
}

struct Closest {
  double distance = std::numeric_limits<double>::infinity();
  double arc = 0;  // arc position of the closest point
};

Closest closest_on(const Stroke& s, Vec2 q) {
  Closest c;
  const auto& p = s.points;
  if (p.size() == 1) return {distance(q, p[0].pos()), 0.0};
  double walked = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const Vec2 a = p[i - 1].pos(), b = p[i].pos();
    const double u = project_to_segment(q, a, b);
    const double d = distance(q, a + (b - a) * u);
    const double len = distance(a, b);
    if (d < c.distance) c = {d, walked + u * len};
    walked += len;
  }
  return c;
}

}  // namespace

OrderingCosts ordering_costs(const Sketch& sketch, bool content_only, const OrderingConfig& cfg) {
  std::vector<const Stroke*> s;
  for (const Stroke& st : sketch.strokes)
    if (included(st, content_only) && !st.points.empty()) s.push_back(&st);
  OrderingCosts c;
  const std::size_t n = s.size();
  if (n < 2) {
    c.warning = true;
    return c;
  }

  std::vector<double> cx;
  for (const Stroke* st : s) cx.push_back(stroke_complexity(*st, cfg.resample_spacing));
  double inv = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) inv += cx[i] > cx[j] ? 1.0 : (cx[i] == cx[j] ? 0.5 : 0.0);
  c.simplicity = inv / (double(n) * double(n - 1) / 2.0);

  const double diag = std::hypot(double(sketch.canvas_width), double(sketch.canvas_height));
  double gaps = 0;
  for (std::size_t k = 0; k + 1 < n; ++k)
    gaps += distance(s[k]->points.back().pos(), s[k + 1]->points.front().pos());
  c.proximity = std::min(1.0, gaps / double(n - 1) / diag);

  const double cos_limit = std::cos(deg_to_rad(cfg.collinear_angle_deg));
  double sep = 0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      bool linked = false;
      for (bool ea : {false, true}) {
        for (bool eb : {false, true}) {
          const Vec2 pa = ea ? s[a]->points.back().pos() : s[a]->points.front().pos();
          const Vec2 pb = eb ? s[b]->points.back().pos() : s[b]->points.front().pos();
          if (distance(pa, pb) >= cfg.collinear_gap) continue;
          const Vec2 ta = end_tangent(*s[a], ea, cfg.tangent_length);
          const Vec2 tb = end_tangent(*s[b], eb, cfg.tangent_length);
          if (std::abs(dot(ta, tb)) > cos_limit) linked = true;
        }
      }
      if (!linked) continue;
      ++pairs;
      sep += n > 2 ? double(b - a - 1) / double(n - 2) : 0.0;
    }
  }
  c.collinearity = pairs ? sep / double(pairs) : 0.0;

  std::size_t relations = 0, violations = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const double len = arc_length(*s[b]);
      bool attached = false;
      for (const Point* e : {&s[a]->points.front(), &s[a]->points.back()}) {
        const Closest q = closest_on(*s[b], e->pos());
        if (q.distance <= cfg.anchor_distance && q.arc > cfg.anchor_distance &&
            q.arc < len - cfg.anchor_distance)
          attached = true;
      }
      if (!attached) continue;
      ++relations;
      if (a < b) ++violations;
    }
  }
  c.anchoring = relations ? double(violations) / double(relations) : 0.0;
  return c;
}

}  // namespace dsketch
