#include "dsketch/synthesis/bezier.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "dsketch/core/error.hpp"

namespace dsketch {

double bernstein(int k, double u) {
  static constexpr double kBinom[] = {1, 5, 10, 10, 5, 1};
  return kBinom[k] * std::pow(u, k) * std::pow(1.0 - u, kBezierDegree - k);
}

Vec2 BezierStroke::at(double u) const {
  Vec2 p{0, 0};
  for (int k = 0; k <= kBezierDegree; ++k) p = p + control[std::size_t(k)] * bernstein(k, u);
  return p;
}

Vec2 BezierStroke::derivative(double u) const {
  // 5 * sum_k B_{k,4}(u) (c_{k+1} - c_k)
  static constexpr double kBinom4[] = {1, 4, 6, 4, 1};
  Vec2 d{0, 0};
  for (int k = 0; k < kBezierDegree; ++k) {
    const double b = kBinom4[k] * std::pow(u, k) * std::pow(1.0 - u, 4 - k);
    d = d + (control[std::size_t(k) + 1] - control[std::size_t(k)]) * (5.0 * b);
  }
  return d;
}

std::vector<double> BezierStroke::local_coordinates() const {
  std::vector<double> v;
  for (const Vec2& c : control) {
    const Vec2 q = frame.to_local(c);
    v.push_back(q.x);
    v.push_back(q.y);
  }
  return v;
}

StrokeFrame frame_of(const std::vector<Vec2>& points) {
  StrokeFrame f;
  if (points.empty()) return f;
  Vec2 lo = points[0], hi = points[0], sum{0, 0};
  for (const Vec2& p : points) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    sum = sum + p;
  }
  f.centroid = sum * (1.0 / double(points.size()));
  f.scale = std::max(1.0, norm(hi - lo));
  return f;
}

namespace {

constexpr int kRefinePasses = 2;
constexpr int kJointIterations = 50;

void solve_interior(BezierStroke& b, const std::vector<Vec2>& pts, const std::vector<double>& u) {
  const Vec2 c0 = pts.front(), c5 = pts.back();
  Eigen::MatrixXd A(pts.size(), 4);
  Eigen::MatrixXd rhs(pts.size(), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int k = 1; k <= 4; ++k) A(Eigen::Index(i), k - 1) = bernstein(k, u[i]);
    const Vec2 r = pts[i] - c0 * bernstein(0, u[i]) - c5 * bernstein(5, u[i]);
    rhs(Eigen::Index(i), 0) = r.x;
    rhs(Eigen::Index(i), 1) = r.y;
  }
  // Weak pull toward evenly spaced points on the chord keeps short strokes
  // well posed without visibly biasing long ones.
  const double lambda = 1e-6 * double(pts.size());
  Eigen::Matrix4d N = A.transpose() * A + lambda * Eigen::Matrix4d::Identity();
  Eigen::MatrixXd r = A.transpose() * rhs;
  for (int k = 1; k <= 4; ++k) {
    const Vec2 chord = c0 + (c5 - c0) * (k / 5.0);
    r(k - 1, 0) += lambda * chord.x;
    r(k - 1, 1) += lambda * chord.y;
  }
  const Eigen::MatrixXd sol = N.ldlt().solve(r);
  b.control[0] = c0;
  b.control[5] = c5;
  for (int k = 1; k <= 4; ++k) b.control[std::size_t(k)] = {sol(k - 1, 0), sol(k - 1, 1)};
}

Vec2 second_derivative(const BezierStroke& b, double u) {
  static constexpr double kBinom3[] = {1, 3, 3, 1};
  Vec2 d{0, 0};
  for (int k = 0; k < 4; ++k) {
    const double w = kBinom3[k] * std::pow(u, k) * std::pow(1.0 - u, 3 - k);
    const Vec2 diff = b.control[std::size_t(k) + 2] - b.control[std::size_t(k) + 1] * 2.0 +
                      b.control[std::size_t(k)];
    d = d + diff * (20.0 * w);
  }
  return d;
}

// Newton iterations on |B(u) - P|^2 per point until the foot point settles, endpoints pinned.
void reparameterize(const BezierStroke& b, const std::vector<Vec2>& pts, std::vector<double>& u) {
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    for (int it = 0; it < 20; ++it) {
      const Vec2 diff = b.at(u[i]) - pts[i];
      const Vec2 d1 = b.derivative(u[i]);
      const double den = dot(d1, d1) + dot(diff, second_derivative(b, u[i]));
      if (std::abs(den) < 1e-12) break;
      const double next = std::clamp(u[i] - dot(diff, d1) / den, 0.0, 1.0);
      const bool done = std::abs(next - u[i]) < 1e-12;
      u[i] = next;
      if (done) break;
    }
  }
}

double squared_error(const BezierStroke& b, const std::vector<Vec2>& pts, const std::vector<double>& u) {
  double e = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) e += squared_norm(b.at(u[i]) - pts[i]);
  return e;
}

// Levenberg-Marquardt over the interior controls and all interior parameters
// together. The parameter block is diagonal, so it is eliminated per point.
void refine_jointly(BezierStroke& b, const std::vector<Vec2>& pts, std::vector<double>& u) {
  if (pts.size() < 3) return;
  double err = squared_error(b, pts, u);
  double mu = 1e-3;
  for (int it = 0; it < kJointIterations && err > 1e-18; ++it) {
    Eigen::Matrix<double, 8, 8> s = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 1> g = Eigen::Matrix<double, 8, 1>::Zero();
    std::vector<Eigen::Matrix<double, 8, 1>> hcu(pts.size());
    std::vector<double> huu(pts.size(), 0.0), gu(pts.size(), 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Eigen::Matrix<double, 2, 8> bc = Eigen::Matrix<double, 2, 8>::Zero();
      for (int k = 1; k <= 4; ++k) bc(0, k - 1) = bc(1, k + 3) = bernstein(k, u[i]);
      const Vec2 rv = b.at(u[i]) - pts[i];
      const Eigen::Vector2d r(rv.x, rv.y);
      s += bc.transpose() * bc;
      g += bc.transpose() * r;
      if (i == 0 || i + 1 == pts.size()) continue;
      const Vec2 dv = b.derivative(u[i]);
      const Eigen::Vector2d d(dv.x, dv.y);
      hcu[i] = bc.transpose() * d;
      huu[i] = d.squaredNorm() * (1 + mu) + 1e-12;
      gu[i] = d.dot(r);
    }
    for (int k = 0; k < 8; ++k) s(k, k) *= 1 + mu;
    Eigen::Matrix<double, 8, 8> schur = s;
    Eigen::Matrix<double, 8, 1> rhs = -g;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      schur -= hcu[i] * hcu[i].transpose() / huu[i];
      rhs += hcu[i] * (gu[i] / huu[i]);
    }
    const Eigen::Matrix<double, 8, 1> dc = schur.ldlt().solve(rhs);
    if (!dc.allFinite()) break;
    BezierStroke trial = b;
    std::vector<double> tu = u;
    for (int k = 1; k <= 4; ++k) {
      trial.control[std::size_t(k)].x += dc(k - 1);
      trial.control[std::size_t(k)].y += dc(k + 3);
    }
    for (std::size_t i = 1; i + 1 < pts.size(); ++i)
      tu[i] = std::clamp(u[i] - (gu[i] + hcu[i].dot(dc)) / huu[i], 0.0, 1.0);
    const double trial_err = squared_error(trial, pts, tu);
    if (trial_err < err) {
      const bool settled = err - trial_err <= 1e-12 * err;
      b = trial;
      u = tu;
      err = trial_err;
      mu = std::max(mu * 0.3, 1e-9);
      if (settled) break;
    } else {
      mu *= 10;
      if (mu > 1e8) break;
    }
  }
}

}  // namespace

BezierStroke fit_bezier(const Stroke& stroke) {
  if (stroke.points.empty()) fail(ErrorCode::kInvalidArgument, "cannot fit an empty stroke");
  std::vector<Vec2> pts;
  for (const Point& p : stroke.points) pts.push_back(p.pos());
  if (pts.size() == 1) pts.push_back(pts[0]);

  BezierStroke b;
  b.source_len = stroke.points.size();
  b.frame = frame_of(pts);
  b.t_start = stroke.points.front().t;
  b.t_end = stroke.points.back().t;
  b.kind = stroke.kind;
  double psum = 0;
  for (const Point& p : stroke.points) psum += p.pressure;
  b.pressure = psum / double(stroke.points.size());

  std::vector<double> u(pts.size(), 0.0);
  double total = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    total += distance(pts[i - 1], pts[i]);
    u[i] = total;
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    u[i] = total > 0 ? u[i] / total : double(i) / double(pts.size() - 1);
  u.back() = 1.0;

  solve_interior(b, pts, u);
  for (int pass = 0; pass < kRefinePasses; ++pass) {
    reparameterize(b, pts, u);
    solve_interior(b, pts, u);
  }
  reparameterize(b, pts, u);
  refine_jointly(b, pts, u);
  for (std::size_t i = 0; i < pts.size(); ++i) b.max_error = std::max(b.max_error, distance(b.at(u[i]), pts[i]));
  return b;
}

std::size_t sample_count(const BezierStroke& b) { return std::max(kMinSamples, b.source_len); }

Stroke sample_bezier(const BezierStroke& b, std::size_t count) {
  count = std::max<std::size_t>(count, 2);
  Stroke s;
  s.kind = b.kind;
  for (std::size_t i = 0; i < count; ++i) {
    const double u = double(i) / double(count - 1);
    const Vec2 p = b.at(u);
    s.points.push_back({p.x, p.y, b.t_start + u * (b.t_end - b.t_start), b.pressure});
  }
  return s;
}

}  // namespace dsketch
