#include "dsketch/synthesis/layout.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dsketch/core/error.hpp"

namespace dsketch {

Vec2 endpoint(const Stroke& stroke, bool at_end) {
  return at_end ? stroke.points.back().pos() : stroke.points.front().pos();
}

Vec2 locate(const Stroke& stroke, double param) {
  const auto& p = stroke.points;
  if (p.size() == 1) return p[0].pos();
  const double f = std::clamp(param, 0.0, 1.0) * double(p.size() - 1);
  const std::size_t k = std::min(std::size_t(f), p.size() - 2);
  const double u = f - double(k);
  return p[k].pos() + (p[k + 1].pos() - p[k].pos()) * u;
}

double edge_residual(std::span<const Stroke> strokes, const ConnectionEdge& e) {
  const Vec2 target = locate(strokes[e.other], e.param) + e.offset;
  return distance(endpoint(strokes[e.stroke], e.at_end), target);
}

namespace {

struct Hit {
  double dist = std::numeric_limits<double>::infinity();
  std::size_t segment = 0;
  double u = 0;
};

Hit closest_on(const Stroke& s, Vec2 q) {
  Hit h;
  const auto& p = s.points;
  if (p.size() == 1) return {distance(q, p[0].pos()), 0, 0.0};
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    const double u = project_to_segment(q, p[k].pos(), p[k + 1].pos());
    const double d = distance(q, p[k].pos() + (p[k + 1].pos() - p[k].pos()) * u);
    if (d < h.dist) h = {d, k, u};
  }
  return h;
}

}  // namespace

ConnectionGraph connection_graph(std::span<const Stroke> strokes, double eps_c) {
  ConnectionGraph g;
  g.eps_c = eps_c;
  for (std::size_t i = 0; i < strokes.size(); ++i) {
    if (strokes[i].points.empty()) continue;
    for (bool at_end : {false, true}) {
      if (at_end && strokes[i].points.size() < 2) continue;
      const Vec2 e = endpoint(strokes[i], at_end);
      for (std::size_t j = 0; j < strokes.size(); ++j) {
        if (j == i || strokes[j].points.empty()) continue;
        const Hit h = closest_on(strokes[j], e);
        if (!(h.dist < eps_c)) continue;
        const std::size_t segs = std::max<std::size_t>(strokes[j].points.size(), 2) - 1;
        const double param = strokes[j].points.size() == 1 ? 0.0 : (double(h.segment) + h.u) / double(segs);
        const bool at_other_end = param == 0.0 || param == 1.0;
        if (at_other_end && j > i) continue;  // recorded from the later stroke
        ConnectionEdge edge{i, at_end, j, h.segment, h.u, param, {}};
        edge.offset = e - locate(strokes[j], param);
        g.edges.push_back(edge);
      }
    }
  }
  return g;
}

std::vector<Stroke> layout_init(std::span<const Stroke> disturbed, std::span<const Stroke> tracing,
                                const ConnectionGraph&, std::vector<LayoutInitStep>* steps) {
  if (disturbed.size() != tracing.size())
    fail(ErrorCode::kCorrespondence, "disturbed and tracing stroke counts differ");
  std::vector<Stroke> out(disturbed.begin(), disturbed.end());
  auto mapped = [](std::size_t idx, const Stroke& from, const Stroke& to) {
    if (from.points.size() < 2 || to.points.size() < 2) return std::size_t(0);
    const double f = double(idx) / double(from.points.size() - 1);
    return std::size_t(std::lround(f * double(to.points.size() - 1)));
  };
  if (steps) steps->assign(out.size(), {});
  for (std::size_t i = 1; i < out.size(); ++i) {
    const Stroke& ti = tracing[i];
    if (ti.points.empty() || out[i].points.empty()) continue;
    std::vector<double> logits;
    std::vector<Vec2> diffs;
    for (std::size_t j = 0; j < i; ++j) {
      const Stroke& tj = tracing[j];
      if (tj.points.empty() || out[j].points.empty()) continue;
      double best = std::numeric_limits<double>::infinity();
      std::size_t a = 0, b = 0;
      for (std::size_t ka = 0; ka < tj.points.size(); ++ka)
        for (std::size_t kb = 0; kb < ti.points.size(); ++kb) {
          const double d = distance(tj.points[ka].pos(), ti.points[kb].pos());
          if (d < best) best = d, a = ka, b = kb;
        }
      const Vec2 anchor = out[j].points[mapped(a, tj, out[j])].pos();
      const Vec2 target = ti.points[b].pos() - tj.points[a].pos() + anchor;
      const Vec2 current = out[i].points[mapped(b, ti, out[i])].pos();
      logits.push_back(1.0 / (best + 1.0));
      diffs.push_back(target - current);
    }
    if (logits.empty()) continue;
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0;
    for (double& l : logits) sum += (l = std::exp(l - mx));
    Vec2 delta{0, 0};
    for (std::size_t k = 0; k < logits.size(); ++k) {
      logits[k] /= sum;
      delta = delta + diffs[k] * logits[k];
    }
    for (Point& p : out[i].points) {
      p.x += delta.x;
      p.y += delta.y;
    }
    if (steps) (*steps)[i] = {logits, delta};
  }
  return out;
}

double layout_objective(const StrokeProblem& pr, std::span<const Vec2> p) {
  const auto& r = pr.reference;
  double tp = 0, ts = 0, tm = 0;
  for (const Anchor& a : pr.anchors) tp += squared_norm(p[a.index] - a.target);
  for (std::size_t k = 0; k + 1 < p.size(); ++k)
    ts += squared_norm((p[k + 1] - p[k]) - (r[k + 1] - r[k]));
  for (std::size_t k = 1; k + 1 < p.size(); ++k) tm += squared_norm(p[k + 1] - p[k] * 2.0 + p[k - 1]);
  return pr.w_p * tp + pr.w_s * ts + pr.w_m * tm;
}

std::vector<Vec2> layout_gradient(const StrokeProblem& pr, std::span<const Vec2> p) {
  const auto& r = pr.reference;
  std::vector<Vec2> g(p.size(), Vec2{0, 0});
  for (const Anchor& a : pr.anchors) g[a.index] = g[a.index] + (p[a.index] - a.target) * (2 * pr.w_p);
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    const Vec2 e = ((p[k + 1] - p[k]) - (r[k + 1] - r[k])) * (2 * pr.w_s);
    g[k + 1] = g[k + 1] + e;
    g[k] = g[k] - e;
  }
  for (std::size_t k = 1; k + 1 < p.size(); ++k) {
    const Vec2 c = (p[k + 1] - p[k] * 2.0 + p[k - 1]) * (2 * pr.w_m);
    g[k + 1] = g[k + 1] + c;
    g[k] = g[k] - c * 2.0;
    g[k - 1] = g[k - 1] + c;
  }
  return g;
}

std::optional<std::vector<Vec2>> solve_layout(const StrokeProblem& pr) {
  const std::size_t n = pr.reference.size();
  if (n == 0) return std::vector<Vec2>{};
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> t;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(Eigen::Index(n), 2);
  auto add = [&](std::size_t r, std::size_t c, double v) { t.emplace_back(Eigen::Index(r), Eigen::Index(c), v); };
  for (const Anchor& a : pr.anchors) {
    add(a.index, a.index, pr.w_p);
    rhs(Eigen::Index(a.index), 0) += pr.w_p * a.target.x;
    rhs(Eigen::Index(a.index), 1) += pr.w_p * a.target.y;
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    add(k, k, pr.w_s);
    add(k + 1, k + 1, pr.w_s);
    add(k, k + 1, -pr.w_s);
    add(k + 1, k, -pr.w_s);
    const Vec2 d = pr.reference[k + 1] - pr.reference[k];
    rhs(Eigen::Index(k + 1), 0) += pr.w_s * d.x;
    rhs(Eigen::Index(k + 1), 1) += pr.w_s * d.y;
    rhs(Eigen::Index(k), 0) -= pr.w_s * d.x;
    rhs(Eigen::Index(k), 1) -= pr.w_s * d.y;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const std::size_t idx[3] = {k - 1, k, k + 1};
    const double c[3] = {1.0, -2.0, 1.0};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) add(idx[a], idx[b], pr.w_m * c[a] * c[b]);
  }
  const auto dim = Eigen::Index(n);
  Eigen::SparseMatrix<double> A(dim, dim);
  A.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXd x = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !x.allFinite()) return std::nullopt;
  // LDLT happily factors a singular PSD matrix; reject pivots that vanished.
  if ((solver.vectorD().array() <= 1e-12 * std::max(1.0, A.diagonal().maxCoeff())).any()) return std::nullopt;
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {x(Eigen::Index(i), 0), x(Eigen::Index(i), 1)};
  return out;
}

std::vector<Stroke> layout_optimize(std::vector<Stroke> strokes, const ConnectionGraph& graph,
                                    const LayoutWeights& w, LayoutReport* report) {
  const std::vector<Stroke> reference = strokes;
  auto broken_count = [&] {
    std::size_t c = 0;
    for (const auto& e : graph.edges) c += edge_residual(strokes, e) > w.residual_tol;
    return c;
  };
  LayoutReport rep;
  rep.broken_before = broken_count();
  double w_p = 1.0;
  for (int pass = 0; pass < w.max_passes && broken_count() > 0; ++pass, w_p *= w.position_boost) {
    ++rep.passes;
    for (std::size_t i = 0; i < strokes.size(); ++i) {
      StrokeProblem pr;
      pr.w_p = w_p;
      pr.w_s = w.w_s;
      pr.w_m = w.w_m;
      bool broken = false;
      for (const auto& e : graph.edges) {
        if (e.stroke != i) continue;
        broken = broken || edge_residual(strokes, e) > w.residual_tol;
        const std::size_t idx = e.at_end ? strokes[i].points.size() - 1 : 0;
        pr.anchors.push_back({idx, locate(strokes[e.other], e.param) + e.offset});
      }
      if (!broken) continue;
      for (const Point& p : reference[i].points) pr.reference.push_back(p.pos());
      const auto solved = solve_layout(pr);
      if (!solved) {
        rep.warnings.push_back("stroke " + std::to_string(i) + ": singular layout system, skipped");
        continue;
      }
      for (std::size_t k = 0; k < solved->size(); ++k) {
        strokes[i].points[k].x = (*solved)[k].x;
        strokes[i].points[k].y = (*solved)[k].y;
      }
    }
  }
  rep.broken_after = broken_count();
  if (rep.broken_after > 0)
    rep.warnings.push_back(std::to_string(rep.broken_after) + " connections still above " +
                           std::to_string(w.residual_tol) + " px");
  if (report) *report = rep;
  return strokes;
}

}  // namespace dsketch
