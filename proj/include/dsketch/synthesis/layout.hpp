#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsketch/core/geometry.hpp"
#include "dsketch/core/sketch.hpp"

namespace dsketch {

inline constexpr double kConnectionEps = 3.0;

/// An endpoint of `stroke` attached to `other` at `param`, the index-space
/// fraction along other's polyline ((segment + u) / (points - 1)).
struct ConnectionEdge {
  std::size_t stroke = 0;
  bool at_end = false;  // false: first point, true: last point
  std::size_t other = 0;
  std::size_t segment = 0;
  double u = 0.0;
  double param = 0.0;
  Vec2 offset;  // endpoint minus the attachment point, tracing space
};

struct ConnectionGraph {
  double eps_c = kConnectionEps;
  std::vector<ConnectionEdge> edges;
};

/// Every stroke endpoint closer than eps_c to another stroke's polyline gives
/// an edge. An endpoint-to-endpoint contact is recorded once, on the later
/// stroke.
ConnectionGraph connection_graph(std::span<const Stroke> strokes, double eps_c = kConnectionEps);

/// Position at an index-space fraction along the polyline.
Vec2 locate(const Stroke& stroke, double param);
Vec2 endpoint(const Stroke& stroke, bool at_end);
/// |endpoint - (attachment on the other stroke + offset)| in `strokes`.
double edge_residual(std::span<const Stroke> strokes, const ConnectionEdge& edge);

struct LayoutInitStep {
  std::vector<double> weights;  // softmax over earlier strokes
  Vec2 delta;
};

/// Translates strokes one by one in drawing order by
/// sum_j w_j * (target_j - current_j), with target_j = t_i[b] - t_j[a] + d_j[a]
/// for the closest vertex pair (a on t_j, b on t_i) and w = softmax of
/// 1 / (dist + 1). Indices into the disturbed strokes are mapped by fraction.
std::vector<Stroke> layout_init(std::span<const Stroke> disturbed, std::span<const Stroke> tracing,
                                const ConnectionGraph& graph,
                                std::vector<LayoutInitStep>* steps = nullptr);

struct Anchor {
  std::size_t index = 0;
  Vec2 target;
};

/// F(p) = w_p * sum ||p_a - q_a||^2 + w_s * sum ||(p_k+1 - p_k) - (r_k+1 - r_k)||^2
///        + w_m * sum ||p_k+1 - 2 p_k + p_k-1||^2 over one stroke.
struct StrokeProblem {
  std::vector<Vec2> reference;
  std::vector<Anchor> anchors;
  double w_p = 1.0;
  double w_s = 1.0;
  double w_m = 0.5;
};

double layout_objective(const StrokeProblem& problem, std::span<const Vec2> points);
std::vector<Vec2> layout_gradient(const StrokeProblem& problem, std::span<const Vec2> points);
/// Exact minimizer through a sparse LDLT solve; nullopt when singular.
std::optional<std::vector<Vec2>> solve_layout(const StrokeProblem& problem);

struct LayoutWeights {
  double w_s = 1.0;
  double w_m = 0.5;
  double residual_tol = 0.5;
  int max_passes = 3;
  double position_boost = 10.0;  // w_p multiplier per extra pass
};

struct LayoutReport {
  int passes = 0;
  std::size_t broken_before = 0;
  std::size_t broken_after = 0;
  std::vector<std::string> warnings;
};

/// Re-solves every stroke with an edge residual above the tolerance, keeping
/// the input strokes as shape reference. Runs up to max_passes passes, each
/// with a stronger position term, until no edge is broken.
std::vector<Stroke> layout_optimize(std::vector<Stroke> strokes, const ConnectionGraph& graph,
                                    const LayoutWeights& weights = {},
                                    LayoutReport* report = nullptr);

}  // namespace dsketch
