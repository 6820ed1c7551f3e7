#include "dsketch/synthesis/synthesize.hpp"

#include "dsketch/core/error.hpp"

namespace dsketch {

std::filesystem::path model_path(const std::filesystem::path& dir, Group style, DisturberKind kind) {
  return dir / (std::string(to_string(style)) + "_" + std::string(to_string(kind)) + ".json");
}

DisturberSet load_disturber_set(const std::filesystem::path& dir, Group style) {
  DisturberSet set;
  set.style = style;
  for (DisturberKind kind : {DisturberKind::kExtrinsic, DisturberKind::kIntrinsic, DisturberKind::kPoint}) {
    const auto path = model_path(dir, style, kind);
    if (!std::filesystem::exists(path)) fail(ErrorCode::kMissingModel, "missing model " + path.string());
    DisturberModel m = load_model(path);
    if (m.kind != kind) fail(ErrorCode::kKindMismatch, path.string() + " holds a " + std::string(to_string(m.kind)) + " model");
    if (kind == DisturberKind::kExtrinsic) set.extrinsic = std::move(m);
    else if (kind == DisturberKind::kIntrinsic) set.intrinsic = std::move(m);
    else set.point = std::move(m);
  }
  return set;
}

void save_disturber_set(const DisturberSet& set, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create '" + dir.string() + "'");
  for (const auto* m : {&set.extrinsic, &set.intrinsic, &set.point})
    if (*m) save_model(**m, model_path(dir, set.style, (*m)->kind));
}

DisturberSet statistical_disturber_set(Group style) {
  return {style, default_statistical_disturber(DisturberKind::kExtrinsic, style),
          default_statistical_disturber(DisturberKind::kIntrinsic, style),
          default_statistical_disturber(DisturberKind::kPoint, style)};
}

Sketch synthesize(const Sketch& tracing, const DisturberSet& models, const SynthesisConfig& cfg,
                  std::vector<std::string>* warnings) {
  if (!models.extrinsic || !models.intrinsic || !models.point)
    fail(ErrorCode::kMissingModel, "synthesis needs extrinsic, intrinsic and point disturbers");
  if (cfg.n1 < 0 || cfg.n2 < 0) fail(ErrorCode::kInvalidArgument, "noise levels must be >= 0");
  if (warnings && (cfg.n1 > kMaxRecommendedNoise || cfg.n2 > kMaxRecommendedNoise))
    warnings->push_back("noise level above 0.3 is outside the calibrated range");

  Rng rng(cfg.seed);
  std::vector<Stroke> reference, disturbed;
  for (const Stroke& s : tracing.strokes) {
    if (s.points.empty()) fail(ErrorCode::kInvalidArgument, "tracing has an empty stroke");
    const BezierStroke b = fit_bezier(s);
    const std::size_t count = sample_count(b);
    const ExtrinsicResult ex = disturb_extrinsic(b, cfg.n1, *models.extrinsic, rng);
    const BezierStroke in = disturb_intrinsic(ex.stroke, cfg.n2, *models.intrinsic, rng);
    Stroke d = disturb_points(sample_bezier(in, count), *models.point, rng);
    d.width = s.width;
    disturbed.push_back(std::move(d));
    reference.push_back(sample_bezier(b, count));
  }

  const ConnectionGraph graph = connection_graph(reference, cfg.eps_c);
  std::vector<Stroke> placed = layout_init(disturbed, reference, graph);
  LayoutReport rep;
  placed = layout_optimize(std::move(placed), graph, cfg.layout, &rep);
  if (warnings) warnings->insert(warnings->end(), rep.warnings.begin(), rep.warnings.end());

  Sketch out;
  out.strokes = std::move(placed);
  out.prompt_id = tracing.prompt_id;
  out.user_id = "synthetic-" + std::to_string(cfg.seed);
  out.group = Group::kSynthetic;
  out.canvas_width = tracing.canvas_width;
  out.canvas_height = tracing.canvas_height;
  for (std::size_t i = 0; i < out.strokes.size(); ++i) out.strokes[i].kind = tracing.strokes[i].kind;
  return out;
}

}  // namespace dsketch
