#include "dsketch/synthesis/disturber.hpp"

#include <algorithm>
#include <cmath>

#include "dsketch/analysis/metrics.hpp"
#include "dsketch/core/error.hpp"
#include "dsketch/core/sketch_io.hpp"

namespace dsketch {

std::string_view to_string(DisturberKind kind) {
  switch (kind) {
    case DisturberKind::kExtrinsic: return "extrinsic";
    case DisturberKind::kIntrinsic: return "intrinsic";
    case DisturberKind::kPoint: return "point";
  }
  return "";
}

DisturberKind parse_disturber_kind(std::string_view name) {
  if (name == "extrinsic") return DisturberKind::kExtrinsic;
  if (name == "intrinsic") return DisturberKind::kIntrinsic;
  if (name == "point") return DisturberKind::kPoint;
  fail(ErrorCode::kFormat, "unknown disturber kind '" + std::string(name) + "'");
}

int output_size(DisturberKind kind) {
  switch (kind) {
    case DisturberKind::kExtrinsic: return 4;
    case DisturberKind::kIntrinsic: return 12;
    case DisturberKind::kPoint: return 2;
  }
  return 0;
}

const std::vector<TrainingPair>& TrainingSet::of(DisturberKind kind) const {
  switch (kind) {
    case DisturberKind::kExtrinsic: return extrinsic;
    case DisturberKind::kIntrinsic: return intrinsic;
    case DisturberKind::kPoint: return point;
  }
  return point;
}

namespace {

double percentile90(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t rank = std::size_t(std::ceil(0.9 * double(v.size())));
  return v[std::max<std::size_t>(rank, 1) - 1];
}

// Signed distances of the points from the curve, measured along the normal
// of a dense polyline approximation.
std::vector<double> normal_residuals(const BezierStroke& b, const Stroke& s) {
  const Stroke dense = sample_bezier(b, 256);
  std::vector<double> r;
  for (const Point& p : s.points) {
    double best = std::numeric_limits<double>::infinity(), signed_d = 0;
    for (std::size_t k = 1; k < dense.points.size(); ++k) {
      const Vec2 a = dense.points[k - 1].pos(), c = dense.points[k].pos();
      const double u = project_to_segment(p.pos(), a, c);
      const Vec2 q = a + (c - a) * u;
      const double d = distance(p.pos(), q);
      if (d < best) {
        best = d;
        const double len = distance(a, c);
        signed_d = len > 1e-12 ? cross(c - a, p.pos() - q) / len : d;
      }
    }
    r.push_back(signed_d);
  }
  return r;
}

bool usable(const Stroke& s) { return s.points.size() >= 2; }

}  // namespace

TrainingSet build_training_pairs(std::span<const TrainingDrawing> dataset, Group style,
                                 int tolerance) {
  TrainingSet set;
  std::vector<double> thetas, shifts, scales;
  for (std::size_t di = 0; di < dataset.size(); ++di) {
    const TrainingDrawing& d = dataset[di];
    const MultiLevelRegistration& lv = d.levels;
    if (lv.original.group != style || !is_valid_drawing(d.e_star)) continue;
    const Sketch& stroke_level = lv.stroke_level.sketch;
    const std::vector<double> rates = stroke_overlap_rates(stroke_level, d.tracing, tolerance);
    const bool content = stroke_level.content_stroke_count() > 0;
    const SimilarityTransform& g = lv.sketch_level.transform;
    for (std::size_t i = 0; i < stroke_level.strokes.size(); ++i) {
      const Stroke& sk = lv.sketch_level.sketch.strokes.at(i);
      if (content && !sk.is_content()) continue;
      if (rates[i] < kValidStrokeRate || !usable(sk)) continue;
      const BezierStroke bs = fit_bezier(sk);

      const SimilarityTransform rel = relative_transform(g, lv.stroke_level.transforms.at(i));
      const Vec2 c = bs.frame.centroid;
      const Vec2 shift = rel.apply(c) - c;
      TrainingPair ex{DisturberKind::kExtrinsic, bs,
                      {wrap_degrees(rel.theta_deg), shift.x, shift.y, std::log(rel.scale)}, 0.0, di, i};
      thetas.push_back(std::abs(ex.target[0]));
      shifts.push_back(norm(shift));
      scales.push_back(std::abs(rel.scale - 1.0));
      set.extrinsic.push_back(std::move(ex));

      const BezierStroke bp = fit_bezier(lv.pixel_level.strokes.at(i));
      const BezierStroke bt = fit_bezier(stroke_level.strokes.at(i));
      TrainingPair in{DisturberKind::kIntrinsic, bp, {}, 0.0, di, i};
      double disp = 0;
      for (std::size_t k = 0; k < kControlPoints; ++k) {
        const Vec2 o = (bt.control[k] - bp.control[k]) * (1.0 / bp.frame.scale);
        in.target.push_back(o.x);
        in.target.push_back(o.y);
        disp += norm(o);
      }
      in.m = disp / double(kControlPoints);
      set.intrinsic.push_back(std::move(in));

      const std::vector<double> r = normal_residuals(bs, sk);
      double mu = 0, ss = 0;
      for (double v : r) mu += v, ss += v * v;
      mu /= double(r.size());
      const double var = std::max(0.0, ss / double(r.size()) - mu * mu);
      TrainingPair pt{DisturberKind::kPoint, bs, {mu, std::sqrt(var)},
                      std::sqrt(ss / double(r.size())) / bs.frame.scale, di, i};
      set.point.push_back(std::move(pt));
    }
  }
  if (set.extrinsic.empty())
    fail(ErrorCode::kEmpty, "no valid strokes for style '" + std::string(to_string(style)) + "'");

  set.refs = {percentile90(thetas), percentile90(shifts), percentile90(scales)};
  auto ratio = [](double v, double ref) { return ref > 1e-12 ? v / ref : 0.0; };
  for (TrainingPair& p : set.extrinsic) {
    const double s = std::exp(p.target[3]);
    p.m = (ratio(std::abs(p.target[0]), set.refs.theta) +
           ratio(std::hypot(p.target[1], p.target[2]), set.refs.translation) +
           ratio(std::abs(s - 1.0), set.refs.scale)) / 3.0;
  }
  return set;
}

std::vector<double> DisturberModel::predict(std::span<const double> coords, double n) const {
  const int outs = output_size(kind);
  std::vector<double> y(std::size_t(outs), 0.0);
  if (statistical) {
    for (int i = 0; i < outs; ++i)
      y[std::size_t(i)] = kind == DisturberKind::kPoint ? statistical->mean[std::size_t(i)]
                                                        : n * statistical->mean[std::size_t(i)];
    return y;
  }
  if (!network) fail(ErrorCode::kMissingModel, "disturber has neither a network nor parameters");
  Eigen::VectorXd x(kModelInputs);
  for (int i = 0; i < 12; ++i) x(i) = coords[std::size_t(i)];
  x(12) = kind == DisturberKind::kPoint ? 0.0 : n;
  const Eigen::VectorXd out = network->forward(x);
  for (int i = 0; i < outs; ++i)
    y[std::size_t(i)] = out(i) * out_std[std::size_t(i)] + out_mean[std::size_t(i)];
  return y;
}

DisturberModel train_disturber(std::span<const TrainingPair> pairs, DisturberKind kind, Group style,
                               const DisturberTraining& config, std::vector<std::string>* warnings) {
  if (pairs.empty()) fail(ErrorCode::kEmpty, "no training pairs");
  const int outs = output_size(kind);
  if (pairs.size() < 100 && warnings)
    warnings->push_back("only " + std::to_string(pairs.size()) + " training pairs for the " +
                        std::string(to_string(kind)) + " disturber");
  const Eigen::Index n = Eigen::Index(pairs.size());
  Eigen::MatrixXd x(n, kModelInputs), y(n, outs);
  for (Eigen::Index r = 0; r < n; ++r) {
    const TrainingPair& p = pairs[std::size_t(r)];
    if (p.kind != kind || int(p.target.size()) != outs)
      fail(ErrorCode::kKindMismatch, "training pair does not match the disturber kind");
    const auto coords = p.input.local_coordinates();
    for (int i = 0; i < 12; ++i) x(r, i) = coords[std::size_t(i)];
    x(r, 12) = kind == DisturberKind::kPoint ? 0.0 : p.m;
    for (int i = 0; i < outs; ++i) y(r, i) = p.target[std::size_t(i)];
  }
  DisturberModel model;
  model.kind = kind;
  model.style = style;
  model.pairs = pairs.size();
  for (int i = 0; i < outs; ++i) {
    const double mu = y.col(i).mean();
    const double sd = std::sqrt((y.col(i).array() - mu).square().mean());
    model.out_mean.push_back(mu);
    model.out_std.push_back(sd > 1e-12 ? sd : 1.0);
    model.jitter.push_back(kind == DisturberKind::kPoint ? 0.0 : sd);
    y.col(i) = (y.col(i).array() - mu) / model.out_std.back();
  }
  std::vector<int> sizes{kModelInputs};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(outs);
  Mlp net(sizes, config.train.seed);
  model.training = net.train(x, y, config.train);
  model.network = std::move(net);
  return model;
}

DisturberModel default_statistical_disturber(DisturberKind kind, Group style) {
  const bool pro = style == Group::kProfessional;
  DisturberModel m;
  m.kind = kind;
  m.style = style;
  StatisticalModel s;
  switch (kind) {
    case DisturberKind::kExtrinsic:
      s.mean = {0, 0, 0, 0};
      s.sd = pro ? std::vector<double>{8, 16, 16, 0.15} : std::vector<double>{12, 25, 25, 0.25};
      break;
    case DisturberKind::kIntrinsic:
      s.mean.assign(12, 0.0);
      s.sd.assign(12, pro ? 0.05 : 0.08);
      break;
    case DisturberKind::kPoint:
      s.mean = {0.0, pro ? 0.5 : 0.8};
      s.sd = {0.0, 0.0};
      break;
  }
  m.jitter = kind == DisturberKind::kPoint ? std::vector<double>{0, 0} : s.sd;
  m.statistical = s;
  return m;
}

namespace {

void require_kind(const DisturberModel& m, DisturberKind kind) {
  if (m.kind != kind)
    fail(ErrorCode::kKindMismatch, "expected a " + std::string(to_string(kind)) + " disturber, got " +
                                       std::string(to_string(m.kind)));
}

std::vector<double> sample_output(const BezierStroke& b, double n, const DisturberModel& m, Rng& rng) {
  std::vector<double> y = m.predict(b.local_coordinates(), n);
  std::normal_distribution<double> z(0.0, 1.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double draw = z(rng);
    y[i] += n * m.jitter[i] * draw;
  }
  return y;
}

}  // namespace

BezierStroke transform_bezier(const BezierStroke& b, const SimilarityTransform& t) {
  BezierStroke out = b;
  for (Vec2& c : out.control) c = t.apply(c);
  out.frame.centroid = t.apply(b.frame.centroid);
  out.frame.scale = b.frame.scale * t.scale;
  return out;
}

ExtrinsicResult disturb_extrinsic(const BezierStroke& b, double n1, const DisturberModel& model,
                                  Rng& rng) {
  require_kind(model, DisturberKind::kExtrinsic);
  const std::vector<double> y = sample_output(b, n1, model, rng);
  const Vec2 c = b.frame.centroid;
  const SimilarityTransform about_origin{wrap_degrees(y[0]), std::exp(y[3]), 0, 0};
  const Vec2 t = c + Vec2{y[1], y[2]} - about_origin.apply(c);
  ExtrinsicResult r;
  r.transform = {about_origin.theta_deg, about_origin.scale, t.x, t.y};
  r.stroke = transform_bezier(b, r.transform);
  return r;
}

BezierStroke disturb_intrinsic(const BezierStroke& b, double n2, const DisturberModel& model, Rng& rng) {
  require_kind(model, DisturberKind::kIntrinsic);
  const std::vector<double> y = sample_output(b, n2, model, rng);
  BezierStroke out = b;
  for (std::size_t k = 0; k < kControlPoints; ++k)
    out.control[k] = b.control[k] + Vec2{y[2 * k], y[2 * k + 1]} * b.frame.scale;
  return out;
}

std::vector<double> point_smoothing_kernel() {
  const int radius = int(std::ceil(3 * kPointSmoothingSigma));
  std::vector<double> k;
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    k.push_back(std::exp(-0.5 * i * i / (kPointSmoothingSigma * kPointSmoothingSigma)));
    sum += k.back();
  }
  for (double& v : k) v /= sum;
  return k;
}

Stroke disturb_points(const Stroke& polyline, const DisturberModel& model, Rng& rng) {
  require_kind(model, DisturberKind::kPoint);
  Stroke out = polyline;
  const std::size_t n = polyline.points.size();
  if (n < 3) return out;
  const std::vector<double> y = model.predict(fit_bezier(polyline).local_coordinates(), 0.0);
  const double mu = y[0], sigma = std::max(0.0, y[1]);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> raw(n);
  for (double& v : raw) v = mu + sigma * z(rng);

  const std::vector<double> kernel = point_smoothing_kernel();
  const int radius = int(kernel.size() / 2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double acc = 0, wsum = 0;
    for (int k = -radius; k <= radius; ++k) {
      const long j = long(i) + k;
      if (j < 0 || j >= long(n)) continue;
      acc += kernel[std::size_t(k + radius)] * raw[std::size_t(j)];
      wsum += kernel[std::size_t(k + radius)];
    }
    const Vec2 tangent = polyline.points[i + 1].pos() - polyline.points[i - 1].pos();
    const double len = norm(tangent);
    if (len < 1e-12) continue;
    const Vec2 normal{-tangent.y / len, tangent.x / len};
    const Vec2 p = polyline.points[i].pos() + normal * (acc / wsum);
    out.points[i].x = p.x;
    out.points[i].y = p.y;
  }
  return out;
}

nlohmann::json model_to_json(const DisturberModel& m) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = to_string(m.kind);
  j["style"] = to_string(m.style);
  j["type"] = m.network ? "mlp" : "statistical";
  if (m.network) j["network"] = m.network->to_json();
  if (m.statistical) j["statistical"] = {{"mean", m.statistical->mean}, {"sd", m.statistical->sd}};
  j["out_mean"] = m.out_mean;
  j["out_std"] = m.out_std;
  j["jitter"] = m.jitter;
  j["training"] = {{"epochs", m.training.epochs},
                   {"initial_loss", m.training.initial_loss},
                   {"final_loss", m.training.final_loss},
                   {"best_epoch", m.training.best_epoch},
                   {"pairs", m.pairs}};
  return j;
}

DisturberModel model_from_json(const nlohmann::json& j) {
  DisturberModel m;
  try {
    m.kind = parse_disturber_kind(j.at("kind").get<std::string>());
    m.style = parse_group(j.at("style").get<std::string>());
    const std::string type = j.at("type").get<std::string>();
    const std::size_t outs = std::size_t(output_size(m.kind));
    m.jitter = j.at("jitter").get<std::vector<double>>();
    if (m.jitter.size() != outs) fail(ErrorCode::kFormat, "model jitter has the wrong size");
    if (type == "mlp") {
      m.network = Mlp::from_json(j.at("network"));
      m.out_mean = j.at("out_mean").get<std::vector<double>>();
      m.out_std = j.at("out_std").get<std::vector<double>>();
      if (m.network->inputs() != kModelInputs || std::size_t(m.network->outputs()) != outs ||
          m.out_mean.size() != outs || m.out_std.size() != outs)
        fail(ErrorCode::kFormat, "model shape does not match its kind");
    } else if (type == "statistical") {
      StatisticalModel s;
      s.mean = j.at("statistical").at("mean").get<std::vector<double>>();
      s.sd = j.at("statistical").at("sd").get<std::vector<double>>();
      if (s.mean.size() != outs || s.sd.size() != outs)
        fail(ErrorCode::kFormat, "statistical model has the wrong size");
      m.statistical = s;
    } else {
      fail(ErrorCode::kFormat, "unknown model type '" + type + "'");
    }
    if (j.contains("training")) {
      const auto& t = j["training"];
      m.training.epochs = t.value("epochs", 0);
      m.training.initial_loss = t.value("initial_loss", 0.0);
      m.training.final_loss = t.value("final_loss", 0.0);
      m.training.best_epoch = t.value("best_epoch", 0);
      m.pairs = t.value("pairs", std::size_t{0});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("model: ") + e.what());
  }
  return m;
}

void save_model(const DisturberModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, dump_json(model_to_json(model)));
}

DisturberModel load_model(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace dsketch
