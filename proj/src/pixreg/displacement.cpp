#include "dsketch/pixreg/displacement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "dsketch/core/distance.hpp"
#include "dsketch/core/error.hpp"
#include "dsketch/core/sketch_io.hpp"

namespace dsketch {

DisplacementField DisplacementField::zero(int width, int height) {
  const std::size_t n = std::size_t(width) * height;
  return {width, height, std::vector<float>(n, 0.0f), std::vector<float>(n, 0.0f)};
}

DisplacementField DisplacementField::constant(int width, int height, Vec2 v) {
  const std::size_t n = std::size_t(width) * height;
  return {width, height, std::vector<float>(n, float(v.x)), std::vector<float>(n, float(v.y))};
}

Vec2 DisplacementField::sample(Vec2 p) const {
  const double x = std::clamp(p.x, 0.0, double(width - 1));
  const double y = std::clamp(p.y, 0.0, double(height - 1));
  const int x0 = std::min(static_cast<int>(x), width - 1);
  const int y0 = std::min(static_cast<int>(y), height - 1);
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  auto lerp = [&](const std::vector<float>& c) {
    const double top = (1 - fx) * c[std::size_t(y0) * width + x0] + fx * c[std::size_t(y0) * width + x1];
    const double bot = (1 - fx) * c[std::size_t(y1) * width + x0] + fx * c[std::size_t(y1) * width + x1];
    return (1 - fy) * top + fy * bot;
  };
  return {lerp(dx), lerp(dy)};
}

Sketch apply_displacement(const Sketch& sketch, const DisplacementField& field) {
  Sketch out = sketch;
  for (auto& stroke : out.strokes) {
    for (auto& p : stroke.points) {
      const Vec2 d = field.sample(p.pos());
      p.x += d.x;
      p.y += d.y;
    }
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'D', 'S', 'D', 'F'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

}  // namespace

std::string encode_field(const DisplacementField& field) {
  std::string out(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(field.width));
  put_u32(out, static_cast<std::uint32_t>(field.height));
  out.reserve(out.size() + field.dx.size() * 8);
  for (std::size_t i = 0; i < field.dx.size(); ++i) {
    put_u32(out, std::bit_cast<std::uint32_t>(field.dx[i]));
    put_u32(out, std::bit_cast<std::uint32_t>(field.dy[i]));
  }
  return out;
}

DisplacementField decode_field(std::string_view bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    fail(ErrorCode::kFormat, "displacement field: bad magic");
  }
  const std::uint32_t w = get_u32(bytes, 4);
  const std::uint32_t h = get_u32(bytes, 8);
  const std::size_t n = std::size_t(w) * h;
  if (bytes.size() != 12 + n * 8) fail(ErrorCode::kFormat, "displacement field: truncated payload");
  DisplacementField field = DisplacementField::zero(int(w), int(h));
  for (std::size_t i = 0; i < n; ++i) {
    field.dx[i] = std::bit_cast<float>(get_u32(bytes, 12 + 8 * i));
    field.dy[i] = std::bit_cast<float>(get_u32(bytes, 16 + 8 * i));
  }
  return field;
}

void write_field(const DisplacementField& field, const std::filesystem::path& path) {
  write_file_atomic(path, encode_field(field));
}

DisplacementField read_field(const std::filesystem::path& path) {
  return decode_field(read_text_file(path));
}

namespace {

// Image of one pyramid level; positions are full-resolution canvas coordinates.
struct LevelDistance {
  int factor = 1;
  int width = 0;
  int height = 0;
  std::vector<double> dist;  // full-resolution px units
  std::vector<double> gx;    // d(dist)/dx per full-resolution px
  std::vector<double> gy;

  // Bilinear sample of distance and gradient at canvas position p.
  void sample(Vec2 p, double& d, Vec2& g) const {
    const double off = 0.5 * (factor - 1);
    double x = (p.x - off) / factor;
    double y = (p.y - off) / factor;
    const double cx = std::clamp(x, 0.0, double(width - 1));
    const double cy = std::clamp(y, 0.0, double(height - 1));
    const int x0 = std::min(static_cast<int>(cx), width - 1);
    const int y0 = std::min(static_cast<int>(cy), height - 1);
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const double fx = cx - x0;
    const double fy = cy - y0;
    auto lerp = [&](const std::vector<double>& c) {
      const double top = (1 - fx) * c[std::size_t(y0) * width + x0] + fx * c[std::size_t(y0) * width + x1];
      const double bot = (1 - fx) * c[std::size_t(y1) * width + x0] + fx * c[std::size_t(y1) * width + x1];
      return (1 - fy) * top + fy * bot;
    };
    // Outside the image the distance keeps growing with the overshoot.
    const double outside = std::hypot((x - cx) * factor, (y - cy) * factor);
    d = lerp(dist) + outside;
    g = {lerp(gx), lerp(gy)};
    if (outside > 0.0) {
      g += Vec2{(x - cx) * factor, (y - cy) * factor} / outside;
    }
  }
};

RasterImage downsample(const RasterImage& image, int factor) {
  if (factor == 1) return image;
  const int w = (image.width + factor - 1) / factor;
  const int h = (image.height + factor - 1) / factor;
  RasterImage out(w, h);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      if (image.foreground(x, y)) out.set(x / factor, y / factor);
    }
  }
  return out;
}

LevelDistance make_level(const RasterImage& fixed, int factor) {
  const RasterImage small = downsample(fixed, factor);
  LevelDistance lvl;
  lvl.factor = factor;
  lvl.width = small.width;
  lvl.height = small.height;
  lvl.dist = distance_transform(small).values;
  for (auto& d : lvl.dist) d *= factor;
  const std::size_t n = lvl.dist.size();
  lvl.gx.assign(n, 0.0);
  lvl.gy.assign(n, 0.0);
  const int w = lvl.width;
  const int h = lvl.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
      const int yu = std::max(y - 1, 0), yd = std::min(y + 1, h - 1);
      const std::size_t i = std::size_t(y) * w + x;
      if (xr > xl) {
        lvl.gx[i] = (lvl.dist[std::size_t(y) * w + xr] - lvl.dist[std::size_t(y) * w + xl]) /
                    (double(xr - xl) * factor);
      }
      if (yd > yu) {
        lvl.gy[i] = (lvl.dist[std::size_t(yd) * w + x] - lvl.dist[std::size_t(yu) * w + x]) /
                    (double(yd - yu) * factor);
      }
    }
  }
  return lvl;
}

std::vector<Vec2> level_samples(const RasterImage& moving, int factor) {
  const RasterImage small = downsample(moving, factor);
  const double off = 0.5 * (factor - 1);
  std::vector<Vec2> pts;
  for (int y = 0; y < small.height; ++y) {
    for (int x = 0; x < small.width; ++x) {
      if (small.foreground(x, y)) pts.push_back({x * double(factor) + off, y * double(factor) + off});
    }
  }
  return pts;
}

// Displacement stored on a regular control grid and interpolated bilinearly.
struct ControlGrid {
  int nx = 0;
  int ny = 0;
  double spacing = 4.0;
  std::vector<double> ux;
  std::vector<double> uy;

  ControlGrid(int width, int height, double spacing_px) : spacing(spacing_px) {
    nx = static_cast<int>(std::ceil((width - 1) / spacing)) + 1;
    ny = static_cast<int>(std::ceil((height - 1) / spacing)) + 1;
    ux.assign(std::size_t(nx) * ny, 0.0);
    uy.assign(std::size_t(nx) * ny, 0.0);
  }

  struct Stencil {
    std::size_t idx[4];
    double w[4];
  };

  Stencil stencil(Vec2 p) const {
    const double gx = std::clamp(p.x / spacing, 0.0, double(nx - 1));
    const double gy = std::clamp(p.y / spacing, 0.0, double(ny - 1));
    const int x0 = std::min(static_cast<int>(gx), nx - 1);
    const int y0 = std::min(static_cast<int>(gy), ny - 1);
    const int x1 = std::min(x0 + 1, nx - 1);
    const int y1 = std::min(y0 + 1, ny - 1);
    const double fx = gx - x0;
    const double fy = gy - y0;
    return {{std::size_t(y0) * nx + x0, std::size_t(y0) * nx + x1, std::size_t(y1) * nx + x0,
             std::size_t(y1) * nx + x1},
            {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy}};
  }

  Vec2 at(const Stencil& s, const std::vector<double>& vx, const std::vector<double>& vy) const {
    Vec2 v;
    for (int k = 0; k < 4; ++k) v += Vec2{vx[s.idx[k]], vy[s.idx[k]]} * s.w[k];
    return v;
  }

  double roughness(const std::vector<double>& vx, const std::vector<double>& vy) const {
    double sum = 0.0;
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        const std::size_t i = std::size_t(y) * nx + x;
        if (x + 1 < nx) {
          sum += std::pow(vx[i + 1] - vx[i], 2) + std::pow(vy[i + 1] - vy[i], 2);
        }
        if (y + 1 < ny) {
          sum += std::pow(vx[i + nx] - vx[i], 2) + std::pow(vy[i + nx] - vy[i], 2);
        }
      }
    }
    return sum / (spacing * spacing * double(nx) * ny);
  }
};

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (auto& v : k) v /= sum;
  return k;
}

struct Box {
  int x0 = 0, y0 = 0, x1 = -1, y1 = -1;  // inclusive
};

// Separable convolution with zero padding, evaluated only inside `box`.
// Callers guarantee the input is zero outside the box shrunk by the kernel
// radius, so values outside the box stay zero.
void smooth(std::vector<double>& v, int nx, const Box& box, const std::vector<double>& kernel) {
  const int r = static_cast<int>(kernel.size() / 2);
  const int bw = box.x1 - box.x0 + 1;
  const int bh = box.y1 - box.y0 + 1;
  if (bw <= 0 || bh <= 0) return;
  std::vector<double> line(std::size_t(std::max(bw, bh) + 2 * r), 0.0);
  std::vector<double> out(std::size_t(std::max(bw, bh)));
  for (int y = box.y0; y <= box.y1; ++y) {
    double* row = v.data() + std::size_t(y) * nx + box.x0;
    std::fill(line.begin(), line.end(), 0.0);
    std::copy(row, row + bw, line.begin() + r);
    for (int x = 0; x < bw; ++x) {
      const double* src = line.data() + x;
      double acc = 0.0;
      for (int k = 0; k <= 2 * r; ++k) acc += kernel[k] * src[k];
      out[x] = acc;
    }
    std::copy(out.begin(), out.begin() + bw, row);
  }
  for (int x = box.x0; x <= box.x1; ++x) {
    std::fill(line.begin(), line.end(), 0.0);
    for (int y = 0; y < bh; ++y) line[y + r] = v[std::size_t(box.y0 + y) * nx + x];
    for (int y = 0; y < bh; ++y) {
      const double* src = line.data() + y;
      double acc = 0.0;
      for (int k = 0; k <= 2 * r; ++k) acc += kernel[k] * src[k];
      out[y] = acc;
    }
    for (int y = 0; y < bh; ++y) v[std::size_t(box.y0 + y) * nx + x] = out[y];
  }
}

}  // namespace

DisplacementField estimate_displacement(const RasterImage& moving, const RasterImage& fixed,
                                        const DemonsConfig& config) {
  if (moving.width != fixed.width || moving.height != fixed.height) {
    fail(ErrorCode::kInvalidArgument, "moving and fixed rasters differ in size");
  }
  if (moving.foreground_count() == 0 || fixed.foreground_count() == 0) {
    fail(ErrorCode::kEmpty, "registration needs foreground in both rasters");
  }
  const int width = moving.width;
  const int height = moving.height;
  ControlGrid grid(width, height, config.grid_spacing);
  const auto kernel = gaussian_kernel(config.sigma_field / config.grid_spacing);
  const std::size_t nodes = grid.ux.size();

  for (int level = config.pyramid_levels - 1; level >= 0; --level) {
    const int factor = 1 << level;
    const LevelDistance lvl = make_level(fixed, factor);
    const std::vector<Vec2> samples = level_samples(moving, factor);
    std::vector<ControlGrid::Stencil> stencils;
    stencils.reserve(samples.size());
    for (const auto& p : samples) stencils.push_back(grid.stencil(p));
    const double max_update = 2.0 * factor;
    const int radius = static_cast<int>(kernel.size() / 2);
    Box box{grid.nx, grid.ny, -1, -1};
    for (const auto& st : stencils) {
      for (std::size_t idx : st.idx) {
        const int gx = static_cast<int>(idx % grid.nx);
        const int gy = static_cast<int>(idx / grid.nx);
        box.x0 = std::min(box.x0, gx);
        box.y0 = std::min(box.y0, gy);
        box.x1 = std::max(box.x1, gx);
        box.y1 = std::max(box.y1, gy);
      }
    }
    box.x0 = std::max(0, box.x0 - radius);
    box.y0 = std::max(0, box.y0 - radius);
    box.x1 = std::min(grid.nx - 1, box.x1 + radius);
    box.y1 = std::min(grid.ny - 1, box.y1 + radius);

    auto objective = [&](const std::vector<double>& vx, const std::vector<double>& vy) {
      double data = 0.0;
      double d;
      Vec2 g;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        lvl.sample(samples[i] + grid.at(stencils[i], vx, vy), d, g);
        data += d * d;
      }
      return data / double(samples.size()) + config.regularization * grid.roughness(vx, vy);
    };

    double current = objective(grid.ux, grid.uy);
    std::vector<double> num_x(nodes), num_y(nodes), den(nodes);
    std::vector<double> cand_x(nodes), cand_y(nodes);
    for (int step = 0; step < config.max_steps_per_level; ++step) {
      std::fill(num_x.begin(), num_x.end(), 0.0);
      std::fill(num_y.begin(), num_y.end(), 0.0);
      std::fill(den.begin(), den.end(), 0.0);
      double d;
      Vec2 g;
      bool any_force = false;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = stencils[i];
        lvl.sample(samples[i] + grid.at(s, grid.ux, grid.uy), d, g);
        // Newton step toward the nearest fixed curve, capped per level.
        Vec2 force = g * (-d / std::max(squared_norm(g), 0.25));
        const double len = norm(force);
        if (len > max_update) force *= max_update / len;
        if (len > 1e-12) any_force = true;
        for (int k = 0; k < 4; ++k) {
          num_x[s.idx[k]] += s.w[k] * force.x;
          num_y[s.idx[k]] += s.w[k] * force.y;
          den[s.idx[k]] += s.w[k];
        }
      }
      if (!any_force) break;
      smooth(num_x, grid.nx, box, kernel);
      smooth(num_y, grid.nx, box, kernel);
      smooth(den, grid.nx, box, kernel);
      const double den_max = *std::max_element(den.begin(), den.end());
      const double eps = 1e-3 * den_max + 1e-12;
      for (std::size_t n = 0; n < nodes; ++n) {
        num_x[n] /= den[n] + eps;
        num_y[n] /= den[n] + eps;
      }

      bool accepted = false;
      for (double alpha = 1.0; alpha >= 1.0 / 32.0; alpha *= 0.5) {
        for (std::size_t n = 0; n < nodes; ++n) {
          cand_x[n] = grid.ux[n] + alpha * num_x[n];
          cand_y[n] = grid.uy[n] + alpha * num_y[n];
        }
        const double trial = objective(cand_x, cand_y);
        if (trial < current) {
          const double gain = current - trial;
          grid.ux.swap(cand_x);
          grid.uy.swap(cand_y);
          accepted = true;
          const bool stalled = gain < config.min_relative_decrease * current;
          current = trial;
          if (stalled) step = config.max_steps_per_level;
          break;
        }
      }
      if (!accepted) break;
    }
  }

  DisplacementField field = DisplacementField::zero(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec2 v = grid.at(grid.stencil({double(x), double(y)}), grid.ux, grid.uy);
      const std::size_t i = std::size_t(y) * width + x;
      field.dx[i] = static_cast<float>(v.x);
      field.dy[i] = static_cast<float>(v.y);
    }
  }
  return field;
}

double mean_warped_distance(const RasterImage& moving, const RasterImage& fixed,
                            const DisplacementField& field) {
  const LevelDistance lvl = make_level(fixed, 1);
  double sum = 0.0;
  std::size_t n = 0;
  double d;
  Vec2 g;
  for (int y = 0; y < moving.height; ++y) {
    for (int x = 0; x < moving.width; ++x) {
      if (!moving.foreground(x, y)) continue;
      const Vec2 p{double(x), double(y)};
      lvl.sample(p + field.sample(p), d, g);
      sum += d;
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / double(n);
}

}  // namespace dsketch
