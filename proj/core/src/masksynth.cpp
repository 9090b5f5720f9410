#include "adgan/masksynth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "adgan/error.hpp"

namespace adgan::masksynth {

bool EllipseSpec::contains(double x, double y) const { return radius_at(x, y) <= 1.0; }

double EllipseSpec::radius_at(double x, double y) const {
  const double dx = x - center_x;
  const double dy = y - center_y;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double u = (dx * c + dy * s) / major_a;
  const double v = (-dx * s + dy * c) / minor_b;
  return std::sqrt(u * u + v * v);
}

double EllipseSpec::half_width() const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return std::sqrt(major_a * major_a * c * c + minor_b * minor_b * s * s);
}

double EllipseSpec::half_height() const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return std::sqrt(major_a * major_a * s * s + minor_b * minor_b * c * c);
}

void MaskSynthConfig::validate() const {
  if (n_max < 1) throw ConfigError("masksynth.n_max must be >= 1");
  if (!(a_range[0] > 0.0) || a_range[0] > a_range[1]) {
    throw ConfigError("masksynth.a_range must satisfy 0 < a_min <= a_max");
  }
  if (!(e_range[0] >= 0.0) || e_range[0] > e_range[1] || !(e_range[1] < 1.0)) {
    throw ConfigError("masksynth.e_range must satisfy 0 <= e_min <= e_max < 1");
  }
  if (canvas_h < 1 || canvas_w < 1) throw ConfigError("masksynth canvas must be non-empty");
  if (max_attempts_per_object < 1) throw ConfigError("masksynth.max_attempts_per_object must be >= 1");
  if (max_geometry_resamples < 0) throw ConfigError("masksynth.max_geometry_resamples must be >= 0");
  if (edge_width < 1) throw ConfigError("masksynth.edge_width must be >= 1");
}

double minor_axis(double major_a, double eccentricity) {
  return std::sqrt(1.0 - eccentricity * eccentricity) * major_a;
}

EllipseSpec sample_ellipse(Rng& rng, const MaskSynthConfig& config) {
  std::uniform_real_distribution<double> a_dist(config.a_range[0], config.a_range[1]);
  std::uniform_real_distribution<double> e_dist(config.e_range[0], config.e_range[1]);
  std::uniform_real_distribution<double> theta_dist(0.0, std::numbers::pi);
  EllipseSpec e;
  e.major_a = a_dist(rng);
  e.minor_b = minor_axis(e.major_a, e_dist(rng));
  e.theta = theta_dist(rng);
  return e;
}

std::vector<std::size_t> footprint(const EllipseSpec& ellipse, int canvas_h, int canvas_w) {
  const int x0 = std::max(0, static_cast<int>(std::floor(ellipse.center_x - ellipse.half_width())));
  const int x1 = std::min(canvas_w - 1, static_cast<int>(std::ceil(ellipse.center_x + ellipse.half_width())));
  const int y0 = std::max(0, static_cast<int>(std::floor(ellipse.center_y - ellipse.half_height())));
  const int y1 = std::min(canvas_h - 1, static_cast<int>(std::ceil(ellipse.center_y + ellipse.half_height())));
  std::vector<std::size_t> pixels;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (ellipse.contains(x + 0.5, y + 0.5)) {
        pixels.push_back(static_cast<std::size_t>(y) * static_cast<std::size_t>(canvas_w) +
                         static_cast<std::size_t>(x));
      }
    }
  }
  return pixels;
}

namespace {

bool try_place(Rng& rng, EllipseSpec& ellipse, const MaskSynthConfig& config, Grid<std::uint8_t>& occupied) {
  const double hx = ellipse.half_width();
  const double hy = ellipse.half_height();
  if (2.0 * hx > config.canvas_w || 2.0 * hy > config.canvas_h) return false;
  std::uniform_real_distribution<double> cx_dist(hx, config.canvas_w - hx);
  std::uniform_real_distribution<double> cy_dist(hy, config.canvas_h - hy);
  for (int attempt = 0; attempt < config.max_attempts_per_object; ++attempt) {
    ellipse.center_x = cx_dist(rng);
    ellipse.center_y = cy_dist(rng);
    const auto pixels = footprint(ellipse, config.canvas_h, config.canvas_w);
    const bool collides =
        std::any_of(pixels.begin(), pixels.end(), [&](std::size_t i) { return occupied.data[i] != 0; });
    if (collides) continue;
    for (std::size_t i : pixels) occupied.data[i] = 1;
    return true;
  }
  return false;
}

}  // namespace

MaskSpec place_nonoverlapping(Rng& rng, const MaskSynthConfig& config) {
  config.validate();
  MaskSpec spec;
  spec.canvas_h = config.canvas_h;
  spec.canvas_w = config.canvas_w;

  std::uniform_int_distribution<int> count_dist(config.min_objects(), config.n_max);
  const int target = count_dist(rng);
  Grid<std::uint8_t> occupied(config.canvas_h, config.canvas_w, 0);

  for (int k = 0; k < target; ++k) {
    bool placed = false;
    for (int g = 0; g <= config.max_geometry_resamples && !placed; ++g) {
      EllipseSpec ellipse = sample_ellipse(rng, config);
      if (try_place(rng, ellipse, config, occupied)) {
        spec.ellipses.push_back(ellipse);
        placed = true;
      }
    }
    if (!placed) break;
  }

  if (static_cast<int>(spec.ellipses.size()) < config.min_objects()) {
    throw PlacementExhausted("placed only " + std::to_string(spec.ellipses.size()) + " of at least " +
                             std::to_string(config.min_objects()) + " objects on a " +
                             std::to_string(config.canvas_h) + "x" + std::to_string(config.canvas_w) + " canvas");
  }
  return spec;
}

MaskSpec generate_mask(std::uint64_t seed, const MaskSynthConfig& config) {
  Rng rng(seed);
  MaskSpec spec = place_nonoverlapping(rng, config);
  spec.seed = seed;
  return spec;
}

ImageTensor rasterize_mask(const MaskSpec& spec) {
  ImageTensor out(spec.canvas_h, spec.canvas_w, -1.0f);
  for (const auto& e : spec.ellipses) {
    for (std::size_t i : footprint(e, spec.canvas_h, spec.canvas_w)) out.data[i] = 1.0f;
  }
  return out;
}

LabelMap rasterize_labels(const MaskSpec& spec) {
  LabelMap out(spec.canvas_h, spec.canvas_w, 0);
  for (std::size_t k = 0; k < spec.ellipses.size(); ++k) {
    for (std::size_t i : footprint(spec.ellipses[k], spec.canvas_h, spec.canvas_w)) {
      out.data[i] = static_cast<std::int32_t>(k + 1);
    }
  }
  return out;
}

ImageTensor rasterize_instance_mask(const MaskSpec& spec, int edge_width) {
  if (edge_width < 1) throw ConfigError("edge_width must be >= 1");
  ImageTensor out(spec.canvas_h, spec.canvas_w, -1.0f);
  for (const auto& e : spec.ellipses) {
    EllipseSpec inner = e;
    inner.major_a = e.major_a - edge_width;
    inner.minor_b = e.minor_b - edge_width;
    const bool has_interior = inner.major_a > 0.0 && inner.minor_b > 0.0;
    for (std::size_t i : footprint(e, spec.canvas_h, spec.canvas_w)) {
      const int y = static_cast<int>(i / static_cast<std::size_t>(spec.canvas_w));
      const int x = static_cast<int>(i % static_cast<std::size_t>(spec.canvas_w));
      out.data[i] = has_interior && inner.contains(x + 0.5, y + 0.5) ? 1.0f : 0.0f;
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const EllipseSpec& e) {
  j = nlohmann::json{{"center_x", e.center_x},
                     {"center_y", e.center_y},
                     {"major_a", e.major_a},
                     {"minor_b", e.minor_b},
                     {"theta", e.theta}};
}

void from_json(const nlohmann::json& j, EllipseSpec& e) {
  j.at("center_x").get_to(e.center_x);
  j.at("center_y").get_to(e.center_y);
  j.at("major_a").get_to(e.major_a);
  j.at("minor_b").get_to(e.minor_b);
  j.at("theta").get_to(e.theta);
}

void to_json(nlohmann::json& j, const MaskSpec& spec) {
  j = nlohmann::json{{"canvas_h", spec.canvas_h},
                     {"canvas_w", spec.canvas_w},
                     {"seed", spec.seed},
                     {"ellipses", spec.ellipses}};
}

void from_json(const nlohmann::json& j, MaskSpec& spec) {
  j.at("canvas_h").get_to(spec.canvas_h);
  j.at("canvas_w").get_to(spec.canvas_w);
  j.at("seed").get_to(spec.seed);
  j.at("ellipses").get_to(spec.ellipses);
}

}  // namespace adgan::masksynth
