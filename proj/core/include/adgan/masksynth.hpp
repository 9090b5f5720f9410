#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "adgan/grid.hpp"
#include "adgan/rng.hpp"

namespace adgan::masksynth {

/// One rotated ellipse. Axes are semi-axes in pixels; theta rotates the major
/// axis counter-clockwise from +x. Pixel (row y, col x) has its center at
/// (x + 0.5, y + 0.5).
struct EllipseSpec {
  double center_x = 0.0;
  double center_y = 0.0;
  double major_a = 1.0;
  double minor_b = 1.0;
  double theta = 0.0;

  bool contains(double x, double y) const;
  /// Normalized elliptical radius; 1 on the boundary.
  double radius_at(double x, double y) const;
  /// Half extents of the axis-aligned bounding box.
  double half_width() const;
  double half_height() const;

  bool operator==(const EllipseSpec&) const = default;
};

struct MaskSpec {
  int canvas_h = 0;
  int canvas_w = 0;
  std::vector<EllipseSpec> ellipses;
  std::uint64_t seed = 0;

  bool operator==(const MaskSpec&) const = default;
};

struct MaskSynthConfig {
  int n_max = 15;
  std::array<double, 2> a_range{20.0, 30.0};
  std::array<double, 2> e_range{0.25, 0.75};
  int canvas_h = 256;
  int canvas_w = 256;
  int max_attempts_per_object = 100;
  int max_geometry_resamples = 10;
  int edge_width = 2;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
  int min_objects() const { return (n_max + 1) / 2; }

  bool operator==(const MaskSynthConfig&) const = default;
};

/// Minor axis from major axis and eccentricity: b = sqrt(1 - e^2) * a.
double minor_axis(double major_a, double eccentricity);

EllipseSpec sample_ellipse(Rng& rng, const MaskSynthConfig& config);

/// Draws the object count uniformly from [ceil(n/2), n] and places ellipses by
/// rejection sampling against the rasterized footprints already placed.
/// Throws PlacementExhausted when fewer than ceil(n/2) objects fit.
MaskSpec place_nonoverlapping(Rng& rng, const MaskSynthConfig& config);

/// Convenience wrapper seeding a fresh generator; the seed is recorded in the spec.
MaskSpec generate_mask(std::uint64_t seed, const MaskSynthConfig& config);

/// Pixel indices (row-major) whose centers fall inside the ellipse, clipped to the canvas.
std::vector<std::size_t> footprint(const EllipseSpec& ellipse, int canvas_h, int canvas_w);

/// Binary mask, foreground = +1, background = -1.
ImageTensor rasterize_mask(const MaskSpec& spec);

/// Per-object labels, ellipse k gets id k + 1.
LabelMap rasterize_labels(const MaskSpec& spec);

/// Ternary mask: interior = +1, edge ring = 0, background = -1. The interior
/// of each object is the same ellipse with both axes shrunk by edge_width.
ImageTensor rasterize_instance_mask(const MaskSpec& spec, int edge_width);

void to_json(nlohmann::json& j, const EllipseSpec& e);
void from_json(const nlohmann::json& j, EllipseSpec& e);
void to_json(nlohmann::json& j, const MaskSpec& spec);
void from_json(const nlohmann::json& j, MaskSpec& spec);

}  // namespace adgan::masksynth
