#include "adgan/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <opencv2/imgproc.hpp>

#include "adgan/error.hpp"
#include "adgan/image_io.hpp"
#include "adgan/rng.hpp"

namespace fs = std::filesystem;

namespace adgan::phantom {

namespace {

constexpr std::uint64_t kMaskStream = 1;
constexpr std::uint64_t kRenderStream = 2;
constexpr std::uint64_t kUnpairedStream = 3;

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

std::string indexed(const char* stem, int k, const char* ext) {
  std::ostringstream os;
  os << stem << std::setw(4) << std::setfill('0') << k << ext;
  return os.str();
}

}  // namespace

void PhantomParams::validate() const {
  const auto [lo, hi] = peak_intensity_range;
  if (!(lo > 0.0 && hi <= 1.0 && lo <= hi)) throw ConfigError("phantom.peak_intensity_range must satisfy 0 < lo <= hi <= 1");
  if (!finite_non_negative(radial_falloff)) throw ConfigError("phantom.radial_falloff must be >= 0");
  if (!finite_non_negative(blur_sigma)) throw ConfigError("phantom.blur_sigma must be >= 0");
  if (!finite_non_negative(noise_sigma)) throw ConfigError("phantom.noise_sigma must be >= 0");
  if (!(finite_non_negative(background_level) && background_level < 0.3)) {
    throw ConfigError("phantom.background_level must lie in [0, 0.3)");
  }
}

PhantomSample render_phantom(const masksynth::MaskSpec& spec, const PhantomParams& params, std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  std::uniform_real_distribution<double> peak_dist(params.peak_intensity_range[0], params.peak_intensity_range[1]);

  cv::Mat canvas(spec.canvas_h, spec.canvas_w, CV_64F, cv::Scalar(0.0));
  for (const auto& e : spec.ellipses) {
    const double peak = peak_dist(rng);
    for (const auto idx : masksynth::footprint(e, spec.canvas_h, spec.canvas_w)) {
      const int y = static_cast<int>(idx / static_cast<std::size_t>(spec.canvas_w));
      const int x = static_cast<int>(idx % static_cast<std::size_t>(spec.canvas_w));
      const double r = std::min(1.0, e.radius_at(x + 0.5, y + 0.5));
      canvas.at<double>(y, x) = peak * std::pow(1.0 - r, params.radial_falloff);
    }
  }
  if (params.blur_sigma > 0.0) {
    cv::GaussianBlur(canvas, canvas, cv::Size(0, 0), params.blur_sigma, params.blur_sigma, cv::BORDER_REFLECT);
  }

  PhantomSample out;
  out.gt_mask = masksynth::rasterize_mask(spec);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> values(static_cast<std::size_t>(spec.canvas_h) * static_cast<std::size_t>(spec.canvas_w));
  for (int y = 0; y < spec.canvas_h; ++y) {
    for (int x = 0; x < spec.canvas_w; ++x) {
      double v = canvas.at<double>(y, x);
      if (out.gt_mask(y, x) < 0.0f) v += params.background_level;
      if (params.noise_sigma > 0.0) v += params.noise_sigma * noise(rng);
      values[out.gt_mask.index(y, x)] = v;
    }
  }

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  out.image = ImageTensor(spec.canvas_h, spec.canvas_w, -1.0f);
  if (range > 0.0) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double v = 2.0 * (values[i] - lo) / range - 1.0;
      out.image.data[i] = static_cast<float>(std::clamp(v, -1.0, 1.0));
    }
  }
  return out;
}

nlohmann::json make_dataset(int n_images, const masksynth::MaskSynthConfig& mask_config, const PhantomParams& params,
                            std::uint64_t seed, const fs::path& out_dir, MaskKind unpaired_kind) {
  if (n_images < 1) throw ConfigError("make_dataset: n_images must be >= 1");
  mask_config.validate();
  params.validate();
  for (const char* sub : {"images", "gt_masks", "gt_labels", "unpaired_masks"}) fs::create_directories(out_dir / sub);

  nlohmann::json manifest;
  manifest["seed"] = seed;
  manifest["n_images"] = n_images;
  manifest["unpaired_kind"] = unpaired_kind == MaskKind::kInstance ? "instance" : "binary";
  auto& items = manifest["items"] = nlohmann::json::array();

  for (int k = 0; k < n_images; ++k) {
    const std::uint64_t mask_seed = derive_seed(seed, kMaskStream, static_cast<std::uint64_t>(k));
    const std::uint64_t render_seed = derive_seed(seed, kRenderStream, static_cast<std::uint64_t>(k));
    const std::uint64_t unpaired_seed = derive_seed(seed, kUnpairedStream, static_cast<std::uint64_t>(k));

    const auto spec = masksynth::generate_mask(mask_seed, mask_config);
    const auto sample = render_phantom(spec, params, render_seed);
    const auto image_name = indexed("images/img_", k, ".png");
    const auto gt_name = indexed("gt_masks/gt_", k, ".png");
    const auto label_name = indexed("gt_labels/gt_", k, ".png");
    io::save_image(sample.image, out_dir / image_name, 16);
    io::save_image(sample.gt_mask, out_dir / gt_name, 8);
    io::save_label_map(masksynth::rasterize_labels(spec), out_dir / label_name);

    const auto unpaired = masksynth::generate_mask(unpaired_seed, mask_config);
    const auto unpaired_name = indexed("unpaired_masks/mask_", k, ".png");
    const auto unpaired_image = unpaired_kind == MaskKind::kInstance
                                    ? masksynth::rasterize_instance_mask(unpaired, mask_config.edge_width)
                                    : masksynth::rasterize_mask(unpaired);
    io::save_image(unpaired_image, out_dir / unpaired_name, 8);

    items.push_back({{"index", k},
                     {"image", image_name},
                     {"gt_mask", gt_name},
                     {"gt_labels", label_name},
                     {"unpaired_mask", unpaired_name},
                     {"mask_seed", mask_seed},
                     {"render_seed", render_seed},
                     {"unpaired_seed", unpaired_seed},
                     {"n_objects", spec.ellipses.size()},
                     {"n_unpaired_objects", unpaired.ellipses.size()}});
  }

  std::ofstream out(out_dir / "manifest.json");
  if (!out) throw IoError("cannot write " + (out_dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
  return manifest;
}

}  // namespace adgan::phantom
