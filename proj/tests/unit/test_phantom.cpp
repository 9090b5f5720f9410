#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adgan/error.hpp"
#include "adgan/image_io.hpp"
#include "adgan/metrics.hpp"
#include "adgan/phantom.hpp"
#include "support/oracles.hpp"

using namespace adgan;
using namespace adgan::phantom;

namespace {

masksynth::MaskSynthConfig small_masks() {
  masksynth::MaskSynthConfig c;
  c.canvas_h = c.canvas_w = 64;
  c.a_range = {5.0, 8.0};
  c.n_max = 6;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(RenderPhantom, DegenerateRendererReproducesMask) {
  PhantomParams p;
  p.peak_intensity_range = {0.8, 0.8};
  p.radial_falloff = 0.0;
  p.blur_sigma = 0.0;
  p.noise_sigma = 0.0;
  p.background_level = 0.0;
  const auto spec = masksynth::generate_mask(1, small_masks());
  const auto s = render_phantom(spec, p, 9);
  EXPECT_EQ(s.gt_mask, masksynth::rasterize_mask(spec));
  EXPECT_EQ(s.image, s.gt_mask);
}

TEST(RenderPhantom, DeterministicForSeed) {
  const auto spec = masksynth::generate_mask(2, small_masks());
  const auto a = render_phantom(spec, PhantomParams{}, 5);
  const auto b = render_phantom(spec, PhantomParams{}, 5);
  EXPECT_EQ(a.image, b.image);
  EXPECT_NE(a.image, render_phantom(spec, PhantomParams{}, 6).image);
}

TEST(RenderPhantom, ObjectBrighterThanBackground) {
  masksynth::MaskSpec spec{64, 64, {{32.0, 32.0, 12.0, 12.0, 0.0}}, 0};
  const auto s = render_phantom(spec, PhantomParams{}, 3);
  double in = 0, out = 0;
  int n_in = 0, n_out = 0;
  for (std::size_t i = 0; i < s.image.size(); ++i) {
    if (s.gt_mask.data[i] > 0) {
      in += s.image.data[i];
      ++n_in;
    } else {
      out += s.image.data[i];
      ++n_out;
    }
  }
  EXPECT_GT(in / n_in, out / n_out);
}

TEST(RenderPhantom, OutputSpansUnitRange) {
  const auto s = render_phantom(masksynth::generate_mask(4, small_masks()), PhantomParams{}, 4);
  const auto [lo, hi] = std::minmax_element(s.image.data.begin(), s.image.data.end());
  EXPECT_EQ(*lo, -1.0f);
  EXPECT_EQ(*hi, 1.0f);
}

TEST(PhantomParams, Validation) {
  PhantomParams p;
  p.peak_intensity_range = {0.9, 0.5};
  EXPECT_THROW(p.validate(), ConfigError);
  p = PhantomParams{};
  p.background_level = 0.3;
  EXPECT_THROW(p.validate(), ConfigError);
  p = PhantomParams{};
  p.noise_sigma = -1.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(MakeDataset, SingleImageLayout) {
  oracle::TempDir dir("ds1");
  const auto manifest = make_dataset(1, small_masks(), PhantomParams{}, 1, dir.path());
  for (const char* sub : {"images", "gt_masks", "gt_labels", "unpaired_masks"}) {
    EXPECT_EQ(io::list_images(dir / sub).size(), 1u) << sub;
  }
  EXPECT_EQ(manifest.at("items").size(), 1u);
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
  const auto image = io::load_image(dir / "images/img_0000.png");
  EXPECT_EQ(image.height, 64);
}

TEST(MakeDataset, StableAcrossRuns) {
  oracle::TempDir a("dsa");
  oracle::TempDir b("dsb");
  make_dataset(5, small_masks(), PhantomParams{}, 77, a.path());
  make_dataset(5, small_masks(), PhantomParams{}, 77, b.path());
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
  EXPECT_EQ(slurp(a / "images/img_0003.png"), slurp(b / "images/img_0003.png"));
}

TEST(MakeDataset, UnpairedCountsFollowConfig) {
  oracle::TempDir dir("dsc");
  const auto cfg = small_masks();
  make_dataset(60, cfg, PhantomParams{}, 8, dir.path());
  std::set<int> counts;
  for (const auto& f : io::list_images(dir / "unpaired_masks")) {
    const int n = metrics::count_objects(io::load_objects(f));
    // Touching ellipses can merge into one component; the sidecar count is exact.
    EXPECT_LE(n, cfg.n_max);
  }
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  for (const auto& item : manifest.at("items")) counts.insert(item.at("n_unpaired_objects").get<int>());
  EXPECT_GE(*counts.begin(), cfg.min_objects());
  EXPECT_LE(*counts.rbegin(), cfg.n_max);
  EXPECT_EQ(counts.size(), static_cast<std::size_t>(cfg.n_max - cfg.min_objects() + 1));
}

TEST(MakeDataset, UnpairedMasksAreNotTheGroundTruth) {
  oracle::TempDir dir("dsd");
  make_dataset(3, small_masks(), PhantomParams{}, 2, dir.path());
  for (int k = 0; k < 3; ++k) {
    const auto name = "000" + std::to_string(k) + ".png";
    EXPECT_NE(slurp(dir / ("gt_masks/gt_" + name)), slurp(dir / ("unpaired_masks/mask_" + name)));
  }
}

TEST(MakeDataset, RejectsZeroImages) {
  oracle::TempDir dir("dse");
  EXPECT_THROW(make_dataset(0, small_masks(), PhantomParams{}, 0, dir.path()), ConfigError);
}
