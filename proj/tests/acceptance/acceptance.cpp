// Acceptance suite. Each criterion prints one PASS/FAIL line; the exit code is
// non-zero when any selected criterion fails.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "adgan/config.hpp"
#include "adgan/diagnostics.hpp"
#include "adgan/error.hpp"
#include "adgan/image_io.hpp"
#include "adgan/inference.hpp"
#include "adgan/losses.hpp"
#include "adgan/masksynth.hpp"
#include "adgan/metrics.hpp"
#include "adgan/phantom.hpp"
#include "adgan/postprocess.hpp"
#include "adgan/trainer.hpp"
#include "support/oracles.hpp"

using namespace adgan;
using model::Domain;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

model::GeneratorConfig desk_generator() {
  model::GeneratorConfig c;
  c.scale_preset = model::ScalePreset::kDesk;
  return c;
}

std::vector<std::int64_t> sizes(const torch::Tensor& t) { return t.sizes().vec(); }

// 1 -------------------------------------------------------------------------

Outcome adain_statistics() {
  const auto t0 = Clock::now();
  torch::manual_seed(11);
  const auto x = torch::randn({4, 64, 16, 16}) * 3 + 0.5;
  const auto scale = torch::rand({4, 64}) * 3 - 1.5;
  const auto shift = torch::randn({4, 64});
  const auto y = model::adain(x, scale, shift);
  const auto mean = y.mean({2, 3});
  const auto std = (y - mean.unsqueeze(-1).unsqueeze(-1)).pow(2).mean({2, 3}).sqrt();
  const double mean_err = (mean - shift).abs().max().item<double>();
  const double std_err = (std - scale.abs()).abs().max().item<double>();
  const double dt = seconds_since(t0);
  return {mean_err < 1e-4 && std_err < 1e-4 && dt < 1.0,
          "max mean error " + fmt(mean_err) + ", max std error " + fmt(std_err) + ", " + fmt(dt) + " s"};
}

// 2 -------------------------------------------------------------------------

std::vector<torch::Tensor> snapshot(torch::nn::Module& m) {
  std::vector<torch::Tensor> out;
  for (const auto& p : m.parameters()) out.push_back(p.detach().clone());
  return out;
}

std::pair<std::int64_t, std::int64_t> changed_elements(const std::vector<torch::Tensor>& before,
                                                       torch::nn::Module& m) {
  const auto after = m.parameters();
  std::int64_t changed = 0, total = 0;
  for (std::size_t k = 0; k < before.size(); ++k) {
    changed += before[k].ne(after[k].detach()).sum().item<std::int64_t>();
    total += before[k].numel();
  }
  return {changed, total};
}

Outcome decoder_freezing() {
  const auto t0 = Clock::now();
  torch::manual_seed(5);
  const auto x1 = torch::rand({4, 1, 64, 64}) * 2 - 1;
  const auto x2 = torch::rand({4, 1, 64, 64}) * 2 - 1;
  trainer::TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.crop = 64;

  auto adv_only = cfg;
  adv_only.flags.use_rec = adv_only.flags.use_ctr = adv_only.flags.use_cyc = false;
  trainer::Trainer a(desk_generator(), adv_only);
  const auto before_a = snapshot(*a.generator()->decoder());
  a.train_step(x1, x2);
  const auto [changed_a, total_a] = changed_elements(before_a, *a.generator()->decoder());

  auto rec_only = cfg;
  rec_only.flags.use_ctr = rec_only.flags.use_cyc = false;
  trainer::Trainer b(desk_generator(), rec_only);
  const auto before_b = snapshot(*b.generator()->decoder());
  b.train_step(x1, x2);
  const auto [changed_b, total_b] = changed_elements(before_b, *b.generator()->decoder());

  const double frac = static_cast<double>(changed_b) / static_cast<double>(total_b);
  const double dt = seconds_since(t0);
  return {changed_a == 0 && frac >= 0.99 && dt < 10.0,
          "adversarial step changed " + std::to_string(changed_a) + "/" + std::to_string(total_a) +
              " decoder values, reconstruction step changed " + fmt(100.0 * frac) + "%, " + fmt(dt) + " s"};
}

// 3 -------------------------------------------------------------------------

/// Label-conditioned elementwise maps on 4x4 inputs:
///   encode(x, l) = x * A(l) + B(l),  decode(c, l) = tanh(c * W(l) + V(l)),
/// with each of A, B, W, V a convex mix of two random per-domain fields.
struct FieldStub final : losses::Translator {
  std::array<torch::Tensor, 2> a, b, w, v;

  explicit FieldStub(std::mt19937_64& rng) {
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    auto field = [&] {
      auto t = torch::empty({1, 1, 4, 4});
      auto* p = t.data_ptr<float>();
      for (int i = 0; i < 16; ++i) p[i] = u(rng);
      return t;
    };
    for (int d = 0; d < 2; ++d) {
      a[d] = field();
      b[d] = field();
      w[d] = field();
      v[d] = field();
    }
  }

  static torch::Tensor mix(const std::array<torch::Tensor, 2>& f, const torch::Tensor& labels) {
    const auto l = labels.view({-1, 2, 1, 1});
    return l.select(1, 0).unsqueeze(1) * f[0] + l.select(1, 1).unsqueeze(1) * f[1];
  }
  torch::Tensor encode(const torch::Tensor& x, const torch::Tensor& labels) override {
    return x * mix(a, labels) + mix(b, labels);
  }
  torch::Tensor decode(const torch::Tensor& c, const torch::Tensor& labels, losses::DecoderMode) override {
    return torch::tanh(c * mix(w, labels) + mix(v, labels));
  }

  // Scalar versions for the oracle, one pixel at a time.
  static double at(const torch::Tensor& t, int i) { return static_cast<double>(t.data_ptr<float>()[i]); }
  double enc(double x, int d, int i) const { return x * at(a[d], i) + at(b[d], i); }
  double dec(double c, int d, int i) const { return std::tanh(c * at(w[d], i) + at(v[d], i)); }
};

struct ZeroCritic final : losses::Critic {
  torch::Tensor logits(const torch::Tensor& x, const torch::Tensor&) override {
    return torch::zeros({x.size(0), 1, 2, 2});
  }
};

struct BruteTerms {
  double rec = 0, ctr = 0, cyc = 0;
};

/// Mean over the batch and pixels of each L1 term for source domain d.
BruteTerms brute_terms(const FieldStub& g, const torch::Tensor& x, int d) {
  const int o = 1 - d;
  const auto xc = x.contiguous();
  const auto* px = xc.data_ptr<float>();
  const auto n = x.size(0);
  BruteTerms t;
  for (std::int64_t s = 0; s < n; ++s) {
    for (int i = 0; i < 16; ++i) {
      const double xi = px[s * 16 + i];
      const double c = g.enc(xi, d, i);
      t.rec += std::abs(g.dec(c, d, i) - xi);
      const double translated = g.dec(c, o, i);
      const double c2 = g.enc(translated, o, i);
      t.ctr += std::abs(c2 - c);
      t.cyc += std::abs(g.dec(c2, d, i) - xi);
    }
  }
  const double count = static_cast<double>(n) * 16.0;
  t.rec /= count;
  t.ctr /= count;
  t.cyc /= count;
  return t;
}

Outcome loss_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(21);
  double worst = 0.0;
  bool total_exact = true;
  for (int trial = 0; trial < 20; ++trial) {
    FieldStub g(rng);
    ZeroCritic critic;
    const auto x1 = torch::rand({2, 1, 4, 4}) * 2 - 1;
    const auto x2 = torch::rand({2, 1, 4, 4}) * 2 - 1;
    for (auto [x, d] : {std::pair{x1, Domain::kImage}, std::pair{x2, Domain::kMask}}) {
      const auto brute = brute_terms(g, x, model::index(d));
      worst = std::max(worst, std::abs(losses::loss_rec(g, x, d).item<double>() - brute.rec));
      worst = std::max(worst, std::abs(losses::loss_ctr(g, x, d).item<double>() - brute.ctr));
      worst = std::max(worst, std::abs(losses::loss_cyc(g, x, d).item<double>() - brute.cyc));
    }
    // Both directions together: each term is the mean of the two.
    const auto b1 = brute_terms(g, x1, 0);
    const auto b2 = brute_terms(g, x2, 1);
    const losses::LossWeights weights;
    const auto out = losses::total_generator_loss(g, critic, x1, x2, weights, losses::AblationFlags{});
    worst = std::max(worst, std::abs(out.rec.item<double>() - 0.5 * (b1.rec + b2.rec)));
    worst = std::max(worst, std::abs(out.ctr.item<double>() - 0.5 * (b1.ctr + b2.ctr)));
    worst = std::max(worst, std::abs(out.cyc.item<double>() - 0.5 * (b1.cyc + b2.cyc)));
    const float expected = out.adv_g.item<float>() + 20.0f * out.cyc.item<float>() +
                           20.0f * out.rec.item<float>() + 1.0f * out.ctr.item<float>();
    total_exact = total_exact && out.total.item<float>() == expected;
  }
  const bool weights_ok = losses::LossWeights{}.lambda_ctr == 1.0 && losses::LossWeights{}.lambda_cyc == 20.0 &&
                          losses::LossWeights{}.lambda_rec == 20.0;
  const double dt = seconds_since(t0);
  return {worst <= 1e-6 && total_exact && weights_ok && dt < 1.0,
          "max |loss - oracle| " + fmt(worst) + ", weighted total exact: " + (total_exact ? "yes" : "no") + ", " +
              fmt(dt) + " s"};
}

// 4 -------------------------------------------------------------------------

Outcome shape_contract() {
  const auto t0 = Clock::now();
  torch::NoGradGuard no_grad;
  std::ostringstream detail;
  bool ok = true;
  auto check = [&](const char* name, const model::GeneratorConfig& cfg, int size,
                   std::vector<std::int64_t> content, std::vector<std::int64_t> critic) {
    torch::manual_seed(0);
    model::Generator g(cfg);
    model::Discriminator d(cfg);
    g->eval();
    const auto x = torch::rand({1, 1, size, size}) * 2 - 1;
    const auto labels = model::DomainLabel::of(Domain::kImage).to_tensor(1);
    const auto c = g->encode(x, labels);
    const auto y = g->decode(c, model::DomainLabel::of(Domain::kMask).to_tensor(1));
    const auto logits = d->forward(y, Domain::kMask);
    const bool good = sizes(c) == content && sizes(y) == std::vector<std::int64_t>{1, 1, size, size} &&
                      sizes(logits) == critic;
    ok = ok && good;
    detail << name << " " << size << " -> content " << c.sizes() << ", image " << y.sizes() << ", critic "
           << logits.sizes() << "; ";
  };
  check("full", model::GeneratorConfig{}, 256, {1, 256, 64, 64}, {1, 1, 32, 32});
  check("desk", desk_generator(), 64, {1, 64, 16, 16}, {1, 1, 8, 8});
  const double dt = seconds_since(t0);
  detail << fmt(dt) << " s";
  return {ok && dt < 10.0, detail.str()};
}

// 5 -------------------------------------------------------------------------

Outcome lr_schedule() {
  const trainer::TrainConfig c;
  bool ok = trainer::lr_at(c, 0) == 1e-4 && trainer::lr_at(c, 5000) == 1e-4 && trainer::lr_at(c, 7500) == 5e-5 &&
            trainer::lr_at(c, 10000) == 0.0;
  // Piecewise linear: constant before the knee, straight line after it.
  for (int it = 0; it <= 5000; it += 125) ok = ok && trainer::lr_at(c, it) == 1e-4;
  double worst = 0.0;
  for (int it = 5000; it <= 10000; ++it) {
    worst = std::max(worst, std::abs(trainer::lr_at(c, it) - 1e-4 * (10000 - it) / 5000.0));
  }
  ok = ok && worst < 1e-18;
  return {ok, "lr(0)=" + fmt(trainer::lr_at(c, 0)) + " lr(5000)=" + fmt(trainer::lr_at(c, 5000)) +
                  " lr(7500)=" + fmt(trainer::lr_at(c, 7500)) + " lr(10000)=" + fmt(trainer::lr_at(c, 10000)) +
                  ", max deviation from line " + fmt(worst)};
}

// 6 -------------------------------------------------------------------------

/// Pixels whose centre lies inside more than one ellipse, by brute-force
/// membership over each ellipse's bounding box.
int overlapping_pixels(const masksynth::MaskSpec& spec) {
  std::vector<std::uint8_t> hits(static_cast<std::size_t>(spec.canvas_h) * spec.canvas_w, 0);
  int overlaps = 0;
  for (const auto& e : spec.ellipses) {
    const int y0 = std::max(0, static_cast<int>(std::floor(e.center_y - e.major_a)));
    const int y1 = std::min(spec.canvas_h - 1, static_cast<int>(std::ceil(e.center_y + e.major_a)));
    const int x0 = std::max(0, static_cast<int>(std::floor(e.center_x - e.major_a)));
    const int x1 = std::min(spec.canvas_w - 1, static_cast<int>(std::ceil(e.center_x + e.major_a)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x + 0.5 - e.center_x, dy = y + 0.5 - e.center_y;
        const double u = dx * std::cos(e.theta) + dy * std::sin(e.theta);
        const double v = -dx * std::sin(e.theta) + dy * std::cos(e.theta);
        if ((u / e.major_a) * (u / e.major_a) + (v / e.minor_b) * (v / e.minor_b) > 1.0) continue;
        if (++hits[static_cast<std::size_t>(y) * spec.canvas_w + x] == 2) ++overlaps;
      }
    }
  }
  return overlaps;
}

Outcome mask_synthesis() {
  const auto t0 = Clock::now();
  masksynth::MaskSynthConfig cfg;
  cfg.a_range = {20.0, 30.0};
  cfg.n_max = 15;
  int overlaps = 0, min_n = 1 << 30, max_n = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto spec = masksynth::generate_mask(seed, cfg);
    overlaps += overlapping_pixels(spec);
    min_n = std::min(min_n, static_cast<int>(spec.ellipses.size()));
    max_n = std::max(max_n, static_cast<int>(spec.ellipses.size()));
  }
  Rng rng(derive_seed(6, 0, 0));
  double worst_rel = 0.0;
  for (int k = 0; k < 100; ++k) {
    auto e = masksynth::sample_ellipse(rng, cfg);
    e.center_x = e.center_y = 40.0;
    const masksynth::MaskSpec spec{80, 80, {e}, 0};
    const auto m = inference::binarize(masksynth::rasterize_mask(spec));
    const double expected = e.minor_b / e.major_a;
    worst_rel = std::max(worst_rel, std::abs(oracle::moment_axis_ratio(m) - expected) / expected);
  }
  const double dt = seconds_since(t0);
  return {overlaps == 0 && min_n >= 3 && max_n <= 15 && worst_rel <= 0.05 && dt < 30.0,
          "overlapping pixels " + std::to_string(overlaps) + ", counts in [" + std::to_string(min_n) + ", " +
              std::to_string(max_n) + "], worst axis-ratio error " + fmt(100.0 * worst_rel) + "%, " + fmt(dt) +
              " s"};
}

// 7 -------------------------------------------------------------------------

Outcome metric_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(7);
  int pixel_mismatches = 0;
  for (int k = 0; k < 100; ++k) {
    const auto pred = oracle::random_mask(rng, 16, 16, 0.4);
    const auto gt = oracle::random_mask(rng, 16, 16, 0.4);
    const auto c = oracle::brute_counts(pred, gt);
    const auto r = metrics::pixel_metrics(pred, gt);
    const double dice = c.tp + c.fp + c.fn == 0 ? 1.0 : 2.0 * c.tp / static_cast<double>(2 * c.tp + c.fp + c.fn);
    pixel_mismatches += r.n_tp != c.tp || r.n_fp != c.fp || r.n_fn != c.fn || r.dice != dice;
  }
  int matching_mismatches = 0;
  for (int k = 0; k < 100; ++k) {
    const auto pred = oracle::flood_fill(oracle::random_mask(rng, 10, 10, 0.45));
    const auto gt = oracle::flood_fill(oracle::random_mask(rng, 10, 10, 0.45));
    const int greedy = metrics::object_f1(pred, gt, 0.5).matches;
    matching_mismatches += greedy != oracle::exhaustive_matching(pred, gt, 0.5);
  }
  LabelMap gt(1, 20), pred(1, 20);
  for (int x = 0; x < 10; ++x) gt(0, x) = 1;
  for (int x = 4; x < 14; ++x) pred(0, x) = 1;
  const double seg = metrics::seg_score(pred, gt);
  const double dt = seconds_since(t0);
  return {pixel_mismatches == 0 && matching_mismatches == 0 && std::abs(seg - 0.6 / 1.4) <= 1e-6 && dt < 30.0,
          "pixel mismatches " + std::to_string(pixel_mismatches) + ", matching mismatches " +
              std::to_string(matching_mismatches) + ", SEG fixture " + fmt(seg) + ", " + fmt(dt) + " s"};
}

// 8 -------------------------------------------------------------------------

Outcome op_csb_arithmetic() {
  const double a = metrics::op_csb(0.850, 0.938);
  const double b = metrics::op_csb(0.823, 0.881);
  return {std::abs(a - 0.894) <= 5e-4 && std::abs(b - 0.852) <= 5e-4, "got " + fmt(a) + " and " + fmt(b)};
}

// 9 -------------------------------------------------------------------------

masksynth::MaskSynthConfig small_canvas() {
  masksynth::MaskSynthConfig m;
  m.canvas_h = m.canvas_w = 64;
  m.a_range = {6.0, 10.0};
  m.n_max = 6;
  return m;
}

Outcome autoencoder_overfit() {
  const auto t0 = Clock::now();
  oracle::TempDir dir("accept9");
  phantom::make_dataset(8, small_canvas(), phantom::PhantomParams{}, 9, dir.path());
  std::vector<ImageTensor> images;
  for (const auto& f : io::list_images(dir / "images")) images.push_back(io::load_image(f));
  const auto x = trainer::to_batch(images);

  torch::manual_seed(9);
  model::Generator gen(desk_generator());
  const trainer::TrainConfig defaults;
  torch::optim::AdamW opt(gen->parameters(), torch::optim::AdamWOptions(defaults.lr)
                                                 .betas({defaults.adam_betas[0], defaults.adam_betas[1]})
                                                 .weight_decay(defaults.weight_decay));
  losses::GeneratorTranslator g(gen);
  double last = 0.0;
  for (int it = 0; it < 500; ++it) {
    opt.zero_grad(true);
    const auto loss = losses::loss_rec(g, x, Domain::kImage);
    loss.backward();
    opt.step();
    last = loss.item<double>();
  }
  double final_rec;
  {
    torch::NoGradGuard no_grad;
    final_rec = losses::loss_rec(g, x, Domain::kImage).item<double>();
  }
  const double dt = seconds_since(t0);
  return {final_rec < 0.05 && dt <= 300.0,
          "L_rec after 500 iterations " + fmt(final_rec) + " (last step " + fmt(last) + "), " + fmt(dt) + " s"};
}

// 10 ------------------------------------------------------------------------

Outcome desk_end_to_end() {
  const auto t0 = Clock::now();
  oracle::TempDir dir("accept10");
  auto cfg = config::RunConfig::desk();
  cfg.train.total_iters = 2000;
  cfg.train.const_lr_iters = 1000;
  cfg.train.seed = 1;
  phantom::make_dataset(200, cfg.masksynth, cfg.phantom, 7, dir / "data");

  // Images 0-159 train; 160-199 are held out together with their ground truth,
  // which training never reads.
  const auto images = io::list_images(dir / "data/images");
  std::filesystem::create_directories(dir / "train");
  for (std::size_t k = 0; k < 160; ++k) std::filesystem::copy_file(images[k], dir / "train" / images[k].filename());

  trainer::FitOptions o{dir / "train", dir / "data/unpaired_masks", dir / "run", std::nullopt, nullptr};
  bool finite = true;
  o.on_step = [&](const trainer::StepReport& r) {
    finite = finite && std::isfinite(r.total) && std::isfinite(r.adv_d);
    if (r.iteration % 250 == 0) std::cerr << "  iteration " << r.iteration << " total " << r.total << '\n';
  };
  const auto fit = trainer::fit(o, cfg.generator, cfg.train);
  const double train_s = seconds_since(t0);

  auto session = inference::InferenceSession::from_checkpoint(fit.final_checkpoint);
  double dice_sum = 0.0, delta_sum = 0.0;
  int n = 0;
  for (std::size_t k = 160; k < 200; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.png", k);
    const auto x = io::load_image(images[k]);
    const auto r = session.segment(x);
    const auto gt_mask = io::load_binary_mask(dir / "data/gt_masks" / (std::string("gt_") + name));
    const auto gt_labels = io::load_label_map(dir / "data/gt_labels" / (std::string("gt_") + name));
    dice_sum += metrics::pixel_metrics(r.mask, gt_mask).dice;
    delta_sum += std::abs(diagnostics::lossy_report(r.labels, gt_labels).count_delta);
    ++n;
  }
  const double dice = dice_sum / n;
  const double delta = delta_sum / n;
  const double dt = seconds_since(t0);
  return {finite && dice >= 0.80 && delta <= 1.0 && dt <= 45 * 60.0,
          "test DICE " + fmt(dice) + ", mean |count_delta| " + fmt(delta) + ", losses finite: " +
              (finite ? "yes" : "no") + ", training " + fmt(train_s) + " s, total " + fmt(dt) + " s"};
}

// 11 ------------------------------------------------------------------------

Outcome ablation_smoke() {
  const auto t0 = Clock::now();
  oracle::TempDir dir("accept11");
  phantom::make_dataset(8, small_canvas(), phantom::PhantomParams{}, 11, dir.path());
  std::vector<ImageTensor> images, masks;
  for (const auto& f : io::list_images(dir / "images")) images.push_back(io::load_image(f));
  for (const auto& f : io::list_images(dir / "unpaired_masks")) masks.push_back(io::load_image(f));
  const auto x1 = trainer::to_batch({images.begin(), images.begin() + 4});
  const auto x2 = trainer::to_batch({masks.begin(), masks.begin() + 4});

  struct Variant {
    const char* name;
    std::function<void(losses::AblationFlags&)> apply;
  };
  const std::vector<Variant> variants{
      {"no-rec", [](auto& f) { f.use_rec = false; f.aligned_training = false; }},
      {"no-ctr", [](auto& f) { f.use_ctr = false; f.aligned_training = false; }},
      {"no-cyc", [](auto& f) { f.use_cyc = false; f.aligned_training = false; }},
      {"no-encoder-adain", [](auto& f) { f.adain_in_encoder = false; f.aligned_training = false; }},
      {"no-aligned", [](auto& f) { f.aligned_training = false; }},
      {"full", [](auto&) {}},
  };
  std::ostringstream detail;
  bool ok = true;
  for (const auto& v : variants) {
    trainer::TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.crop = 64;
    cfg.total_iters = cfg.const_lr_iters = 50;
    v.apply(cfg.flags);
    trainer::Trainer t(desk_generator(), cfg);
    bool finite = true;
    try {
      for (int it = 0; it < 50; ++it) {
        const auto r = t.train_step(x1, x2);
        finite = finite && std::isfinite(r.total) && std::isfinite(r.adv_d);
      }
    } catch (const NumericError&) {
      finite = false;
    }
    ok = ok && finite;
    detail << v.name << (finite ? " ok" : " NaN") << "; ";
  }

  // Without aligned training the adversarial term alone reaches the decoder.
  trainer::TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.crop = 64;
  cfg.flags.use_rec = cfg.flags.use_ctr = cfg.flags.use_cyc = false;
  cfg.flags.aligned_training = false;
  trainer::Trainer t(desk_generator(), cfg);
  const auto before = snapshot(*t.generator()->decoder());
  t.train_step(x1, x2);
  const auto [changed, total] = changed_elements(before, *t.generator()->decoder());
  const bool reaches = changed > 0;
  ok = ok && reaches;
  detail << "unaligned adversarial step changed " << changed << "/" << total << " decoder values, "
         << seconds_since(t0) << " s";
  return {ok, detail.str()};
}

// 12 ------------------------------------------------------------------------

Outcome instance_pipeline() {
  // Two ellipses whose boundaries touch at x = 30.
  const masksynth::MaskSpec spec{40, 60, {{20.0, 20.0, 10.0, 8.0, 0.0}, {40.0, 20.0, 10.0, 8.0, 0.0}}, 0};
  const auto binary_objects = metrics::count_objects(
      metrics::connected_components(inference::binarize(masksynth::rasterize_mask(spec))));
  // Pass-through: the ternary mask stands in for a perfect translation.
  const auto ternary = masksynth::rasterize_instance_mask(spec, 2);
  const auto labels = inference::instance_from_ternary(ternary);
  const int n = metrics::count_objects(labels);
  const auto report = metrics::object_f1(labels, masksynth::rasterize_labels(spec), 0.5);
  return {n == 2 && report.f1 == 1.0,
          "binary mask has " + std::to_string(binary_objects) + " component(s), instance pipeline found " +
              std::to_string(n) + " objects, F1 " + fmt(report.f1)};
}

// 13 ------------------------------------------------------------------------

Outcome interpolation_endpoints() {
  torch::manual_seed(13);
  inference::InferenceSession session{model::Generator(desk_generator())};
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  ImageTensor x(64, 64);
  for (auto& v : x.data) v = u(rng);
  const auto frames = session.interpolate_domains(x, 2);
  const auto recon = session.translate(x, Domain::kImage, Domain::kImage);
  const auto translated = session.translate(x, Domain::kImage, Domain::kMask);

  const auto batch = trainer::to_batch({x});
  const auto image = model::DomainLabel::of(Domain::kImage);
  const auto mask = model::DomainLabel::of(Domain::kMask);
  const auto t_recon = session.translate_tensor(batch, image, model::DomainLabel::lerp(image, mask, 0.0));
  const auto t_trans = session.translate_tensor(batch, image, model::DomainLabel::lerp(image, mask, 1.0));
  const bool tensors = torch::equal(t_recon, session.translate_tensor(batch, image, image)) &&
                       torch::equal(t_trans, session.translate_tensor(batch, image, mask));
  const bool ok = frames.size() == 2 && frames[0] == recon && frames[1] == translated && tensors;
  return {ok, std::string("first frame equals reconstruction: ") + (frames[0] == recon ? "yes" : "no") +
                  ", last frame equals translation: " + (frames[1] == translated ? "yes" : "no")};
}

const std::map<int, std::pair<const char*, Outcome (*)()>>& criteria() {
  static const std::map<int, std::pair<const char*, Outcome (*)()>> table{
      {1, {"AdaIN statistics", adain_statistics}},
      {2, {"decoder freezing contract", decoder_freezing}},
      {3, {"loss oracles", loss_oracles}},
      {4, {"shape contract", shape_contract}},
      {5, {"learning-rate schedule", lr_schedule}},
      {6, {"mask synthesis", mask_synthesis}},
      {7, {"metric oracles", metric_oracles}},
      {8, {"op_csb arithmetic", op_csb_arithmetic}},
      {9, {"autoencoder overfit", autoencoder_overfit}},
      {10, {"desk end-to-end", desk_end_to_end}},
      {11, {"ablation smoke", ablation_smoke}},
      {12, {"instance pipeline", instance_pipeline}},
      {13, {"interpolation endpoints", interpolation_endpoints}},
  };
  return table;
}

bool run(int n) {
  const auto& [name, fn] = criteria().at(n);
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << " (" << name << "): " << o.detail << std::endl;
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  torch::set_num_threads(1);
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else if (arg == "--help" || arg == "-h") {
      std::cout << "usage: adgan_acceptance [--criterion N]...\n";
      return 0;
    } else {
      std::cerr << "unknown argument " << arg << '\n';
      return 2;
    }
  }
  if (selected.empty()) {
    for (const auto& [n, entry] : criteria()) selected.push_back(n);
  }
  bool all = true;
  for (int n : selected) {
    if (!criteria().count(n)) {
      std::cerr << "no criterion " << n << '\n';
      return 2;
    }
    all = run(n) && all;
  }
  return all ? 0 : 1;
}
