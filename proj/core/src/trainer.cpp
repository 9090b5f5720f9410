#include "adgan/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "adgan/config.hpp"
#include "adgan/error.hpp"
#include "adgan/image_io.hpp"

namespace fs = std::filesystem;

namespace adgan::trainer {

using nlohmann::json;

void TrainConfig::validate() const {
  if (total_iters < 0 || const_lr_iters < 0 || const_lr_iters > total_iters) {
    throw ConfigError("train: require 0 <= const_lr_iters <= total_iters");
  }
  if (!(lr >= 0.0) || !(weight_decay >= 0.0)) throw ConfigError("train: rates must be non-negative");
  if (!(adam_betas[0] >= 0.0 && adam_betas[0] < 1.0 && adam_betas[1] >= 0.0 && adam_betas[1] < 1.0)) {
    throw ConfigError("train.adam_betas must lie in [0, 1)");
  }
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (crop < 8 || crop % 8 != 0) throw ConfigError("train.crop must be a positive multiple of 8");
  if (checkpoint_interval < 1) throw ConfigError("train.checkpoint_interval must be >= 1");
  weights.validate();
}

double lr_at(const TrainConfig& config, int iteration) {
  if (iteration < 0 || iteration > config.total_iters) {
    throw std::out_of_range("lr_at: iteration " + std::to_string(iteration) + " outside [0, " +
                            std::to_string(config.total_iters) + "]");
  }
  const int decay_span = config.total_iters - config.const_lr_iters;
  if (decay_span == 0) return iteration < config.total_iters ? config.lr : 0.0;
  if (iteration <= config.const_lr_iters) return config.lr;
  const double remaining = static_cast<double>(config.total_iters - iteration) / static_cast<double>(decay_span);
  return config.lr * remaining;
}

ImageTensor flip_horizontal(const ImageTensor& image) {
  ImageTensor out(image.height, image.width);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) out(y, x) = image(y, image.width - 1 - x);
  }
  return out;
}

ImageTensor flip_vertical(const ImageTensor& image) {
  ImageTensor out(image.height, image.width);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) out(y, x) = image(image.height - 1 - y, x);
  }
  return out;
}

ImageTensor rotate90(const ImageTensor& image, int quarter_turns) {
  const int k = ((quarter_turns % 4) + 4) % 4;
  ImageTensor current = image;
  for (int t = 0; t < k; ++t) {
    ImageTensor next(current.width, current.height);
    for (int y = 0; y < next.height; ++y) {
      for (int x = 0; x < next.width; ++x) next(y, x) = current(x, current.width - 1 - y);
    }
    current = std::move(next);
  }
  return current;
}

ImageTensor crop(const ImageTensor& image, int top, int left, int height, int width) {
  if (top < 0 || left < 0 || top + height > image.height || left + width > image.width) {
    throw ShapeError("crop window " + std::to_string(height) + "x" + std::to_string(width) + " at (" +
                     std::to_string(top) + ", " + std::to_string(left) + ") exceeds " + std::to_string(image.height) +
                     "x" + std::to_string(image.width) + " image");
  }
  ImageTensor out(height, width);
  for (int y = 0; y < height; ++y) {
    std::copy_n(&image(top + y, left), width, &out(y, 0));
  }
  return out;
}

AugmentParams sample_augment(Rng& rng, int height, int width, int crop_size) {
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> turns(0, 3);
  AugmentParams p;
  p.flip_horizontal = coin(rng);
  p.flip_vertical = coin(rng);
  p.quarter_turns = turns(rng);
  const bool swapped = p.quarter_turns % 2 == 1;
  const int h = swapped ? width : height;
  const int w = swapped ? height : width;
  if (h < crop_size || w < crop_size) {
    throw ShapeError("image " + std::to_string(height) + "x" + std::to_string(width) + " is smaller than crop " +
                     std::to_string(crop_size));
  }
  p.top = std::uniform_int_distribution<int>(0, h - crop_size)(rng);
  p.left = std::uniform_int_distribution<int>(0, w - crop_size)(rng);
  return p;
}

ImageTensor apply_augment(const ImageTensor& image, const AugmentParams& params, int crop_size) {
  ImageTensor out = image;
  if (params.flip_horizontal) out = flip_horizontal(out);
  if (params.flip_vertical) out = flip_vertical(out);
  out = rotate90(out, params.quarter_turns);
  if (out.height < crop_size || out.width < crop_size) {
    throw ShapeError("image " + std::to_string(image.height) + "x" + std::to_string(image.width) +
                     " is smaller than crop " + std::to_string(crop_size));
  }
  return crop(out, params.top, params.left, crop_size, crop_size);
}

ImageTensor augment(const ImageTensor& image, int crop_size, Rng& rng) {
  return apply_augment(image, sample_augment(rng, image.height, image.width, crop_size), crop_size);
}

torch::Tensor to_batch(const std::vector<ImageTensor>& images, torch::Device device) {
  if (images.empty()) throw ShapeError("to_batch: no images");
  const int h = images.front().height;
  const int w = images.front().width;
  auto out = torch::empty({static_cast<std::int64_t>(images.size()), 1, h, w}, torch::kFloat32);
  auto* dst = out.data_ptr<float>();
  for (const auto& img : images) {
    if (img.height != h || img.width != w) throw ShapeError("to_batch: images differ in size");
    dst = std::copy(img.data.begin(), img.data.end(), dst);
  }
  return out.to(device);
}

ImageTensor from_tensor(const torch::Tensor& t) {
  auto c = t.detach().to(torch::kCPU, torch::kFloat32).contiguous();
  while (c.dim() > 2) {
    if (c.size(0) != 1) throw ShapeError("from_tensor: expected a single image");
    c = c.squeeze(0);
  }
  if (c.dim() != 2) throw ShapeError("from_tensor: expected a 2D image");
  ImageTensor out(static_cast<int>(c.size(0)), static_cast<int>(c.size(1)));
  std::copy_n(c.data_ptr<float>(), out.size(), out.data.begin());
  return out;
}

DomainSampler::DomainSampler(std::vector<ImageTensor> images) : images_(std::move(images)) {
  if (images_.empty()) throw IoError("empty dataset");
  order_.resize(images_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  cursor_ = order_.size();
}

const ImageTensor& DomainSampler::next(Rng& rng) {
  if (cursor_ >= order_.size()) {
    std::shuffle(order_.begin(), order_.end(), rng);
    cursor_ = 0;
  }
  return images_[order_[cursor_++]];
}

json DomainSampler::state() const { return json{{"order", order_}, {"cursor", cursor_}}; }

void DomainSampler::restore(const json& state) {
  auto order = state.at("order").get<std::vector<std::size_t>>();
  if (order.size() != images_.size()) throw IoError("sampler state does not match dataset size");
  order_ = std::move(order);
  cursor_ = state.at("cursor").get<std::size_t>();
}

namespace {

std::vector<torch::Tensor> generator_parameters(model::Generator& g) { return g->parameters(); }

double grad_norm(const std::vector<torch::Tensor>& params) {
  double sq = 0.0;
  for (const auto& p : params) {
    if (p.grad().defined()) sq += p.grad().pow(2).sum().item<double>();
  }
  return std::sqrt(sq);
}

bool finite(const torch::Tensor& t) { return std::isfinite(t.item<double>()); }

torch::optim::AdamWOptions adam_options(const TrainConfig& c) {
  return torch::optim::AdamWOptions(c.lr)
      .betas({c.adam_betas[0], c.adam_betas[1]})
      .weight_decay(c.weight_decay);
}

}  // namespace

Trainer::Trainer(const model::GeneratorConfig& generator_config, const TrainConfig& config, torch::Device device)
    : generator_config_(generator_config), config_(config), device_(device) {
  config_.validate();
  torch::manual_seed(config_.seed);
  generator_ = model::Generator(generator_config_, config_.flags.adain_in_encoder);
  discriminator_ = model::Discriminator(generator_config_);
  generator_->to(device_);
  discriminator_->to(device_);
  opt_g_ = std::make_unique<torch::optim::AdamW>(generator_->parameters(), adam_options(config_));
  opt_d_ = std::make_unique<torch::optim::AdamW>(discriminator_->parameters(), adam_options(config_));
  translator_ = std::make_unique<losses::GeneratorTranslator>(generator_);
  critic_ = std::make_unique<losses::DiscriminatorCritic>(discriminator_);
}

void Trainer::set_lr(double lr) {
  for (auto* opt : {opt_g_.get(), opt_d_.get()}) {
    for (auto& group : opt->param_groups()) static_cast<torch::optim::AdamWOptions&>(group.options()).lr(lr);
  }
}

StepReport Trainer::train_step(const torch::Tensor& x1, const torch::Tensor& x2) {
  if (iteration_ >= config_.total_iters) throw std::out_of_range("train_step: training already finished");
  StepReport r;
  r.iteration = iteration_;
  r.lr = lr_at(config_, iteration_);
  set_lr(r.lr);
  const auto a = x1.to(device_);
  const auto b = x2.to(device_);

  auto dump = [&](const std::string& what) {
    std::ostringstream msg;
    msg << "non-finite " << what << " at iteration " << r.iteration << ": L_rec=" << r.rec << " L_adv_d=" << r.adv_d
        << " L_adv_g=" << r.adv_g << " L_ctr=" << r.ctr << " L_cyc=" << r.cyc << " total=" << r.total
        << " |grad_G|=" << r.grad_norm_g << " |grad_D|=" << r.grad_norm_d;
    return NumericError(msg.str());
  };

  // Discriminator update on detached generator outputs.
  opt_d_->zero_grad(true);
  const auto loss_d =
      losses::discriminator_loss(*translator_, *critic_, a, b, config_.flags, config_.adversarial);
  loss_d.backward();
  r.adv_d = loss_d.item<double>();
  r.grad_norm_d = grad_norm(discriminator_->parameters());
  if (!finite(loss_d)) throw dump("discriminator loss");
  opt_d_->step();

  // Generator update; the discriminator only relays gradients.
  opt_g_->zero_grad(true);
  losses::LossBreakdown parts;
  {
    model::FrozenParameters frozen_d(discriminator_->parameters());
    parts = losses::total_generator_loss(*translator_, *critic_, a, b, config_.weights, config_.flags,
                                         config_.adversarial);
    parts.total.backward();
  }
  r.rec = parts.rec.item<double>();
  r.adv_g = parts.adv_g.item<double>();
  r.ctr = parts.ctr.item<double>();
  r.cyc = parts.cyc.item<double>();
  r.total = parts.total.item<double>();
  r.grad_norm_g = grad_norm(generator_parameters(generator_));
  if (!finite(parts.total)) throw dump("generator loss");
  opt_g_->step();

  ++iteration_;
  return r;
}

void Trainer::save(const fs::path& path, const json& extra) const {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  torch::serialize::OutputArchive archive;
  torch::serialize::OutputArchive g, d, og, od;
  generator_->save(g);
  discriminator_->save(d);
  opt_g_->save(og);
  opt_d_->save(od);
  archive.write("generator", g);
  archive.write("discriminator", d);
  archive.write("opt_g", og);
  archive.write("opt_d", od);
  archive.write("iteration", c10::IValue(static_cast<std::int64_t>(iteration_)));
  archive.write("generator_config", c10::IValue(config::to_json(generator_config_).dump()));
  archive.write("train_config", c10::IValue(config::to_json(config_).dump()));
  archive.write("extra", c10::IValue(extra.dump()));
  archive.save_to(path.string());
}

namespace {

std::string read_string(torch::serialize::InputArchive& in, const std::string& key) {
  c10::IValue v;
  in.read(key, v);
  return v.toStringRef();
}

torch::serialize::InputArchive open_archive(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("checkpoint not found: " + path.string());
  torch::serialize::InputArchive in;
  try {
    in.load_from(path.string());
  } catch (const c10::Error& e) {
    throw IoError("cannot read checkpoint " + path.string() + ": " + e.what_without_backtrace());
  }
  return in;
}

}  // namespace

Trainer Trainer::load(const fs::path& path, torch::Device device, json* extra) {
  auto in = open_archive(path);
  const auto gcfg = config::generator_from_json(json::parse(read_string(in, "generator_config")));
  const auto tcfg = config::train_from_json(json::parse(read_string(in, "train_config")));
  Trainer t(gcfg, tcfg, device);
  torch::serialize::InputArchive g, d, og, od;
  in.read("generator", g);
  in.read("discriminator", d);
  in.read("opt_g", og);
  in.read("opt_d", od);
  t.generator_->load(g);
  t.discriminator_->load(d);
  t.opt_g_->load(og);
  t.opt_d_->load(od);
  c10::IValue it;
  in.read("iteration", it);
  t.iteration_ = static_cast<int>(it.toInt());
  if (extra != nullptr) *extra = json::parse(read_string(in, "extra"));
  return t;
}

CheckpointInfo describe_checkpoint(const fs::path& path) {
  auto in = open_archive(path);
  CheckpointInfo info;
  c10::IValue it;
  in.read("iteration", it);
  info.iteration = static_cast<int>(it.toInt());
  info.generator_config = json::parse(read_string(in, "generator_config"));
  info.train_config = json::parse(read_string(in, "train_config"));
  const auto gcfg = config::generator_from_json(info.generator_config);
  const auto tcfg = config::train_from_json(info.train_config);
  model::Generator g(gcfg, tcfg.flags.adain_in_encoder);
  model::Discriminator d(gcfg);
  torch::serialize::InputArchive ga, da;
  in.read("generator", ga);
  in.read("discriminator", da);
  g->load(ga);
  d->load(da);
  for (const auto& [prefix, module] :
       std::vector<std::pair<std::string, torch::nn::Module*>>{{"generator.", g.get()}, {"discriminator.", d.get()}}) {
    for (const auto& p : module->named_parameters()) {
      info.parameter_shapes.emplace_back(prefix + p.key(), p.value().sizes().vec());
    }
  }
  return info;
}

std::string log_header() { return "iteration,L_rec,L_adv_d,L_adv_g,L_ctr,L_cyc,total,lr"; }

std::string log_row(const StepReport& r) {
  std::ostringstream os;
  os << std::setprecision(10) << r.iteration << ',' << r.rec << ',' << r.adv_d << ',' << r.adv_g << ',' << r.ctr << ','
     << r.cyc << ',' << r.total << ',' << r.lr;
  return os.str();
}

namespace {

std::vector<ImageTensor> load_directory(const fs::path& dir) {
  std::vector<ImageTensor> images;
  for (const auto& file : io::list_images(dir)) images.push_back(io::load_image(file));
  if (images.empty()) throw IoError("empty dataset: no images in " + dir.string());
  return images;
}

std::string checkpoint_name(int iteration) {
  std::ostringstream os;
  os << "checkpoint_" << std::setw(6) << std::setfill('0') << iteration << ".pt";
  return os.str();
}

std::string rng_state(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void restore_rng(Rng& rng, const std::string& s) {
  std::istringstream is(s);
  is >> rng;
  if (!is) throw IoError("corrupt RNG state in checkpoint");
}

}  // namespace

FitResult fit(const FitOptions& options, const model::GeneratorConfig& generator_config, const TrainConfig& config,
              torch::Device device) {
  DomainSampler images(load_directory(options.images_dir));
  DomainSampler masks(load_directory(options.masks_dir));
  Rng rng(derive_seed(config.seed, 0x747261696eULL, 0));

  json extra;
  Trainer trainer = options.resume_from ? Trainer::load(*options.resume_from, device, &extra)
                                        : Trainer(generator_config, config, device);
  if (options.resume_from) {
    restore_rng(rng, extra.at("rng").get<std::string>());
    images.restore(extra.at("images"));
    masks.restore(extra.at("masks"));
  }
  const TrainConfig& cfg = trainer.config();

  fs::create_directories(options.out_dir);
  FitResult result;
  result.log_path = options.out_dir / "train_log.csv";
  const bool fresh_log = !fs::exists(result.log_path) || !options.resume_from;
  std::ofstream log(result.log_path, fresh_log ? std::ios::trunc : std::ios::app);
  if (!log) throw IoError("cannot write " + result.log_path.string());
  if (fresh_log) log << log_header() << '\n';

  auto snapshot = [&](const fs::path& path) {
    trainer.save(path, json{{"rng", rng_state(rng)}, {"images", images.state()}, {"masks", masks.state()}});
  };

  std::vector<ImageTensor> batch1(static_cast<std::size_t>(cfg.batch_size));
  std::vector<ImageTensor> batch2(static_cast<std::size_t>(cfg.batch_size));
  while (trainer.iteration() < cfg.total_iters) {
    for (auto& img : batch1) img = augment(images.next(rng), cfg.crop, rng);
    for (auto& img : batch2) img = augment(masks.next(rng), cfg.crop, rng);
    const auto report = trainer.train_step(to_batch(batch1), to_batch(batch2));
    log << log_row(report) << '\n' << std::flush;
    result.reports.push_back(report);
    if (options.on_step) options.on_step(report);

    const int it = trainer.iteration();
    if (it == cfg.total_iters) {
      result.final_checkpoint = options.out_dir / "final.pt";
      snapshot(result.final_checkpoint);
    } else if (it % cfg.checkpoint_interval == 0) {
      snapshot(options.out_dir / checkpoint_name(it));
    }
  }
  if (result.final_checkpoint.empty()) {
    result.final_checkpoint = options.out_dir / "final.pt";
    snapshot(result.final_checkpoint);
  }
  return result;
}

}  // namespace adgan::trainer
