#include "adgan/losses.hpp"

#include "adgan/error.hpp"

namespace adgan::losses {

using model::Domain;

void LossWeights::validate() const {
  if (!(lambda_rec >= 0.0) || !(lambda_cyc >= 0.0) || !(lambda_ctr >= 0.0)) {
    throw ConfigError("loss weights must be non-negative");
  }
}

torch::Tensor GeneratorTranslator::encode(const torch::Tensor& x, const torch::Tensor& labels) {
  return generator_->encode(x, labels);
}

torch::Tensor GeneratorTranslator::decode(const torch::Tensor& content, const torch::Tensor& labels, DecoderMode mode) {
  if (mode == DecoderMode::kTrainable) return generator_->decode(content, labels);
  model::FrozenParameters frozen(generator_->decoder()->parameters());
  return generator_->decode(content, labels);
}

torch::Tensor DiscriminatorCritic::logits(const torch::Tensor& x, const torch::Tensor& branches) {
  return discriminator_->forward(x, branches);
}

torch::Tensor l1(const torch::Tensor& a, const torch::Tensor& b) { return (a - b).abs().mean(); }

torch::Tensor adversarial_real(const torch::Tensor& logits, AdversarialMode mode) {
  if (mode == AdversarialMode::kLeastSquares) return (logits - 1.0).pow(2).mean();
  return -(torch::sigmoid(logits) + kLogEpsilon).log().mean();
}

torch::Tensor adversarial_fake(const torch::Tensor& logits, AdversarialMode mode) {
  if (mode == AdversarialMode::kLeastSquares) return logits.pow(2).mean();
  return -(1.0 - torch::sigmoid(logits) + kLogEpsilon).log().mean();
}

torch::Tensor labels_for(Domain d, std::int64_t batch, torch::Device device) {
  return model::DomainLabel::of(d).to_tensor(batch, device);
}

torch::Tensor branches_for(Domain d, std::int64_t batch, torch::Device device) {
  return torch::full({batch}, model::index(d), torch::TensorOptions().dtype(torch::kInt64).device(device));
}

torch::Tensor loss_rec(Translator& g, const torch::Tensor& x, Domain d) {
  const auto labels = labels_for(d, x.size(0), x.device());
  return l1(g.decode(g.encode(x, labels), labels, DecoderMode::kTrainable), x);
}

torch::Tensor loss_ctr(Translator& g, const torch::Tensor& x_i, Domain d_i, DecoderMode mode) {
  const auto src = labels_for(d_i, x_i.size(0), x_i.device());
  const auto dst = labels_for(model::other(d_i), x_i.size(0), x_i.device());
  const auto content = g.encode(x_i, src);
  return l1(g.encode(g.decode(content, dst, mode), dst), content);
}

torch::Tensor loss_cyc(Translator& g, const torch::Tensor& x_i, Domain d_i, DecoderMode mode) {
  const auto src = labels_for(d_i, x_i.size(0), x_i.device());
  const auto dst = labels_for(model::other(d_i), x_i.size(0), x_i.device());
  const auto translated = g.decode(g.encode(x_i, src), dst, mode);
  return l1(g.decode(g.encode(translated, dst), src, mode), x_i);
}

torch::Tensor loss_adv_d(Translator& g, Critic& critic, const torch::Tensor& x_i, const torch::Tensor& x_j, Domain d_i,
                         bool aligned_training, AdversarialMode mode) {
  const Domain d_j = model::other(d_i);
  torch::Tensor real;
  torch::Tensor fake;
  {
    torch::NoGradGuard no_grad;
    const auto li = labels_for(d_i, x_i.size(0), x_i.device());
    real = aligned_training ? g.decode(g.encode(x_i, li), li, DecoderMode::kFrozen) : x_i;
    const auto lj = labels_for(d_j, x_j.size(0), x_j.device());
    fake = g.decode(g.encode(x_j, lj), labels_for(d_i, x_j.size(0), x_j.device()), DecoderMode::kFrozen);
  }
  return adversarial_real(critic.logits(real, branches_for(d_i, real.size(0), real.device())), mode) +
         adversarial_fake(critic.logits(fake, branches_for(d_i, fake.size(0), fake.device())), mode);
}

torch::Tensor loss_adv_g(Translator& g, Critic& critic, const torch::Tensor& x_j, Domain d_i, DecoderMode mode,
                         AdversarialMode mode_adv) {
  const Domain d_j = model::other(d_i);
  const auto lj = labels_for(d_j, x_j.size(0), x_j.device());
  const auto fake = g.decode(g.encode(x_j, lj), labels_for(d_i, x_j.size(0), x_j.device()), mode);
  return adversarial_real(critic.logits(fake, branches_for(d_i, fake.size(0), fake.device())), mode_adv);
}

torch::Tensor weighted_total(const torch::Tensor& adv_g, const torch::Tensor& rec, const torch::Tensor& ctr,
                             const torch::Tensor& cyc, const LossWeights& weights, const AblationFlags& flags) {
  auto total = adv_g;
  if (flags.use_cyc) total = total + weights.lambda_cyc * cyc;
  if (flags.use_rec) total = total + weights.lambda_rec * rec;
  if (flags.use_ctr) total = total + weights.lambda_ctr * ctr;
  return total;
}

namespace {

struct StackedBatch {
  torch::Tensor x;             // [2N, ...], image batch then mask batch
  torch::Tensor src;           // [2N, 2]
  torch::Tensor dst;           // [2N, 2]
  torch::Tensor src_branches;  // [2N]
  torch::Tensor dst_branches;  // [2N]
};

StackedBatch stack(const torch::Tensor& x1, const torch::Tensor& x2) {
  if (x1.sizes() != x2.sizes()) throw ShapeError("both domain batches must have the same shape");
  const auto n = x1.size(0);
  const auto dev = x1.device();
  StackedBatch s;
  s.x = torch::cat({x1, x2}, 0);
  s.src = torch::cat({labels_for(Domain::kImage, n, dev), labels_for(Domain::kMask, n, dev)}, 0);
  s.dst = torch::cat({labels_for(Domain::kMask, n, dev), labels_for(Domain::kImage, n, dev)}, 0);
  s.src_branches = torch::cat({branches_for(Domain::kImage, n, dev), branches_for(Domain::kMask, n, dev)}, 0);
  s.dst_branches = torch::cat({branches_for(Domain::kMask, n, dev), branches_for(Domain::kImage, n, dev)}, 0);
  return s;
}

}  // namespace

LossBreakdown total_generator_loss(Translator& g, Critic& critic, const torch::Tensor& x1, const torch::Tensor& x2,
                                   const LossWeights& weights, const AblationFlags& flags, AdversarialMode mode) {
  weights.validate();
  const auto b = stack(x1, x2);
  const auto cross = flags.aligned_training ? DecoderMode::kFrozen : DecoderMode::kTrainable;
  const auto zero = torch::zeros({}, b.x.options());

  LossBreakdown out;
  const auto content = g.encode(b.x, b.src);
  out.rec = flags.use_rec ? l1(g.decode(content, b.src, DecoderMode::kTrainable), b.x) : zero;
  const auto translated = g.decode(content, b.dst, cross);
  out.adv_g = adversarial_real(critic.logits(translated, b.dst_branches), mode);
  out.ctr = zero;
  out.cyc = zero;
  if (flags.use_ctr || flags.use_cyc) {
    const auto recontent = g.encode(translated, b.dst);
    if (flags.use_ctr) out.ctr = l1(recontent, content);
    if (flags.use_cyc) out.cyc = l1(g.decode(recontent, b.src, cross), b.x);
  }
  out.total = weighted_total(out.adv_g, out.rec, out.ctr, out.cyc, weights, flags);
  return out;
}

torch::Tensor discriminator_loss(Translator& g, Critic& critic, const torch::Tensor& x1, const torch::Tensor& x2,
                                 const AblationFlags& flags, AdversarialMode mode) {
  const auto b = stack(x1, x2);
  torch::Tensor real;
  torch::Tensor fake;
  {
    torch::NoGradGuard no_grad;
    const auto content = g.encode(b.x, b.src);
    real = flags.aligned_training ? g.decode(content, b.src, DecoderMode::kFrozen) : b.x;
    fake = g.decode(content, b.dst, DecoderMode::kFrozen);
  }
  const auto n = b.x.size(0);
  const auto logits = critic.logits(torch::cat({real, fake}, 0), torch::cat({b.src_branches, b.dst_branches}, 0));
  return adversarial_real(logits.narrow(0, 0, n), mode) + adversarial_fake(logits.narrow(0, n, n), mode);
}

}  // namespace adgan::losses
