#pragma once

#include <torch/torch.h>

#include "adgan/model.hpp"

namespace adgan::losses {

struct LossWeights {
  double lambda_rec = 20.0;
  double lambda_cyc = 20.0;
  double lambda_ctr = 1.0;

  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

/// Ablation switches. With aligned_training off the decoder also learns from
/// the cross-domain terms and the discriminator sees raw images as real.
struct AblationFlags {
  bool use_rec = true;
  bool use_ctr = true;
  bool use_cyc = true;
  bool adain_in_encoder = true;
  bool aligned_training = true;

  bool operator==(const AblationFlags&) const = default;
};

enum class AdversarialMode { kBce, kLeastSquares };

constexpr double kLogEpsilon = 1e-7;

enum class DecoderMode { kTrainable, kFrozen };

/// Encoder/decoder pair seen by the losses. The frozen decoder mode must
/// propagate gradients to its inputs while leaving decoder weights untouched.
class Translator {
 public:
  virtual ~Translator() = default;
  virtual torch::Tensor encode(const torch::Tensor& x, const torch::Tensor& labels) = 0;
  virtual torch::Tensor decode(const torch::Tensor& content, const torch::Tensor& labels, DecoderMode mode) = 0;
};

/// Patch discriminator; branches is an int64 [N] tensor of domain indices.
class Critic {
 public:
  virtual ~Critic() = default;
  virtual torch::Tensor logits(const torch::Tensor& x, const torch::Tensor& branches) = 0;
};

class GeneratorTranslator final : public Translator {
 public:
  explicit GeneratorTranslator(model::Generator generator) : generator_(std::move(generator)) {}
  torch::Tensor encode(const torch::Tensor& x, const torch::Tensor& labels) override;
  torch::Tensor decode(const torch::Tensor& content, const torch::Tensor& labels, DecoderMode mode) override;

 private:
  model::Generator generator_;
};

class DiscriminatorCritic final : public Critic {
 public:
  explicit DiscriminatorCritic(model::Discriminator discriminator) : discriminator_(std::move(discriminator)) {}
  torch::Tensor logits(const torch::Tensor& x, const torch::Tensor& branches) override;

 private:
  model::Discriminator discriminator_;
};

/// Mean absolute difference.
torch::Tensor l1(const torch::Tensor& a, const torch::Tensor& b);

/// Loss for logits that should be judged real: -log(sigmoid + eps) for BCE,
/// (logit - 1)^2 for least squares. Mean over all patches.
torch::Tensor adversarial_real(const torch::Tensor& logits, AdversarialMode mode = AdversarialMode::kBce);
/// Loss for logits that should be judged fake: -log(1 - sigmoid + eps) for
/// BCE, logit^2 for least squares.
torch::Tensor adversarial_fake(const torch::Tensor& logits, AdversarialMode mode = AdversarialMode::kBce);

/// [N, 2] labels for a batch from one domain.
torch::Tensor labels_for(model::Domain d, std::int64_t batch, torch::Device device = torch::kCPU);
/// [N] int64 branch indices for a batch from one domain.
torch::Tensor branches_for(model::Domain d, std::int64_t batch, torch::Device device = torch::kCPU);

/// Image reconstruction ||G_dec(G_enc(x, d), d) - x||_1 (trainable decoder).
torch::Tensor loss_rec(Translator& g, const torch::Tensor& x, model::Domain d);

/// Content reconstruction ||G_enc(G_dec*(G_enc(x_i, d_i), d_j), d_j) - G_enc(x_i, d_i)||_1.
torch::Tensor loss_ctr(Translator& g, const torch::Tensor& x_i, model::Domain d_i,
                       DecoderMode mode = DecoderMode::kFrozen);

/// Cycle consistency ||G_dec*(G_enc(G_dec*(G_enc(x_i, d_i), d_j), d_j), d_i) - x_i||_1.
torch::Tensor loss_cyc(Translator& g, const torch::Tensor& x_i, model::Domain d_i,
                       DecoderMode mode = DecoderMode::kFrozen);

/// Discriminator loss on branch d_i: real = G_dec*(G_enc(x_i, d_i), d_i) (or
/// x_i itself when aligned_training is off), fake = G_dec*(G_enc(x_j, d_j), d_i).
/// Generator outputs are computed without gradient.
torch::Tensor loss_adv_d(Translator& g, Critic& critic, const torch::Tensor& x_i, const torch::Tensor& x_j,
                         model::Domain d_i, bool aligned_training = true,
                         AdversarialMode mode = AdversarialMode::kBce);

/// Non-saturating generator loss: branch d_i should score
/// G_dec*(G_enc(x_j, d_j), d_i) as real.
torch::Tensor loss_adv_g(Translator& g, Critic& critic, const torch::Tensor& x_j, model::Domain d_i,
                         DecoderMode mode = DecoderMode::kFrozen, AdversarialMode mode_adv = AdversarialMode::kBce);

struct LossBreakdown {
  torch::Tensor rec;
  torch::Tensor adv_g;
  torch::Tensor ctr;
  torch::Tensor cyc;
  torch::Tensor total;
};

/// L_adv_g + lambda_cyc L_cyc + lambda_rec L_rec + lambda_ctr L_ctr; disabled
/// terms contribute exactly zero.
torch::Tensor weighted_total(const torch::Tensor& adv_g, const torch::Tensor& rec, const torch::Tensor& ctr,
                             const torch::Tensor& cyc, const LossWeights& weights, const AblationFlags& flags);

/// Full generator objective over both translation directions at once: x1 is a
/// batch from the image domain, x2 an equally sized batch from the mask
/// domain. Each term is the mean over both directions.
LossBreakdown total_generator_loss(Translator& g, Critic& critic, const torch::Tensor& x1, const torch::Tensor& x2,
                                   const LossWeights& weights, const AblationFlags& flags,
                                   AdversarialMode mode = AdversarialMode::kBce);

/// Discriminator objective over both branches (mean of the two directions).
torch::Tensor discriminator_loss(Translator& g, Critic& critic, const torch::Tensor& x1, const torch::Tensor& x2,
                                 const AblationFlags& flags, AdversarialMode mode = AdversarialMode::kBce);

}  // namespace adgan::losses
