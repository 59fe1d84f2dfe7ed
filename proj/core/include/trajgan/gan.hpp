#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajgan/codec.hpp"
#include "trajgan/data.hpp"
#include "trajgan/dp.hpp"
#include "trajgan/layers.hpp"
#include "trajgan/optim.hpp"

namespace trajgan::gan {

enum class LossKind { kAdversarial, kWgan, kWganLp };
enum class NormKind { kBatch, kGroup, kNone };

LossKind loss_kind_from_string(const std::string& s);
NormKind norm_kind_from_string(const std::string& s);

struct GeneratorConfig {
    int noise_dim = 100;
    int base_channels = 64;  // ladder 4*base -> 2*base -> base -> 4 channels
    NormKind norm = NormKind::kBatch;
};

struct DiscriminatorConfig {
    int base_channels = 64;  // ladder 4 -> base -> 2*base -> 4*base -> 1
    NormKind norm = NormKind::kBatch;
    bool sigmoid_head = true;  // false for WGAN critics
};

// Noise [B, noise_dim] -> [B, 4, 24, 24] in (0,1). Conv weights drawn from
// N(0, 0.02) under seed.
template <class S>
nn::Sequential<S> build_generator(const GeneratorConfig& cfg, std::uint64_t seed);

// [B, 4, 24, 24] -> [B, 1].
template <class S>
nn::Sequential<S> build_discriminator(const DiscriminatorConfig& cfg,
                                      std::uint64_t seed);

// Binary cross-entropy adversarial losses with label smoothing. Discriminator
// targets are smooth_real for real and smooth_fake for fake samples; the
// generator loss is the non-saturating -log D(G(z)) form (BCE against the
// real target).
std::pair<double, double> adversarial_loss(const std::vector<double>& d_real,
                                           const std::vector<double>& d_fake,
                                           double smooth_real = 0.9,
                                           double smooth_fake = 0.1);

// loss_d = mean(d_fake) - mean(d_real), loss_g = -mean(d_fake).
std::pair<double, double> wgan_loss(const std::vector<double>& d_real,
                                    const std::vector<double>& d_fake);

// One-sided Lipschitz penalty lambda * E[max(0, ||grad_x D(x_hat)|| - 1)^2]
// on per-sample interpolates between real and fake. When accumulate_grads is
// set, the penalty's parameter gradients (unnormalized by batch size, like
// the trainer's convention) are added to the critic's grads; the critic must
// be a piecewise-linear stack (conv/leaky_relu/linear, no norm layers).
template <class S>
double wgan_lp_penalty(nn::Sequential<S>& critic, const nn::Tensor<S>& real,
                       const nn::Tensor<S>& fake, double lambda, nn::Rng& rng,
                       bool accumulate_grads);

struct TrainConfig {
    int batch_size = 64;
    long steps = 10000;
    double lr = 2e-4;
    double generator_factor = 1.0;  // TTUR: lr_g = lr * generator_factor
    std::vector<long> milestones = {4000};
    double lr_factor = 0.1;
    double smooth_real = 0.9, smooth_fake = 0.1;
    LossKind loss = LossKind::kAdversarial;
    int n_critic = 5;  // critic iterations per generator step (WGAN variants)
    double lambda_lp = 10.0;
    int gen_base_channels = 64;
    int disc_base_channels = 64;
    NormKind gen_norm = NormKind::kBatch;
    NormKind disc_norm = NormKind::kBatch;  // forced off for WGAN critics
    std::uint64_t seed = 42;
    long snapshot_every = 1000;
    int snapshot_trajectories = 70;  // generated sample size for metric snapshots
    int snapshot_projections = 50;
    int max_len = kMaxTrajectoryLength;
    std::string out_dir;  // when set: training log (JSONL) and checkpoints
};

struct LogRecord {
    long step = 0;
    double loss_d = 0.0, loss_g = 0.0;
    double lr_d = 0.0, lr_g = 0.0;
    double swd = -1.0;      // metric snapshot; -1 when not computed
    double epsilon = -1.0;  // DP budget spent so far; -1 when DP off
    std::string to_json() const;
};

struct TrainResult {
    nn::Sequential<float> generator;
    nn::Sequential<float> discriminator;
    std::vector<LogRecord> log;
    dp::PrivacyLedger ledger;
    double final_epsilon = -1.0;
    double max_clipped_norm = 0.0;  // DP audit: largest post-clip sample norm
    long steps_done = 0;
};

TrainResult train(const TrainConfig& cfg, const Dataset& dataset,
                  const NormalizationSpec& spec,
                  const dp::DpConfig* dp_cfg = nullptr);

// n samples of noise -> generator (eval mode) -> downsample -> full-length
// decode. Deterministic under seed.
Dataset generate(nn::Sequential<float>& generator, int n_trajectories,
                 std::uint64_t seed, const NormalizationSpec& spec,
                 int noise_dim = 100, int max_len = kMaxTrajectoryLength);

// Encode + upsample + mask a trajectory into a [4, 24, 24] slab appended to
// a batch tensor. Exposed for tests.
template <class S>
void encode_to_batch(const Trajectory& t, const NormalizationSpec& spec,
                     int max_len, nn::Tensor<S>& batch, int batch_index,
                     bool apply_mask = true);

extern template nn::Sequential<float> build_generator<float>(
    const GeneratorConfig&, std::uint64_t);
extern template nn::Sequential<double> build_generator<double>(
    const GeneratorConfig&, std::uint64_t);
extern template nn::Sequential<float> build_discriminator<float>(
    const DiscriminatorConfig&, std::uint64_t);
extern template nn::Sequential<double> build_discriminator<double>(
    const DiscriminatorConfig&, std::uint64_t);
extern template double wgan_lp_penalty<float>(nn::Sequential<float>&,
                                              const nn::Tensor<float>&,
                                              const nn::Tensor<float>&, double,
                                              nn::Rng&, bool);
extern template double wgan_lp_penalty<double>(nn::Sequential<double>&,
                                               const nn::Tensor<double>&,
                                               const nn::Tensor<double>&, double,
                                               nn::Rng&, bool);
extern template void encode_to_batch<float>(const Trajectory&,
                                            const NormalizationSpec&, int,
                                            nn::Tensor<float>&, int, bool);
extern template void encode_to_batch<double>(const Trajectory&,
                                             const NormalizationSpec&, int,
                                             nn::Tensor<double>&, int, bool);

}  // namespace trajgan::gan
