#include "trajgan/gan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "trajgan/metrics.hpp"

namespace trajgan::gan {

LossKind loss_kind_from_string(const std::string& s) {
    if (s == "adversarial") return LossKind::kAdversarial;
    if (s == "wgan") return LossKind::kWgan;
    if (s == "wgan_lp") return LossKind::kWganLp;
    throw ConfigError("unknown loss kind: " + s);
}

NormKind norm_kind_from_string(const std::string& s) {
    if (s == "batch") return NormKind::kBatch;
    if (s == "group") return NormKind::kGroup;
    if (s == "none") return NormKind::kNone;
    throw ConfigError("unknown norm kind: " + s);
}

namespace {

constexpr double kProbEps = 1e-7;

template <class S>
std::unique_ptr<nn::Layer<S>> make_norm(NormKind kind, int channels) {
    switch (kind) {
        case NormKind::kBatch:
            return std::make_unique<nn::BatchNorm2d<S>>(channels);
        case NormKind::kGroup:
            return std::make_unique<nn::GroupNorm<S>>(channels);
        case NormKind::kNone:
            return nullptr;
    }
    return nullptr;
}

template <class S>
void init_params(nn::Sequential<S>& model, std::uint64_t seed) {
    nn::Rng rng(seed);
    for (auto* p : model.params()) {
        if (p->name.ends_with(".weight")) {
            rng.fill_normal(p->value, 0.02);
        } else if (p->name.ends_with(".gamma")) {
            for (auto& x : p->value.v)
                x = static_cast<S>(1.0 + 0.02 * rng.normal());
        } else {
            p->value.fill(S(0));
        }
    }
}

}  // namespace

template <class S>
nn::Sequential<S> build_generator(const GeneratorConfig& cfg, std::uint64_t seed) {
    if (cfg.noise_dim < 1 || cfg.base_channels < 1)
        throw ArgumentError("build_generator: invalid config");
    const int b4 = 4 * cfg.base_channels, b2 = 2 * cfg.base_channels,
              b1 = cfg.base_channels;
    nn::Sequential<S> g;
    g.add("g_fc", std::make_unique<nn::Linear<S>>(cfg.noise_dim, b4 * 3 * 3));
    g.add("g_reshape", std::make_unique<nn::Reshape<S>>(std::vector<int>{b4, 3, 3}));
    if (auto n = make_norm<S>(cfg.norm, b4)) g.add("g_norm0", std::move(n));
    g.add("g_relu0", std::make_unique<nn::ReLU<S>>());
    g.add("g_deconv1", std::make_unique<nn::ConvTranspose2d<S>>(b4, b2, 4, 2, 1));
    if (auto n = make_norm<S>(cfg.norm, b2)) g.add("g_norm1", std::move(n));
    g.add("g_relu1", std::make_unique<nn::ReLU<S>>());
    g.add("g_deconv2", std::make_unique<nn::ConvTranspose2d<S>>(b2, b1, 4, 2, 1));
    if (auto n = make_norm<S>(cfg.norm, b1)) g.add("g_norm2", std::move(n));
    g.add("g_relu2", std::make_unique<nn::ReLU<S>>());
    g.add("g_deconv3",
          std::make_unique<nn::ConvTranspose2d<S>>(b1, kGridChannels, 4, 2, 1));
    g.add("g_out", std::make_unique<nn::Sigmoid<S>>());
    init_params(g, seed);
    return g;
}

template <class S>
nn::Sequential<S> build_discriminator(const DiscriminatorConfig& cfg,
                                      std::uint64_t seed) {
    if (cfg.base_channels < 1)
        throw ArgumentError("build_discriminator: invalid config");
    const int b1 = cfg.base_channels, b2 = 2 * b1, b4 = 4 * b1;
    nn::Sequential<S> d;
    d.add("d_conv1", std::make_unique<nn::Conv2d<S>>(kGridChannels, b1, 4, 2, 1));
    d.add("d_lrelu1", std::make_unique<nn::LeakyReLU<S>>(0.2));
    d.add("d_conv2", std::make_unique<nn::Conv2d<S>>(b1, b2, 4, 2, 1));
    if (auto n = make_norm<S>(cfg.norm, b2)) d.add("d_norm2", std::move(n));
    d.add("d_lrelu2", std::make_unique<nn::LeakyReLU<S>>(0.2));
    d.add("d_conv3", std::make_unique<nn::Conv2d<S>>(b2, b4, 4, 2, 1));
    if (auto n = make_norm<S>(cfg.norm, b4)) d.add("d_norm3", std::move(n));
    d.add("d_lrelu3", std::make_unique<nn::LeakyReLU<S>>(0.2));
    d.add("d_conv4", std::make_unique<nn::Conv2d<S>>(b4, 1, 3, 1, 0));
    d.add("d_flat", std::make_unique<nn::Reshape<S>>(std::vector<int>{1}));
    if (cfg.sigmoid_head)
        d.add("d_out", std::make_unique<nn::Sigmoid<S>>());
    init_params(d, seed);
    return d;
}

namespace {

double bce(double p, double target) {
    p = std::clamp(p, kProbEps, 1.0 - kProbEps);
    return -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
}

double bce_dp(double p, double target) {
    p = std::clamp(p, kProbEps, 1.0 - kProbEps);
    return -target / p + (1.0 - target) / (1.0 - p);
}

}  // namespace

std::pair<double, double> adversarial_loss(const std::vector<double>& d_real,
                                           const std::vector<double>& d_fake,
                                           double smooth_real,
                                           double smooth_fake) {
    if (d_real.empty() || d_fake.empty())
        throw ArgumentError("adversarial_loss: empty discriminator outputs");
    double lr = 0.0, lf = 0.0, lg = 0.0;
    for (double p : d_real) lr += bce(p, smooth_real);
    for (double p : d_fake) {
        lf += bce(p, smooth_fake);
        lg += bce(p, smooth_real);  // non-saturating generator objective
    }
    const double loss_d = (lr / d_real.size() + lf / d_fake.size()) / 2.0;
    return {loss_d, lg / d_fake.size()};
}

std::pair<double, double> wgan_loss(const std::vector<double>& d_real,
                                    const std::vector<double>& d_fake) {
    if (d_real.empty() || d_fake.empty())
        throw ArgumentError("wgan_loss: empty critic outputs");
    double mr = 0.0, mf = 0.0;
    for (double x : d_real) mr += x;
    for (double x : d_fake) mf += x;
    mr /= d_real.size();
    mf /= d_fake.size();
    return {mf - mr, -mf};
}

template <class S>
double wgan_lp_penalty(nn::Sequential<S>& critic, const nn::Tensor<S>& real,
                       const nn::Tensor<S>& fake, double lambda, nn::Rng& rng,
                       bool accumulate_grads) {
    if (real.shape != fake.shape)
        throw ShapeError("wgan_lp_penalty: real/fake shape mismatch");
    if (!critic.supports_penalty())
        throw TrainingError(
            "wgan_lp_penalty: critic contains layers without a penalty pass "
            "(use a norm-free critic)");
    const int b = real.dim(0);
    const std::size_t slab = real.numel() / static_cast<std::size_t>(b);

    nn::Tensor<S> xhat(real.shape);
    for (int s = 0; s < b; ++s) {
        const S eps = static_cast<S>(rng.uniform());
        const S* rp = real.data() + s * slab;
        const S* fp = fake.data() + s * slab;
        S* xp = xhat.data() + s * slab;
        for (std::size_t i = 0; i < slab; ++i)
            xp[i] = eps * rp[i] + (S(1) - eps) * fp[i];
    }

    critic.forward(xhat, true);
    nn::Tensor<S> ones({b, 1});
    ones.fill(S(1));
    nn::Tensor<S> grad = critic.input_gradient(ones);

    double value = 0.0;
    std::vector<double> norms(b);
    for (int s = 0; s < b; ++s) {
        double sq = 0.0;
        const S* gp = grad.data() + s * slab;
        for (std::size_t i = 0; i < slab; ++i)
            sq += static_cast<double>(gp[i]) * static_cast<double>(gp[i]);
        norms[s] = std::sqrt(sq);
        const double excess = std::max(0.0, norms[s] - 1.0);
        value += excess * excess;
    }
    value = lambda * value / b;

    if (accumulate_grads) {
        nn::Tensor<S> rho(grad.shape);
        for (int s = 0; s < b; ++s) {
            const double n = norms[s];
            const double coef = n > 1.0 ? lambda * 2.0 * (n - 1.0) / n : 0.0;
            const S* gp = grad.data() + s * slab;
            S* rp = rho.data() + s * slab;
            for (std::size_t i = 0; i < slab; ++i)
                rp[i] = static_cast<S>(coef) * gp[i];
        }
        critic.penalty_accumulate(rho);
    }
    return value;
}

template <class S>
void encode_to_batch(const Trajectory& t, const NormalizationSpec& spec,
                     int max_len, nn::Tensor<S>& batch, int batch_index,
                     bool apply_mask) {
    const TrajGrid g = encode(t, spec, max_len);
    const UpscaledGrid u = upsample(g);
    const int side = u.side;
    check_shape(batch,
                {batch.dim(0), kGridChannels, side, side},
                "encode_to_batch");
    S* base = batch.data() +
              static_cast<std::size_t>(batch_index) * kGridChannels * side * side;
    for (int ch = 0; ch < kGridChannels; ++ch)
        for (int r = 0; r < side; ++r)
            for (int c = 0; c < side; ++c) {
                const std::uint8_t m =
                    apply_mask ? g.mask[static_cast<std::size_t>(r / 2) * g.side +
                                        (c / 2)]
                               : 1;
                base[(static_cast<std::size_t>(ch) * side + r) * side + c] =
                    m ? static_cast<S>(u.at(r, c, ch)) : S(0);
            }
}

namespace {

// [C,H,W] slab of a batch tensor -> (row, col, channel) grid block.
UpscaledGrid slab_to_grid(const float* base, int side) {
    UpscaledGrid u;
    u.side = side;
    u.values.assign(static_cast<std::size_t>(side) * side * kGridChannels, 0.0);
    for (int ch = 0; ch < kGridChannels; ++ch)
        for (int r = 0; r < side; ++r)
            for (int c = 0; c < side; ++c)
                u.at(r, c, ch) =
                    base[(static_cast<std::size_t>(ch) * side + r) * side + c];
    return u;
}

std::vector<float> flatten_grads(nn::Sequential<float>& model) {
    std::vector<float> out;
    for (auto* p : model.params())
        out.insert(out.end(), p->grad.v.begin(), p->grad.v.end());
    return out;
}

void set_grads_from_flat(nn::Sequential<float>& model,
                         const std::vector<float>& flat) {
    std::size_t off = 0;
    for (auto* p : model.params()) {
        std::copy(flat.begin() + off, flat.begin() + off + p->grad.v.size(),
                  p->grad.v.begin());
        off += p->grad.v.size();
    }
}

}  // namespace

std::string LogRecord::to_json() const {
    char buf[360];
    std::string extra;
    if (swd >= 0.0) {
        char t[64];
        std::snprintf(t, sizeof(t), ",\"swd\":%.9g", swd);
        extra += t;
    }
    if (epsilon >= 0.0) {
        char t[64];
        std::snprintf(t, sizeof(t), ",\"epsilon\":%.9g", epsilon);
        extra += t;
    }
    std::snprintf(buf, sizeof(buf),
                  "{\"step\":%ld,\"loss_d\":%.9g,\"loss_g\":%.9g,"
                  "\"lr_d\":%.9g,\"lr_g\":%.9g%s}",
                  step, loss_d, loss_g, lr_d, lr_g, extra.c_str());
    return buf;
}

TrainResult train(const TrainConfig& cfg, const Dataset& dataset,
                  const NormalizationSpec& spec, const dp::DpConfig* dp_cfg) {
    if (dataset.trajectories.empty())
        throw ArgumentError("train: dataset is empty");
    if (2 * grid_side(cfg.max_len) != 24)
        throw ConfigError("train: network geometry requires a 12x12 grid "
                          "(max_len in 122..144)");
    const bool dp_on = dp_cfg != nullptr && dp_cfg->enabled;
    const bool dp_gen = dp_on && dp_cfg->target == dp::DpTarget::kGenerator;
    const bool wgan = cfg.loss != LossKind::kAdversarial;
    const bool lp = cfg.loss == LossKind::kWganLp;

    int batch = cfg.batch_size;
    if (dp_on) {
        dp_cfg->validate();
        batch = static_cast<int>(
            std::lround(cfg.batch_size * dp_cfg->scale_factor));
        if (static_cast<std::size_t>(batch) > dataset.size())
            throw ConfigError(
                "train: DP-scaled batch exceeds dataset size (q > 1)");
    }
    const std::size_t n_data = dataset.size();

    GeneratorConfig gcfg;
    gcfg.base_channels = cfg.gen_base_channels;
    gcfg.norm = cfg.gen_norm;
    DiscriminatorConfig dcfg;
    dcfg.base_channels = cfg.disc_base_channels;
    dcfg.norm = wgan ? NormKind::kNone : cfg.disc_norm;
    dcfg.sigmoid_head = !wgan;

    TrainResult res;
    res.generator = build_generator<float>(gcfg, cfg.seed + 1);
    res.discriminator = build_discriminator<float>(dcfg, cfg.seed + 2);
    auto& gen = res.generator;
    auto& disc = res.discriminator;

    nn::Adam<float> adam_g(gen.params());
    nn::Adam<float> adam_d(disc.params());
    nn::Rng data_rng(cfg.seed + 3);
    nn::Rng noise_rng(cfg.seed + 4);
    nn::Rng dp_rng(cfg.seed + 5);
    nn::Rng lp_rng(cfg.seed + 6);

    // Encode + upsample + mask every trajectory once up front.
    const int up_side = 2 * grid_side(cfg.max_len);
    const std::size_t slab = static_cast<std::size_t>(kGridChannels) * up_side * up_side;
    std::vector<float> slabs(n_data * slab);
    {
        nn::Tensor<float> one({1, kGridChannels, up_side, up_side});
        for (std::size_t i = 0; i < n_data; ++i) {
            encode_to_batch(dataset.trajectories[i], spec, cfg.max_len, one, 0,
                            true);
            std::copy(one.v.begin(), one.v.end(), slabs.begin() + i * slab);
        }
    }

    // DP setup.
    double sigma = 0.0;
    if (dp_on) {
        res.ledger.q = static_cast<double>(batch) / static_cast<double>(n_data);
        sigma = dp_cfg->noise_multiplier;
        if (sigma <= 0.0 && dp_cfg->calibrate)
            sigma = dp::calibrate_sigma(dp_cfg->epsilon_target, dp_cfg->delta,
                                        res.ledger.q, cfg.steps);
        res.ledger.sigma = sigma;
    }

    std::ofstream log_file;
    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        log_file.open(cfg.out_dir + "/train_log.jsonl");
    }
    auto emit = [&](const LogRecord& rec) {
        res.log.push_back(rec);
        if (log_file) log_file << rec.to_json() << "\n";
    };

    auto make_real_batch = [&](nn::Tensor<float>& x) {
        for (int s = 0; s < batch; ++s) {
            const std::size_t idx =
                static_cast<std::size_t>(data_rng.next_u64() % n_data);
            std::copy(slabs.begin() + idx * slab, slabs.begin() + (idx + 1) * slab,
                      x.v.begin() + static_cast<std::size_t>(s) * slab);
        }
    };
    auto make_noise = [&](nn::Tensor<float>& z) {
        for (auto& v : z.v) v = static_cast<float>(noise_rng.normal());
    };

    MetricConfig snap_cfg;
    snap_cfg.n_projections = cfg.snapshot_projections;
    snap_cfg.seed = cfg.seed + 7;
    const PointSet real_pts = to_point_set(dataset, spec);
    auto snapshot_swd = [&]() {
        Dataset g = generate(gen, cfg.snapshot_trajectories, cfg.seed + 8, spec,
                             gcfg.noise_dim, cfg.max_len);
        const PointSet gen_pts = to_point_set(g, spec);
        nn::Rng srng(snap_cfg.seed);
        PointSet sr = real_pts;
        if (sr.size() > 10000) {
            // deterministic prefix subsample
            std::vector<std::size_t> idx(sr.size());
            for (std::size_t i = 0; i < sr.size(); ++i) idx[i] = i;
            for (std::size_t i = 0; i < 10000; ++i) {
                std::size_t j = i + static_cast<std::size_t>(
                                        srng.next_u64() % (idx.size() - i));
                std::swap(idx[i], idx[j]);
            }
            PointSet tmp(10000);
            for (std::size_t i = 0; i < 10000; ++i) tmp[i] = sr[idx[i]];
            sr = std::move(tmp);
        }
        return sliced_wasserstein(sr, gen_pts, snap_cfg.n_projections,
                                  snap_cfg.seed);
    };

    nn::Tensor<float> x_real({batch, kGridChannels, up_side, up_side});
    nn::Tensor<float> z({batch, gcfg.noise_dim});

    auto d_outputs = [&](const nn::Tensor<float>& out) {
        std::vector<double> v(out.v.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = out.v[i];
        return v;
    };

    // One discriminator/critic update; returns loss_d.
    auto d_update = [&](double lr_d) {
        make_real_batch(x_real);
        make_noise(z);
        nn::Tensor<float> fake = gen.forward(z, true);

        disc.zero_grad();
        double loss_d = 0.0;

        nn::Tensor<float> out_r = disc.forward(x_real, true);
        nn::Tensor<float> up_r(out_r.shape);
        if (wgan) {
            for (std::size_t i = 0; i < up_r.v.size(); ++i) up_r.v[i] = -1.0f;
            for (std::size_t i = 0; i < out_r.v.size(); ++i)
                loss_d -= out_r.v[i] / batch;
        } else {
            for (std::size_t i = 0; i < out_r.v.size(); ++i) {
                loss_d += bce(out_r.v[i], cfg.smooth_real) / (2.0 * batch);
                up_r.v[i] =
                    static_cast<float>(bce_dp(out_r.v[i], cfg.smooth_real));
            }
        }
        disc.backward(up_r, true);

        nn::Tensor<float> out_f = disc.forward(fake, true);
        nn::Tensor<float> up_f(out_f.shape);
        if (wgan) {
            for (std::size_t i = 0; i < up_f.v.size(); ++i) up_f.v[i] = 1.0f;
            for (std::size_t i = 0; i < out_f.v.size(); ++i)
                loss_d += out_f.v[i] / batch;
        } else {
            for (std::size_t i = 0; i < out_f.v.size(); ++i) {
                loss_d += bce(out_f.v[i], cfg.smooth_fake) / (2.0 * batch);
                up_f.v[i] =
                    static_cast<float>(bce_dp(out_f.v[i], cfg.smooth_fake));
            }
        }
        disc.backward(up_f, true);

        if (lp)
            loss_d += wgan_lp_penalty(disc, x_real, fake, cfg.lambda_lp, lp_rng,
                                      true);

        disc.scale_grads(wgan ? 1.0f / batch : 1.0f / (2.0f * batch));
        adam_d.step(lr_d);
        if (!std::isfinite(loss_d))
            throw TrainingError("non-finite discriminator loss at step " +
                                std::to_string(res.steps_done));
        return loss_d;
    };

    // One generator update; returns loss_g.
    auto g_update = [&](double lr_g) {
        make_noise(z);
        nn::Tensor<float> fake = gen.forward(z, true);
        nn::Tensor<float> out = disc.forward(fake, true);
        nn::Tensor<float> up(out.shape);
        double loss_g = 0.0;
        if (wgan) {
            for (std::size_t i = 0; i < up.v.size(); ++i) up.v[i] = -1.0f;
            for (std::size_t i = 0; i < out.v.size(); ++i)
                loss_g -= out.v[i] / batch;
        } else {
            for (std::size_t i = 0; i < out.v.size(); ++i) {
                loss_g += bce(out.v[i], cfg.smooth_real) / batch;
                up.v[i] = static_cast<float>(bce_dp(out.v[i], cfg.smooth_real));
            }
        }
        nn::Tensor<float> dfake = disc.input_gradient(up);

        if (dp_gen) {
            // Per-sample gradients: one noise vector = one sample.
            std::vector<float> agg;
            nn::Tensor<float> zi({1, gcfg.noise_dim});
            nn::Tensor<float> di({1, kGridChannels, up_side, up_side});
            const std::size_t zdim = static_cast<std::size_t>(gcfg.noise_dim);
            for (int s = 0; s < batch; ++s) {
                std::copy(z.v.begin() + s * zdim, z.v.begin() + (s + 1) * zdim,
                          zi.v.begin());
                std::copy(dfake.v.begin() + s * slab,
                          dfake.v.begin() + (s + 1) * slab, di.v.begin());
                gen.forward(zi, true);
                gen.zero_grad();
                gen.backward(di, true);
                std::vector<float> g = flatten_grads(gen);
                dp::clip_to_norm(g, dp_cfg->clip_norm);
                double sq = 0.0;
                for (float x : g) sq += static_cast<double>(x) * x;
                res.max_clipped_norm =
                    std::max(res.max_clipped_norm, std::sqrt(sq));
                if (agg.empty())
                    agg = std::move(g);
                else
                    for (std::size_t i = 0; i < agg.size(); ++i) agg[i] += g[i];
            }
            if (sigma > 0.0) {
                const double std_dev = sigma * dp_cfg->clip_norm;
                for (auto& x : agg)
                    x += static_cast<float>(dp_rng.normal() * std_dev);
            }
            const float inv_b = 1.0f / static_cast<float>(batch);
            for (auto& x : agg) x *= inv_b;
            set_grads_from_flat(gen, agg);
            res.ledger.record_steps(1);
        } else {
            gen.zero_grad();
            gen.backward(dfake, true);
            gen.scale_grads(1.0f / batch);
        }
        adam_g.step(lr_g);
        if (!std::isfinite(loss_g))
            throw TrainingError("non-finite generator loss at step " +
                                std::to_string(res.steps_done));
        return loss_g;
    };

    {
        LogRecord init;
        init.step = 0;
        init.lr_d = cfg.lr;
        init.lr_g = cfg.lr * cfg.generator_factor;
        init.swd = snapshot_swd();
        if (dp_on) init.epsilon = 0.0;
        emit(init);
    }

    const int critic_iters = wgan ? cfg.n_critic : 1;
    for (long step = 0; step < cfg.steps; ++step) {
        const double lr_d =
            nn::scheduled_lr(cfg.lr, step, cfg.milestones, cfg.lr_factor);
        const double lr_g = lr_d * cfg.generator_factor;

        double loss_d = 0.0;
        for (int c = 0; c < critic_iters; ++c) loss_d = d_update(lr_d);
        const double loss_g = g_update(lr_g);
        res.steps_done = step + 1;

        const bool last = step + 1 == cfg.steps;
        const bool snap =
            cfg.snapshot_every > 0 && (step + 1) % cfg.snapshot_every == 0;
        LogRecord rec;
        rec.step = step + 1;
        rec.loss_d = loss_d;
        rec.loss_g = loss_g;
        rec.lr_d = lr_d;
        rec.lr_g = lr_g;
        if (snap || last) rec.swd = snapshot_swd();
        if (dp_on) rec.epsilon = dp::account(res.ledger, dp_cfg->delta);
        emit(rec);
    }

    if (dp_on) res.final_epsilon = dp::account(res.ledger, dp_cfg->delta);
    if (!cfg.out_dir.empty()) {
        nn::save_checkpoint(gen, cfg.out_dir + "/generator.ckpt");
        nn::save_checkpoint(disc, cfg.out_dir + "/discriminator.ckpt");
    }
    return res;
}

Dataset generate(nn::Sequential<float>& generator, int n_trajectories,
                 std::uint64_t seed, const NormalizationSpec& spec,
                 int noise_dim, int max_len) {
    if (n_trajectories < 0)
        throw ArgumentError("generate: n_trajectories must be >= 0");
    Dataset out;
    out.name = "generated";
    out.bbox = BoundingBox{spec.lat.min, spec.lat.max, spec.lon.min, spec.lon.max};
    if (n_trajectories == 0) return out;

    nn::Rng rng(seed);
    const int side = grid_side(max_len);
    const int up_side = 2 * side;
    const int full_len = side * side;
    constexpr int kGenBatch = 64;
    int done = 0;
    while (done < n_trajectories) {
        const int b = std::min(kGenBatch, n_trajectories - done);
        nn::Tensor<float> z({b, noise_dim});
        for (auto& v : z.v) v = static_cast<float>(rng.normal());
        nn::Tensor<float> y = generator.forward(z, false);
        check_shape(y, {b, kGridChannels, up_side, up_side}, "generate");
        const std::size_t slab =
            static_cast<std::size_t>(kGridChannels) * up_side * up_side;
        for (int s = 0; s < b; ++s) {
            UpscaledGrid u = slab_to_grid(y.data() + s * slab, up_side);
            TrajGrid g = downsample(u);
            Trajectory t = decode(g, spec, full_len,
                                  "gen_" + std::to_string(done + s));
            out.trajectories.push_back(std::move(t));
        }
        done += b;
    }
    return out;
}

template nn::Sequential<float> build_generator<float>(const GeneratorConfig&,
                                                      std::uint64_t);
template nn::Sequential<double> build_generator<double>(const GeneratorConfig&,
                                                        std::uint64_t);
template nn::Sequential<float> build_discriminator<float>(
    const DiscriminatorConfig&, std::uint64_t);
template nn::Sequential<double> build_discriminator<double>(
    const DiscriminatorConfig&, std::uint64_t);
template double wgan_lp_penalty<float>(nn::Sequential<float>&,
                                       const nn::Tensor<float>&,
                                       const nn::Tensor<float>&, double,
                                       nn::Rng&, bool);
template double wgan_lp_penalty<double>(nn::Sequential<double>&,
                                        const nn::Tensor<double>&,
                                        const nn::Tensor<double>&, double,
                                        nn::Rng&, bool);
template void encode_to_batch<float>(const Trajectory&, const NormalizationSpec&,
                                     int, nn::Tensor<float>&, int, bool);
template void encode_to_batch<double>(const Trajectory&,
                                      const NormalizationSpec&, int,
                                      nn::Tensor<double>&, int, bool);

}  // namespace trajgan::gan
