#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "trajgan/errors.hpp"
#include "trajgan/tensor.hpp"

namespace trajgan::dp {

enum class DpTarget { kGenerator, kDiscriminator };

struct DpConfig {
    bool enabled = false;
    double epsilon_target = 10.0;
    double delta = 1e-5;           // callers usually set 1 / n^1.1
    double clip_norm = 0.1;        // C
    double noise_multiplier = 0.0; // sigma; 0 with calibrate=true -> search
    bool calibrate = true;
    double scale_factor = 10.0;    // F: batch and epochs scaled up together
    DpTarget target = DpTarget::kGenerator;

    void validate() const {
        if (epsilon_target <= 0.0) throw ConfigError("dp: epsilon must be > 0");
        if (delta <= 0.0 || delta >= 1.0)
            throw ConfigError("dp: delta must be in (0,1)");
        if (clip_norm <= 0.0 && std::isfinite(clip_norm))
            throw ConfigError("dp: clip norm must be > 0");
    }
};

// delta = 1 / n^1.1 for a dataset of n samples.
inline double recommended_delta(std::size_t n) {
    return 1.0 / std::pow(static_cast<double>(n), 1.1);
}

// g <- g * min(1, C / ||g||_2), in place. C may be +inf (no clipping).
template <class S>
void clip_to_norm(std::vector<S>& g, double clip_norm) {
    double sq = 0.0;
    for (S x : g) {
        if (!std::isfinite(static_cast<double>(x)))
            throw TrainingError("non-finite per-sample gradient");
        sq += static_cast<double>(x) * static_cast<double>(x);
    }
    double norm = std::sqrt(sq);
    // A single scaling pass can land a rounding error above the bound in
    // working precision; rescale until the recomputed norm respects it.
    while (norm > clip_norm) {
        S scale = static_cast<S>(clip_norm / norm);
        if (scale >= S(1)) scale = std::nextafter(S(1), S(0));
        sq = 0.0;
        for (S& x : g) {
            x *= scale;
            sq += static_cast<double>(x) * static_cast<double>(x);
        }
        norm = std::sqrt(sq);
    }
}

template <class S>
void clip_per_sample(std::vector<std::vector<S>>& grads, double clip_norm) {
    for (auto& g : grads) clip_to_norm(g, clip_norm);
}

// (sum_i g_i + N(0, sigma^2 C^2 I)) / batch, deterministic under the rng
// stream. With sigma == 0 the noise draw is skipped entirely.
template <class S>
std::vector<S> noisy_aggregate(const std::vector<std::vector<S>>& clipped,
                               double sigma, double clip_norm, nn::Rng& rng) {
    if (clipped.empty())
        throw ArgumentError("noisy_aggregate: empty gradient list");
    const std::size_t dim = clipped.front().size();
    std::vector<S> acc(dim, S(0));
    for (const auto& g : clipped) {
        if (g.size() != dim)
            throw ArgumentError("noisy_aggregate: inconsistent gradient sizes");
        for (std::size_t i = 0; i < dim; ++i) acc[i] += g[i];
    }
    if (sigma > 0.0) {
        const double std_dev = sigma * clip_norm;
        for (std::size_t i = 0; i < dim; ++i)
            acc[i] += static_cast<S>(rng.normal() * std_dev);
    }
    const S inv_b = S(1) / static_cast<S>(clipped.size());
    for (auto& x : acc) x *= inv_b;
    return acc;
}

// Renyi orders used for accounting: {1.25, 1.5, ..., 64} plus the integers
// up to 256.
std::vector<double> default_alpha_grid();

// RDP of the subsampled Gaussian mechanism at order alpha. q = 1 reduces to
// the plain Gaussian bound alpha / (2 sigma^2).
double rdp_subsampled_gaussian(double q, double sigma, double alpha);

struct PrivacyLedger {
    double q = 0.0;
    double sigma = 0.0;
    long steps = 0;
    std::vector<double> alphas = default_alpha_grid();

    void record_steps(long n) { steps += n; }
};

// epsilon at delta: min over the alpha grid of steps*RDP(alpha) +
// log(1/delta)/(alpha-1). Returns +inf when no order gives a finite bound.
double account(const PrivacyLedger& ledger, double delta);

// Smallest sigma on a fixed grid in [0.3, 100] whose epsilon at the given
// delta does not exceed the target. Throws ConfigError when infeasible.
double calibrate_sigma(double epsilon_target, double delta, double q, long steps);

}  // namespace trajgan::dp
