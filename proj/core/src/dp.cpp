#include "trajgan/dp.hpp"

#include <algorithm>
#include <cmath>

namespace trajgan::dp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

double log_sub(double a, double b) {
    // requires a >= b
    if (b == -kInf) return a;
    if (a == b) return -kInf;
    return a + std::log1p(-std::exp(b - a));
}

double log_erfc(double x) {
    if (x < 20.0) return std::log(std::erfc(x));
    // Asymptotic expansion; erfc underflows long before this matters.
    const double x2 = x * x;
    return -x2 - std::log(x) - 0.5 * std::log(M_PI) +
           std::log1p(-0.5 / x2 + 0.75 / (x2 * x2));
}

// Integer-order subsampled Gaussian: log of the binomial moment sum.
double log_a_int(double q, double sigma, long alpha) {
    double log_a = -kInf;
    const double logq = std::log(q), log1mq = std::log1p(-q);
    for (long i = 0; i <= alpha; ++i) {
        const double log_coef = std::lgamma(alpha + 1.0) -
                                std::lgamma(i + 1.0) -
                                std::lgamma(alpha - i + 1.0);
        const double s = log_coef + i * logq + (alpha - i) * log1mq +
                         (static_cast<double>(i) * i - i) / (2.0 * sigma * sigma);
        log_a = log_add(log_a, s);
    }
    return log_a;
}

// Fractional-order variant (series over the generalized binomial expansion).
double log_a_frac(double q, double sigma, double alpha) {
    double log_a0 = -kInf, log_a1 = -kInf;
    const double logq = std::log(q), log1mq = std::log1p(-q);
    const double z0 = sigma * sigma * std::log(1.0 / q - 1.0) + 0.5;
    const double sq2s = std::sqrt(2.0) * sigma;

    double log_coef_mag = 0.0;  // |binom(alpha, 0)| = 1
    int sign = 1;
    for (int i = 0;; ++i) {
        if (i > 0) {
            const double factor = (alpha - (i - 1)) / i;
            if (factor == 0.0) break;
            log_coef_mag += std::log(std::abs(factor));
            if (factor < 0.0) sign = -sign;
        }
        const double j = alpha - i;
        const double log_t0 = log_coef_mag + i * logq + j * log1mq;
        const double log_t1 = log_coef_mag + j * logq + i * log1mq;
        const double log_e0 = std::log(0.5) + log_erfc((i - z0) / sq2s);
        const double log_e1 = std::log(0.5) + log_erfc((z0 - j) / sq2s);
        const double log_s0 =
            log_t0 + (static_cast<double>(i) * i - i) / (2.0 * sigma * sigma) + log_e0;
        const double log_s1 = log_t1 + (j * j - j) / (2.0 * sigma * sigma) + log_e1;
        if (sign > 0) {
            log_a0 = log_add(log_a0, log_s0);
            log_a1 = log_add(log_a1, log_s1);
        } else {
            log_a0 = log_sub(log_a0, log_s0);
            log_a1 = log_sub(log_a1, log_s1);
        }
        if (i > 0 && std::max(log_s0, log_s1) < -30.0) break;
        if (i > 10000) break;
    }
    return log_add(log_a0, log_a1);
}

}  // namespace

std::vector<double> default_alpha_grid() {
    std::vector<double> grid;
    for (double a = 1.25; a <= 64.0 + 1e-12; a += 0.25) grid.push_back(a);
    for (int a = 65; a <= 256; ++a) grid.push_back(a);
    return grid;
}

double rdp_subsampled_gaussian(double q, double sigma, double alpha) {
    if (q <= 0.0 || q > 1.0) throw ArgumentError("rdp: q must be in (0,1]");
    if (sigma <= 0.0) return kInf;
    if (alpha <= 1.0) throw ArgumentError("rdp: alpha must be > 1");
    if (q == 1.0) return alpha / (2.0 * sigma * sigma);

    const double rounded = std::nearbyint(alpha);
    double log_a;
    if (std::abs(alpha - rounded) < 1e-9)
        log_a = log_a_int(q, sigma, static_cast<long>(rounded));
    else
        log_a = log_a_frac(q, sigma, alpha);
    return log_a / (alpha - 1.0);
}

double account(const PrivacyLedger& ledger, double delta) {
    if (delta <= 0.0 || delta >= 1.0)
        throw ArgumentError("account: delta must be in (0,1)");
    if (ledger.steps == 0) return 0.0;
    if (ledger.sigma <= 0.0) return kInf;

    double best = kInf;
    for (double alpha : ledger.alphas) {
        const double rdp = rdp_subsampled_gaussian(ledger.q, ledger.sigma, alpha);
        if (!std::isfinite(rdp)) continue;
        const double eps =
            rdp * ledger.steps + std::log(1.0 / delta) / (alpha - 1.0);
        best = std::min(best, eps);
    }
    return best;
}

double calibrate_sigma(double epsilon_target, double delta, double q,
                       long steps) {
    if (epsilon_target <= 0.0)
        throw ConfigError("calibrate_sigma: epsilon target must be > 0");

    constexpr double kSigmaMin = 0.3, kSigmaMax = 100.0, kSigmaStep = 0.01;
    const long n_grid =
        static_cast<long>(std::floor((kSigmaMax - kSigmaMin) / kSigmaStep)) + 1;

    auto eps_at = [&](long idx) {
        PrivacyLedger ledger;
        ledger.q = q;
        ledger.sigma = kSigmaMin + kSigmaStep * idx;
        ledger.steps = steps;
        return account(ledger, delta);
    };

    if (eps_at(n_grid - 1) > epsilon_target)
        throw ConfigError("calibrate_sigma: target epsilon infeasible within "
                          "sigma <= 100");
    if (eps_at(0) <= epsilon_target) return kSigmaMin;

    // epsilon is non-increasing in sigma; binary search for the first grid
    // index meeting the target.
    long lo = 0, hi = n_grid - 1;  // eps(lo) > target, eps(hi) <= target
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        (eps_at(mid) <= epsilon_target ? hi : lo) = mid;
    }
    return kSigmaMin + kSigmaStep * hi;
}

}  // namespace trajgan::dp
