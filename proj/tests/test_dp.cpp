#include <doctest.h>

#include <cmath>

#include "trajgan/dp.hpp"
#include "trajgan/gan.hpp"

using namespace trajgan;
using namespace trajgan::dp;

namespace {

double vec_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Closed-form Gaussian-mechanism conversion on the same alpha grid.
double gaussian_epsilon(double sigma, long steps, double delta) {
    double best = std::numeric_limits<double>::infinity();
    for (double a : default_alpha_grid())
        best = std::min(best, steps * a / (2.0 * sigma * sigma) +
                                  std::log(1.0 / delta) / (a - 1.0));
    return best;
}

}  // namespace

TEST_SUITE_BEGIN("dp");

TEST_CASE("recommended delta") {
    CHECK(recommended_delta(1000) ==
          doctest::Approx(1.0 / std::pow(1000.0, 1.1)).epsilon(1e-12));
}

TEST_CASE("clip leaves small gradients unchanged") {
    std::vector<double> g = {0.03, 0.04};  // norm 0.05
    std::vector<double> orig = g;
    clip_to_norm(g, 0.1);
    CHECK(g == orig);
}

TEST_CASE("clip scales large gradients to the bound") {
    std::vector<double> g = {0.6, 0.8};  // norm 1.0
    clip_to_norm(g, 0.1);
    CHECK(vec_norm(g) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(g[0] == doctest::Approx(0.06).epsilon(1e-12));
}

TEST_CASE("clip_per_sample bounds every norm") {
    nn::Rng rng(1);
    std::vector<std::vector<double>> grads(16, std::vector<double>(40));
    for (auto& g : grads)
        for (auto& x : g) x = rng.normal();
    clip_per_sample(grads, 0.1);
    for (const auto& g : grads) CHECK(vec_norm(g) <= 0.1 + 1e-9);
}

TEST_CASE("clip rejects non-finite gradients") {
    std::vector<double> g = {1.0, std::nan("")};
    CHECK_THROWS_AS(clip_to_norm(g, 0.1), TrainingError);
}

TEST_CASE("noisy_aggregate with sigma 0 is the exact mean") {
    std::vector<std::vector<double>> grads = {{1.0, 2.0}, {3.0, 6.0}};
    nn::Rng rng(2);
    auto agg = noisy_aggregate(grads, 0.0, 0.1, rng);
    CHECK(agg == std::vector<double>{2.0, 4.0});
}

TEST_CASE("noisy_aggregate noise scale") {
    const int dim = 100000;
    std::vector<std::vector<double>> grads(4, std::vector<double>(dim, 0.0));
    nn::Rng rng(3);
    auto agg = noisy_aggregate(grads, 1.0, 0.1, rng);
    double var = 0.0;
    for (double x : agg) var += x * x;
    const double std_dev = std::sqrt(var / dim);
    CHECK(std::abs(std_dev - 0.1 / 4.0) / (0.1 / 4.0) < 0.02);
}

TEST_CASE("noisy_aggregate deterministic under seed") {
    std::vector<std::vector<double>> grads(3, std::vector<double>(10, 0.5));
    nn::Rng a(4), b(4);
    CHECK(noisy_aggregate(grads, 1.3, 0.1, a) ==
          noisy_aggregate(grads, 1.3, 0.1, b));
}

TEST_CASE("rdp at q=1 is the plain Gaussian bound") {
    for (double a : {1.5, 2.0, 8.0, 32.0})
        CHECK(rdp_subsampled_gaussian(1.0, 2.0, a) ==
              doctest::Approx(a / 8.0).epsilon(1e-12));
}

TEST_CASE("account at q=1 equals the closed-form conversion") {
    PrivacyLedger ledger;
    ledger.q = 1.0;
    ledger.sigma = 2.0;
    ledger.steps = 1;
    CHECK(account(ledger, 1e-5) ==
          doctest::Approx(gaussian_epsilon(2.0, 1, 1e-5)).epsilon(1e-6));
    ledger.steps = 50;
    CHECK(account(ledger, 1e-5) ==
          doctest::Approx(gaussian_epsilon(2.0, 50, 1e-5)).epsilon(1e-6));
}

TEST_CASE("account fixtures and monotonicity") {
    PrivacyLedger ledger;
    ledger.q = 0.02;
    ledger.sigma = 1.1;
    ledger.steps = 0;
    CHECK(account(ledger, 1e-5) == 0.0);
    double prev = 0.0;
    for (long s : {100L, 200L, 400L, 800L}) {
        ledger.steps = s;
        const double eps = account(ledger, 1e-5);
        CHECK(eps >= prev);
        prev = eps;
    }
    // Non-increasing in sigma, non-decreasing in q.
    ledger.steps = 500;
    PrivacyLedger big_sigma = ledger;
    big_sigma.sigma = 2.0;
    CHECK(account(big_sigma, 1e-5) <= account(ledger, 1e-5));
    PrivacyLedger big_q = ledger;
    big_q.q = 0.05;
    CHECK(account(big_q, 1e-5) >= account(ledger, 1e-5));
}

TEST_CASE("account reports infinity for sigma 0") {
    PrivacyLedger ledger;
    ledger.q = 0.1;
    ledger.sigma = 0.0;
    ledger.steps = 10;
    CHECK(std::isinf(account(ledger, 1e-5)));
}

TEST_CASE("fractional and neighbouring integer orders are consistent") {
    // RDP is continuous in alpha; fractional orders should interpolate.
    const double q = 0.01, sigma = 1.5;
    for (double a : {3.0, 10.0, 40.0}) {
        const double mid = rdp_subsampled_gaussian(q, sigma, a + 0.5);
        const double lo = rdp_subsampled_gaussian(q, sigma, a);
        const double hi = rdp_subsampled_gaussian(q, sigma, a + 1.0);
        CHECK(mid >= lo * 0.999);
        CHECK(mid <= hi * 1.001);
    }
}

TEST_CASE("calibrate_sigma self-consistency across a sweep") {
    for (double q : {0.005, 0.02, 0.08})
        for (long steps : {200L, 1000L, 5000L}) {
            const double delta = 1e-5;
            const double sigma = calibrate_sigma(10.0, delta, q, steps);
            PrivacyLedger ledger;
            ledger.q = q;
            ledger.sigma = sigma;
            ledger.steps = steps;
            CHECK(account(ledger, delta) <= 10.0);
        }
}

TEST_CASE("calibrate_sigma grows with steps and hits the grid floor") {
    const double s1 = calibrate_sigma(10.0, 1e-5, 0.02, 500);
    const double s2 = calibrate_sigma(10.0, 1e-5, 0.02, 5000);
    CHECK(s2 >= s1);
    CHECK(calibrate_sigma(1e9, 1e-5, 0.02, 100) == doctest::Approx(0.3));
}

TEST_CASE("dp training reduces bit-identically to non-dp with sigma 0") {
    ToySpec tspec;
    tspec.trajectories_per_cluster = 20;
    tspec.points_per_trajectory = 30;
    Dataset ds = make_toy_dataset(tspec, 5);
    const auto spec = NormalizationSpec::from_bbox({0.0, 1.0, 0.0, 1.0});

    gan::TrainConfig cfg;
    cfg.batch_size = 6;
    cfg.steps = 2;
    cfg.gen_base_channels = 8;
    cfg.disc_base_channels = 8;
    cfg.gen_norm = gan::NormKind::kGroup;
    cfg.snapshot_every = 0;
    cfg.snapshot_trajectories = 4;
    cfg.snapshot_projections = 5;
    cfg.seed = 31;

    DpConfig dp;
    dp.enabled = true;
    dp.noise_multiplier = 0.0;
    dp.calibrate = false;
    dp.clip_norm = std::numeric_limits<double>::infinity();
    dp.scale_factor = 1.0;
    dp.delta = recommended_delta(ds.size());

    gan::TrainResult plain = gan::train(cfg, ds, spec, nullptr);
    gan::TrainResult dped = gan::train(cfg, ds, spec, &dp);

    auto pa = plain.generator.params();
    auto pb = dped.generator.params();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i)
        CHECK(pa[i]->value.v == pb[i]->value.v);
}

TEST_CASE("dp training audits per-sample norms under the clip bound") {
    ToySpec tspec;
    tspec.trajectories_per_cluster = 20;
    tspec.points_per_trajectory = 30;
    Dataset ds = make_toy_dataset(tspec, 5);
    const auto spec = NormalizationSpec::from_bbox({0.0, 1.0, 0.0, 1.0});

    gan::TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.steps = 2;
    cfg.gen_base_channels = 8;
    cfg.disc_base_channels = 8;
    cfg.gen_norm = gan::NormKind::kGroup;
    cfg.snapshot_every = 0;
    cfg.snapshot_trajectories = 4;
    cfg.snapshot_projections = 5;
    cfg.seed = 32;

    DpConfig dp;
    dp.enabled = true;
    dp.noise_multiplier = 1.0;
    dp.calibrate = false;
    dp.clip_norm = 0.1;
    dp.scale_factor = 2.0;
    dp.delta = recommended_delta(ds.size());

    gan::TrainResult r = gan::train(cfg, ds, spec, &dp);
    CHECK(r.max_clipped_norm <= 0.1 + 1e-9);
    CHECK(r.max_clipped_norm > 0.0);
    CHECK(r.final_epsilon > 0.0);
    CHECK(r.ledger.steps == 2);
    CHECK(r.ledger.q == doctest::Approx(8.0 / ds.size()));
}

TEST_SUITE_END();
