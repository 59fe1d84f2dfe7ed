#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "trajgan/metrics.hpp"

using namespace trajgan;

namespace {

// O(nm) definition, kept deliberately independent of the library version.
double hausdorff_brute(const PointSet& a, const PointSet& b) {
    auto directed_sq = [](const PointSet& s, const PointSet& t) {
        double worst = 0.0;
        for (const auto& p : s) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : t) {
                const double dx = p.x - q.x, dy = p.y - q.y;
                best = std::min(best, dx * dx + dy * dy);
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::sqrt(std::max(directed_sq(a, b), directed_sq(b, a)));
}

PointSet random_points(std::mt19937_64& rng, int n, double lo = 0.0,
                       double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    PointSet out(n);
    for (auto& p : out) p = {u(rng), u(rng)};
    return out;
}

Trajectory tau_trajectory(const std::vector<int>& taus) {
    Trajectory t;
    for (int tau : taus) t.points.push_back({0.0, 0.0, tau / 24, tau % 24});
    return t;
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("hausdorff of identical sets is 0") {
    std::mt19937_64 rng(1);
    PointSet a = random_points(rng, 50);
    CHECK(hausdorff(a, a) == 0.0);
}

TEST_CASE("hausdorff single pair") {
    CHECK(hausdorff({{0, 0}}, {{3, 4}}) == 5.0);
}

TEST_CASE("hausdorff equals brute force exactly") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> usize(1, 400);
    for (int rep = 0; rep < 30; ++rep) {
        PointSet a = random_points(rng, usize(rng));
        PointSet b = random_points(rng, usize(rng));
        CHECK(hausdorff(a, b) == hausdorff_brute(a, b));
    }
}

TEST_CASE("hausdorff is symmetric") {
    std::mt19937_64 rng(3);
    PointSet a = random_points(rng, 120), b = random_points(rng, 80);
    CHECK(hausdorff(a, b) == hausdorff(b, a));
}

TEST_CASE("hausdorff rejects empty input") {
    CHECK_THROWS_AS(hausdorff({}, {{0, 0}}), ArgumentError);
}

TEST_CASE("wasserstein_1d basics") {
    CHECK(wasserstein_1d({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(wasserstein_1d({0, 1}, {0, 0}) == 0.5);
    CHECK_THROWS_AS(wasserstein_1d({}, {1.0}), ArgumentError);
}

TEST_CASE("wasserstein_1d translation property") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> a(200);
    for (auto& x : a) x = u(rng);
    for (double c : {0.25, -1.5, 3.0}) {
        std::vector<double> b = a;
        for (auto& x : b) x += c;
        CHECK(std::abs(wasserstein_1d(a, b) - std::abs(c)) < 1e-9);
    }
}

TEST_CASE("wasserstein_1d unequal sizes against merged-support oracle") {
    // u = {0, 1}, v = {0.5}: integral of |F_u - F_v| = 0.5*0.5 + 0.5*0.5.
    CHECK(wasserstein_1d({0.0, 1.0}, {0.5}) ==
          doctest::Approx(0.5).epsilon(1e-12));
    // Duplicated sample lists represent the same distribution.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> a(60);
    for (auto& x : a) x = u(rng);
    std::vector<double> doubled = a;
    doubled.insert(doubled.end(), a.begin(), a.end());
    CHECK(wasserstein_1d(a, doubled) < 1e-12);
}

TEST_CASE("wasserstein_1d triangle inequality on random triples") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> a(40), b(40), c(40);
        for (auto& x : a) x = u(rng);
        for (auto& x : b) x = u(rng);
        for (auto& x : c) x = u(rng);
        CHECK(wasserstein_1d(a, c) <=
              wasserstein_1d(a, b) + wasserstein_1d(b, c) + 1e-9);
    }
}

TEST_CASE("sliced_wasserstein identical sets and determinism") {
    std::mt19937_64 rng(7);
    PointSet a = random_points(rng, 100);
    CHECK(sliced_wasserstein(a, a, 50, 123) == 0.0);
    PointSet b = random_points(rng, 100);
    CHECK(sliced_wasserstein(a, b, 50, 123) ==
          sliced_wasserstein(a, b, 50, 123));
    CHECK(sliced_wasserstein(a, b, 50, 123) > 0.0);
}

TEST_CASE("sliced_wasserstein translation matches 2|c|/pi") {
    std::mt19937_64 rng(8);
    PointSet a = random_points(rng, 400);
    const double c = 0.8;
    PointSet b = a;
    for (auto& p : b) p.x += c;
    const double expect = 2.0 * c / M_PI;
    const double got = sliced_wasserstein(a, b, 500, 99);
    CHECK(std::abs(got - expect) / expect < 0.05);
}

TEST_CASE("sliced_wasserstein variance shrinks with more projections") {
    std::mt19937_64 rng(9);
    PointSet a = random_points(rng, 80);
    PointSet b = random_points(rng, 80, 0.2, 1.2);
    auto variance = [&](int n_proj) {
        std::vector<double> vals;
        for (std::uint64_t s = 0; s < 20; ++s)
            vals.push_back(sliced_wasserstein(a, b, n_proj, 1000 + s));
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= vals.size();
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        return var / vals.size();
    };
    CHECK(variance(1000) < variance(10));
}

TEST_CASE("total_travelled_distance fixtures") {
    CHECK(total_travelled_distance({{0, 0}}) == 0.0);
    CHECK(total_travelled_distance({{0, 0}, {3, 4}, {3, 4}}) == 5.0);
    CHECK_THROWS_AS(total_travelled_distance({}), ArgumentError);
}

TEST_CASE("total_travelled_distance matches segment-sum oracle") {
    std::mt19937_64 rng(10);
    PointSet t = random_points(rng, 50);
    double expect = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        expect += std::hypot(t[i].x - t[i - 1].x, t[i].y - t[i - 1].y);
    CHECK(std::abs(total_travelled_distance(t) - expect) < 1e-12);
}

TEST_CASE("time_reversal_ratio fixtures") {
    CHECK(time_reversal_ratio(tau_trajectory({1, 2, 3, 4, 5})) == 0.0);
    CHECK(time_reversal_ratio(tau_trajectory({50, 40, 30, 20, 10})) == 1.0);
    CHECK(time_reversal_ratio(tau_trajectory({1, 2, 1, 3})) == 1.0 / 3.0);
    CHECK_THROWS_AS(time_reversal_ratio(tau_trajectory({5})), ArgumentError);
}

TEST_CASE("time_reversal_ratio ignores spatial coordinates") {
    Trajectory a = tau_trajectory({1, 2, 1, 3});
    Trajectory b = a;
    for (auto& p : b.points) {
        p.lat += 10.0;
        p.lon -= 3.0;
    }
    CHECK(time_reversal_ratio(a) == time_reversal_ratio(b));
}

TEST_CASE("evaluate on identical datasets gives zero distances") {
    std::mt19937_64 rng(11);
    Dataset ds;
    ds.bbox = {0, 1, 0, 1};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        Trajectory t;
        t.id = std::to_string(i);
        for (int j = 0; j < 20; ++j)
            t.points.push_back({u(rng), u(rng), 0, j % 24});
        ds.trajectories.push_back(t);
    }
    const auto spec = NormalizationSpec::from_bbox(ds.bbox);
    MetricConfig cfg;
    cfg.n_projections = 20;
    cfg.seed = 5;
    MetricsReport r = evaluate(ds, ds, spec, cfg);
    CHECK(r.hd == 0.0);
    CHECK(r.swd == 0.0);
    CHECK(r.ttd_wd == 0.0);
    CHECK(r.trr == 0.0);
}

TEST_CASE("evaluate is deterministic and csv row stable") {
    std::mt19937_64 rng(12);
    Dataset real, gen;
    real.bbox = gen.bbox = {0, 1, 0, 1};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto fill = [&](Dataset& ds, int n) {
        for (int i = 0; i < n; ++i) {
            Trajectory t;
            t.id = std::to_string(i);
            for (int j = 0; j < 15; ++j)
                t.points.push_back({u(rng), u(rng), 0, j % 24});
            ds.trajectories.push_back(t);
        }
    };
    fill(real, 8);
    fill(gen, 9);
    const auto spec = NormalizationSpec::from_bbox(real.bbox);
    MetricConfig cfg;
    cfg.n_projections = 25;
    cfg.seed = 77;
    MetricsReport a = evaluate(real, gen, spec, cfg);
    MetricsReport b = evaluate(real, gen, spec, cfg);
    CHECK(a.csv_row() == b.csv_row());
    CHECK(MetricsReport::csv_header() == "hd,swd,ttd_wd,trr,fold,steps,seed");
}

TEST_SUITE_END();
