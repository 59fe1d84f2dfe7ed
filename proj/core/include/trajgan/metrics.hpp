#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trajgan/codec.hpp"
#include "trajgan/data.hpp"

namespace trajgan {

struct Point2 {
    double x, y;
};

using PointSet = std::vector<Point2>;

// Symmetric Hausdorff distance with Euclidean d, computed with a k-d tree for
// the nearest-neighbour queries. Matches the O(nm) definition exactly.
double hausdorff(const PointSet& a, const PointSet& b);

// 1-D Wasserstein-1 between empirical distributions. Equal-size inputs reduce
// to the mean absolute difference of the sorted samples; unequal sizes use
// the CDF-difference integral.
double wasserstein_1d(const std::vector<double>& u, const std::vector<double>& v);

// Mean W1 over projections of both sets onto n_projections random unit
// directions (angles uniform under seed). Deterministic given seed.
double sliced_wasserstein(const PointSet& a, const PointSet& b,
                          int n_projections, std::uint64_t seed);

double total_travelled_distance(const PointSet& points);

// Fraction of consecutive timestamp pairs with tau_i > tau_{i+1}, where
// tau = day*24 + hour. Requires length >= 2.
double time_reversal_ratio(const Trajectory& t);

struct MetricConfig {
    int n_projections = 100;
    int swd_sample_size = 10000;
    std::uint64_t seed = 0;
};

struct MetricsReport {
    double hd = 0.0;
    double swd = 0.0;
    double ttd_wd = 0.0;
    double trr = 0.0;
    int fold = 0;
    long steps = 0;
    std::uint64_t seed = 0;

    std::string csv_row() const;
    static std::string csv_header();
    std::string to_json() const;
};

// Compares generated against real data in normalized [0,1]^2 space (lat/lon
// scaled by spec). HD uses the full real point set against the generated set
// truncated to the same point count; SWD subsamples swd_sample_size locations
// per side without replacement; TTD compares per-trajectory length multisets
// via W1; TRR is averaged over generated trajectories of length >= 2.
MetricsReport evaluate(const Dataset& real_test, const Dataset& generated,
                       const NormalizationSpec& spec, const MetricConfig& cfg);

// All normalized (lat, lon) locations of a dataset as a 2-D point set.
PointSet to_point_set(const Dataset& ds, const NormalizationSpec& spec);

void save_reports_csv(const std::vector<MetricsReport>& reports,
                      const std::string& path, bool append_aggregate = true);

}  // namespace trajgan
