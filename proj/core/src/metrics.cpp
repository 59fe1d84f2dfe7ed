#include "trajgan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

namespace trajgan {

namespace {

double sq_dist(const Point2& a, const Point2& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Balanced 2-d tree over an index permutation; exact nearest neighbour.
class KdTree {
public:
    explicit KdTree(const PointSet& pts) : pts_(pts), idx_(pts.size()) {
        std::iota(idx_.begin(), idx_.end(), std::size_t{0});
        build(0, pts.size(), 0);
    }

    double nearest_sq(const Point2& q) const {
        double best = std::numeric_limits<double>::infinity();
        search(q, 0, idx_.size(), 0, best);
        return best;
    }

private:
    void build(std::size_t lo, std::size_t hi, int axis) {
        if (hi - lo <= 1) return;
        const std::size_t mid = (lo + hi) / 2;
        std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                         [&](std::size_t a, std::size_t b) {
                             return axis == 0 ? pts_[a].x < pts_[b].x
                                              : pts_[a].y < pts_[b].y;
                         });
        build(lo, mid, 1 - axis);
        build(mid + 1, hi, 1 - axis);
    }

    void search(const Point2& q, std::size_t lo, std::size_t hi, int axis,
                double& best) const {
        if (lo >= hi) return;
        const std::size_t mid = (lo + hi) / 2;
        const Point2& p = pts_[idx_[mid]];
        best = std::min(best, sq_dist(q, p));
        const double delta = axis == 0 ? q.x - p.x : q.y - p.y;
        const std::size_t near_lo = delta < 0 ? lo : mid + 1;
        const std::size_t near_hi = delta < 0 ? mid : hi;
        const std::size_t far_lo = delta < 0 ? mid + 1 : lo;
        const std::size_t far_hi = delta < 0 ? hi : mid;
        search(q, near_lo, near_hi, 1 - axis, best);
        if (delta * delta < best) search(q, far_lo, far_hi, 1 - axis, best);
    }

    const PointSet& pts_;
    std::vector<std::size_t> idx_;
};

double directed_hausdorff_sq(const PointSet& from, const KdTree& tree) {
    double worst = 0.0;
    for (const auto& p : from) worst = std::max(worst, tree.nearest_sq(p));
    return worst;
}

double uniform01(std::mt19937_64& rng) {
    return (rng() >> 11) * (1.0 / 9007199254740992.0);
}

}  // namespace

double hausdorff(const PointSet& a, const PointSet& b) {
    if (a.empty() || b.empty())
        throw ArgumentError("hausdorff: point sets must be non-empty");
    KdTree ta(a), tb(b);
    return std::sqrt(
        std::max(directed_hausdorff_sq(a, tb), directed_hausdorff_sq(b, ta)));
}

double wasserstein_1d(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.empty() || v.empty())
        throw ArgumentError("wasserstein_1d: inputs must be non-empty");
    std::vector<double> su(u), sv(v);
    std::sort(su.begin(), su.end());
    std::sort(sv.begin(), sv.end());

    if (su.size() == sv.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < su.size(); ++i)
            acc += std::abs(su[i] - sv[i]);
        return acc / static_cast<double>(su.size());
    }

    // Integral of |F_u - F_v| over the merged support.
    std::vector<double> all;
    all.reserve(su.size() + sv.size());
    all.insert(all.end(), su.begin(), su.end());
    all.insert(all.end(), sv.begin(), sv.end());
    std::sort(all.begin(), all.end());

    double acc = 0.0;
    std::size_t iu = 0, iv = 0;
    for (std::size_t k = 0; k + 1 < all.size(); ++k) {
        while (iu < su.size() && su[iu] <= all[k]) ++iu;
        while (iv < sv.size() && sv[iv] <= all[k]) ++iv;
        const double fu = static_cast<double>(iu) / su.size();
        const double fv = static_cast<double>(iv) / sv.size();
        acc += std::abs(fu - fv) * (all[k + 1] - all[k]);
    }
    return acc;
}

double sliced_wasserstein(const PointSet& a, const PointSet& b,
                          int n_projections, std::uint64_t seed) {
    if (a.empty() || b.empty())
        throw ArgumentError("sliced_wasserstein: point sets must be non-empty");
    if (n_projections < 1)
        throw ArgumentError("sliced_wasserstein: n_projections must be >= 1");

    std::mt19937_64 rng(seed);
    std::vector<double> pu(a.size()), pv(b.size());
    double acc = 0.0;
    for (int k = 0; k < n_projections; ++k) {
        const double theta = uniform01(rng) * 3.14159265358979323846;
        const double cx = std::cos(theta), cy = std::sin(theta);
        for (std::size_t i = 0; i < a.size(); ++i) pu[i] = cx * a[i].x + cy * a[i].y;
        for (std::size_t i = 0; i < b.size(); ++i) pv[i] = cx * b[i].x + cy * b[i].y;
        acc += wasserstein_1d(pu, pv);
    }
    return acc / n_projections;
}

double total_travelled_distance(const PointSet& points) {
    if (points.empty())
        throw ArgumentError("total_travelled_distance: empty trajectory");
    double acc = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        acc += std::sqrt(sq_dist(points[i - 1], points[i]));
    return acc;
}

double time_reversal_ratio(const Trajectory& t) {
    const std::size_t n = t.points.size();
    if (n < 2)
        throw ArgumentError("time_reversal_ratio: need at least 2 points");
    int reversals = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const int tau0 = t.points[i].day * 24 + t.points[i].hour;
        const int tau1 = t.points[i + 1].day * 24 + t.points[i + 1].hour;
        if (tau0 > tau1) ++reversals;
    }
    return static_cast<double>(reversals) / static_cast<double>(n - 1);
}

PointSet to_point_set(const Dataset& ds, const NormalizationSpec& spec) {
    PointSet out;
    out.reserve(ds.total_points());
    for (const auto& t : ds.trajectories)
        for (const auto& p : t.points)
            out.push_back({normalize(p.lat, spec.lat.min, spec.lat.max),
                           normalize(p.lon, spec.lon.min, spec.lon.max)});
    return out;
}

namespace {

// First n entries of a seeded permutation (sampling without replacement).
PointSet subsample(const PointSet& pts, std::size_t n, std::mt19937_64& rng) {
    if (pts.size() <= n) return pts;
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng() % (idx.size() - i));
        std::swap(idx[i], idx[j]);
    }
    PointSet out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = pts[idx[i]];
    return out;
}

}  // namespace

MetricsReport evaluate(const Dataset& real_test, const Dataset& generated,
                       const NormalizationSpec& spec, const MetricConfig& cfg) {
    if (real_test.trajectories.empty() || generated.trajectories.empty())
        throw ArgumentError("evaluate: datasets must be non-empty");

    const PointSet real_pts = to_point_set(real_test, spec);
    PointSet gen_pts = to_point_set(generated, spec);
    if (gen_pts.size() > real_pts.size()) gen_pts.resize(real_pts.size());

    MetricsReport r;
    r.seed = cfg.seed;
    r.hd = hausdorff(real_pts, gen_pts);

    std::mt19937_64 rng(cfg.seed);
    const PointSet sr = subsample(real_pts, cfg.swd_sample_size, rng);
    const PointSet sg = subsample(gen_pts, cfg.swd_sample_size, rng);
    r.swd = sliced_wasserstein(sr, sg, cfg.n_projections, cfg.seed);

    std::vector<double> ttd_real, ttd_gen;
    for (const auto& t : real_test.trajectories) {
        PointSet ps;
        for (const auto& p : t.points)
            ps.push_back({normalize(p.lat, spec.lat.min, spec.lat.max),
                          normalize(p.lon, spec.lon.min, spec.lon.max)});
        ttd_real.push_back(total_travelled_distance(ps));
    }
    for (const auto& t : generated.trajectories) {
        PointSet ps;
        for (const auto& p : t.points)
            ps.push_back({normalize(p.lat, spec.lat.min, spec.lat.max),
                          normalize(p.lon, spec.lon.min, spec.lon.max)});
        ttd_gen.push_back(total_travelled_distance(ps));
    }
    r.ttd_wd = wasserstein_1d(ttd_real, ttd_gen);

    double trr_acc = 0.0;
    std::size_t trr_n = 0;
    for (const auto& t : generated.trajectories) {
        if (t.points.size() < 2) continue;  // undefined for singletons
        trr_acc += time_reversal_ratio(t);
        ++trr_n;
    }
    r.trr = trr_n ? trr_acc / static_cast<double>(trr_n) : 0.0;
    return r;
}

std::string MetricsReport::csv_header() { return "hd,swd,ttd_wd,trr,fold,steps,seed"; }

std::string MetricsReport::csv_row() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%d,%ld,%llu", hd,
                  swd, ttd_wd, trr, fold, steps,
                  static_cast<unsigned long long>(seed));
    return buf;
}

std::string MetricsReport::to_json() const {
    char buf[320];
    std::snprintf(buf, sizeof(buf),
                  "{\"hd\":%.12g,\"swd\":%.12g,\"ttd_wd\":%.12g,\"trr\":%.12g,"
                  "\"fold\":%d,\"steps\":%ld,\"seed\":%llu}",
                  hd, swd, ttd_wd, trr, fold, steps,
                  static_cast<unsigned long long>(seed));
    return buf;
}

void save_reports_csv(const std::vector<MetricsReport>& reports,
                      const std::string& path, bool append_aggregate) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write file: " + path);
    out << MetricsReport::csv_header() << "\n";
    for (const auto& r : reports) out << r.csv_row() << "\n";
    if (append_aggregate && !reports.empty()) {
        auto agg = [&](auto get) {
            double mean = 0.0;
            for (const auto& r : reports) mean += get(r);
            mean /= reports.size();
            double var = 0.0;
            for (const auto& r : reports) {
                double d = get(r) - mean;
                var += d * d;
            }
            var /= reports.size();
            return std::pair<double, double>{mean, std::sqrt(var)};
        };
        auto [hm, hs] = agg([](const MetricsReport& r) { return r.hd; });
        auto [sm, ss] = agg([](const MetricsReport& r) { return r.swd; });
        auto [tm, ts] = agg([](const MetricsReport& r) { return r.ttd_wd; });
        auto [rm, rs] = agg([](const MetricsReport& r) { return r.trr; });
        char buf[512];
        std::snprintf(buf, sizeof(buf),
                      "# aggregate mean,%.12g,%.12g,%.12g,%.12g\n"
                      "# aggregate std,%.12g,%.12g,%.12g,%.12g\n",
                      hm, sm, tm, rm, hs, ss, ts, rs);
        out << buf;
    }
}

}  // namespace trajgan
