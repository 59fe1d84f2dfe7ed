#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trajgan/errors.hpp"

namespace trajgan {

inline constexpr int kMaxTrajectoryLength = 144;

struct Point {
    double lat = 0.0;   // degrees, WGS84
    double lon = 0.0;   // degrees, WGS84
    int day = 0;        // weekday, Monday=0 .. Sunday=6
    int hour = 0;       // 0..23

    bool operator==(const Point&) const = default;
};

struct Trajectory {
    std::string id;
    std::vector<Point> points;

    std::size_t size() const { return points.size(); }
};

struct BoundingBox {
    double lat_min, lat_max;
    double lon_min, lon_max;

    bool contains(const Point& p) const {
        return p.lat >= lat_min && p.lat <= lat_max &&
               p.lon >= lon_min && p.lon <= lon_max;
    }
};

// Default bounding boxes for the two evaluation datasets.
inline constexpr BoundingBox kFsNycBBox{40.6811, 40.8411, -74.0785, -73.8585};
inline constexpr BoundingBox kGeolifeBBox{39.8279, 39.9877, 116.2676, 116.4857};

struct Dataset {
    std::string name;
    std::vector<Trajectory> trajectories;
    BoundingBox bbox{-90.0, 90.0, -180.0, 180.0};

    std::size_t size() const { return trajectories.size(); }
    std::size_t total_points() const;
};

// CSV with header (tid,lat,lon,day,hour; extra columns ignored); one
// trajectory per distinct tid, rows kept in file order.
Dataset load_fs_csv(const std::string& path);

// Geolife directory layout: <root>/<user>/Trajectory/*.plt (a flat directory
// of .plt files is also accepted). PLT files carry 6 header lines, then
// records "lat,lon,0,altitude,days,date,time". day = weekday of `date`
// (Monday=0), hour = hour of `time`. Malformed records and unreadable files
// are skipped.
Dataset load_geolife(const std::string& root_dir);

// Drops points outside bbox, truncates each trajectory to its first max_len
// in-bbox points, and drops trajectories with fewer than min_len points left.
Dataset preprocess(const Dataset& ds, const BoundingBox& bbox,
                   int max_len = kMaxTrajectoryLength, int min_len = 1);

struct Fold {
    Dataset train;
    Dataset test;
};

// Deterministic k-fold split: shuffle under seed, then deal out k test
// partitions whose sizes differ by at most 1 (the first n%k folds get the
// extra trajectory).
std::vector<Fold> split_folds(const Dataset& ds, int k, std::uint64_t seed);

struct ToySpec {
    int n_clusters = 2;
    std::vector<std::pair<double, double>> centers;  // in [0,1]^2
    double spread = 0.03;
    int trajectories_per_cluster = 250;
    int points_per_trajectory = kMaxTrajectoryLength;
};

// Synthetic cluster dataset in the unit square with forward-ordered
// timestamps; deterministic under seed. Coordinates are produced directly in
// "degree" space [0,1] with bbox (0,1)x(0,1).
Dataset make_toy_dataset(const ToySpec& spec, std::uint64_t seed);

// Canonical on-disk dataset form (same CSV schema as the FS input).
void save_dataset_csv(const Dataset& ds, const std::string& path);

}  // namespace trajgan
