#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "trajgan/data.hpp"

namespace trajgan {

inline constexpr int kGridChannels = 4;  // lat, lon, day, hour

// side = ceil(sqrt(max_len)); 12 for the default max length of 144.
int grid_side(int max_len);

struct FeatureRange {
    double min, max;
};

// Per-feature min/max bounds. lat/lon come from a public bounding box, never
// from dataset statistics; day and hour bounds are fixed by their natural
// ranges.
struct NormalizationSpec {
    FeatureRange lat, lon;
    FeatureRange day{0.0, 6.0};
    FeatureRange hour{0.0, 23.0};

    static NormalizationSpec from_bbox(const BoundingBox& bbox);
};

// side x side x channels value block plus a validity mask of length side^2.
// Cells at flat index >= length are zero in every channel.
struct TrajGrid {
    int side = 0;
    std::vector<double> values;  // row-major (row, col, channel)
    std::vector<std::uint8_t> mask;
    int length = 0;

    double& at(int r, int c, int ch) {
        return values[(static_cast<std::size_t>(r) * side + c) * kGridChannels + ch];
    }
    double at(int r, int c, int ch) const {
        return values[(static_cast<std::size_t>(r) * side + c) * kGridChannels + ch];
    }
};

// (2*side) x (2*side) x channels; each 2x2 block replicates one source cell.
struct UpscaledGrid {
    int side = 0;  // = 2 * source side
    std::vector<double> values;

    double& at(int r, int c, int ch) {
        return values[(static_cast<std::size_t>(r) * side + c) * kGridChannels + ch];
    }
    double at(int r, int c, int ch) const {
        return values[(static_cast<std::size_t>(r) * side + c) * kGridChannels + ch];
    }
};

// v = (f - min) / (max - min), clamped into [0,1].
double normalize(double f, double min, double max);

// f = v * (max - min) + min; exact inverse of normalize on in-range inputs.
double denormalize(double v, double min, double max);

TrajGrid encode(const Trajectory& t, const NormalizationSpec& spec,
                int max_len = kMaxTrajectoryLength);

UpscaledGrid upsample(const TrajGrid& g);

// Nearest-neighbour reduction taking the top-left cell of each 2x2 block.
// Inverse of upsample on its image. Accepts any even-sided value block.
TrajGrid downsample(const UpscaledGrid& u);

// Reads the first `length` cells row-major and denormalizes each channel.
// day/hour are rounded half-up and clamped to their bounds.
Trajectory decode(const TrajGrid& g, const NormalizationSpec& spec, int length,
                  const std::string& id = "generated");

// Binary grid block: 16-byte header (magic 'TGRD', side, channels, length as
// little-endian u32) followed by side*side*channels little-endian f32 values
// in (row, col, channel) order.
void save_grid(const TrajGrid& g, const std::string& path);
TrajGrid load_grid(const std::string& path);

}  // namespace trajgan
