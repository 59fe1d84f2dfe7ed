#include "trajgan/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace trajgan {

namespace {
constexpr std::uint32_t kGridMagic = 0x44524754;  // "TGRD"

void check_range(double min, double max) {
    if (!(min < max)) throw ArgumentError("normalization bounds require min < max");
}

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }
}  // namespace

int grid_side(int max_len) {
    if (max_len < 1) throw ArgumentError("grid_side: max_len must be >= 1");
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(max_len))));
}

NormalizationSpec NormalizationSpec::from_bbox(const BoundingBox& bbox) {
    NormalizationSpec s;
    s.lat = {bbox.lat_min, bbox.lat_max};
    s.lon = {bbox.lon_min, bbox.lon_max};
    return s;
}

double normalize(double f, double min, double max) {
    check_range(min, max);
    return std::clamp((f - min) / (max - min), 0.0, 1.0);
}

double denormalize(double v, double min, double max) {
    check_range(min, max);
    return v * (max - min) + min;
}

TrajGrid encode(const Trajectory& t, const NormalizationSpec& spec, int max_len) {
    const int n = static_cast<int>(t.points.size());
    if (n > max_len)
        throw ArgumentError("encode: trajectory length " + std::to_string(n) +
                            " exceeds max_len " + std::to_string(max_len));
    const int side = grid_side(max_len);
    TrajGrid g;
    g.side = side;
    g.length = n;
    g.values.assign(static_cast<std::size_t>(side) * side * kGridChannels, 0.0);
    g.mask.assign(static_cast<std::size_t>(side) * side, 0);

    for (int j = 0; j < n; ++j) {
        const Point& p = t.points[j];
        const int r = j / side, c = j % side;
        g.at(r, c, 0) = normalize(p.lat, spec.lat.min, spec.lat.max);
        g.at(r, c, 1) = normalize(p.lon, spec.lon.min, spec.lon.max);
        g.at(r, c, 2) = normalize(p.day, spec.day.min, spec.day.max);
        g.at(r, c, 3) = normalize(p.hour, spec.hour.min, spec.hour.max);
        g.mask[static_cast<std::size_t>(r) * side + c] = 1;
    }
    return g;
}

UpscaledGrid upsample(const TrajGrid& g) {
    UpscaledGrid u;
    u.side = 2 * g.side;
    u.values.assign(static_cast<std::size_t>(u.side) * u.side * kGridChannels, 0.0);
    for (int r = 0; r < g.side; ++r)
        for (int c = 0; c < g.side; ++c)
            for (int ch = 0; ch < kGridChannels; ++ch) {
                const double v = g.at(r, c, ch);
                u.at(2 * r, 2 * c, ch) = v;
                u.at(2 * r, 2 * c + 1, ch) = v;
                u.at(2 * r + 1, 2 * c, ch) = v;
                u.at(2 * r + 1, 2 * c + 1, ch) = v;
            }
    return u;
}

TrajGrid downsample(const UpscaledGrid& u) {
    if (u.side % 2 != 0)
        throw ArgumentError("downsample: side must be even");
    TrajGrid g;
    g.side = u.side / 2;
    g.length = g.side * g.side;
    g.values.assign(static_cast<std::size_t>(g.side) * g.side * kGridChannels, 0.0);
    g.mask.assign(static_cast<std::size_t>(g.side) * g.side, 1);
    for (int r = 0; r < g.side; ++r)
        for (int c = 0; c < g.side; ++c)
            for (int ch = 0; ch < kGridChannels; ++ch)
                g.at(r, c, ch) = u.at(2 * r, 2 * c, ch);
    return g;
}

Trajectory decode(const TrajGrid& g, const NormalizationSpec& spec, int length,
                  const std::string& id) {
    if (length < 1 || length > g.side * g.side)
        throw ArgumentError("decode: length out of range");
    Trajectory t;
    t.id = id;
    t.points.reserve(length);
    for (int j = 0; j < length; ++j) {
        const int r = j / g.side, c = j % g.side;
        Point p;
        p.lat = denormalize(std::clamp(g.at(r, c, 0), 0.0, 1.0), spec.lat.min,
                            spec.lat.max);
        p.lon = denormalize(std::clamp(g.at(r, c, 1), 0.0, 1.0), spec.lon.min,
                            spec.lon.max);
        p.day = std::clamp(
            round_half_up(denormalize(std::clamp(g.at(r, c, 2), 0.0, 1.0),
                                      spec.day.min, spec.day.max)),
            static_cast<int>(spec.day.min), static_cast<int>(spec.day.max));
        p.hour = std::clamp(
            round_half_up(denormalize(std::clamp(g.at(r, c, 3), 0.0, 1.0),
                                      spec.hour.min, spec.hour.max)),
            static_cast<int>(spec.hour.min), static_cast<int>(spec.hour.max));
        t.points.push_back(p);
    }
    return t;
}

void save_grid(const TrajGrid& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write file: " + path);
    const std::uint32_t header[4] = {kGridMagic, static_cast<std::uint32_t>(g.side),
                                     static_cast<std::uint32_t>(kGridChannels),
                                     static_cast<std::uint32_t>(g.length)};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    std::vector<float> buf(g.values.size());
    for (std::size_t i = 0; i < g.values.size(); ++i)
        buf[i] = static_cast<float>(g.values[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

TrajGrid load_grid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path);
    std::uint32_t header[4];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in || header[0] != kGridMagic)
        throw FormatError("bad grid header in " + path);
    if (header[2] != static_cast<std::uint32_t>(kGridChannels))
        throw FormatError("unexpected channel count in " + path);

    TrajGrid g;
    g.side = static_cast<int>(header[1]);
    g.length = static_cast<int>(header[3]);
    const std::size_t n = static_cast<std::size_t>(g.side) * g.side * kGridChannels;
    std::vector<float> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    if (!in) throw FormatError("truncated grid file: " + path);
    g.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.values[i] = buf[i];
    g.mask.assign(static_cast<std::size_t>(g.side) * g.side, 0);
    for (int j = 0; j < g.length && j < g.side * g.side; ++j)
        g.mask[j] = 1;
    return g;
}

}  // namespace trajgan
