#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "trajgan/codec.hpp"

using namespace trajgan;

namespace {

NormalizationSpec fs_spec() { return NormalizationSpec::from_bbox(kFsNycBBox); }

Trajectory random_trajectory(std::mt19937_64& rng, const BoundingBox& bb,
                             int len) {
    std::uniform_real_distribution<double> ula(bb.lat_min, bb.lat_max);
    std::uniform_real_distribution<double> ulo(bb.lon_min, bb.lon_max);
    std::uniform_int_distribution<int> ud(0, 6), uh(0, 23);
    Trajectory t;
    for (int i = 0; i < len; ++i)
        t.points.push_back({ula(rng), ulo(rng), ud(rng), uh(rng)});
    return t;
}

}  // namespace

TEST_SUITE_BEGIN("codec");

TEST_CASE("grid side is ceil sqrt") {
    CHECK(grid_side(144) == 12);
    CHECK(grid_side(122) == 12);
    CHECK(grid_side(121) == 11);
    CHECK(grid_side(1) == 1);
}

TEST_CASE("normalize endpoints and midpoint") {
    CHECK(normalize(40.6811, 40.6811, 40.8411) == 0.0);
    CHECK(normalize(40.8411, 40.6811, 40.8411) == 1.0);
    CHECK(normalize(40.7611, 40.6811, 40.8411) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("denormalize endpoints and inverse") {
    CHECK(denormalize(0.0, 0.0, 23.0) == 0.0);
    CHECK(denormalize(1.0, 0.0, 6.0) == 6.0);
    CHECK(denormalize(0.5, 40.6811, 40.8411) ==
          doctest::Approx(40.7611).epsilon(1e-12));
    CHECK_THROWS_AS(normalize(1.0, 2.0, 2.0), ArgumentError);
    CHECK_THROWS_AS(denormalize(0.5, 3.0, 2.0), ArgumentError);
}

TEST_CASE("encode single point at spec minima") {
    Trajectory t;
    t.points = {{40.6811, -74.0785, 0, 0}};
    TrajGrid g = encode(t, fs_spec(), 144);
    CHECK(g.side == 12);
    CHECK(g.length == 1);
    for (int ch = 0; ch < kGridChannels; ++ch) CHECK(g.at(0, 0, ch) == 0.0);
    CHECK(g.mask[0] == 1);
    for (std::size_t i = 1; i < g.mask.size(); ++i) CHECK(g.mask[i] == 0);
}

TEST_CASE("encode row-major fill for 13 points") {
    std::mt19937_64 rng(1);
    Trajectory t = random_trajectory(rng, kFsNycBBox, 13);
    TrajGrid g = encode(t, fs_spec(), 144);
    for (int c = 0; c < 12; ++c) CHECK(g.mask[c] == 1);
    CHECK(g.mask[12] == 1);  // cell (1,0)
    for (std::size_t i = 13; i < g.mask.size(); ++i) CHECK(g.mask[i] == 0);
    CHECK(g.at(1, 0, 0) ==
          normalize(t.points[12].lat, 40.6811, 40.8411));
}

TEST_CASE("encode full grid has mask of ones") {
    std::mt19937_64 rng(2);
    Trajectory t = random_trajectory(rng, kFsNycBBox, 144);
    TrajGrid g = encode(t, fs_spec(), 144);
    for (auto m : g.mask) CHECK(m == 1);
}

TEST_CASE("encode rejects overlong trajectory") {
    std::mt19937_64 rng(3);
    Trajectory t = random_trajectory(rng, kFsNycBBox, 145);
    CHECK_THROWS_AS(encode(t, fs_spec(), 144), ArgumentError);
}

TEST_CASE("encoded values lie in [0,1]") {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        Trajectory t = random_trajectory(rng, kFsNycBBox, 100);
        TrajGrid g = encode(t, fs_spec(), 144);
        for (double v : g.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("upsample replication rule") {
    Trajectory t;
    t.points = {{40.75, -74.0, 3, 12}};
    TrajGrid g = encode(t, fs_spec(), 144);
    UpscaledGrid u = upsample(g);
    CHECK(u.side == 24);
    for (int ch = 0; ch < kGridChannels; ++ch) {
        const double x = g.at(0, 0, ch);
        CHECK(u.at(0, 0, ch) == x);
        CHECK(u.at(0, 1, ch) == x);
        CHECK(u.at(1, 0, ch) == x);
        CHECK(u.at(1, 1, ch) == x);
        CHECK(u.at(0, 2, ch) == 0.0);
        CHECK(u.at(2, 0, ch) == 0.0);
    }
}

TEST_CASE("upsample gives block-constant grids") {
    std::mt19937_64 rng(5);
    Trajectory t = random_trajectory(rng, kFsNycBBox, 144);
    UpscaledGrid u = upsample(encode(t, fs_spec(), 144));
    for (int r = 0; r < 24; r += 2)
        for (int c = 0; c < 24; c += 2)
            for (int ch = 0; ch < kGridChannels; ++ch) {
                CHECK(u.at(r, c, ch) == u.at(r, c + 1, ch));
                CHECK(u.at(r, c, ch) == u.at(r + 1, c, ch));
                CHECK(u.at(r, c, ch) == u.at(r + 1, c + 1, ch));
            }
}

TEST_CASE("downsample takes the top-left representative") {
    UpscaledGrid u;
    u.side = 2;
    u.values.assign(2 * 2 * kGridChannels, 0.0);
    u.at(0, 0, 0) = 0.1;
    u.at(0, 1, 0) = 0.2;
    u.at(1, 0, 0) = 0.3;
    u.at(1, 1, 0) = 0.4;
    TrajGrid g = downsample(u);
    CHECK(g.side == 1);
    CHECK(g.at(0, 0, 0) == 0.1);
}

TEST_CASE("downsample matches a strided-slice oracle on non-constant input") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    UpscaledGrid u;
    u.side = 24;
    u.values.resize(24 * 24 * kGridChannels);
    for (auto& v : u.values) v = u01(rng);
    TrajGrid g = downsample(u);
    for (int r = 0; r < 12; ++r)
        for (int c = 0; c < 12; ++c)
            for (int ch = 0; ch < kGridChannels; ++ch)
                CHECK(g.at(r, c, ch) == u.at(2 * r, 2 * c, ch));
}

TEST_CASE("downsample rejects odd side") {
    UpscaledGrid u;
    u.side = 3;
    u.values.assign(3 * 3 * kGridChannels, 0.0);
    CHECK_THROWS_AS(downsample(u), ArgumentError);
}

TEST_CASE("downsample of upsample is identity") {
    std::mt19937_64 rng(7);
    Trajectory t = random_trajectory(rng, kFsNycBBox, 77);
    TrajGrid g = encode(t, fs_spec(), 144);
    TrajGrid back = downsample(upsample(g));
    CHECK(back.values == g.values);
}

TEST_CASE("decode half-up rounding of hour") {
    TrajGrid g;
    g.side = 12;
    g.length = 1;
    g.values.assign(12 * 12 * kGridChannels, 0.5);
    g.mask.assign(144, 1);
    Trajectory t = decode(g, fs_spec(), 1, "x");
    REQUIRE(t.size() == 1);
    CHECK(t.points[0].hour == 12);  // 0.5 * 23 = 11.5, half-up
    CHECK(t.points[0].day == 3);    // 0.5 * 6 = 3.0
}

TEST_CASE("decode at full length yields 144 points in bounds") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    UpscaledGrid u;
    u.side = 24;
    u.values.resize(24 * 24 * kGridChannels);
    for (auto& v : u.values) v = u01(rng);
    Trajectory t = decode(downsample(u), fs_spec(), 144, "g");
    REQUIRE(t.size() == 144);
    for (const auto& p : t.points) {
        CHECK(kFsNycBBox.contains(p));
        CHECK(p.day >= 0);
        CHECK(p.day <= 6);
        CHECK(p.hour >= 0);
        CHECK(p.hour <= 23);
    }
}

TEST_CASE("decode rejects out-of-range length") {
    TrajGrid g;
    g.side = 12;
    g.length = 144;
    g.values.assign(12 * 12 * kGridChannels, 0.0);
    g.mask.assign(144, 1);
    CHECK_THROWS_AS(decode(g, fs_spec(), 0, "x"), ArgumentError);
    CHECK_THROWS_AS(decode(g, fs_spec(), 145, "x"), ArgumentError);
}

TEST_CASE("full round trip on random trajectories") {
    std::mt19937_64 rng(9);
    const auto spec = fs_spec();
    std::uniform_int_distribution<int> ulen(1, 144);
    for (int rep = 0; rep < 50; ++rep) {
        Trajectory t = random_trajectory(rng, kFsNycBBox, ulen(rng));
        Trajectory back = decode(downsample(upsample(encode(t, spec, 144))),
                                 spec, static_cast<int>(t.size()), t.id);
        REQUIRE(back.size() == t.size());
        for (std::size_t j = 0; j < t.size(); ++j) {
            CHECK(std::abs(back.points[j].lat - t.points[j].lat) < 1e-9);
            CHECK(std::abs(back.points[j].lon - t.points[j].lon) < 1e-9);
            CHECK(back.points[j].day == t.points[j].day);
            CHECK(back.points[j].hour == t.points[j].hour);
        }
    }
}

TEST_CASE("grid file round trip and bad magic") {
    std::mt19937_64 rng(10);
    Trajectory t = random_trajectory(rng, kFsNycBBox, 50);
    TrajGrid g = encode(t, fs_spec(), 144);
    const std::string path = "test_codec_grid.bin";
    save_grid(g, path);
    TrajGrid back = load_grid(path);
    CHECK(back.side == g.side);
    CHECK(back.length == g.length);
    CHECK(back.mask == g.mask);
    REQUIRE(back.values.size() == g.values.size());
    for (std::size_t i = 0; i < g.values.size(); ++i)
        CHECK(back.values[i] ==
              doctest::Approx(g.values[i]).epsilon(1e-6));  // f32 payload
    std::ofstream(path, std::ios::binary) << "NOTAGRID";
    CHECK_THROWS_AS(load_grid(path), FormatError);
    std::remove(path.c_str());
}

TEST_SUITE_END();
