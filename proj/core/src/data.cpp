#include "trajgan/data.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace fs = std::filesystem;

namespace trajgan {

std::size_t Dataset::total_points() const {
    std::size_t n = 0;
    for (const auto& t : trajectories) n += t.points.size();
    return n;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, std::size_t row, const char* col) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError("row " + std::to_string(row) + ": non-numeric value '" +
                          s + "' in column " + col);
    }
}

// Days-from-civil (proleptic Gregorian); weekday with Monday=0.
int weekday_of(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    const long days = static_cast<long>(era) * 146097 + static_cast<long>(doe) - 719468;
    // 1970-01-01 was a Thursday (=3 with Monday=0).
    long wd = (days + 3) % 7;
    if (wd < 0) wd += 7;
    return static_cast<int>(wd);
}

}  // namespace

Dataset load_fs_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open file: " + path);

    std::string header_line;
    if (!std::getline(in, header_line))
        throw FormatError("empty file (no header): " + path);

    auto header = split_csv_line(header_line);
    std::unordered_map<std::string, int> col;
    for (std::size_t i = 0; i < header.size(); ++i)
        col[strip(header[i])] = static_cast<int>(i);

    for (const char* required : {"tid", "lat", "lon", "day", "hour"})
        if (!col.count(required))
            throw FormatError(std::string("missing column '") + required +
                              "' in " + path);

    Dataset ds;
    ds.name = fs::path(path).stem().string();

    std::unordered_map<std::string, std::size_t> index_of;
    std::string line;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (strip(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() < header.size())
            throw FormatError("row " + std::to_string(row) + ": expected " +
                              std::to_string(header.size()) + " cells, got " +
                              std::to_string(cells.size()));
        const std::string tid = strip(cells[col["tid"]]);
        Point p;
        p.lat = parse_double(strip(cells[col["lat"]]), row, "lat");
        p.lon = parse_double(strip(cells[col["lon"]]), row, "lon");
        p.day = static_cast<int>(parse_double(strip(cells[col["day"]]), row, "day"));
        p.hour = static_cast<int>(parse_double(strip(cells[col["hour"]]), row, "hour"));

        auto it = index_of.find(tid);
        if (it == index_of.end()) {
            index_of.emplace(tid, ds.trajectories.size());
            ds.trajectories.push_back(Trajectory{tid, {p}});
        } else {
            ds.trajectories[it->second].points.push_back(p);
        }
    }
    return ds;
}

namespace {

bool parse_plt_record(const std::string& line, Point& out) {
    auto cells = split_csv_line(line);
    if (cells.size() < 7) return false;
    try {
        std::size_t pos = 0;
        out.lat = std::stod(cells[0], &pos);
        out.lon = std::stod(cells[1], &pos);
        int y, m, d, hh, mm, ss;
        if (std::sscanf(strip(cells[5]).c_str(), "%d-%d-%d", &y, &m, &d) != 3)
            return false;
        if (std::sscanf(strip(cells[6]).c_str(), "%d:%d:%d", &hh, &mm, &ss) != 3)
            return false;
        if (hh < 0 || hh > 23) return false;
        out.day = weekday_of(y, m, d);
        out.hour = hh;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

void load_plt_file(const fs::path& path, Dataset& ds) {
    std::ifstream in(path);
    if (!in) {
        std::fprintf(stderr, "warning: skipping unreadable file %s\n",
                     path.c_str());
        return;
    }
    std::string line;
    for (int i = 0; i < 6 && std::getline(in, line); ++i) {}  // header lines

    Trajectory t;
    t.id = path.stem().string();
    std::size_t row = 6;
    while (std::getline(in, line)) {
        ++row;
        if (strip(line).empty()) continue;
        Point p;
        if (!parse_plt_record(line, p)) {
            std::fprintf(stderr, "warning: %s:%zu: malformed record skipped\n",
                         path.c_str(), row);
            continue;
        }
        t.points.push_back(p);
    }
    if (!t.points.empty()) ds.trajectories.push_back(std::move(t));
}

}  // namespace

Dataset load_geolife(const std::string& root_dir) {
    if (!fs::is_directory(root_dir))
        throw FormatError("not a directory: " + root_dir);

    std::vector<fs::path> files;
    for (auto it = fs::recursive_directory_iterator(
             root_dir, fs::directory_options::skip_permission_denied);
         it != fs::recursive_directory_iterator(); ++it) {
        if (it->is_regular_file() && it->path().extension() == ".plt")
            files.push_back(it->path());
    }
    std::sort(files.begin(), files.end());

    Dataset ds;
    ds.name = "geolife";
    for (const auto& f : files) load_plt_file(f, ds);
    return ds;
}

Dataset preprocess(const Dataset& ds, const BoundingBox& bbox, int max_len,
                   int min_len) {
    if (min_len < 1 || max_len < min_len)
        throw ArgumentError("preprocess: require max_len >= min_len >= 1");

    Dataset out;
    out.name = ds.name;
    out.bbox = bbox;
    for (const auto& t : ds.trajectories) {
        Trajectory kept;
        kept.id = t.id;
        for (const auto& p : t.points) {
            if (!bbox.contains(p)) continue;
            kept.points.push_back(p);
            if (static_cast<int>(kept.points.size()) == max_len) break;
        }
        if (static_cast<int>(kept.points.size()) >= min_len)
            out.trajectories.push_back(std::move(kept));
    }
    return out;
}

std::vector<Fold> split_folds(const Dataset& ds, int k, std::uint64_t seed) {
    if (k < 2) throw ArgumentError("split_folds: k must be >= 2");
    const std::size_t n = ds.trajectories.size();
    if (n < static_cast<std::size_t>(k))
        throw ArgumentError("split_folds: dataset has fewer trajectories than k");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    // Fisher-Yates with an explicit draw so the permutation is stable across
    // standard libraries.
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(order[i], order[j]);
    }

    std::vector<Fold> folds(k);
    std::size_t base = n / k, extra = n % k, pos = 0;
    for (int f = 0; f < k; ++f) {
        std::size_t test_size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        std::vector<bool> in_test(n, false);
        for (std::size_t i = 0; i < test_size; ++i) in_test[order[pos + i]] = true;
        pos += test_size;

        Fold fold;
        fold.train.name = ds.name + "_fold" + std::to_string(f) + "_train";
        fold.test.name = ds.name + "_fold" + std::to_string(f) + "_test";
        fold.train.bbox = fold.test.bbox = ds.bbox;
        for (std::size_t i = 0; i < n; ++i)
            (in_test[i] ? fold.test : fold.train)
                .trajectories.push_back(ds.trajectories[i]);
        folds[f] = std::move(fold);
    }
    return folds;
}

Dataset make_toy_dataset(const ToySpec& spec, std::uint64_t seed) {
    if (spec.n_clusters < 1 || spec.trajectories_per_cluster < 1 ||
        spec.points_per_trajectory < 1 ||
        spec.points_per_trajectory > kMaxTrajectoryLength)
        throw ArgumentError("make_toy_dataset: invalid spec");

    std::vector<std::pair<double, double>> centers = spec.centers;
    if (centers.empty()) {
        for (int c = 0; c < spec.n_clusters; ++c) {
            double t = (c + 1.0) / (spec.n_clusters + 1.0);
            centers.emplace_back(t, t);
        }
    }
    for (auto& [cx, cy] : centers)
        if (cx < 0.0 || cx > 1.0 || cy < 0.0 || cy > 1.0)
            throw ArgumentError("make_toy_dataset: centers must lie in [0,1]^2");

    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        return (rng() >> 11) * (1.0 / 9007199254740992.0);  // [0,1)
    };
    auto gaussian = [&]() {
        // Box-Muller, stable across platforms.
        double u1 = std::max(uniform(), 1e-300), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    };

    Dataset ds;
    ds.name = "toy";
    ds.bbox = BoundingBox{0.0, 1.0, 0.0, 1.0};
    int id = 0;
    const int len = spec.points_per_trajectory;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (int i = 0; i < spec.trajectories_per_cluster; ++i, ++id) {
            Trajectory t;
            t.id = "toy_" + std::to_string(id);
            int day = static_cast<int>(rng() % 7);
            double x = centers[c].first + spec.spread * gaussian();
            double y = centers[c].second + spec.spread * gaussian();
            for (int j = 0; j < len; ++j) {
                x = std::clamp(x + 0.25 * spec.spread * gaussian(), 0.0, 1.0);
                y = std::clamp(y + 0.25 * spec.spread * gaussian(), 0.0, 1.0);
                Point p;
                p.lat = x;
                p.lon = y;
                p.day = day;
                p.hour = len > 1 ? (23 * j) / (len - 1) : 0;
                t.points.push_back(p);
            }
            ds.trajectories.push_back(std::move(t));
        }
    }
    return ds;
}

void save_dataset_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write file: " + path);
    out << "tid,lat,lon,day,hour\n";
    char buf[128];
    for (const auto& t : ds.trajectories) {
        for (const auto& p : t.points) {
            std::snprintf(buf, sizeof(buf), "%s,%.10f,%.10f,%d,%d\n",
                          t.id.c_str(), p.lat, p.lon, p.day, p.hour);
            out << buf;
        }
    }
}

}  // namespace trajgan
