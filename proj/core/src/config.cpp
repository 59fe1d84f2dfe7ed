#include "trajgan/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace trajgan {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

IniFile IniFile::parse(const std::string& text) {
    IniFile out;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            out.sections_[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key");
        out.sections_[section][key] = value;
    }
    return out;
}

IniFile IniFile::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string IniFile::get(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: [" + section + "] " + key +
                          " is not a number: " + v);
    }
}

long IniFile::get_long(const std::string& section, const std::string& key,
                       long fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: [" + section + "] " + key +
                          " is not an integer: " + v);
    }
}

bool IniFile::get_bool(const std::string& section, const std::string& key,
                       bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: [" + section + "] " + key +
                      " is not a boolean: " + v);
}

namespace {

const std::map<std::string, std::set<std::string>> kSchema = {
    {"dataset",
     {"kind", "path", "bbox", "min_len", "max_len", "toy_clusters",
      "toy_trajectories_per_cluster", "toy_points_per_trajectory",
      "toy_spread", "toy_centers"}},
    {"train",
     {"batch_size", "steps", "lr", "generator_factor", "milestones",
      "lr_factor", "smooth_real", "smooth_fake", "loss", "n_critic",
      "lambda_lp", "gen_base_channels", "disc_base_channels", "gen_norm",
      "disc_norm", "seed", "snapshot_every", "snapshot_trajectories",
      "snapshot_projections"}},
    {"dp",
     {"enabled", "epsilon", "delta", "clip_norm", "noise_multiplier",
      "calibrate", "scale_factor", "target"}},
    {"metrics", {"n_projections", "sample_size", "seed"}},
    {"experiment", {"folds", "out_dir", "generate_count"}},
};

void check_schema(const IniFile& ini) {
    for (const auto& [section, keys] : ini.sections()) {
        auto it = kSchema.find(section);
        if (it == kSchema.end())
            throw ConfigError("config: unknown section [" + section + "]");
        for (const auto& [key, value] : keys)
            if (!it->second.count(key))
                throw ConfigError("config: unknown key '" + key +
                                  "' in section [" + section + "]");
    }
}

std::vector<double> parse_number_list(const std::string& s,
                                      const std::string& what) {
    std::vector<double> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) {
        cur = trim(cur);
        if (cur.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(cur, &pos));
            if (pos != cur.size()) throw std::invalid_argument(cur);
        } catch (const std::exception&) {
            throw ConfigError("config: bad number '" + cur + "' in " + what);
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_ini(const IniFile& ini) {
    check_schema(ini);
    ExperimentConfig cfg;

    const std::string kind = ini.get("dataset", "kind", "toy");
    if (kind == "fs")
        cfg.dataset.kind = DatasetKind::kFs;
    else if (kind == "geolife")
        cfg.dataset.kind = DatasetKind::kGeolife;
    else if (kind == "csv")
        cfg.dataset.kind = DatasetKind::kCsv;
    else if (kind == "toy")
        cfg.dataset.kind = DatasetKind::kToy;
    else
        throw ConfigError("config: unknown dataset kind: " + kind);
    cfg.dataset.path = ini.get("dataset", "path", "");
    if (cfg.dataset.kind != DatasetKind::kToy && cfg.dataset.path.empty())
        throw ConfigError("config: dataset path is required for kind " + kind);

    if (ini.has("dataset", "bbox")) {
        const auto b =
            parse_number_list(ini.get("dataset", "bbox", ""), "dataset.bbox");
        if (b.size() != 4)
            throw ConfigError(
                "config: bbox needs 4 numbers (lat_min, lat_max, lon_min, "
                "lon_max)");
        cfg.dataset.bbox = BoundingBox{b[0], b[1], b[2], b[3]};
    } else if (cfg.dataset.kind == DatasetKind::kFs) {
        cfg.dataset.bbox = kFsNycBBox;
    } else if (cfg.dataset.kind == DatasetKind::kGeolife) {
        cfg.dataset.bbox = kGeolifeBBox;
    }
    if (cfg.dataset.bbox.lat_min >= cfg.dataset.bbox.lat_max ||
        cfg.dataset.bbox.lon_min >= cfg.dataset.bbox.lon_max)
        throw ConfigError("config: degenerate bbox");

    cfg.dataset.min_len =
        static_cast<int>(ini.get_long("dataset", "min_len", 2));
    cfg.dataset.max_len = static_cast<int>(
        ini.get_long("dataset", "max_len", kMaxTrajectoryLength));
    if (cfg.dataset.min_len < 1 || cfg.dataset.max_len < cfg.dataset.min_len ||
        cfg.dataset.max_len > kMaxTrajectoryLength)
        throw ConfigError("config: invalid min_len/max_len");

    cfg.dataset.toy.n_clusters =
        static_cast<int>(ini.get_long("dataset", "toy_clusters", 2));
    cfg.dataset.toy.trajectories_per_cluster = static_cast<int>(
        ini.get_long("dataset", "toy_trajectories_per_cluster", 250));
    cfg.dataset.toy.points_per_trajectory = static_cast<int>(
        ini.get_long("dataset", "toy_points_per_trajectory", 144));
    cfg.dataset.toy.spread = ini.get_double("dataset", "toy_spread", 0.03);
    if (ini.has("dataset", "toy_centers")) {
        const auto c = parse_number_list(ini.get("dataset", "toy_centers", ""),
                                         "dataset.toy_centers");
        if (c.size() % 2 != 0)
            throw ConfigError("config: toy_centers needs lat,lon pairs");
        for (std::size_t i = 0; i + 1 < c.size(); i += 2) {
            if (c[i] < 0.0 || c[i] > 1.0 || c[i + 1] < 0.0 || c[i + 1] > 1.0)
                throw ConfigError(
                    "config: toy centers must lie in the unit square");
            cfg.dataset.toy.centers.emplace_back(c[i], c[i + 1]);
        }
        cfg.dataset.toy.n_clusters =
            static_cast<int>(cfg.dataset.toy.centers.size());
    }
    if (cfg.dataset.toy.n_clusters < 1 ||
        cfg.dataset.toy.trajectories_per_cluster < 1 ||
        cfg.dataset.toy.points_per_trajectory < 2 ||
        cfg.dataset.toy.points_per_trajectory > kMaxTrajectoryLength)
        throw ConfigError("config: invalid toy dataset spec");

    auto& t = cfg.train;
    t.batch_size = static_cast<int>(ini.get_long("train", "batch_size", 64));
    t.steps = ini.get_long("train", "steps", 10000);
    t.lr = ini.get_double("train", "lr", 2e-4);
    t.generator_factor = ini.get_double("train", "generator_factor", 1.0);
    if (ini.has("train", "milestones")) {
        t.milestones.clear();
        for (double m :
             parse_number_list(ini.get("train", "milestones", ""),
                               "train.milestones"))
            t.milestones.push_back(static_cast<long>(m));
    }
    t.lr_factor = ini.get_double("train", "lr_factor", 0.1);
    t.smooth_real = ini.get_double("train", "smooth_real", 0.9);
    t.smooth_fake = ini.get_double("train", "smooth_fake", 0.1);
    t.loss = gan::loss_kind_from_string(ini.get("train", "loss", "adversarial"));
    t.n_critic = static_cast<int>(ini.get_long("train", "n_critic", 5));
    t.lambda_lp = ini.get_double("train", "lambda_lp", 10.0);
    t.gen_base_channels =
        static_cast<int>(ini.get_long("train", "gen_base_channels", 64));
    t.disc_base_channels =
        static_cast<int>(ini.get_long("train", "disc_base_channels", 64));
    t.gen_norm = gan::norm_kind_from_string(ini.get("train", "gen_norm", "batch"));
    t.disc_norm =
        gan::norm_kind_from_string(ini.get("train", "disc_norm", "batch"));
    t.seed = static_cast<std::uint64_t>(ini.get_long("train", "seed", 42));
    t.snapshot_every = ini.get_long("train", "snapshot_every", 1000);
    t.snapshot_trajectories =
        static_cast<int>(ini.get_long("train", "snapshot_trajectories", 70));
    t.snapshot_projections =
        static_cast<int>(ini.get_long("train", "snapshot_projections", 50));
    t.max_len = cfg.dataset.max_len;
    if (t.batch_size < 1 || t.steps < 0 || t.lr <= 0.0 || t.n_critic < 1 ||
        t.smooth_real <= t.smooth_fake)
        throw ConfigError("config: invalid train settings");

    auto& d = cfg.dp;
    d.enabled = ini.get_bool("dp", "enabled", false);
    d.epsilon_target = ini.get_double("dp", "epsilon", 10.0);
    d.delta = ini.get_double("dp", "delta", 0.0);  // 0: derive from n at run time
    d.clip_norm = ini.get_double("dp", "clip_norm", 0.1);
    d.noise_multiplier = ini.get_double("dp", "noise_multiplier", 0.0);
    d.calibrate = ini.get_bool("dp", "calibrate", true);
    d.scale_factor = ini.get_double("dp", "scale_factor", 10.0);
    const std::string target = ini.get("dp", "target", "generator");
    if (target == "generator")
        d.target = dp::DpTarget::kGenerator;
    else if (target == "discriminator")
        d.target = dp::DpTarget::kDiscriminator;
    else
        throw ConfigError("config: unknown dp target: " + target);

    cfg.metrics.n_projections =
        static_cast<int>(ini.get_long("metrics", "n_projections", 100));
    cfg.metrics.swd_sample_size =
        static_cast<int>(ini.get_long("metrics", "sample_size", 10000));
    cfg.metrics.seed =
        static_cast<std::uint64_t>(ini.get_long("metrics", "seed", 7));
    if (cfg.metrics.n_projections < 1 || cfg.metrics.swd_sample_size < 1)
        throw ConfigError("config: invalid metric settings");

    cfg.folds = static_cast<int>(ini.get_long("experiment", "folds", 5));
    cfg.out_dir = ini.get("experiment", "out_dir", "out");
    cfg.generate_count =
        static_cast<int>(ini.get_long("experiment", "generate_count", 0));
    if (cfg.folds < 2) throw ConfigError("config: folds must be >= 2");

    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    return from_ini(IniFile::load(path));
}

std::string ExperimentConfig::resolved_text() const {
    std::ostringstream o;
    o << "[dataset]\n";
    const char* kind = "toy";
    switch (dataset.kind) {
        case DatasetKind::kFs: kind = "fs"; break;
        case DatasetKind::kGeolife: kind = "geolife"; break;
        case DatasetKind::kCsv: kind = "csv"; break;
        case DatasetKind::kToy: kind = "toy"; break;
    }
    o << "kind = " << kind << "\n";
    if (!dataset.path.empty()) o << "path = " << dataset.path << "\n";
    o << "bbox = " << fmt(dataset.bbox.lat_min) << ", "
      << fmt(dataset.bbox.lat_max) << ", " << fmt(dataset.bbox.lon_min) << ", "
      << fmt(dataset.bbox.lon_max) << "\n";
    o << "min_len = " << dataset.min_len << "\n";
    o << "max_len = " << dataset.max_len << "\n";
    if (dataset.kind == DatasetKind::kToy) {
        o << "toy_clusters = " << dataset.toy.n_clusters << "\n";
        o << "toy_trajectories_per_cluster = "
          << dataset.toy.trajectories_per_cluster << "\n";
        o << "toy_points_per_trajectory = "
          << dataset.toy.points_per_trajectory << "\n";
        o << "toy_spread = " << fmt(dataset.toy.spread) << "\n";
        if (!dataset.toy.centers.empty()) {
            o << "toy_centers = ";
            for (std::size_t i = 0; i < dataset.toy.centers.size(); ++i) {
                if (i) o << ", ";
                o << fmt(dataset.toy.centers[i].first) << ", "
                  << fmt(dataset.toy.centers[i].second);
            }
            o << "\n";
        }
    }

    o << "\n[train]\n";
    o << "batch_size = " << train.batch_size << "\n";
    o << "steps = " << train.steps << "\n";
    o << "lr = " << fmt(train.lr) << "\n";
    o << "generator_factor = " << fmt(train.generator_factor) << "\n";
    o << "milestones = ";
    for (std::size_t i = 0; i < train.milestones.size(); ++i) {
        if (i) o << ", ";
        o << train.milestones[i];
    }
    o << "\n";
    o << "lr_factor = " << fmt(train.lr_factor) << "\n";
    o << "smooth_real = " << fmt(train.smooth_real) << "\n";
    o << "smooth_fake = " << fmt(train.smooth_fake) << "\n";
    const char* loss = "adversarial";
    if (train.loss == gan::LossKind::kWgan) loss = "wgan";
    if (train.loss == gan::LossKind::kWganLp) loss = "wgan_lp";
    o << "loss = " << loss << "\n";
    o << "n_critic = " << train.n_critic << "\n";
    o << "lambda_lp = " << fmt(train.lambda_lp) << "\n";
    o << "gen_base_channels = " << train.gen_base_channels << "\n";
    o << "disc_base_channels = " << train.disc_base_channels << "\n";
    auto norm_name = [](gan::NormKind n) {
        return n == gan::NormKind::kBatch
                   ? "batch"
                   : (n == gan::NormKind::kGroup ? "group" : "none");
    };
    o << "gen_norm = " << norm_name(train.gen_norm) << "\n";
    o << "disc_norm = " << norm_name(train.disc_norm) << "\n";
    o << "seed = " << train.seed << "\n";
    o << "snapshot_every = " << train.snapshot_every << "\n";
    o << "snapshot_trajectories = " << train.snapshot_trajectories << "\n";
    o << "snapshot_projections = " << train.snapshot_projections << "\n";

    o << "\n[dp]\n";
    o << "enabled = " << (dp.enabled ? "true" : "false") << "\n";
    o << "epsilon = " << fmt(dp.epsilon_target) << "\n";
    o << "delta = " << fmt(dp.delta) << "\n";
    o << "clip_norm = " << fmt(dp.clip_norm) << "\n";
    o << "noise_multiplier = " << fmt(dp.noise_multiplier) << "\n";
    o << "calibrate = " << (dp.calibrate ? "true" : "false") << "\n";
    o << "scale_factor = " << fmt(dp.scale_factor) << "\n";
    o << "target = "
      << (dp.target == dp::DpTarget::kGenerator ? "generator" : "discriminator")
      << "\n";

    o << "\n[metrics]\n";
    o << "n_projections = " << metrics.n_projections << "\n";
    o << "sample_size = " << metrics.swd_sample_size << "\n";
    o << "seed = " << metrics.seed << "\n";

    o << "\n[experiment]\n";
    o << "folds = " << folds << "\n";
    o << "out_dir = " << out_dir << "\n";
    o << "generate_count = " << generate_count << "\n";
    return o.str();
}

std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

std::string file_hash(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open file for hashing: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return content_hash(ss.str());
}

}  // namespace trajgan
