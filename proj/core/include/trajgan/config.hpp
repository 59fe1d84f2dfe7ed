#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trajgan/data.hpp"
#include "trajgan/dp.hpp"
#include "trajgan/gan.hpp"
#include "trajgan/metrics.hpp"

namespace trajgan {

// INI-style text: [section] headers, key = value lines, # or ; comments.
// Values keep everything after '=' with surrounding whitespace stripped.
class IniFile {
public:
    static IniFile parse(const std::string& text);
    static IniFile load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    long get_long(const std::string& section, const std::string& key,
                  long fallback) const;
    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections()
        const {
        return sections_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

enum class DatasetKind { kFs, kGeolife, kCsv, kToy };

struct DatasetSpec {
    DatasetKind kind = DatasetKind::kToy;
    std::string path;
    BoundingBox bbox{0.0, 1.0, 0.0, 1.0};
    int min_len = 2;
    int max_len = kMaxTrajectoryLength;
    ToySpec toy;
};

struct ExperimentConfig {
    DatasetSpec dataset;
    gan::TrainConfig train;
    dp::DpConfig dp;
    MetricConfig metrics;
    int folds = 5;
    std::string out_dir = "out";
    int generate_count = 0;  // 0: match test fold point count

    // Parses and validates; unknown sections or keys raise ConfigError.
    static ExperimentConfig from_ini(const IniFile& ini);
    static ExperimentConfig load(const std::string& path);

    // The fully resolved configuration, re-serialized as INI text.
    std::string resolved_text() const;
};

// FNV-1a over bytes, hex string; used for manifest content hashes.
std::string content_hash(const std::string& bytes);
std::string file_hash(const std::string& path);

}  // namespace trajgan
