#pragma once

#include <string>
#include <vector>

#include "trajgan/config.hpp"
#include "trajgan/gan.hpp"
#include "trajgan/metrics.hpp"

namespace trajgan {

// Loads the raw dataset named by spec (fs, geolife, csv, or synthetic toy)
// without preprocessing. Toy datasets are generated under `seed`.
Dataset load_raw_dataset(const DatasetSpec& spec, std::uint64_t seed);

struct PreprocessSummary {
    std::size_t raw_trajectories = 0;
    std::size_t kept_trajectories = 0;
    std::size_t kept_points = 0;
    std::vector<std::size_t> length_histogram;  // index = length, 0..max_len
    std::string dataset_path;

    std::string to_text() const;
};

// Load, bbox-filter, truncate, write the canonical CSV plus a summary file
// into cfg.out_dir.
PreprocessSummary cmd_preprocess(const ExperimentConfig& cfg);

struct ExperimentResult {
    std::vector<MetricsReport> reports;  // one per completed fold
    std::vector<std::string> fold_errors;  // "fold N: message" for failures
    std::string csv_path;
};

// K-fold pipeline: per fold train -> generate (enough trajectories to cover
// the test fold's point count) -> evaluate -> report row. A failed fold is
// recorded and skipped; remaining folds still run. Writes reports.csv with an
// aggregate row plus a manifest of the resolved config and input hashes.
ExperimentResult cmd_experiment(const ExperimentConfig& cfg);

// Resolved config, seeds and input content hashes for bit-identical re-runs.
void write_manifest(const ExperimentConfig& cfg, const Dataset& dataset,
                    const std::string& path);

}  // namespace trajgan
