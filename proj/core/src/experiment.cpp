#include "trajgan/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace trajgan {

namespace fs = std::filesystem;

Dataset load_raw_dataset(const DatasetSpec& spec, std::uint64_t seed) {
    switch (spec.kind) {
        case DatasetKind::kFs:
        case DatasetKind::kCsv:
            return load_fs_csv(spec.path);
        case DatasetKind::kGeolife:
            return load_geolife(spec.path);
        case DatasetKind::kToy:
            return make_toy_dataset(spec.toy, seed);
    }
    throw ConfigError("load_raw_dataset: unknown dataset kind");
}

std::string PreprocessSummary::to_text() const {
    std::ostringstream o;
    o << "raw_trajectories: " << raw_trajectories << "\n";
    o << "kept_trajectories: " << kept_trajectories << "\n";
    o << "kept_points: " << kept_points << "\n";
    o << "length_histogram:\n";
    for (std::size_t len = 0; len < length_histogram.size(); ++len)
        if (length_histogram[len] > 0)
            o << "  " << len << ": " << length_histogram[len] << "\n";
    return o.str();
}

PreprocessSummary cmd_preprocess(const ExperimentConfig& cfg) {
    const Dataset raw = load_raw_dataset(cfg.dataset, cfg.train.seed);
    Dataset clean = preprocess(raw, cfg.dataset.bbox, cfg.dataset.max_len,
                               cfg.dataset.min_len);
    clean.name = raw.name;

    PreprocessSummary s;
    s.raw_trajectories = raw.size();
    s.kept_trajectories = clean.size();
    s.kept_points = clean.total_points();
    s.length_histogram.assign(cfg.dataset.max_len + 1, 0);
    for (const auto& t : clean.trajectories) ++s.length_histogram[t.size()];

    fs::create_directories(cfg.out_dir);
    s.dataset_path = cfg.out_dir + "/dataset.csv";
    save_dataset_csv(clean, s.dataset_path);
    std::ofstream(cfg.out_dir + "/preprocess_summary.txt") << s.to_text();
    return s;
}

void write_manifest(const ExperimentConfig& cfg, const Dataset& dataset,
                    const std::string& path) {
    std::ostringstream data;
    for (const auto& t : dataset.trajectories) {
        data << t.id << '\n';
        for (const auto& p : t.points)
            data << p.lat << ',' << p.lon << ',' << p.day << ',' << p.hour
                 << '\n';
    }
    std::ofstream f(path);
    f << "# run manifest\n";
    f << "dataset_name = " << dataset.name << "\n";
    f << "dataset_trajectories = " << dataset.size() << "\n";
    f << "dataset_hash = " << content_hash(data.str()) << "\n\n";
    f << cfg.resolved_text();
}

ExperimentResult cmd_experiment(const ExperimentConfig& cfg) {
    const std::uint64_t seed = cfg.train.seed;
    const Dataset raw = load_raw_dataset(cfg.dataset, seed);
    const Dataset clean = preprocess(raw, cfg.dataset.bbox, cfg.dataset.max_len,
                                     cfg.dataset.min_len);
    if (clean.size() < static_cast<std::size_t>(cfg.folds))
        throw FormatError("experiment: fewer trajectories than folds");

    fs::create_directories(cfg.out_dir);
    write_manifest(cfg, clean, cfg.out_dir + "/manifest.txt");

    const NormalizationSpec spec = NormalizationSpec::from_bbox(cfg.dataset.bbox);
    const auto folds = split_folds(clean, cfg.folds, seed);

    dp::DpConfig dp_cfg = cfg.dp;
    ExperimentResult res;
    for (int f = 0; f < cfg.folds; ++f) {
        const std::string fold_dir =
            cfg.out_dir + "/fold" + std::to_string(f);
        try {
            gan::TrainConfig tcfg = cfg.train;
            tcfg.seed = seed + static_cast<std::uint64_t>(100) * (f + 1);
            tcfg.out_dir = fold_dir;

            const dp::DpConfig* dpp = nullptr;
            if (dp_cfg.enabled) {
                if (cfg.dp.delta <= 0.0)
                    dp_cfg.delta = dp::recommended_delta(folds[f].train.size());
                dpp = &dp_cfg;
            }
            gan::TrainResult tr = gan::train(tcfg, folds[f].train, spec, dpp);

            int n_gen = cfg.generate_count;
            if (n_gen <= 0) {
                const std::size_t test_pts = folds[f].test.total_points();
                n_gen = static_cast<int>(
                    (test_pts + kMaxTrajectoryLength - 1) /
                    kMaxTrajectoryLength);
                n_gen = std::max(n_gen, 1);
            }
            Dataset gen = gan::generate(tr.generator, n_gen, tcfg.seed + 9,
                                        spec, 100, tcfg.max_len);
            save_dataset_csv(gen, fold_dir + "/generated.csv");

            MetricConfig mcfg = cfg.metrics;
            mcfg.seed = cfg.metrics.seed + static_cast<std::uint64_t>(f);
            MetricsReport rep = evaluate(folds[f].test, gen, spec, mcfg);
            rep.fold = f;
            rep.steps = tr.steps_done;
            rep.seed = tcfg.seed;
            res.reports.push_back(rep);
            std::ofstream(fold_dir + "/report.json") << rep.to_json() << "\n";
        } catch (const std::exception& e) {
            res.fold_errors.push_back("fold " + std::to_string(f) + ": " +
                                      e.what());
        }
    }

    res.csv_path = cfg.out_dir + "/reports.csv";
    save_reports_csv(res.reports, res.csv_path, true);
    if (!res.fold_errors.empty()) {
        std::ofstream ef(cfg.out_dir + "/fold_errors.txt");
        for (const auto& e : res.fold_errors) ef << e << "\n";
    }
    return res;
}

}  // namespace trajgan
