#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "trajgan/config.hpp"
#include "trajgan/experiment.hpp"

using namespace trajgan;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const char* kToyIni = R"ini(
[dataset]
kind = toy
toy_clusters = 2
toy_trajectories_per_cluster = 10
toy_points_per_trajectory = 20

[train]
steps = 1
batch_size = 4
gen_base_channels = 8
disc_base_channels = 8
snapshot_every = 0
snapshot_trajectories = 4
snapshot_projections = 5
seed = 3

[metrics]
n_projections = 10
sample_size = 500
seed = 7

[experiment]
folds = 3
generate_count = 2
)ini";

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("ini parsing, comments and whitespace") {
    IniFile ini = IniFile::parse(
        "# comment\n[train]\n  lr = 2e-4  \n; also comment\nsteps=100\n");
    CHECK(ini.get_double("train", "lr", 0.0) == 2e-4);
    CHECK(ini.get_long("train", "steps", 0) == 100);
    CHECK(ini.get_long("train", "missing", 5) == 5);
}

TEST_CASE("ini rejects malformed lines") {
    CHECK_THROWS_AS(IniFile::parse("[train\nlr = 1\n"), ConfigError);
    CHECK_THROWS_AS(IniFile::parse("[train]\nno equals sign\n"), ConfigError);
    CHECK_THROWS_AS(IniFile::parse("[train]\n= 3\n"), ConfigError);
}

TEST_CASE("defaults mirror the hyperparameter table") {
    ExperimentConfig cfg = ExperimentConfig::from_ini(IniFile::parse(""));
    CHECK(cfg.train.batch_size == 64);
    CHECK(cfg.train.steps == 10000);
    CHECK(cfg.train.lr == 2e-4);
    CHECK(cfg.train.milestones == std::vector<long>{4000});
    CHECK(cfg.train.lr_factor == 0.1);
    CHECK(cfg.train.smooth_real == 0.9);
    CHECK(cfg.train.smooth_fake == 0.1);
    CHECK(cfg.train.loss == gan::LossKind::kAdversarial);
    CHECK(cfg.train.lambda_lp == 10.0);
    CHECK(cfg.dp.epsilon_target == 10.0);
    CHECK(cfg.dp.clip_norm == 0.1);
    CHECK(cfg.dp.scale_factor == 10.0);
    CHECK(cfg.metrics.n_projections == 100);
    CHECK(cfg.metrics.swd_sample_size == 10000);
    CHECK(cfg.folds == 5);
}

TEST_CASE("unknown keys and sections are rejected") {
    CHECK_THROWS_AS(
        ExperimentConfig::from_ini(IniFile::parse("[train]\nlearning = 1\n")),
        ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_ini(IniFile::parse("[nonsense]\nx = 1\n")),
        ConfigError);
}

TEST_CASE("value validation") {
    CHECK_THROWS_AS(
        ExperimentConfig::from_ini(IniFile::parse("[train]\nlr = fast\n")),
        ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_ini(IniFile::parse("[train]\nbatch_size = 0\n")),
        ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_ini(IniFile::parse(
                        "[dataset]\nbbox = 1, 0, 0, 1\n")),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_ini(IniFile::parse(
                        "[dataset]\nkind = fs\n")),
                    ConfigError);  // missing path
    CHECK_THROWS_AS(ExperimentConfig::from_ini(IniFile::parse(
                        "[dataset]\ntoy_centers = 2, 0.5\n")),
                    ConfigError);  // center outside the unit square
}

TEST_CASE("dataset kinds come with default bboxes") {
    ExperimentConfig cfg = ExperimentConfig::from_ini(
        IniFile::parse("[dataset]\nkind = fs\npath = x.csv\n"));
    CHECK(cfg.dataset.bbox.lat_min == 40.6811);
    CHECK(cfg.dataset.bbox.lon_max == -73.8585);
    ExperimentConfig geo = ExperimentConfig::from_ini(
        IniFile::parse("[dataset]\nkind = geolife\npath = d\n"));
    CHECK(geo.dataset.bbox.lat_max == 39.9877);
    CHECK(geo.dataset.bbox.lon_min == 116.2676);
}

TEST_CASE("resolved text round trips to the same config") {
    ExperimentConfig cfg = ExperimentConfig::from_ini(IniFile::parse(kToyIni));
    ExperimentConfig back =
        ExperimentConfig::from_ini(IniFile::parse(cfg.resolved_text()));
    CHECK(back.resolved_text() == cfg.resolved_text());
    CHECK(back.train.seed == 3);
    CHECK(back.folds == 3);
}

TEST_CASE("content hash is stable and sensitive") {
    CHECK(content_hash("abc") == content_hash("abc"));
    CHECK(content_hash("abc") != content_hash("abd"));
}

TEST_CASE("cmd_preprocess writes artifact and summary") {
    ExperimentConfig cfg = ExperimentConfig::from_ini(IniFile::parse(kToyIni));
    cfg.out_dir = "test_cfg_out_pre";
    auto s = cmd_preprocess(cfg);
    CHECK(s.raw_trajectories == 20);
    CHECK(s.kept_trajectories == 20);
    CHECK(s.length_histogram[20] == 20);
    CHECK(std::filesystem::exists(s.dataset_path));
    Dataset back = load_fs_csv(s.dataset_path);
    CHECK(back.size() == 20);
    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("cmd_experiment writes one row per fold plus aggregate") {
    ExperimentConfig cfg = ExperimentConfig::from_ini(IniFile::parse(kToyIni));
    cfg.out_dir = "test_cfg_out_exp";
    auto res = cmd_experiment(cfg);
    CHECK(res.fold_errors.empty());
    REQUIRE(res.reports.size() == 3);
    const std::string csv = slurp(res.csv_path);
    // header + 3 fold rows + aggregate mean/std.
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 5);
    CHECK(std::filesystem::exists(cfg.out_dir + "/manifest.txt"));
    CHECK(std::filesystem::exists(cfg.out_dir + "/fold0/generated.csv"));
    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("cmd_experiment is byte-identical across runs") {
    ExperimentConfig cfg = ExperimentConfig::from_ini(IniFile::parse(kToyIni));
    cfg.folds = 2;
    cfg.out_dir = "test_cfg_out_det1";
    auto r1 = cmd_experiment(cfg);
    const std::string csv1 = slurp(r1.csv_path);
    const std::string log1 = slurp(cfg.out_dir + "/fold0/train_log.jsonl");
    std::filesystem::remove_all(cfg.out_dir);
    cfg.out_dir = "test_cfg_out_det2";
    auto r2 = cmd_experiment(cfg);
    CHECK(slurp(r2.csv_path) == csv1);
    CHECK(slurp(cfg.out_dir + "/fold0/train_log.jsonl") == log1);
    std::filesystem::remove_all(cfg.out_dir);
}

TEST_SUITE_END();
