#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "trajgan/codec.hpp"
#include "trajgan/config.hpp"
#include "trajgan/experiment.hpp"
#include "trajgan/gan.hpp"
#include "trajgan/metrics.hpp"

namespace tg = trajgan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTraining = 3;

struct CommonOpts {
    std::string config_path;
    long seed = -1;
    std::string out;
    bool dp = false;
};

tg::ExperimentConfig load_config(const CommonOpts& o, bool required) {
    tg::ExperimentConfig cfg;
    if (!o.config_path.empty())
        cfg = tg::ExperimentConfig::load(o.config_path);
    else if (required)
        throw tg::ConfigError("--config is required for this subcommand");
    if (o.seed >= 0) cfg.train.seed = static_cast<std::uint64_t>(o.seed);
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (o.dp) cfg.dp.enabled = true;
    return cfg;
}

void add_common(CLI::App* app, CommonOpts& o) {
    app->add_option("--config", o.config_path, "experiment config file (INI)");
    app->add_option("--seed", o.seed, "override the config seed");
    app->add_option("--out", o.out, "override the output directory");
    app->add_flag("--dp", o.dp, "enable differentially private training");
}

int run_preprocess(const CommonOpts& o) {
    auto cfg = load_config(o, true);
    auto summary = tg::cmd_preprocess(cfg);
    std::cout << summary.to_text();
    std::cout << "dataset: " << summary.dataset_path << "\n";
    return kExitOk;
}

int run_train(const CommonOpts& o) {
    auto cfg = load_config(o, true);
    const tg::Dataset raw = tg::load_raw_dataset(cfg.dataset, cfg.train.seed);
    const tg::Dataset ds = tg::preprocess(raw, cfg.dataset.bbox,
                                          cfg.dataset.max_len,
                                          cfg.dataset.min_len);
    if (ds.trajectories.empty())
        throw tg::FormatError("no trajectories survive preprocessing");
    const auto spec = tg::NormalizationSpec::from_bbox(cfg.dataset.bbox);
    tg::gan::TrainConfig tcfg = cfg.train;
    tcfg.out_dir = cfg.out_dir;
    tg::dp::DpConfig dp_cfg = cfg.dp;
    const tg::dp::DpConfig* dpp = nullptr;
    if (dp_cfg.enabled) {
        if (dp_cfg.delta <= 0.0)
            dp_cfg.delta = tg::dp::recommended_delta(ds.size());
        dpp = &dp_cfg;
    }
    std::filesystem::create_directories(cfg.out_dir);
    tg::write_manifest(cfg, ds, cfg.out_dir + "/manifest.txt");
    auto result = tg::gan::train(tcfg, ds, spec, dpp);
    std::cout << "steps: " << result.steps_done << "\n";
    if (!result.log.empty()) {
        const auto& last = result.log.back();
        std::cout << "final loss_d: " << last.loss_d
                  << " loss_g: " << last.loss_g << "\n";
        if (last.swd >= 0.0) std::cout << "final swd: " << last.swd << "\n";
    }
    if (result.final_epsilon >= 0.0)
        std::cout << "epsilon: " << result.final_epsilon << "\n";
    std::cout << "checkpoints: " << cfg.out_dir << "\n";
    return kExitOk;
}

int run_generate(const CommonOpts& o, const std::string& checkpoint, int n) {
    auto cfg = load_config(o, true);
    const auto spec = tg::NormalizationSpec::from_bbox(cfg.dataset.bbox);
    tg::gan::GeneratorConfig gcfg;
    gcfg.base_channels = cfg.train.gen_base_channels;
    gcfg.norm = cfg.train.gen_norm;
    auto gen = tg::gan::build_generator<float>(gcfg, cfg.train.seed);
    tg::nn::load_checkpoint(gen, checkpoint);
    tg::Dataset out = tg::gan::generate(gen, n, cfg.train.seed, spec,
                                        gcfg.noise_dim, cfg.dataset.max_len);
    const std::string path =
        o.out.empty() ? "generated.csv" : o.out;
    tg::save_dataset_csv(out, path);
    std::cout << "wrote " << out.size() << " trajectories to " << path << "\n";
    return kExitOk;
}

int run_evaluate(const CommonOpts& o, const std::string& real_path,
                 const std::string& gen_path) {
    auto cfg = load_config(o, true);
    const tg::Dataset real = tg::load_fs_csv(real_path);
    const tg::Dataset gen = tg::load_fs_csv(gen_path);
    const auto spec = tg::NormalizationSpec::from_bbox(cfg.dataset.bbox);
    auto report = tg::evaluate(real, gen, spec, cfg.metrics);
    report.seed = cfg.metrics.seed;
    std::cout << report.to_json() << "\n";
    if (!o.out.empty()) std::ofstream(o.out) << report.to_json() << "\n";
    return kExitOk;
}

int run_experiment(const CommonOpts& o) {
    auto cfg = load_config(o, true);
    auto result = tg::cmd_experiment(cfg);
    for (const auto& e : result.fold_errors) std::cerr << e << "\n";
    std::cout << "reports: " << result.csv_path << "\n";
    if (result.reports.empty()) return kExitTraining;
    return kExitOk;
}

int run_export_pointcloud(const CommonOpts& o, const std::string& checkpoint,
                          int n) {
    auto cfg = load_config(o, true);
    const auto spec = tg::NormalizationSpec::from_bbox(cfg.dataset.bbox);
    tg::gan::GeneratorConfig gcfg;
    gcfg.base_channels = cfg.train.gen_base_channels;
    gcfg.norm = cfg.train.gen_norm;
    auto gen = tg::gan::build_generator<float>(gcfg, cfg.train.seed);
    tg::nn::load_checkpoint(gen, checkpoint);
    tg::Dataset out = tg::gan::generate(gen, n, cfg.train.seed, spec,
                                        gcfg.noise_dim, cfg.dataset.max_len);
    const std::string path = o.out.empty() ? "pointcloud.csv" : o.out;
    std::ofstream f(path);
    f << "lat,lon\n";
    char buf[64];
    for (const auto& t : out.trajectories)
        for (const auto& p : t.points) {
            std::snprintf(buf, sizeof(buf), "%.9f,%.9f\n", p.lat, p.lon);
            f << buf;
        }
    std::cout << "wrote " << path << "\n";
    return kExitOk;
}

int run_grad_check(const CommonOpts& o) {
    const std::uint64_t seed = o.seed >= 0 ? o.seed : 42;
    double worst = 0.0;
    auto report = [&](const std::string& name, double err) {
        std::printf("%-24s max rel err %.3e\n", name.c_str(), err);
        worst = std::max(worst, err);
    };
    {
        tg::nn::Sequential<double> m;
        m.add("conv", std::make_unique<tg::nn::Conv2d<double>>(3, 5, 4, 2, 1));
        tg::nn::Rng r(seed);
        for (auto* p : m.params()) r.fill_normal(p->value, 0.2);
        report("conv2d", tg::nn::grad_check(m, {2, 3, 8, 8}, seed + 1));
    }
    {
        tg::nn::Sequential<double> m;
        m.add("deconv",
              std::make_unique<tg::nn::ConvTranspose2d<double>>(3, 5, 4, 2, 1));
        tg::nn::Rng r(seed);
        for (auto* p : m.params()) r.fill_normal(p->value, 0.2);
        report("conv_transpose2d", tg::nn::grad_check(m, {2, 3, 4, 4}, seed + 2));
    }
    {
        tg::gan::DiscriminatorConfig dcfg;
        dcfg.base_channels = 4;
        dcfg.norm = tg::gan::NormKind::kGroup;
        auto m = tg::gan::build_discriminator<double>(dcfg, seed);
        report("discriminator", tg::nn::grad_check(m, {2, 4, 24, 24}, seed + 3));
    }
    {
        tg::gan::GeneratorConfig gcfg;
        gcfg.noise_dim = 8;
        gcfg.base_channels = 4;
        gcfg.norm = tg::gan::NormKind::kBatch;
        auto m = tg::gan::build_generator<double>(gcfg, seed);
        report("generator", tg::nn::grad_check(m, {2, 8}, seed + 4));
    }
    std::printf("worst %.3e\n", worst);
    return worst < 1e-4 ? kExitOk : kExitTraining;
}

int run_dp_account(double q, double sigma, long steps, double delta,
                   double epsilon_target) {
    if (epsilon_target > 0.0) {
        const double s =
            tg::dp::calibrate_sigma(epsilon_target, delta, q, steps);
        std::printf("sigma = %.2f\n", s);
        sigma = s;
    }
    tg::dp::PrivacyLedger ledger;
    ledger.q = q;
    ledger.sigma = sigma;
    ledger.steps = steps;
    std::printf("epsilon = %.6f at delta = %g\n",
                tg::dp::account(ledger, delta), delta);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GPS trajectory GAN toolkit"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string checkpoint, real_path, gen_path;
    int n_samples = 70;
    double q = 0.01, sigma = 0.0, delta = 1e-5, epsilon_target = 0.0;
    long steps = 10000;

    auto* c_pre = app.add_subcommand("preprocess", "build a dataset artifact");
    add_common(c_pre, common);

    auto* c_train = app.add_subcommand("train", "train a GAN on a dataset");
    add_common(c_train, common);

    auto* c_gen = app.add_subcommand("generate", "sample trajectories");
    add_common(c_gen, common);
    c_gen->add_option("--checkpoint", checkpoint, "generator checkpoint")
        ->required();
    c_gen->add_option("-n,--count", n_samples, "trajectories to generate");

    auto* c_eval = app.add_subcommand("evaluate", "compare generated to real");
    add_common(c_eval, common);
    c_eval->add_option("--real", real_path, "real dataset CSV")->required();
    c_eval->add_option("--generated", gen_path, "generated dataset CSV")
        ->required();

    auto* c_exp = app.add_subcommand("experiment", "k-fold train/evaluate");
    add_common(c_exp, common);

    auto* c_pc = app.add_subcommand("export-pointcloud",
                                    "decode generated locations to CSV");
    add_common(c_pc, common);
    c_pc->add_option("--checkpoint", checkpoint, "generator checkpoint")
        ->required();
    c_pc->add_option("-n,--count", n_samples, "trajectories to generate");

    auto* c_gc = app.add_subcommand("grad-check",
                                    "finite-difference gradient checks");
    add_common(c_gc, common);

    auto* c_dp = app.add_subcommand("dp-account", "RDP privacy accounting");
    c_dp->add_option("--q", q, "sampling rate");
    c_dp->add_option("--sigma", sigma, "noise multiplier");
    c_dp->add_option("--steps", steps, "mechanism invocations");
    c_dp->add_option("--delta", delta, "target delta");
    c_dp->add_option("--epsilon", epsilon_target,
                     "calibrate sigma for this epsilon instead");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_pre->parsed()) return run_preprocess(common);
        if (c_train->parsed()) return run_train(common);
        if (c_gen->parsed()) return run_generate(common, checkpoint, n_samples);
        if (c_eval->parsed()) return run_evaluate(common, real_path, gen_path);
        if (c_exp->parsed()) return run_experiment(common);
        if (c_pc->parsed())
            return run_export_pointcloud(common, checkpoint, n_samples);
        if (c_gc->parsed()) return run_grad_check(common);
        if (c_dp->parsed())
            return run_dp_account(q, sigma, steps, delta, epsilon_target);
    } catch (const tg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tg::TrainingError& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return kExitTraining;
    } catch (const tg::FormatError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const tg::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
