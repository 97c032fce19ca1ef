// emuq command-line front end: declarative configs in, CSV/JSON artifacts out.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "emuq/emuq.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::string out_dir;
    std::string method;
    std::size_t n_samples = 0;
    long long seed = -1;
    int degree = -1;
    double oversampling = 0.0;
    unsigned workers = 0;
    double threshold = -1.0;
    bool compare = false;
};

emuq::RunConfig load_with_overrides(const CliOverrides& cli) {
    emuq::RunConfig cfg = emuq::load_config(cli.config_path);
    if (!cli.out_dir.empty()) cfg.output_dir = cli.out_dir;
    if (!cli.method.empty()) {
        if (cli.method == "mc")
            cfg.method.method = emuq::GsaMethod::MonteCarlo;
        else if (cli.method == "pce")
            cfg.method.method = emuq::GsaMethod::Pce;
        else
            throw emuq::config_error("--method must be mc or pce");
    }
    if (cli.n_samples > 0) cfg.method.n_samples = cli.n_samples;
    if (cli.seed >= 0) cfg.method.seed = static_cast<std::uint64_t>(cli.seed);
    if (cli.degree >= 0) cfg.method.degree = static_cast<unsigned>(cli.degree);
    if (cli.oversampling >= 1.0) cfg.method.oversampling = cli.oversampling;
    if (cli.workers > 0) cfg.workers = cli.workers;
    if (cli.threshold >= 0.0) cfg.reduction_threshold = cli.threshold;
    if (cli.compare) cfg.compare = true;
    if (cfg.method.method == emuq::GsaMethod::MonteCarlo && cfg.method.n_samples == 0)
        throw emuq::config_error("config: 'method.n_samples' is required when method.kind = \"mc\"");
    return cfg;
}

void add_common(CLI::App* cmd, CliOverrides& cli) {
    cmd->add_option("-c,--config", cli.config_path, "run configuration file (TOML-style or JSON)")
        ->required();
    cmd->add_option("-o,--out", cli.out_dir, "output directory (overrides output.directory)");
    cmd->add_option("--method", cli.method, "estimation method override: mc or pce");
    cmd->add_option("--samples", cli.n_samples, "sample size override");
    cmd->add_option("--seed", cli.seed, "random seed override");
    cmd->add_option("--degree", cli.degree, "PCE total degree override");
    cmd->add_option("--oversampling", cli.oversampling, "PCE oversampling override");
    cmd->add_option("--workers", cli.workers,
                    "worker threads (default: EMUQ_WORKERS or hardware concurrency)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Efficiency-map uncertainty quantification and global sensitivity analysis "
                 "for PMSM equivalent-circuit models"};
    app.require_subcommand(1);

    CliOverrides cli;
    auto* cmd_map = app.add_subcommand("map", "nominal efficiency map and torque envelope");
    add_common(cmd_map, cli);
    auto* cmd_uq = app.add_subcommand("uq", "mean/std efficiency fields under input uncertainty");
    add_common(cmd_uq, cli);
    cmd_uq->add_flag("--compare", cli.compare,
                     "also run the other method and export |difference| fields");
    auto* cmd_gsa =
        app.add_subcommand("gsa", "per-point Sobol' indices and generalized sensitivity indices");
    add_common(cmd_gsa, cli);
    auto* cmd_reduce =
        app.add_subcommand("reduce", "fix non-influential parameters and validate by MAE");
    add_common(cmd_reduce, cli);
    cmd_reduce->add_option("--threshold", cli.threshold,
                           "generalized-total-index selection threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const emuq::RunConfig cfg = load_with_overrides(cli);
        if (cmd_map->parsed()) {
            const auto res = emuq::run_map(cfg);
            std::printf("map: %zu operating points -> %s\n", res.opset.size(),
                        cfg.output_dir.string().c_str());
        } else if (cmd_uq->parsed()) {
            const auto res = emuq::run_uq(cfg);
            std::printf("uq: %zu points, %llu model evaluations -> %s\n", res.opset.size(),
                        static_cast<unsigned long long>(res.cost.total()),
                        cfg.output_dir.string().c_str());
        } else if (cmd_gsa->parsed()) {
            const auto res = emuq::run_gsa(cfg);
            std::printf("gsa: generalized indices (first/total)\n");
            for (std::size_t n = 0; n < res.sensitivity.n_params; ++n)
                std::printf("  %-8s G = %.6f / %.6f\n", res.sensitivity.param_names[n].c_str(),
                            res.sensitivity.generalized_first[n],
                            res.sensitivity.generalized_total[n]);
            std::printf("artifacts -> %s\n", cfg.output_dir.string().c_str());
        } else if (cmd_reduce->parsed()) {
            const auto res = emuq::run_reduce(cfg);
            std::printf("reduce: threshold %.4g\n", res.report.threshold);
            std::printf("  fixed:");
            if (res.report.fixed_parameters.empty()) std::printf(" (none)");
            for (const auto& name : res.report.fixed_parameters) std::printf(" %s", name.c_str());
            std::printf("\n  MAE(mean) = %.6e\n  MAE(std)  = %.6e\n", res.report.mae_mean,
                        res.report.mae_std);
            std::printf("artifacts -> %s\n", cfg.output_dir.string().c_str());
        }
        return 0;
    } catch (const emuq::config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const emuq::io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const emuq::numerical_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
