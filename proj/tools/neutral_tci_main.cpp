// neutral-tci: config-driven runner for coupling-based transportation-cost
// experiments on neutral delay equations and their spectral truncations.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ntci/runner.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    int workers = 0;
    std::string out_dir;
    bool emit_gnuplot = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config = true) {
    auto* opt = cmd->add_option("--config", args.config_path, "experiment description file");
    if (needs_config) opt->required();
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--workers", args.workers, "worker threads (default: config, then $NEUTRAL_TCI_WORKERS, then 1)");
    cmd->add_option("--out", args.out_dir, "override the output directory");
    cmd->add_flag("--emit-gnuplot", args.emit_gnuplot, "write plot.gp next to samples.csv");
}

ntci::ExperimentConfig load(const CommonArgs& args) {
    ntci::ExperimentConfig cfg = ntci::parse_config_file(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    return cfg;
}

void print_verdict_lines(const ntci::ReportBundle& bundle) {
    if (bundle.audit) {
        std::cout << "audit: " << (bundle.audit->pass ? "pass" : "FAIL") << "\n";
        for (const auto& c : bundle.audit->conditions)
            std::cout << "  " << c.name << ": worst ratio " << c.worst_ratio << " over "
                      << c.samples << " pairs (" << (c.pass ? "pass" : "FAIL") << ")\n";
    }
    if (bundle.a5) {
        std::cout << "a5 margin: value " << bundle.a5->value << " (first addend "
                  << bundle.a5->first_addend << ", "
                  << (bundle.a5->pass ? "pass" : "FAIL") << ")\n";
    }
    for (const auto& v : bundle.verdicts) {
        std::cout << ntci::metric_name(v.theoretical_c.metric) << ": H = " << v.entropy.mean
                  << ", E d^2 = " << v.coupling_sq.mean << ", C = " << v.theoretical_c.c_metric
                  << ", ratio = " << v.ratio << " -> " << (v.pass ? "pass" : "FAIL") << "\n";
        if (v.empirical_w2_value)
            std::cout << "  empirical W2 = " << *v.empirical_w2_value << " (consistent: "
                      << (v.empirical_consistent ? "yes" : "NO") << ")\n";
    }
}

int run_list() {
    for (const auto& info : ntci::list_builtins()) {
        std::cout << info.name << ": " << info.summary << "\n";
        for (const auto& [symbol, value] : info.constants)
            std::cout << "  " << symbol << " = " << value << "\n";
    }
    return ntci::kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transportation-cost verification for neutral delay equations"};
    app.require_subcommand(1);

    CommonArgs audit_args, constants_args, verify_args, spde_args;
    auto* audit_cmd = app.add_subcommand("audit", "sample-audit the declared hypotheses");
    add_common(audit_cmd, audit_args);
    auto* constants_cmd =
        app.add_subcommand("constants", "assemble and print the constant trace");
    add_common(constants_cmd, constants_args);
    auto* verify_cmd =
        app.add_subcommand("verify", "full pipeline: audit, constants, ensemble, verdict");
    add_common(verify_cmd, verify_args);
    auto* spde_cmd =
        app.add_subcommand("spde-verify", "Galerkin pipeline for the heat example");
    add_common(spde_cmd, spde_args);
    app.add_subcommand("list", "print the registered built-in models");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list")) return run_list();

        if (app.got_subcommand("audit")) {
            ntci::ExperimentConfig cfg = load(audit_args);
            ntci::NeutralModel model =
                ntci::make_builtin(cfg.model_name, cfg.model_params, cfg.tau);
            auto report = ntci::audit_assumptions(model, cfg.audit_pairs, cfg.audit_tol,
                                                  ntci::rng::derive_seed(cfg.seed, 0xA0D17));
            ntci::ReportBundle bundle;
            bundle.audit = report;
            print_verdict_lines(bundle);
            return report.pass ? ntci::kExitPass : ntci::kExitFail;
        }

        if (app.got_subcommand("constants")) {
            ntci::ExperimentConfig cfg = load(constants_args);
            if (cfg.model_name == "heat-example") {
                ntci::SpdeModel model =
                    ntci::make_heat_builtin(cfg.model_params, cfg.tau, cfg.spde_modes);
                auto report = ntci::assemble_spde_constants(model, cfg.horizon);
                std::cout << ntci::to_json(report).dump(2) << "\n";
                return ntci::kExitPass;
            }
            ntci::NeutralModel model =
                ntci::make_builtin(cfg.model_name, cfg.model_params, cfg.tau);
            ntci::AssembleOptions opts;
            opts.epsilon = cfg.epsilon;
            opts.t_independent = cfg.t_independent;
            for (auto metric : cfg.metrics) {
                auto report = ntci::assemble_constants(model, metric, cfg.horizon, opts);
                std::cout << ntci::to_json(report).dump(2) << "\n";
            }
            return ntci::kExitPass;
        }

        const bool spde = app.got_subcommand("spde-verify");
        const CommonArgs& args = spde ? spde_args : verify_args;
        ntci::ExperimentConfig cfg = load(args);
        ntci::RunOutcome outcome =
            spde ? ntci::run_spde_experiment(cfg, args.workers, true, args.emit_gnuplot)
                 : ntci::run_experiment(cfg, args.workers, true, args.emit_gnuplot);
        print_verdict_lines(outcome.bundle);
        if (outcome.exit_code != ntci::kExitPass) std::cerr << outcome.message << "\n";
        return outcome.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ntci::kExitError;
    }
}
