#pragma once

#include <chrono>
#include <cstdlib>
#include <string>

#include "ntci/builtins.hpp"
#include "ntci/report.hpp"

namespace ntci {

/// Exit-code contract shared by every subcommand.
enum ExitCode : int {
    kExitPass = 0,
    kExitError = 1,
    kExitFail = 2,
};

inline int resolve_workers(const ExperimentConfig& cfg, int cli_override) {
    if (cli_override > 0) return cli_override;
    if (cfg.workers > 0) return cfg.workers;
    if (const char* env = std::getenv("NEUTRAL_TCI_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

inline Perturbation perturbation_from_config(const ExperimentConfig& cfg) {
    Perturbation pert;
    if (cfg.h_kind == "zero") {
        pert = Perturbation::zero();
    } else if (cfg.h_kind == "constant") {
        pert = Perturbation::constant(cfg.h_value.empty() ? std::vector<double>{1.0}
                                                          : cfg.h_value);
    } else if (cfg.h_kind == "feedback") {
        pert = Perturbation::feedback(cfg.h_gain);
    } else {
        throw config_error("unknown perturbation kind '" + cfg.h_kind + "'");
    }
    if (cfg.energy_cap) pert.energy_cap = cfg.energy_cap;
    return pert;
}

inline Segment xi_from_config(const ExperimentConfig& cfg, const TimeGrid& grid, int dim) {
    std::vector<double> value(static_cast<std::size_t>(dim), 0.0);
    for (int c = 0; c < dim; ++c)
        value[static_cast<std::size_t>(c)] =
            cfg.xi_value[static_cast<std::size_t>(c) % cfg.xi_value.size()];
    return Segment::constant(grid.tau(), grid.delay_steps(), value);
}

struct RunOutcome {
    int exit_code = kExitPass;
    std::string message;
    ReportBundle bundle;
};

/// The finite-dimensional pipeline: audit, constants, ensemble, verdicts.
/// Verdict or audit falsification exits 2; configuration and infeasibility
/// problems surface as exceptions and become exit 1 at the CLI boundary.
inline RunOutcome run_experiment(const ExperimentConfig& cfg, int cli_workers = 0,
                                 bool with_reports = true, bool emit_gnuplot = false) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutcome outcome;

    NeutralModel model = make_builtin(cfg.model_name, cfg.model_params, cfg.tau);
    TimeGrid grid(cfg.tau, cfg.horizon, cfg.dt);
    Segment xi = xi_from_config(cfg, grid, model.dim);
    Perturbation pert = perturbation_from_config(cfg);
    const int workers = resolve_workers(cfg, cli_workers);

    outcome.bundle.model_name = cfg.model_name;
    outcome.bundle.seed = cfg.seed;
    outcome.bundle.n_paths = cfg.n_paths;
    outcome.bundle.workers = workers;

    if (!cfg.skip_audit) {
        outcome.bundle.audit = audit_assumptions(model, cfg.audit_pairs, cfg.audit_tol,
                                                 rng::derive_seed(cfg.seed, 0xA0D17));
        if (!outcome.bundle.audit->pass) {
            outcome.exit_code = kExitFail;
            outcome.message = "audit falsified at least one declared hypothesis";
        }
    }

    TciOptions options;
    options.workers = workers;
    options.want_empirical = cfg.empirical;
    options.assemble.epsilon = cfg.epsilon;
    options.assemble.t_independent = cfg.t_independent;

    for (PathMetricKind metric : cfg.metrics) {
        TciVerdict verdict =
            verify_tci(model, xi, pert, metric, grid, cfg.n_paths, cfg.seed, options);
        if (!verdict.pass && outcome.exit_code == kExitPass) {
            outcome.exit_code = kExitFail;
            outcome.message = std::string("verdict failed under ") +
                              metric_name(verdict.theoretical_c.metric);
        }
        if (verdict.empirical_w2_value && !verdict.empirical_consistent &&
            outcome.exit_code == kExitPass) {
            outcome.exit_code = kExitFail;
            outcome.message = "empirical W2 exceeded the coupling bound";
        }
        outcome.bundle.verdicts.push_back(std::move(verdict));
    }

    // One more pass for the CSV rows covering all metrics at once.
    EnsembleJob job{model, xi, pert, grid, cfg.metrics};
    outcome.bundle.samples = run_ensemble(job, cfg.n_paths, cfg.seed, workers).samples;

    outcome.bundle.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (with_reports) write_bundle(outcome.bundle, cfg, emit_gnuplot);
    return outcome;
}

/// The Galerkin pipeline: the smallness margin plays the role of the audit,
/// the constants come from the semigroup chain and the metric is the uniform
/// one on coefficient paths.
inline RunOutcome run_spde_experiment(const ExperimentConfig& cfg, int cli_workers = 0,
                                      bool with_reports = true, bool emit_gnuplot = false) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutcome outcome;
    if (cfg.model_name != "heat-example")
        throw config_error("spde-verify requires [model] name = heat-example");

    SpdeModel model = make_heat_builtin(cfg.model_params, cfg.tau, cfg.spde_modes);
    TimeGrid grid(cfg.tau, cfg.horizon, cfg.dt);
    Segment xi = xi_from_config(cfg, grid, model.modes);
    Perturbation pert = perturbation_from_config(cfg);
    const int workers = resolve_workers(cfg, cli_workers);

    outcome.bundle.model_name = cfg.model_name;
    outcome.bundle.seed = cfg.seed;
    outcome.bundle.n_paths = cfg.n_paths;
    outcome.bundle.workers = workers;

    outcome.bundle.a5 = check_a5(model, grid.horizon());
    if (!outcome.bundle.a5->pass) {
        outcome.exit_code = kExitFail;
        outcome.message = "neutral smallness condition failed";
    }

    ConstantsReport constants = assemble_spde_constants(model, grid.horizon());

    auto sampler = [&model, &xi, &pert, &grid, seed = cfg.seed](std::uint64_t stream) {
        NoisePlan noise(seed, stream, model.modes, grid.dt());
        return spde_simulate_coupled(model, xi, pert, grid, noise);
    };
    const std::vector<PathMetricKind> metrics{PathMetricKind::UniformSup};
    EnsembleResult ensemble =
        run_coupled_ensemble(sampler, metrics, cfg.n_paths, workers);

    TciVerdict verdict;
    verdict.entropy = entropy_from_energies(energies_of(ensemble.samples));
    verdict.coupling_sq = coupling_distance_sq(ensemble.samples, PathMetricKind::UniformSup);
    verdict.theoretical_c = std::move(constants);
    if (verdict.entropy.mean > 0.0) {
        verdict.ratio = verdict.coupling_sq.mean / (2.0 * verdict.entropy.mean);
    } else {
        verdict.ratio = verdict.coupling_sq.mean == 0.0
                            ? 0.0
                            : std::numeric_limits<double>::infinity();
    }
    verdict.pass = (verdict.entropy.mean == 0.0 && verdict.coupling_sq.mean == 0.0) ||
                   verdict.coupling_sq.upper() <=
                       2.0 * verdict.theoretical_c.c_metric * verdict.entropy.lower();
    if (!verdict.pass && outcome.exit_code == kExitPass) {
        outcome.exit_code = kExitFail;
        outcome.message = "spde verdict failed under d_inf2";
    }
    outcome.bundle.verdicts.push_back(std::move(verdict));
    outcome.bundle.samples = std::move(ensemble.samples);

    outcome.bundle.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (with_reports) write_bundle(outcome.bundle, cfg, emit_gnuplot);
    return outcome;
}

}  // namespace ntci
