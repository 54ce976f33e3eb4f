#include <string>

#include "doctest.h"
#include "ntci/config.hpp"
#include "ntci/report.hpp"
#include "ntci/runner.hpp"

using namespace ntci;

namespace {

const char* kValidConfig = R"(
schema = 1

[model]
name = ou
a = 1.0
s = 1.0
xi = 1.0

[grid]
tau = 0.25
horizon = 1
dt = 0.00390625

[perturbation]
kind = constant
value = 1.0

[run]
n_paths = 8
seed = 42
metrics = dl2,dinf2
workers = 2

[output]
dir = out
)";

}  // namespace

TEST_CASE("a complete config parses") {
    auto cfg = parse_config_text(kValidConfig);
    CHECK(cfg.schema == 1);
    CHECK(cfg.model_name == "ou");
    CHECK(cfg.model_params.at("a") == 1.0);
    CHECK(cfg.tau == 0.25);
    CHECK(cfg.horizon == 1.0);
    CHECK(cfg.h_kind == "constant");
    CHECK(cfg.n_paths == 8);
    CHECK(cfg.seed == 42);
    CHECK(cfg.workers == 2);
    REQUIRE(cfg.metrics.size() == 2);
    CHECK(cfg.metrics[0] == PathMetricKind::L2InTime);
    CHECK(cfg.metrics[1] == PathMetricKind::UniformSup);
}

TEST_CASE("config diagnostics carry line numbers") {
    try {
        parse_config_text("schema = 1\n[model]\nname = ou\nbroken line\n");
        FAIL("expected a parse failure");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config_text("[model]\nname = ou\n"), config_error);  // no schema
    CHECK_THROWS_AS(parse_config_text("schema = 2\n[model]\nname = ou\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("schema = 1\n[nope]\n"), config_error);
    CHECK_THROWS_AS(parse_config_text("schema = 1\n[run]\nmetrics = d_nope\n"), config_error);
}

TEST_CASE("csv layout has fixed columns and empty fields for absent metrics") {
    std::vector<SampleSummary> samples(2);
    samples[0].stream_id = 0;
    samples[0].energy = 1.5;
    samples[0].d_l2_sq = 0.25;
    samples[1].stream_id = 1;
    samples[1].energy = 2.5;
    samples[1].d_l2_sq = 0.5;
    const std::string csv = samples_to_csv(samples);
    CHECK(csv == "stream_id,energy,d_inf1_sq,d_inf2_sq,d_l2_sq\n"
                 "0,1.5,,,0.25\n"
                 "1,2.5,,,0.5\n");
}

TEST_CASE("run_experiment produces a pass outcome and finite report fields") {
    auto cfg = parse_config_text(kValidConfig);
    cfg.n_paths = 16;
    auto outcome = run_experiment(cfg, 0, false);
    CHECK(outcome.exit_code == kExitPass);
    REQUIRE(outcome.bundle.audit.has_value());
    CHECK(outcome.bundle.audit->pass);
    REQUIRE(outcome.bundle.verdicts.size() == 2);
    for (const auto& v : outcome.bundle.verdicts) CHECK(v.pass);
    CHECK(outcome.bundle.samples.size() == 16);

    auto j = bundle_to_json(outcome.bundle);
    CHECK(j["verdicts"].size() == 2);
    CHECK(j["audit"]["pass"].get<bool>());
}

TEST_CASE("lambda gap violation with the T-independent flag is an error") {
    auto cfg = parse_config_text(kValidConfig);
    cfg.model_params["a"] = 0.1;  // lambda1 = 0.2 > 0, fine
    cfg.model_name = "weighted-neutral";
    cfg.model_params["g"] = 0.5;
    cfg.model_params["c"] = 1.0;  // lambda1 = 2a - |c + ag| < 0
    cfg.t_independent = true;
    cfg.metrics = {PathMetricKind::L2InTime};
    try {
        run_experiment(cfg, 0, false);
        FAIL("expected infeasibility");
    } catch (const infeasible_error& e) {
        CHECK(std::string(e.what()).find("lambda1 - lambda2") != std::string::npos);
    }
}

TEST_CASE("spde pipeline runs the heat example end to end") {
    auto cfg = parse_config_text(kValidConfig);
    cfg.model_name = "heat-example";
    cfg.model_params.clear();
    cfg.model_params["lipschitz"] = 0.5;
    cfg.model_params["amplitude"] = 0.1;
    cfg.spde_modes = 6;
    cfg.xi_value = {0.0};
    cfg.n_paths = 16;
    cfg.h_value = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    auto outcome = run_spde_experiment(cfg, 0, false);
    CHECK(outcome.exit_code == kExitPass);
    REQUIRE(outcome.bundle.a5.has_value());
    CHECK(outcome.bundle.a5->pass);
    REQUIRE(outcome.bundle.verdicts.size() == 1);
    CHECK(outcome.bundle.verdicts[0].pass);
}
