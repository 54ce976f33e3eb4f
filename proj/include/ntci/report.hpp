#pragma once

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ntci/audit.hpp"
#include "ntci/config.hpp"
#include "ntci/constants.hpp"
#include "ntci/ensemble.hpp"
#include "ntci/errors.hpp"
#include "ntci/spde.hpp"
#include "ntci/tci.hpp"

namespace ntci {

inline constexpr const char* kVersion = "0.1.0";

/// Everything one run produces: the audit, the constants trace, one verdict
/// per metric, the per-sample rows and run metadata. CSV feeds downstream
/// plotting; the summary document is the archival artifact.
struct ReportBundle {
    std::optional<AuditReport> audit;
    std::optional<A5Report> a5;
    std::vector<TciVerdict> verdicts;  // one per requested metric
    std::vector<SampleSummary> samples;
    std::uint64_t seed = 0;
    int workers = 1;
    std::int64_t n_paths = 0;
    double wall_seconds = 0.0;
    std::string model_name;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Write-then-rename so readers never observe a torn file.
inline void atomic_write(const std::filesystem::path& path, const std::string& payload) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw config_error("report: cannot write " + tmp.string());
        out << payload;
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace detail

/// Fixed column order; metrics that were not run stay empty.
inline std::string samples_to_csv(const std::vector<SampleSummary>& samples) {
    std::string out = "stream_id,energy,d_inf1_sq,d_inf2_sq,d_l2_sq\n";
    char buf[192];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof(buf), "%" PRIu64 ",%.17g,", s.stream_id, s.energy);
        out += buf;
        if (s.d_inf1_sq) out += detail::format_double(*s.d_inf1_sq);
        out += ',';
        if (s.d_inf2_sq) out += detail::format_double(*s.d_inf2_sq);
        out += ',';
        if (s.d_l2_sq) out += detail::format_double(*s.d_l2_sq);
        out += '\n';
    }
    return out;
}

inline nlohmann::json to_json(const MeanCi& ci) {
    return {{"mean", ci.mean}, {"halfwidth", ci.halfwidth}, {"n", ci.n}};
}

inline nlohmann::json to_json(const ConstantsReport& report) {
    nlohmann::json j;
    j["metric"] = metric_name(report.metric);
    j["mode"] = report.mode == NormMode::Weighted ? "weighted" : "uniform";
    j["horizon"] = report.horizon;
    j["epsilon"] = report.epsilon;
    if (report.lambda_tilde) j["lambda_tilde"] = *report.lambda_tilde;
    if (report.beta1) j["beta1"] = *report.beta1;
    if (report.beta2) j["beta2"] = *report.beta2;
    if (report.c1) j["c1"] = *report.c1;
    j["c_metric"] = report.c_metric;
    j["t_independent"] = report.t_independent;
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& step : report.trace) trace.push_back({{"tag", step.tag}, {"value", step.value}});
    j["trace"] = trace;
    return j;
}

inline nlohmann::json to_json(const AuditReport& report) {
    nlohmann::json conditions = nlohmann::json::array();
    for (const auto& c : report.conditions) {
        conditions.push_back({{"name", c.name},
                              {"worst_ratio", c.worst_ratio},
                              {"samples", c.samples},
                              {"worst_pair", c.worst_pair},
                              {"pass", c.pass}});
    }
    return {{"pass", report.pass}, {"conditions", conditions}};
}

inline nlohmann::json to_json(const A5Report& report) {
    return {{"inverse_norm", report.inverse_norm}, {"first_addend", report.first_addend},
            {"m_frac", report.m_frac},             {"integral", report.integral},
            {"value", report.value},               {"pass", report.pass}};
}

inline nlohmann::json to_json(const TciVerdict& v) {
    nlohmann::json j;
    j["metric"] = metric_name(v.theoretical_c.metric);
    j["entropy"] = to_json(v.entropy);
    j["coupling_sq"] = to_json(v.coupling_sq);
    j["constants"] = to_json(v.theoretical_c);
    j["ratio"] = v.ratio;
    j["pass"] = v.pass;
    if (v.empirical_w2_value) {
        j["empirical_w2"] = *v.empirical_w2_value;
        j["w2_slack"] = *v.w2_slack;
        j["empirical_consistent"] = v.empirical_consistent;
    }
    return j;
}

/// The summary document. Wall time lives under "timing" so that everything
/// else is reproducible byte-for-byte for a fixed seed.
inline nlohmann::json bundle_to_json(const ReportBundle& bundle) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["model"] = bundle.model_name;
    j["seed"] = bundle.seed;
    j["n_paths"] = bundle.n_paths;
    j["workers"] = bundle.workers;
    if (bundle.audit) j["audit"] = to_json(*bundle.audit);
    if (bundle.a5) j["a5"] = to_json(*bundle.a5);
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& v : bundle.verdicts) verdicts.push_back(to_json(v));
    j["verdicts"] = verdicts;
    j["timing"] = {{"wall_seconds", bundle.wall_seconds}};
    return j;
}

inline void write_bundle(const ReportBundle& bundle, const ExperimentConfig& cfg,
                         bool emit_gnuplot) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    if (cfg.write_csv) detail::atomic_write(dir / "samples.csv", samples_to_csv(bundle.samples));
    if (cfg.write_summary)
        detail::atomic_write(dir / "summary.json", bundle_to_json(bundle).dump(2) + "\n");
    if (emit_gnuplot) {
        std::string gp;
        gp += "set datafile separator ','\n";
        gp += "set key autotitle columnhead\n";
        gp += "set xlabel 'stream id'\n";
        gp += "set ylabel 'squared distance / energy'\n";
        gp += "plot 'samples.csv' using 1:2 with points title 'energy', \\\n";
        gp += "     'samples.csv' using 1:5 with points title 'd_l2^2'\n";
        detail::atomic_write(dir / "plot.gp", gp);
    }
}

}  // namespace ntci
