#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpbell/bell_device.hpp"
#include "mpbell/campaigns.hpp"
#include "mpbell/format.hpp"
#include "mpbell/ghz_logic.hpp"
#include "mpbell/scheme_compare.hpp"
#include "mpbell/telecorrect.hpp"
#include "mpbell/verify.hpp"
#include "mpbell/version.hpp"

namespace mpbell {

namespace cli_detail {

using Json = nlohmann::ordered_json;

// Reports are written without timing information so reruns with the same
// argv are byte-identical; wall time goes to stderr instead.
inline void write_report(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::filesystem::path p(out_path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("MPBELL_OUT_DIR")) p = std::filesystem::path(dir) / p;
    }
    std::ofstream f(p);
    if (!f) throw std::invalid_argument("cannot open output file: " + p.string());
    f << content;
}

inline Json make_envelope(const std::string& command, Json config, Json result) {
    Json env;
    env["tool"] = kToolName;
    env["version"] = kVersion;
    env["command"] = command;
    env["config"] = std::move(config);
    env["result"] = std::move(result);
    return env;
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

inline nlohmann::json load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json j;
    f >> j;
    if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
    return j;
}

template <class T>
void maybe_override(const nlohmann::json& j, const char* key, T& value) {
    if (j.contains(key)) value = j.at(key).get<T>();
}

struct CommonOpts {
    std::string out;
    std::string config_path;
    std::uint64_t seed = 42;
    int workers = 0;
};

inline void add_common(CLI::App* cmd, CommonOpts& opts, bool with_seed = true) {
    cmd->add_option("--out", opts.out, "write the report to this file instead of stdout");
    cmd->add_option("--config", opts.config_path, "JSON file whose values override the flags");
    if (with_seed) cmd->add_option("--seed", opts.seed, "master random seed");
    cmd->add_option("--workers", opts.workers, "worker threads (0 = hardware default)");
}

inline void apply_common_overrides(const nlohmann::json& j, CommonOpts& opts) {
    maybe_override(j, "seed", opts.seed);
    maybe_override(j, "workers", opts.workers);
    maybe_override(j, "out", opts.out);
}

inline int run_bs_table(const CommonOpts& opts) {
    std::ostringstream csv;
    csv << "input,success_phi_minus,success_psi_minus,ambiguous,click_deficit\n";
    for (BellKind k : kAllBellKinds) {
        const auto table = exact_outcome_table(k);
        csv << bell_kind_name(k) << ',' << format_sig10(table.at(BsOutcomeKind::SuccessPhiMinus))
            << ',' << format_sig10(table.at(BsOutcomeKind::SuccessPsiMinus)) << ','
            << format_sig10(table.at(BsOutcomeKind::Ambiguous)) << ','
            << format_sig10(table.at(BsOutcomeKind::ClickDeficit)) << '\n';
    }
    write_report(opts.out, csv.str());
    return 0;
}

inline Json estimate_json(const RateEstimate& est) {
    Json r;
    r["samples"] = est.samples;
    r["successes"] = est.successes;
    r["estimate"] = round_sig10(est.estimate);
    r["stderr"] = round_sig10(est.std_error);
    r["analytic"] = round_sig10(est.analytic);
    return r;
}

inline int run_logical_bm(int n, std::uint64_t samples, const CommonOpts& opts) {
    const RateEstimate est = estimate_logical_bm_success(n, samples, opts.seed, opts.workers);
    Json config{{"n", n}, {"samples", samples}, {"seed", opts.seed}};
    Json result;
    result["n"] = n;
    result.update(estimate_json(est));
    write_report(opts.out, dump_json(make_envelope("logical-bm", config, result)));
    return 0;
}

inline int run_teleport(int n, double eta, std::uint64_t samples, const CommonOpts& opts) {
    const RateEstimate est = estimate_teleport_success(n, eta, samples, opts.seed, opts.workers);
    Json config{{"n", n}, {"eta", eta}, {"samples", samples}, {"seed", opts.seed}};
    Json result;
    result["n"] = n;
    result["eta"] = eta;
    result.update(estimate_json(est));
    write_report(opts.out, dump_json(make_envelope("teleport", config, result)));
    return 0;
}

inline int run_curves(double max_nbar, double step, const std::string& format,
                      bool ewert_envelope, const CommonOpts& opts) {
    const EwertForm form = ewert_envelope ? EwertForm::Envelope : EwertForm::PhotonAccounting;
    const auto points = emit_curves(max_nbar, step, form);
    if (format == "csv") {
        std::ostringstream csv;
        csv << "scheme,nbar,ps,physical\n";
        for (const CurvePoint& p : points)
            csv << scheme_name(p.scheme) << ',' << format_sig10(p.nbar) << ','
                << format_sig10(p.ps) << ',' << (p.physical ? 1 : 0) << '\n';
        write_report(opts.out, csv.str());
        return 0;
    }
    if (format != "json") throw std::invalid_argument("format must be csv or json");
    Json rows = Json::array();
    for (const CurvePoint& p : points) {
        Json row;
        row["scheme"] = scheme_name(p.scheme);
        row["nbar"] = round_sig10(p.nbar);
        row["ps"] = round_sig10(p.ps);
        row["physical"] = p.physical ? 1 : 0;
        rows.push_back(std::move(row));
    }
    Json config{{"max_nbar", max_nbar},
                {"step", step},
                {"format", format},
                {"ewert_envelope", ewert_envelope}};
    write_report(opts.out, dump_json(make_envelope("curves", config, rows)));
    return 0;
}

inline Json threshold_config_echo(const TelecorrectionConfig& cfg) {
    Json echo;
    echo["samples"] = cfg.samples;
    echo["levels"] = cfg.levels;
    echo["seed"] = cfg.seed;
    echo["replicas"] = cfg.replicas;
    echo["memory_steps"] = cfg.memory_steps;
    echo["offline_loss"] = cfg.offline_loss;
    echo["gates_per_position"] = cfg.gates_per_position;
    return echo;
}

inline Json threshold_result_json(const ThresholdResult& r, const TelecorrectionConfig& cfg) {
    Json result;
    result["n"] = r.n_photons;
    result["eta_threshold"] = round_sci(r.eta_threshold);
    result["ci_low"] = round_sci(r.ci_low);
    result["ci_high"] = round_sci(r.ci_high);
    result["levels"] = r.levels_used;
    result["samples"] = cfg.samples;
    result["config_echo"] = threshold_config_echo(cfg);
    return result;
}

inline int run_threshold(int n, const TelecorrectionConfig& cfg, const CommonOpts& opts) {
    const ThresholdResult r = find_threshold(n, cfg);
    write_report(opts.out, dump_json(make_envelope("threshold", threshold_config_echo(cfg),
                                                   threshold_result_json(r, cfg))));
    return 0;
}

inline int run_threshold_table(int n_min, int n_max, const TelecorrectionConfig& cfg,
                               const CommonOpts& opts) {
    if (n_min < 1 || n_max < n_min) throw std::invalid_argument("need 1 <= n-min <= n-max");
    std::ostringstream csv;
    csv << "n,eta_threshold,ci_low,ci_high\n";
    for (int n = n_min; n <= n_max; ++n) {
        const ThresholdResult r = find_threshold(n, cfg);
        csv << n << ',' << format_sci(r.eta_threshold) << ',' << format_sci(r.ci_low) << ','
            << format_sci(r.ci_high) << '\n';
    }
    write_report(opts.out, csv.str());
    return 0;
}

}  // namespace cli_detail

// Command-line entry point. Exit codes: 0 success, 2 usage or validation
// error, 3 internal invariant violation or failed verify, 4 no threshold
// found in the search bracket.
inline int cli_main(int argc, char** argv) {
    using namespace cli_detail;

    CLI::App app{"Simulator for GHZ-encoded multiphoton Bell measurements, teleportation under "
                 "photon loss, Bell-scheme comparison curves, and concatenated Steane-code "
                 "threshold estimation"};
    app.require_subcommand(1);

    // bs-table
    CommonOpts bs_opts;
    auto* bs = app.add_subcommand("bs-table",
                                  "exact outcome table of the two-photon Bell measurement (CSV)");
    add_common(bs, bs_opts, false);

    // logical-bm
    CommonOpts bm_opts;
    int bm_n = 2;
    std::uint64_t bm_samples = 100000;
    auto* bm = app.add_subcommand("logical-bm",
                                  "Monte Carlo success rate of the logical Bell measurement");
    bm->add_option("--n", bm_n, "photons per logical qubit")->check(CLI::Range(1, 24));
    bm->add_option("--samples", bm_samples, "number of trials");
    add_common(bm, bm_opts);

    // teleport
    CommonOpts tp_opts;
    int tp_n = 2;
    double tp_eta = 0.0;
    std::uint64_t tp_samples = 100000;
    auto* tp = app.add_subcommand("teleport", "Monte Carlo teleportation under photon loss");
    tp->add_option("--n", tp_n, "photons per logical qubit")->check(CLI::Range(1, 24));
    tp->add_option("--eta", tp_eta, "per-photon loss rate")->check(CLI::Range(0.0, 1.0));
    tp->add_option("--samples", tp_samples, "number of trials");
    add_common(tp, tp_opts);

    // curves
    CommonOpts cv_opts;
    double cv_max = 20.0;
    double cv_step = 0.5;
    std::string cv_format = "csv";
    bool cv_envelope = false;
    auto* cv = app.add_subcommand("curves", "success probability versus average photon usage");
    cv->add_option("--max-nbar", cv_max, "largest mean photon number on the grid");
    cv->add_option("--step", cv_step, "grid step");
    cv->add_option("--format", cv_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cv->add_flag("--ewert-envelope", cv_envelope,
                 "use the envelope exponent for the Ewert curve");
    add_common(cv, cv_opts, false);

    // threshold / threshold-table
    CommonOpts th_opts;
    TelecorrectionConfig th_cfg;
    int th_n = 4;
    int tt_n_min = 3;
    int tt_n_max = 8;
    bool th_no_offline = false;
    auto* th = app.add_subcommand("threshold",
                                  "bisection estimate of the fault-tolerance loss threshold");
    th->add_option("--n", th_n, "photons per logical qubit")->check(CLI::Range(1, 24));
    th->add_option("--samples", th_cfg.samples, "trials per level");
    th->add_option("--levels", th_cfg.levels, "concatenation depth")->check(CLI::Range(1, 5));
    th->add_option("--replicas", th_cfg.replicas, "independent bisection replicas");
    th->add_option("--memory-steps", th_cfg.memory_steps, "loss exposures per qubit per round");
    th->add_flag("--no-offline-loss", th_no_offline, "ignore channel-block noise");
    th->add_option("--gates-per-position", th_cfg.gates_per_position,
                   "gate-teleportation slots per position");
    add_common(th, th_opts);

    CommonOpts tt_opts;
    TelecorrectionConfig tt_cfg;
    bool tt_no_offline = false;
    auto* tt = app.add_subcommand("threshold-table", "threshold sweep over a range of n (CSV)");
    tt->add_option("--n-min", tt_n_min, "first n");
    tt->add_option("--n-max", tt_n_max, "last n");
    tt->add_option("--samples", tt_cfg.samples, "trials per level");
    tt->add_option("--levels", tt_cfg.levels, "concatenation depth")->check(CLI::Range(1, 5));
    tt->add_option("--replicas", tt_cfg.replicas, "independent bisection replicas");
    tt->add_option("--memory-steps", tt_cfg.memory_steps, "loss exposures per qubit per round");
    tt->add_flag("--no-offline-loss", tt_no_offline, "ignore channel-block noise");
    tt->add_option("--gates-per-position", tt_cfg.gates_per_position,
                   "gate-teleportation slots per position");
    add_common(tt, tt_opts);

    // verify
    std::uint64_t vf_seed = 42;
    auto* vf = app.add_subcommand("verify", "run the invariant self-test suite");
    vf->add_option("--seed", vf_seed, "master random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const auto started = std::chrono::steady_clock::now();
    int code = 0;
    std::string command;
    try {
        if (bs->parsed()) {
            command = "bs-table";
            if (!bs_opts.config_path.empty())
                apply_common_overrides(load_config_file(bs_opts.config_path), bs_opts);
            code = run_bs_table(bs_opts);
        } else if (bm->parsed()) {
            command = "logical-bm";
            if (!bm_opts.config_path.empty()) {
                const auto j = load_config_file(bm_opts.config_path);
                maybe_override(j, "n", bm_n);
                maybe_override(j, "samples", bm_samples);
                apply_common_overrides(j, bm_opts);
            }
            if (bm_n < 1 || bm_n > 24) throw std::invalid_argument("n must be in 1..24");
            code = run_logical_bm(bm_n, bm_samples, bm_opts);
        } else if (tp->parsed()) {
            command = "teleport";
            if (!tp_opts.config_path.empty()) {
                const auto j = load_config_file(tp_opts.config_path);
                maybe_override(j, "n", tp_n);
                maybe_override(j, "eta", tp_eta);
                maybe_override(j, "samples", tp_samples);
                apply_common_overrides(j, tp_opts);
            }
            if (tp_n < 1 || tp_n > 24) throw std::invalid_argument("n must be in 1..24");
            code = run_teleport(tp_n, tp_eta, tp_samples, tp_opts);
        } else if (cv->parsed()) {
            command = "curves";
            if (!cv_opts.config_path.empty()) {
                const auto j = load_config_file(cv_opts.config_path);
                maybe_override(j, "max_nbar", cv_max);
                maybe_override(j, "step", cv_step);
                maybe_override(j, "format", cv_format);
                maybe_override(j, "ewert_envelope", cv_envelope);
                apply_common_overrides(j, cv_opts);
            }
            code = run_curves(cv_max, cv_step, cv_format, cv_envelope, cv_opts);
        } else if (th->parsed()) {
            command = "threshold";
            th_cfg.offline_loss = !th_no_offline;
            if (!th_opts.config_path.empty()) {
                const auto j = load_config_file(th_opts.config_path);
                maybe_override(j, "n", th_n);
                maybe_override(j, "samples", th_cfg.samples);
                maybe_override(j, "levels", th_cfg.levels);
                maybe_override(j, "replicas", th_cfg.replicas);
                maybe_override(j, "memory_steps", th_cfg.memory_steps);
                maybe_override(j, "gates_per_position", th_cfg.gates_per_position);
                maybe_override(j, "offline_loss", th_cfg.offline_loss);
                apply_common_overrides(j, th_opts);
            }
            th_cfg.seed = th_opts.seed;
            th_cfg.workers = th_opts.workers;
            code = run_threshold(th_n, th_cfg, th_opts);
        } else if (tt->parsed()) {
            command = "threshold-table";
            tt_cfg.offline_loss = !tt_no_offline;
            if (!tt_opts.config_path.empty()) {
                const auto j = load_config_file(tt_opts.config_path);
                maybe_override(j, "n_min", tt_n_min);
                maybe_override(j, "n_max", tt_n_max);
                maybe_override(j, "samples", tt_cfg.samples);
                maybe_override(j, "levels", tt_cfg.levels);
                maybe_override(j, "replicas", tt_cfg.replicas);
                maybe_override(j, "memory_steps", tt_cfg.memory_steps);
                maybe_override(j, "gates_per_position", tt_cfg.gates_per_position);
                maybe_override(j, "offline_loss", tt_cfg.offline_loss);
                apply_common_overrides(j, tt_opts);
            }
            tt_cfg.seed = tt_opts.seed;
            tt_cfg.workers = tt_opts.workers;
            code = run_threshold_table(tt_n_min, tt_n_max, tt_cfg, tt_opts);
        } else if (vf->parsed()) {
            command = "verify";
            code = run_verify(vf_seed);
        }
    } catch (const no_threshold_found& e) {
        std::cerr << "mpbell: " << e.what() << "\n";
        return 4;
    } catch (const impossible_outcome& e) {
        std::cerr << "mpbell: internal invariant violated: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "mpbell: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "mpbell: " << e.what() << "\n";
        return 2;
    } catch (const std::logic_error& e) {
        std::cerr << "mpbell: internal invariant violated: " << e.what() << "\n";
        return 3;
    }

    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              started);
    std::cerr << "mpbell: " << command << " finished in " << elapsed.count() << " ms\n";
    return code;
}

}  // namespace mpbell
