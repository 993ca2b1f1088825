// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

// cpmsim: command-line front end to libcpmdet.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpmdet/cpmdet.h"

namespace {

// One line on stderr that scripts can parse, exit code = status.
int report(cpm_status s)
{
    if (s == CPM_OK)
        return 0;
    std::string msg = cpm_last_error();
    for (char& c : msg)
        if (c == '\n')
            c = ';';
    std::fprintf(stderr, "cpmsim: error status=%s code=%d message=\"%s\"\n", cpm_status_name(s), static_cast<int>(s),
                 msg.c_str());
    return static_cast<int>(s);
}

void print_progress(const cpm_ber_record* r, void*)
{
    std::fprintf(stderr, "  %-8s %-22s Eb/N0=%5.2f dB  bits=%-10lld errors=%-7lld ber=%.3e  (%.1fs)\n", r->scheme,
                 r->detector, r->ebn0_db, r->bits, r->errors, r->ber, r->elapsed_seconds);
}

struct SweepArgs {
    std::string config;
    std::vector<std::pair<std::string, std::string>> overrides;
    bool paper_scale = false;
    bool quiet = false;
};

int run_sweep(const SweepArgs& a)
{
    cpm_experiment* e = nullptr;
    cpm_status s = a.config.empty() ? cpm_experiment_create(&e) : cpm_experiment_load(a.config.c_str(), &e);
    if (s != CPM_OK)
        return report(s);
    if (a.paper_scale)
        s = cpm_experiment_set(e, "paper-scale", "true");
    for (const auto& [k, v] : a.overrides) {
        if (s != CPM_OK)
            break;
        s = cpm_experiment_set(e, k.c_str(), v.c_str());
    }
    if (s == CPM_OK)
        s = cpm_experiment_validate(e);
    if (s == CPM_OK)
        s = cpm_experiment_run(e, a.quiet ? nullptr : print_progress, nullptr);
    if (s == CPM_OK) {
        if (cpm_experiment_has_output(e))
            s = cpm_experiment_write(e);
        else {
            std::printf("scheme,detector,ebn0_db,frames,bits,errors,ber,ci_low,ci_high,seed\n");
            for (std::size_t i = 0; i < cpm_experiment_record_count(e); ++i) {
                cpm_ber_record r;
                cpm_experiment_record(e, i, &r);
                std::printf("%s,%s,%g,%lld,%lld,%lld,%.6e,%.6e,%.6e,%llu\n", r.scheme, r.detector, r.ebn0_db, r.frames,
                            r.bits, r.errors, r.ber, r.ci_low, r.ci_high, static_cast<unsigned long long>(r.seed));
            }
        }
    }
    cpm_experiment_destroy(e);
    return report(s);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"CPM detection workbench"};
    app.set_version_flag("--version", std::string(cpm_version()));
    app.require_subcommand(1);

    // sweep
    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo BER sweep");
    sweep->add_option("-c,--config", sw.config, "JSON experiment config");
    static const char* const kFlags[] = {"scheme",     "detector", "survivors", "window", "ebn0",       "frames",
                                         "frame-len", "seed",     "min-errors", "out",    "oversample", "workers"};
    std::vector<std::string> flag_values(std::size(kFlags));
    for (std::size_t i = 0; i < std::size(kFlags); ++i)
        sweep->add_option(std::string("--") + kFlags[i], flag_values[i]);
    bool noiseless = false;
    sweep->add_flag("--noiseless", noiseless, "disable AWGN");
    sweep->add_flag("--paper-scale", sw.paper_scale, "10^4 frames of 10^3 symbols, no early stop");
    sweep->add_flag("-q,--quiet", sw.quiet, "no progress lines");

    // oracle
    std::string o_scheme = "PCMFM";
    long long o_trials = 200;
    int o_len = 8;
    double o_ebn0 = 10.0;
    std::uint64_t o_seed = 1;
    auto* oracle = app.add_subcommand("oracle", "detector vs exhaustive-search equivalence");
    oracle->add_option("--scheme", o_scheme);
    oracle->add_option("--trials", o_trials);
    oracle->add_option("--max-len", o_len);
    oracle->add_option("--ebn0", o_ebn0);
    oracle->add_option("--seed", o_seed);

    // tables
    std::string t_dir = ".";
    int t_k = 4;
    int t_n = 1000;
    auto* tables = app.add_subcommand("tables", "write complexity and storage tables");
    tables->add_option("--out", t_dir, "output directory");
    tables->add_option("--oversample", t_k);
    tables->add_option("--traceback", t_n, "traceback length N for the numeric storage row");

    // curves
    std::vector<std::string> c_inputs;
    std::string c_out = "curves.csv";
    auto* curves = app.add_subcommand("curves", "merge record CSVs into plot data");
    curves->add_option("inputs", c_inputs, "record CSV files")->required();
    curves->add_option("--out", c_out);

    // pulse
    std::string p_scheme = "PCMFM";
    int p_k = 4;
    std::string p_out = "pulse.csv";
    auto* pulse = app.add_subcommand("pulse", "dump frequency and phase pulse tables");
    pulse->add_option("--scheme", p_scheme);
    pulse->add_option("--oversample", p_k);
    pulse->add_option("--out", p_out);

    // spectrum
    std::string d_scheme = "PCMFM";
    int d_depth = 6;
    std::string d_out = "spectrum.csv";
    int d_terms = 2;
    std::vector<double> d_ebn0;
    auto* spectrum = app.add_subcommand("spectrum", "distance spectrum and union bound");
    spectrum->add_option("--scheme", d_scheme);
    spectrum->add_option("--depth", d_depth);
    spectrum->add_option("--out", d_out);
    spectrum->add_option("--terms", d_terms);
    spectrum->add_option("--ebn0", d_ebn0)->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        if (rc != 0)
            std::fprintf(stderr, "cpmsim: error status=USAGE code=%d message=\"%s\"\n", rc, e.what());
        return rc;
    }

    if (*sweep) {
        for (std::size_t i = 0; i < std::size(kFlags); ++i)
            if (sweep->count(std::string("--") + kFlags[i]))
                sw.overrides.emplace_back(kFlags[i], flag_values[i]);
        if (noiseless)
            sw.overrides.emplace_back("noiseless", "true");
        return run_sweep(sw);
    }
    if (*oracle) {
        cpm_oracle_report r{};
        const cpm_status s = cpm_oracle_suite(o_scheme.c_str(), o_trials, o_len, o_ebn0, o_seed, &r);
        if (s != CPM_OK)
            return report(s);
        const auto pct = [&](long long n) { return r.trials ? 100.0 * double(n) / double(r.trials) : 100.0; };
        std::printf("trials=%lld coherent_agree=%.2f%% noncoherent_agree=%.2f%% metric_dominance=%.2f%% result=%s\n",
                    r.trials, pct(r.coherent_agree), pct(r.noncoherent_agree), pct(r.metric_dominance),
                    r.passed ? "PASS" : "FAIL");
        return r.passed ? 0 : 1;
    }
    if (*tables)
        return report(cpm_dump_tables(t_dir.c_str(), t_k, t_n));
    if (*curves) {
        std::vector<const char*> paths;
        for (const auto& p : c_inputs)
            paths.push_back(p.c_str());
        return report(cpm_emit_curves(paths.data(), paths.size(), c_out.c_str()));
    }
    if (*pulse)
        return report(cpm_dump_pulse(p_scheme.c_str(), p_k, p_out.c_str()));
    if (*spectrum) {
        cpm_status s = cpm_dump_spectrum(d_scheme.c_str(), d_depth, d_out.c_str());
        for (double eb : d_ebn0) {
            if (s != CPM_OK)
                break;
            double ub = 0.0;
            s = cpm_union_bound(d_scheme.c_str(), d_depth, d_terms, eb, &ub);
            if (s == CPM_OK)
                std::printf("ebn0_db=%g union_bound=%.6e\n", eb, ub);
        }
        return report(s);
    }
    return 0;
}
