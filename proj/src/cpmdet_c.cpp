// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cpmdet/cpmdet.h"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "cpm/harness.hpp"

using namespace cpm;

struct cpm_scheme {
    Scheme scheme;
};

struct cpm_detector {
    Scheme scheme;
    PulseTable pulse;
    AnyDetector det;
    int k;
};

struct cpm_experiment {
    ExperimentConfig config;
    std::vector<BerRecord> records;
    double wall_seconds = 0.0;
};

namespace {

thread_local std::string g_last_error;

cpm_status to_status(ErrorCode c)
{
    return static_cast<cpm_status>(static_cast<int>(c));
}

template <typename F>
cpm_status guarded(F&& f)
{
    try {
        g_last_error.clear();
        f();
        return CPM_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return CPM_E_INTERNAL;
    } catch (const std::filesystem::filesystem_error& e) {
        g_last_error = e.what();
        return CPM_E_IO;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CPM_E_INTERNAL;
    }
}

void need(const void* p, const char* what)
{
    if (!p)
        fail(ErrorCode::Parameter, std::string(what) + " must not be null");
}

Method method_from(std::string_view name)
{
    std::string u(name);
    for (char& c : u)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (u == "MSD")
        return Method::Msd;
    if (u == "MLSD")
        return Method::Mlsd;
    if (u == "PROPOSED")
        return Method::Proposed;
    fail(ErrorCode::Parameter, "unknown method '" + std::string(name) + "' (MSD, MLSD, PROPOSED)");
}

IqFrame frame_from(const double* iq, std::size_t n_samples, int k)
{
    need(iq, "iq");
    require(k >= 1 && n_samples % static_cast<std::size_t>(k) == 0, ErrorCode::Mismatch,
            "sample count is not a multiple of the oversampling factor");
    IqFrame f;
    f.k = k;
    f.n_symbols = static_cast<int>(n_samples / static_cast<std::size_t>(k));
    f.samples.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i)
        f.samples[i] = Complex(iq[2 * i], iq[2 * i + 1]);
    return f;
}

void copy_decision(const Decision& d, int* data, std::size_t capacity, std::size_t* n_data, double* metric)
{
    if (n_data)
        *n_data = d.symbols.size();
    if (metric)
        *metric = d.final_metric;
    require(capacity >= d.symbols.size(), ErrorCode::Range, "output buffer too small for the decided symbols");
    need(data, "data");
    std::copy(d.symbols.begin(), d.symbols.end(), data);
}

void copy_text(char* dst, std::size_t cap, const std::string& s)
{
    const std::size_t n = std::min(cap - 1, s.size());
    std::memcpy(dst, s.data(), n);
    dst[n] = '\0';
}

cpm_ber_record to_c(const BerRecord& r)
{
    cpm_ber_record c{};
    copy_text(c.scheme, sizeof c.scheme, r.scheme);
    copy_text(c.detector, sizeof c.detector, r.detector);
    c.ebn0_db = r.ebn0_db;
    c.frames = r.frames;
    c.bits = r.bits;
    c.errors = r.errors;
    c.ber = r.ber;
    c.ci_low = r.ci_low;
    c.ci_high = r.ci_high;
    c.elapsed_seconds = r.elapsed_seconds;
    c.seed = r.seed;
    return c;
}

std::ofstream open_out(const char* path)
{
    need(path, "path");
    const std::filesystem::path p(path);
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f)
        fail(ErrorCode::Io, "cannot write '" + p.string() + "'");
    return f;
}

}  // namespace

extern "C" {

const char* cpm_status_name(cpm_status s)
{
    switch (s) {
    case CPM_OK: return "OK";
    case CPM_E_PARAMETER: return "PARAMETER";
    case CPM_E_ALPHABET: return "ALPHABET";
    case CPM_E_RANGE: return "RANGE";
    case CPM_E_MISMATCH: return "MISMATCH";
    case CPM_E_TOO_LONG: return "TOO_LONG";
    case CPM_E_IO: return "IO";
    case CPM_E_CONFIG: return "CONFIG";
    case CPM_E_EMPTY_INPUT: return "EMPTY_INPUT";
    case CPM_E_INTERNAL: return "INTERNAL";
    }
    return "UNKNOWN";
}

const char* cpm_last_error(void) { return g_last_error.c_str(); }

const char* cpm_version(void)
{
    static const std::string v = version_string();
    return v.c_str();
}

cpm_status cpm_scheme_create(const char* name, cpm_scheme** out)
{
    return guarded([&] {
        need(name, "name");
        need(out, "out");
        *out = new cpm_scheme{Scheme::from_name(name)};
    });
}

void cpm_scheme_destroy(cpm_scheme* s) { delete s; }
int cpm_scheme_order(const cpm_scheme* s) { return s ? s->scheme.M : 0; }
int cpm_scheme_pulse_length(const cpm_scheme* s) { return s ? s->scheme.L : 0; }
int cpm_scheme_phase_states(const cpm_scheme* s) { return s ? s->scheme.p : 0; }
int cpm_scheme_pilot_count(const cpm_scheme* s) { return s ? s->scheme.pilot_count() : 0; }

cpm_status cpm_modulate(const cpm_scheme* s, int k, const int* data, size_t n_data, double* iq, size_t iq_capacity,
                        size_t* n_samples)
{
    return guarded([&] {
        need(s, "scheme");
        need(data, "data");
        const auto framed = with_pilots(s->scheme, std::span<const int>(data, n_data));
        const Modulated m = modulate(s->scheme, framed, k, 0);
        if (n_samples)
            *n_samples = m.frame.samples.size();
        require(iq_capacity >= 2 * m.frame.samples.size(), ErrorCode::Range, "iq buffer too small");
        need(iq, "iq");
        for (std::size_t i = 0; i < m.frame.samples.size(); ++i) {
            iq[2 * i] = m.frame.samples[i].real();
            iq[2 * i + 1] = m.frame.samples[i].imag();
        }
    });
}

cpm_status cpm_channel(const cpm_scheme* s, int k, double* iq, size_t n_samples, double ebn0_db, int noiseless,
                       cpm_phase_mode mode, double phase, uint64_t seed, double* applied_phase)
{
    return guarded([&] {
        need(s, "scheme");
        const IqFrame in = frame_from(iq, n_samples, k);
        ChannelConfig cc;
        cc.ebn0_db = ebn0_db;
        cc.noiseless = noiseless != 0;
        switch (mode) {
        case CPM_PHASE_KNOWN_ZERO: cc.phase_mode = PhaseMode::KnownZero; break;
        case CPM_PHASE_EXPLICIT: cc.phase_mode = PhaseMode::Explicit; break;
        case CPM_PHASE_UNIFORM_RANDOM: cc.phase_mode = PhaseMode::UniformRandom; break;
        default: fail(ErrorCode::Parameter, "unknown phase mode");
        }
        cc.explicit_phase = phase;
        cc.seed = seed;
        const ChannelOutput o = apply_channel(in, cc, s->scheme);
        for (std::size_t i = 0; i < n_samples; ++i) {
            iq[2 * i] = o.frame.samples[i].real();
            iq[2 * i + 1] = o.frame.samples[i].imag();
        }
        if (applied_phase)
            *applied_phase = o.phase;
    });
}

cpm_status cpm_detector_create(const cpm_scheme* s, int k, const char* detector, int n_survivors, int window,
                               cpm_detector** out)
{
    return guarded([&] {
        need(s, "scheme");
        need(detector, "detector");
        need(out, "out");
        require(k >= 2, ErrorCode::Parameter, "oversampling k must be >= 2");
        const DetectorSpec spec = DetectorSpec::parse(detector, n_survivors, window);
        PulseTable pulse = build_pulse(s->scheme, k);
        AnyDetector det(s->scheme, pulse, spec);
        *out = new cpm_detector{s->scheme, std::move(pulse), std::move(det), k};
    });
}

void cpm_detector_destroy(cpm_detector* d) { delete d; }

cpm_status cpm_detect(cpm_detector* d, const double* iq, size_t n_samples, int* data, size_t data_capacity,
                      size_t* n_data, double* final_metric)
{
    return guarded([&] {
        need(d, "detector");
        const Decision dec = d->det.detect(frame_from(iq, n_samples, d->k));
        copy_decision(dec, data, data_capacity, n_data, final_metric);
    });
}

cpm_status cpm_oracle_detect(const cpm_scheme* s, int k, int coherent, const double* iq, size_t n_samples, int* data,
                             size_t data_capacity, size_t* n_data, double* final_metric)
{
    return guarded([&] {
        need(s, "scheme");
        const PulseTable pulse = build_pulse(s->scheme, k);
        const IqFrame f = frame_from(iq, n_samples, k);
        const Decision dec = coherent ? oracle_coherent(f, s->scheme, pulse, 0.0) : oracle_noncoherent(f, s->scheme, pulse);
        copy_decision(dec, data, data_capacity, n_data, final_metric);
    });
}

cpm_status cpm_complexity(const char* method, const char* scheme, int k, int n_p, long long* n_mul, long long* n_add)
{
    return guarded([&] {
        need(method, "method");
        need(scheme, "scheme");
        const ComplexityRecord r = complexity(method_from(method), Scheme::from_name(scheme), k, n_p);
        if (n_mul)
            *n_mul = r.n_mul;
        if (n_add)
            *n_add = r.n_add;
    });
}

cpm_status cpm_union_bound(const char* scheme, int depth, int terms, double ebn0_db, double* bound)
{
    return guarded([&] {
        need(scheme, "scheme");
        need(bound, "bound");
        *bound = union_bound(distance_spectrum(Scheme::from_name(scheme), depth), ebn0_db, terms);
    });
}

cpm_status cpm_ber_confint(long long errors, long long bits, double* estimate, double* ci_low, double* ci_high)
{
    return guarded([&] {
        const BerEstimate e = ber_confint(errors, bits);
        if (estimate)
            *estimate = e.estimate;
        if (ci_low)
            *ci_low = e.ci_low;
        if (ci_high)
            *ci_high = e.ci_high;
    });
}

double cpm_q_function(double x) { return q_function(x); }

cpm_status cpm_experiment_create(cpm_experiment** out)
{
    return guarded([&] {
        need(out, "out");
        *out = new cpm_experiment{};
    });
}

cpm_status cpm_experiment_load(const char* path, cpm_experiment** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new cpm_experiment{ExperimentConfig::load(path), {}, 0.0};
    });
}

void cpm_experiment_destroy(cpm_experiment* e) { delete e; }

cpm_status cpm_experiment_set(cpm_experiment* e, const char* key, const char* value)
{
    return guarded([&] {
        need(e, "experiment");
        need(key, "key");
        need(value, "value");
        e->config.set(key, value);
    });
}

cpm_status cpm_experiment_validate(const cpm_experiment* e)
{
    return guarded([&] {
        need(e, "experiment");
        e->config.validate();
    });
}

cpm_status cpm_experiment_config_json(const cpm_experiment* e, char* buf, size_t capacity, size_t* needed)
{
    return guarded([&] {
        need(e, "experiment");
        const std::string j = e->config.to_json();
        if (needed)
            *needed = j.size() + 1;
        if (!buf && capacity == 0)
            return;
        require(capacity >= j.size() + 1, ErrorCode::Range, "buffer too small for the config JSON");
        need(buf, "buf");
        std::memcpy(buf, j.c_str(), j.size() + 1);
    });
}

cpm_status cpm_experiment_run(cpm_experiment* e, cpm_progress_fn progress, void* user)
{
    return guarded([&] {
        need(e, "experiment");
        const auto t0 = std::chrono::steady_clock::now();
        ProgressFn fn;
        if (progress)
            fn = [&](const BerRecord& r) {
                const cpm_ber_record c = to_c(r);
                progress(&c, user);
            };
        e->records = run_sweep(e->config, fn);
        e->wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });
}

size_t cpm_experiment_record_count(const cpm_experiment* e) { return e ? e->records.size() : 0; }

cpm_status cpm_experiment_record(const cpm_experiment* e, size_t index, cpm_ber_record* out)
{
    return guarded([&] {
        need(e, "experiment");
        need(out, "out");
        require(index < e->records.size(), ErrorCode::Range, "record index out of range");
        *out = to_c(e->records[index]);
    });
}

int cpm_experiment_has_output(const cpm_experiment* e) { return e && !e->config.output_path.empty(); }

cpm_status cpm_experiment_write(const cpm_experiment* e)
{
    return guarded([&] {
        need(e, "experiment");
        write_outputs(e->config, e->records, e->wall_seconds);
    });
}

cpm_status cpm_dump_tables(const char* dir, int k, int traceback_n)
{
    return guarded([&] {
        need(dir, "dir");
        dump_tables(dir, k, traceback_n);
    });
}

cpm_status cpm_dump_pulse(const char* scheme, int k, const char* path)
{
    return guarded([&] {
        need(scheme, "scheme");
        const PulseTable t = build_pulse(Scheme::from_name(scheme), k);
        auto f = open_out(path);
        t.write_csv(f);
    });
}

cpm_status cpm_dump_spectrum(const char* scheme, int depth, const char* path)
{
    return guarded([&] {
        need(scheme, "scheme");
        const DistanceSpectrum ds = distance_spectrum(Scheme::from_name(scheme), depth);
        auto f = open_out(path);
        f << "d_squared,multiplicity,coefficient\n";
        char line[128];
        for (const SpectrumEntry& e : ds.entries) {
            std::snprintf(line, sizeof line, "%.9f,%lld,%.9g\n", e.d_squared, e.multiplicity, e.coefficient);
            f << line;
        }
    });
}

cpm_status cpm_emit_curves(const char* const* record_paths, size_t n_paths, const char* out_path)
{
    return guarded([&] {
        require(n_paths > 0, ErrorCode::EmptyInput, "no record files given");
        need(record_paths, "record_paths");
        std::vector<BerRecord> all;
        for (size_t i = 0; i < n_paths; ++i) {
            need(record_paths[i], "record path");
            std::ifstream in(record_paths[i]);
            if (!in)
                fail(ErrorCode::Io, std::string("cannot open '") + record_paths[i] + "'");
            try {
                const auto recs = read_records_csv(in);
                all.insert(all.end(), recs.begin(), recs.end());
            } catch (const Error& e) {
                fail(e.code(), std::string(record_paths[i]) + ": " + e.what());
            }
        }
        std::ostringstream os;
        emit_curves(os, all);
        auto f = open_out(out_path);
        f << os.str();
    });
}

cpm_status cpm_oracle_suite(const char* scheme, long long trials, int max_len, double ebn0_db, uint64_t seed,
                            cpm_oracle_report* out)
{
    return guarded([&] {
        need(scheme, "scheme");
        need(out, "out");
        const OracleReport r = run_oracle_suite(Scheme::from_name(scheme).kind, trials, max_len, ebn0_db, seed);
        out->trials = r.trials;
        out->coherent_agree = r.coherent_agree;
        out->noncoherent_agree = r.noncoherent_agree;
        out->metric_dominance = r.metric_dominance;
        out->passed = r.passed() ? 1 : 0;
    });
}

}  // extern "C"
