// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cpm/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <ostream>

#include "cpm/channel.hpp"
#include "cpm/frontend.hpp"

namespace cpm {

std::string_view to_string(Method m) noexcept
{
    switch (m) {
    case Method::Msd: return "MSD";
    case Method::Mlsd: return "MLSD";
    case Method::Proposed: return "PROPOSED";
    }
    return "?";
}

namespace {

// The MSD baseline has no trellis; its surviving-hypothesis product is fixed.
constexpr int kMsdPaths = 128;
constexpr int kMsdWindow = 5;

}  // namespace

ComplexityRecord complexity(Method method, const Scheme& scheme, int k, int n_p)
{
    require(k >= 1, ErrorCode::Parameter, "oversampling k must be >= 1");
    require(n_p >= 1, ErrorCode::Parameter, "N_p must be >= 1");
    ComplexityRecord r;
    r.method = method;
    r.scheme = scheme.kind;
    r.k = k;
    r.n_mf = scheme.n_codes();
    switch (method) {
    case Method::Msd:
        require(scheme.kind == SchemeKind::PcmFm, ErrorCode::Parameter, "MSD complexity is defined for PCM/FM only");
        require(n_p == 1, ErrorCode::Parameter, "MSD has no survivor count");
        r.n_p = 1;
        r.paths = kMsdPaths;
        r.delta = 1;
        break;
    case Method::Mlsd:
        require(n_p == 1, ErrorCode::Parameter, "coherent MLSD keeps one survivor per state");
        r.n_s = scheme.p * scheme.n_recent();
        r.n_p = 1;
        r.paths = *r.n_s * scheme.M;
        r.delta = 0;
        break;
    case Method::Proposed:
        r.n_s = scheme.n_codes();
        r.n_p = n_p;
        r.paths = *r.n_s * n_p * scheme.M;
        r.delta = 1;
        break;
    }
    const long long x = r.paths;
    r.n_mul = 4LL * r.n_mf * k + 4 * x + 2 * x * r.delta;
    r.n_add = static_cast<long long>(r.n_mf) * (5LL * k - 2) + 3 * x + x * (1 + 2LL * r.delta);
    return r;
}

StorageRecord storage(Method method, const Scheme& scheme, int n_p, int k)
{
    require(n_p >= 1, ErrorCode::Parameter, "N_p must be >= 1");
    StorageRecord s;
    s.method = method;
    s.scheme = scheme.kind;
    s.n_p = n_p;
    // Complex locals: two values per sample.
    s.local_signal = 2 * k * scheme.n_codes();
    switch (method) {
    case Method::Msd:
        require(scheme.kind == SchemeKind::PcmFm, ErrorCode::Parameter, "MSD storage is defined for PCM/FM only");
        // One (cos, sin) pair per window position.
        s.rotation_angle = 2 * kMsdWindow;
        break;
    case Method::Mlsd:
        require(n_p == 1, ErrorCode::Parameter, "coherent MLSD keeps one survivor per state");
        s.rotation_angle = 2 * scheme.p;
        s.survived_path_per_n = scheme.p * scheme.n_recent();
        s.survived_phase = 0;
        break;
    case Method::Proposed:
        s.rotation_angle = 2 * scheme.p;
        // Two entries per survivor per step; one survived phase per state.
        s.survived_path_per_n = 2 * scheme.n_codes() * n_p;
        s.survived_phase = scheme.n_codes();
        break;
    }
    return s;
}

std::string StorageRecord::survived_path_text() const
{
    return survived_path_per_n ? std::to_string(*survived_path_per_n) + "N" : "-";
}

std::string StorageRecord::survived_phase_text() const
{
    return survived_phase ? std::to_string(*survived_phase) : "-";
}

long long StorageRecord::survived_path_cells(int traceback_n) const
{
    require(traceback_n >= 1, ErrorCode::Parameter, "traceback length must be >= 1");
    return survived_path_per_n ? static_cast<long long>(*survived_path_per_n) * traceback_n : 0;
}

std::vector<TableColumn> comparison_columns()
{
    return {
        {Method::Msd, SchemeKind::PcmFm, 1, "MSD PCM/FM"},
        {Method::Mlsd, SchemeKind::PcmFm, 1, "MLSD PCM/FM"},
        {Method::Mlsd, SchemeKind::ArtmCpm, 1, "MLSD ARTM CPM_1"},
        {Method::Proposed, SchemeKind::PcmFm, 1, "PROPOSED PCM/FM"},
        {Method::Proposed, SchemeKind::ArtmCpm, 1, "PROPOSED ARTM CPM_1"},
        {Method::Proposed, SchemeKind::ArtmCpm, 2, "PROPOSED ARTM CPM_2"},
    };
}

void write_complexity_csv(std::ostream& os, int k)
{
    std::vector<ComplexityRecord> recs;
    os << "quantity";
    for (const TableColumn& c : comparison_columns()) {
        os << ',' << c.label;
        recs.push_back(complexity(c.method, Scheme::from_kind(c.scheme), k, c.n_p));
    }
    os << "\nN_mf";
    for (const auto& r : recs) os << ',' << r.n_mf;
    os << "\nN_s";
    for (const auto& r : recs) {
        os << ',';
        if (r.n_s)
            os << *r.n_s;
        else
            os << '-';
    }
    os << "\nN_mul";
    for (const auto& r : recs) os << ',' << r.n_mul;
    os << "\nN_add";
    for (const auto& r : recs) os << ',' << r.n_add;
    os << '\n';
}

void write_storage_csv(std::ostream& os, int k, int traceback_n)
{
    require(traceback_n >= 1, ErrorCode::Parameter, "traceback length must be >= 1");
    std::vector<StorageRecord> recs;
    os << "quantity";
    for (const TableColumn& c : comparison_columns()) {
        os << ',' << c.label;
        recs.push_back(storage(c.method, Scheme::from_kind(c.scheme), c.n_p, k));
    }
    os << "\nlocal_signal";
    for (const auto& r : recs) os << ',' << r.local_signal;
    os << "\nrotation_angle";
    for (const auto& r : recs) os << ',' << r.rotation_angle;
    os << "\nsurvived_path";
    for (const auto& r : recs) os << ',' << r.survived_path_text();
    os << "\nsurvived_path_cells_N" << traceback_n;
    for (const auto& r : recs) {
        os << ',';
        if (r.survived_path_per_n)
            os << r.survived_path_cells(traceback_n);
        else
            os << '-';
    }
    os << "\nsurvived_phase";
    for (const auto& r : recs) os << ',' << r.survived_phase_text();
    os << '\n';
}

// ---------------------------------------------------------------------------
// Distance spectrum
// ---------------------------------------------------------------------------

double normalized_distance(std::span<const Complex> a, std::span<const Complex> b, const Scheme& scheme, int k)
{
    require(a.size() == b.size(), ErrorCode::Mismatch, "signals differ in length");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += std::norm(a[i] - b[i]);
    return acc * scheme.bits_per_symbol() / (2.0 * k);
}

namespace {

struct PathState {
    int phase = 0;
    int recent = 0;
    bool operator==(const PathState&) const = default;
};

struct SpectrumWalker {
    const Scheme& scheme;
    const FilterBanks& banks;
    const std::vector<Complex>& phasors;
    int depth;
    int k;
    int start_parity;
    double start_weight;  // probability of the start memory and parity
    std::map<long long, SpectrumEntry>& bins;

    void step(int t, PathState a, PathState b, double dist, int bit_errors, double prob)
    {
        if (t == depth)
            return;
        const int M = scheme.M;
        const int R = scheme.n_recent();
        const std::ptrdiff_t sym_index = start_parity + t;
        const FilterBank& bank = banks.for_symbol(scheme, sym_index);
        const std::ptrdiff_t exit_index = sym_index - scheme.L + 1;
        for (int ra = 0; ra < M; ++ra) {
            for (int rb = 0; rb < M; ++rb) {
                // First symbol must differ; ordered (ra < rb) so each unordered pair is walked once.
                if (t == 0 && ra >= rb)
                    continue;
                const int ca = a.recent * M + ra;
                const int cb = b.recent * M + rb;
                const Complex pa = phasors[static_cast<std::size_t>(a.phase)];
                const Complex pb = phasors[static_cast<std::size_t>(b.phase)];
                double d = 0.0;
                const auto la = bank.local(ca);
                const auto lb = bank.local(cb);
                for (int m = 0; m < k; ++m)
                    d += std::norm(pa * la[static_cast<std::size_t>(m)] - pb * lb[static_cast<std::size_t>(m)]);
                const PathState na{(a.phase + scheme.phase_step_by_rank(exit_index, a.recent / (R / M))) % scheme.p, ca % R};
                const PathState nb{(b.phase + scheme.phase_step_by_rank(exit_index, b.recent / (R / M))) % scheme.p, cb % R};
                const int be = std::popcount(static_cast<unsigned>(ra ^ rb));
                const double nd = dist + d;
                const double np = prob / M;
                if (na == nb) {
                    record(nd, bit_errors + be, np);
                    continue;
                }
                step(t + 1, na, nb, nd, bit_errors + be, np);
            }
        }
    }

    void record(double raw, int bit_errors, double prob)
    {
        const double d2 = raw * scheme.bits_per_symbol() / (2.0 * k);
        const long long key = std::llround(d2 * 1e9);
        SpectrumEntry& e = bins[key];
        e.d_squared = static_cast<double>(key) * 1e-9;
        e.multiplicity += 1;
        // Each unordered pair stands for two ordered (transmitted, competitor) events.
        e.coefficient += 2.0 * start_weight * prob * bit_errors / scheme.bits_per_symbol();
    }
};

}  // namespace

DistanceSpectrum distance_spectrum(const Scheme& scheme, int depth, int k)
{
    require(depth >= 1, ErrorCode::Parameter, "depth must be >= 1");
    require(depth <= kMaxSpectrumDepth, ErrorCode::TooLong, "distance spectrum depth is limited to 8");
    const double work = std::pow(static_cast<double>(scheme.M), 2.0 * depth) * scheme.n_recent() * scheme.n_parities();
    require(work <= std::pow(2.0, 26), ErrorCode::TooLong, "distance spectrum enumeration too large for this depth");

    const PulseTable pulse = build_pulse(scheme, k);
    const FilterBanks banks = build_filter_banks(scheme, pulse);
    const std::vector<Complex> phasors = phasor_table(scheme.p);
    std::map<long long, SpectrumEntry> bins;
    const double start_weight = 1.0 / (scheme.n_recent() * scheme.n_parities());
    for (int par = 0; par < scheme.n_parities(); ++par) {
        SpectrumWalker w{scheme, banks, phasors, depth, k, par, start_weight, bins};
        for (int mem = 0; mem < scheme.n_recent(); ++mem)
            w.step(0, PathState{0, mem}, PathState{0, mem}, 0.0, 0, 1.0);
    }
    DistanceSpectrum out;
    for (auto& [key, e] : bins)
        out.entries.push_back(e);
    return out;
}

double union_bound(const DistanceSpectrum& spectrum, double ebn0_db, int terms)
{
    require(terms >= 1, ErrorCode::Parameter, "terms must be >= 1");
    const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    double sum = 0.0;
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(terms), spectrum.entries.size());
    for (std::size_t i = 0; i < n; ++i) {
        const SpectrumEntry& e = spectrum.entries[i];
        sum += e.coefficient * q_function(std::sqrt(e.d_squared * ebn0));
    }
    return sum;
}

BerEstimate ber_confint(long long errors, long long bits)
{
    require(bits >= 1, ErrorCode::Parameter, "bits must be >= 1");
    require(errors >= 0 && errors <= bits, ErrorCode::Parameter, "errors must lie in [0, bits]");
    const double n = static_cast<double>(bits);
    if (errors == 0)
        return {0.0, 0.0, 3.0 / n};
    const double p = static_cast<double>(errors) / n;
    const double hw = 1.96 * std::sqrt(p * (1.0 - p) / n);
    return {p, std::max(0.0, p - hw), std::min(1.0, p + hw)};
}

}  // namespace cpm
