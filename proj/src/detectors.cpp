// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cpm/detectors.hpp"

#include <cmath>
#include <limits>

namespace cpm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int ipow(int base, int exp)
{
    int r = 1;
    for (int i = 0; i < exp; ++i)
        r *= base;
    return r;
}

/// Mixed-radix code of the L-1 head pilots.
int head_recent_code(const Scheme& scheme)
{
    int code = 0;
    for (int i = 0; i < scheme.head_pilots(); ++i)
        code = code * scheme.M + scheme.rank(scheme.pilot_symbol());
    return code;
}

struct Layout {
    int n_symbols = 0;
    int first = 0;     // first detected interval (L-1)
    int data_end = 0;  // symbols at or beyond this index are tail pilots
};

Layout frame_layout(const Scheme& scheme, int n_symbols)
{
    require(scheme.L >= 2, ErrorCode::Parameter, "trellis detectors need L >= 2");
    require(n_symbols > scheme.pilot_count(), ErrorCode::Mismatch,
            "frame must hold the pilots plus at least one data symbol");
    return Layout{n_symbols, scheme.L - 1, n_symbols - scheme.tail_pilots()};
}

void check_corr(const CorrelationMatrix& corr, const Scheme& scheme)
{
    require(corr.n_codes == scheme.n_codes() && corr.first == scheme.L - 1, ErrorCode::Mismatch,
            "correlations were computed for a different scheme");
}

std::vector<std::vector<int>> step_table(const Scheme& scheme)
{
    std::vector<std::vector<int>> t(static_cast<std::size_t>(scheme.n_parities()));
    for (int par = 0; par < scheme.n_parities(); ++par)
        for (int r = 0; r < scheme.M; ++r)
            t[static_cast<std::size_t>(par)].push_back(scheme.phase_step_by_rank(par, r));
    return t;
}

std::vector<Complex> conj_phasors(int p)
{
    std::vector<Complex> t = phasor_table(p);
    for (Complex& c : t)
        c = std::conj(c);
    return t;
}

}  // namespace

TrellisShape coherent_trellis_shape(const Scheme& scheme)
{
    return {scheme.p * scheme.n_recent(), scheme.p * scheme.n_codes()};
}

TrellisShape proposed_trellis_shape(const Scheme& scheme)
{
    return {scheme.n_codes(), scheme.n_codes() * scheme.M};
}

// ---------------------------------------------------------------------------
// Coherent MLSD
// ---------------------------------------------------------------------------

CoherentDetector::CoherentDetector(Scheme scheme, FilterBanks banks)
    : scheme_(std::move(scheme)), banks_(std::move(banks)), shape_(coherent_trellis_shape(scheme_)),
      phasors_(conj_phasors(scheme_.p))
{
    require(shape_.states == scheme_.p * ipow(scheme_.M, scheme_.L - 1), ErrorCode::Parameter, "coherent state count");
    require(shape_.branches == shape_.states * scheme_.M, ErrorCode::Parameter, "coherent branch count");
    require(shape_.states <= std::numeric_limits<std::uint16_t>::max(), ErrorCode::Parameter,
            "coherent trellis too large for 16-bit back pointers");
    require(static_cast<int>(banks_.by_parity.size()) == scheme_.n_parities(), ErrorCode::Mismatch,
            "one filter bank per h parity is required");
}

Decision CoherentDetector::detect(const IqFrame& frame, double assumed_phase)
{
    return detect(correlate_frame(frame, banks_, scheme_), assumed_phase);
}

Decision CoherentDetector::detect(const CorrelationMatrix& corr, double assumed_phase)
{
    check_corr(corr, scheme_);
    const Layout lay = frame_layout(scheme_, corr.n_symbols);
    const int S = shape_.states;
    const int M = scheme_.M;
    const int R = scheme_.n_recent();
    const int R_hi = R / M;  // weight of the oldest symbol inside a recent tuple
    const int p = scheme_.p;
    const int L = scheme_.L;
    const auto steps = step_table(scheme_);
    const int pilot_rank = scheme_.rank(scheme_.pilot_symbol());

    std::vector<Complex> rot(static_cast<std::size_t>(p));
    const Complex carrier = std::polar(1.0, -assumed_phase);
    for (int m = 0; m < p; ++m)
        rot[static_cast<std::size_t>(m)] = carrier * phasors_[static_cast<std::size_t>(m)];

    metric_.assign(static_cast<std::size_t>(S), kNegInf);
    next_.assign(static_cast<std::size_t>(S), kNegInf);
    const int steps_total = lay.n_symbols - lay.first;
    back_.assign(static_cast<std::size_t>(steps_total) * S, 0);
    metric_[static_cast<std::size_t>(head_recent_code(scheme_))] = 0.0;  // phase index 0

    for (int n = lay.first; n < lay.n_symbols; ++n) {
        std::fill(next_.begin(), next_.end(), kNegInf);
        const Complex* z = corr.row(n);
        const bool tail = n >= lay.data_end;
        const int r_lo = tail ? pilot_rank : 0;
        const int r_hi = tail ? pilot_rank + 1 : M;
        const auto& step = steps[static_cast<std::size_t>(scheme_.parity(n - L + 1))];
        std::uint16_t* bp = back_.data() + static_cast<std::size_t>(n - lay.first) * S;
        for (int s = 0; s < S; ++s) {
            const double base = metric_[static_cast<std::size_t>(s)];
            if (base == kNegInf)
                continue;
            const int phase = s / R;
            const int recent = s % R;
            const int oldest = recent / R_hi;
            const int next_phase = (phase + step[static_cast<std::size_t>(oldest)]) % p;
            const Complex w = rot[static_cast<std::size_t>(phase)];
            for (int r = r_lo; r < r_hi; ++r) {
                const int code = recent * M + r;
                const Complex zc = z[code];
                const double cand = base + (w.real() * zc.real() - w.imag() * zc.imag());
                const int ns = next_phase * R + code % R;
                if (cand > next_[static_cast<std::size_t>(ns)]) {
                    next_[static_cast<std::size_t>(ns)] = cand;
                    bp[ns] = static_cast<std::uint16_t>(s);
                }
            }
        }
        metric_.swap(next_);
    }

    int best = 0;
    for (int s = 1; s < S; ++s)
        if (metric_[static_cast<std::size_t>(s)] > metric_[static_cast<std::size_t>(best)])
            best = s;

    Decision d;
    d.final_metric = metric_[static_cast<std::size_t>(best)];
    d.symbols.assign(static_cast<std::size_t>(lay.data_end - lay.first), 0);
    int s = best;
    for (int n = lay.n_symbols - 1; n >= lay.first; --n) {
        if (n < lay.data_end)
            d.symbols[static_cast<std::size_t>(n - lay.first)] = scheme_.alphabet[static_cast<std::size_t>(s % M)];
        s = back_[static_cast<std::size_t>(n - lay.first) * S + static_cast<std::size_t>(s)];
    }
    return d;
}

// ---------------------------------------------------------------------------
// Survived-phase noncoherent Viterbi
// ---------------------------------------------------------------------------

int update_state(std::span<const SurvivorCandidate> candidates, const Scheme& scheme, int n_survivors,
                 std::span<Survivor> out)
{
    require(n_survivors >= 1, ErrorCode::Parameter, "n_survivors must be >= 1");
    require(static_cast<int>(out.size()) >= n_survivors, ErrorCode::Parameter, "survivor buffer too small");
    thread_local std::vector<Complex> rotations;
    thread_local int rotations_p = 0;
    if (rotations_p != scheme.p) {
        rotations = conj_phasors(scheme.p);
        rotations_p = scheme.p;
    }

    double norms[kMaxSurvivors];
    const int cap = std::min(n_survivors, kMaxSurvivors);
    int kept = 0;
    for (const SurvivorCandidate& c : candidates) {
        const int phase = (c.prev_phase + scheme.phase_step(c.exiting_index, c.exiting_symbol)) % scheme.p;
        const Complex metric = c.prev_metric + rotations[static_cast<std::size_t>(phase)] * c.correlation;
        const double nrm = std::norm(metric);
        // Insert after every entry with norm >= nrm so equal metrics keep input order.
        int pos = kept;
        while (pos > 0 && norms[pos - 1] < nrm)
            --pos;
        if (pos >= cap)
            continue;
        const int last = std::min(kept, cap - 1);
        for (int i = last; i > pos; --i) {
            out[static_cast<std::size_t>(i)] = out[static_cast<std::size_t>(i - 1)];
            norms[i] = norms[i - 1];
        }
        out[static_cast<std::size_t>(pos)] = Survivor{phase, metric, c.prev_state, c.prev_rank};
        norms[pos] = nrm;
        kept = std::min(kept + 1, cap);
    }
    return kept;
}

std::vector<Survivor> update_state(std::span<const SurvivorCandidate> candidates, const Scheme& scheme, int n_survivors)
{
    require(!candidates.empty(), ErrorCode::Parameter, "update_state needs at least one candidate");
    std::vector<Survivor> out(static_cast<std::size_t>(n_survivors));
    out.resize(static_cast<std::size_t>(update_state(candidates, scheme, n_survivors, out)));
    return out;
}

ProposedDetector::ProposedDetector(Scheme scheme, FilterBanks banks, int n_survivors)
    : scheme_(std::move(scheme)), banks_(std::move(banks)), n_survivors_(n_survivors),
      shape_(proposed_trellis_shape(scheme_)), rotations_(conj_phasors(scheme_.p))
{
    require(n_survivors >= 1 && n_survivors <= kMaxSurvivors, ErrorCode::Parameter, "n_survivors must be in [1, 4]");
    require(shape_.states == ipow(scheme_.M, scheme_.L), ErrorCode::Parameter, "proposed state count");
    require(shape_.branches == ipow(scheme_.M, scheme_.L + 1), ErrorCode::Parameter, "proposed branch count");
    require(static_cast<int>(banks_.by_parity.size()) == scheme_.n_parities(), ErrorCode::Mismatch,
            "one filter bank per h parity is required");
}

std::vector<int> ProposedDetector::predecessors(int code) const
{
    require(code >= 0 && code < shape_.states, ErrorCode::Range, "state code out of range");
    const int R = scheme_.n_recent();
    std::vector<int> out;
    for (int oldest = 0; oldest < scheme_.M; ++oldest)
        out.push_back(oldest * R + code / scheme_.M);
    return out;
}

Decision ProposedDetector::detect(const IqFrame& frame) { return detect(correlate_frame(frame, banks_, scheme_)); }

Decision ProposedDetector::detect(const CorrelationMatrix& corr)
{
    check_corr(corr, scheme_);
    const Layout lay = frame_layout(scheme_, corr.n_symbols);
    const int S = shape_.states;
    const int K = n_survivors_;
    const int M = scheme_.M;
    const int R = scheme_.n_recent();
    const int L = scheme_.L;
    const int pilot_rank = scheme_.rank(scheme_.pilot_symbol());

    cur_.assign(static_cast<std::size_t>(S) * K, Survivor{});
    next_.assign(static_cast<std::size_t>(S) * K, Survivor{});
    cur_count_.assign(static_cast<std::size_t>(S), 0);
    next_count_.assign(static_cast<std::size_t>(S), 0);
    cand_.resize(static_cast<std::size_t>(M) * K);
    const int steps_total = lay.n_symbols - lay.first;
    back_.assign(static_cast<std::size_t>(steps_total) * S * K, -1);

    auto allowed = [&](int n, int r) { return n < lay.data_end || r == pilot_rank; };

    // First interval: predecessor is the pilot-fixed start, survived phase 0.
    {
        const Complex* z = corr.row(lay.first);
        const int head = head_recent_code(scheme_);
        for (int r = 0; r < M; ++r) {
            if (!allowed(lay.first, r))
                continue;
            const int code = head * M + r;
            cur_[static_cast<std::size_t>(code) * K] = Survivor{0, z[code], -1, -1};
            cur_count_[static_cast<std::size_t>(code)] = 1;
        }
    }

    for (int n = lay.first + 1; n < lay.n_symbols; ++n) {
        const Complex* z = corr.row(n);
        const std::ptrdiff_t exiting_index = n - L;
        std::int32_t* bp = back_.data() + static_cast<std::size_t>(n - lay.first) * S * K;
        for (int code = 0; code < S; ++code) {
            next_count_[static_cast<std::size_t>(code)] = 0;
            if (!allowed(n, code % M))
                continue;
            std::size_t nc = 0;
            for (int oldest = 0; oldest < M; ++oldest) {
                const int prev = oldest * R + code / M;
                const int cnt = cur_count_[static_cast<std::size_t>(prev)];
                for (int k = 0; k < cnt; ++k) {
                    const Survivor& sv = cur_[static_cast<std::size_t>(prev) * K + static_cast<std::size_t>(k)];
                    cand_[nc++] = SurvivorCandidate{sv.phase, sv.metric, scheme_.alphabet[static_cast<std::size_t>(oldest)],
                                                    exiting_index, z[code], prev, k};
                }
            }
            if (nc == 0)
                continue;
            std::span<Survivor> dst(next_.data() + static_cast<std::size_t>(code) * K, static_cast<std::size_t>(K));
            const int kept = update_state(std::span<const SurvivorCandidate>(cand_.data(), nc), scheme_, K, dst);
            next_count_[static_cast<std::size_t>(code)] = kept;
            for (int k = 0; k < kept; ++k)
                bp[code * K + k] = dst[static_cast<std::size_t>(k)].prev_state * K + dst[static_cast<std::size_t>(k)].prev_rank;
        }
        cur_.swap(next_);
        cur_count_.swap(next_count_);
    }

    int best_code = -1;
    int best_rank = 0;
    double best_norm = -1.0;
    for (int code = 0; code < S; ++code)
        for (int k = 0; k < cur_count_[static_cast<std::size_t>(code)]; ++k) {
            const double nrm = std::norm(cur_[static_cast<std::size_t>(code) * K + static_cast<std::size_t>(k)].metric);
            if (nrm > best_norm) {
                best_norm = nrm;
                best_code = code;
                best_rank = k;
            }
        }
    require(best_code >= 0, ErrorCode::Mismatch, "no surviving path");

    Decision d;
    d.final_metric = std::sqrt(best_norm);
    d.symbols.assign(static_cast<std::size_t>(lay.data_end - lay.first), 0);
    int code = best_code;
    int rank = best_rank;
    for (int n = lay.n_symbols - 1; n >= lay.first; --n) {
        if (n < lay.data_end)
            d.symbols[static_cast<std::size_t>(n - lay.first)] = scheme_.alphabet[static_cast<std::size_t>(code % M)];
        if (n == lay.first)
            break;
        const std::int32_t link = back_[static_cast<std::size_t>(n - lay.first) * S * K + static_cast<std::size_t>(code) * K + static_cast<std::size_t>(rank)];
        code = link / K;
        rank = link % K;
    }
    return d;
}

// ---------------------------------------------------------------------------
// Multi-symbol detection baseline
// ---------------------------------------------------------------------------

MsdDetector::MsdDetector(Scheme scheme, FilterBanks banks, int window)
    : scheme_(std::move(scheme)), banks_(std::move(banks)), window_(window), rotations_(conj_phasors(scheme_.p))
{
    require(window >= 1 && window % 2 == 1, ErrorCode::Parameter, "MSD window must be odd and >= 1");
    require(scheme_.kind == SchemeKind::PcmFm, ErrorCode::Parameter, "the MSD baseline is defined for PCM/FM only");
    require(window + scheme_.L - 1 <= 20, ErrorCode::Parameter, "MSD window too large to enumerate");
}

Decision MsdDetector::detect(const IqFrame& frame) { return detect(correlate_frame(frame, banks_, scheme_)); }

Decision MsdDetector::detect(const CorrelationMatrix& corr)
{
    check_corr(corr, scheme_);
    const Layout lay = frame_layout(scheme_, corr.n_symbols);
    const int M = scheme_.M;
    const int L = scheme_.L;
    const int half = window_ / 2;
    const int pilot_rank = scheme_.rank(scheme_.pilot_symbol());
    const auto steps = step_table(scheme_);

    std::vector<int> ranks;
    std::vector<int> free_pos;
    Decision d;
    d.symbols.reserve(static_cast<std::size_t>(lay.data_end - lay.first));
    double total = 0.0;

    for (int n = lay.first; n < lay.data_end; ++n) {
        const int lo = std::max(lay.first, n - half);
        const int hi = std::min(lay.n_symbols - 1, n + half);
        const int sym_lo = lo - L + 1;
        const int width = hi - sym_lo + 1;
        ranks.assign(static_cast<std::size_t>(width), pilot_rank);
        free_pos.clear();
        for (int i = 0; i < width; ++i) {
            const int idx = sym_lo + i;
            if (idx >= lay.first && idx < lay.data_end)
                free_pos.push_back(i);
        }
        const int n_hyp = ipow(M, static_cast<int>(free_pos.size()));
        double best = -1.0;
        int best_rank = 0;
        for (int h = 0; h < n_hyp; ++h) {
            int rem = h;
            for (auto it = free_pos.rbegin(); it != free_pos.rend(); ++it) {
                ranks[static_cast<std::size_t>(*it)] = rem % M;
                rem /= M;
            }
            int phase = 0;
            Complex acc;
            for (int m = lo; m <= hi; ++m) {
                int code = 0;
                for (int i = m - L + 1; i <= m; ++i)
                    code = code * M + ranks[static_cast<std::size_t>(i - sym_lo)];
                acc += rotations_[static_cast<std::size_t>(phase)] * corr.row(m)[code];
                const int oldest = ranks[static_cast<std::size_t>(m - L + 1 - sym_lo)];
                phase = (phase + steps[static_cast<std::size_t>(scheme_.parity(m - L + 1))][static_cast<std::size_t>(oldest)]) % scheme_.p;
            }
            const double nrm = std::norm(acc);
            if (nrm > best) {
                best = nrm;
                best_rank = ranks[static_cast<std::size_t>(n - sym_lo)];
            }
        }
        d.symbols.push_back(scheme_.alphabet[static_cast<std::size_t>(best_rank)]);
        total += std::sqrt(best);
    }
    d.final_metric = total;
    return d;
}

// ---------------------------------------------------------------------------
// Exhaustive oracles
// ---------------------------------------------------------------------------

Complex sequence_correlation(const IqFrame& frame, const Scheme& scheme, const PulseTable& pulse, std::span<const int> data)
{
    const std::vector<int> symbols = with_pilots(scheme, data);
    require(static_cast<int>(symbols.size()) == frame.n_symbols, ErrorCode::Mismatch,
            "hypothesis length does not match the frame");
    require(pulse.k == frame.k, ErrorCode::Mismatch, "pulse and frame oversampling differ");
    const Modulated s = modulate(scheme, pulse, symbols, 0);
    Complex acc;
    for (std::size_t m = static_cast<std::size_t>(scheme.L - 1) * frame.k; m < frame.samples.size(); ++m)
        acc += frame.samples[m] * std::conj(s.frame.samples[m]);
    return acc;
}

namespace {

template <typename Score>
Decision exhaustive(const IqFrame& frame, const Scheme& scheme, const PulseTable& pulse, Score score)
{
    const int n_data = frame.n_symbols - scheme.pilot_count();
    require(n_data >= 1, ErrorCode::Mismatch, "frame must hold the pilots plus at least one data symbol");
    require(n_data <= kOracleMaxDataSymbols, ErrorCode::TooLong,
            "exhaustive oracle refuses frames with more than " + std::to_string(kOracleMaxDataSymbols) + " data symbols");
    const long long n_hyp = static_cast<long long>(std::pow(scheme.M, n_data) + 0.5);
    std::vector<int> data(static_cast<std::size_t>(n_data));
    Decision best;
    best.final_metric = kNegInf;
    for (long long h = 0; h < n_hyp; ++h) {
        long long rem = h;
        for (int i = n_data - 1; i >= 0; --i) {
            data[static_cast<std::size_t>(i)] = scheme.alphabet[static_cast<std::size_t>(rem % scheme.M)];
            rem /= scheme.M;
        }
        const double v = score(sequence_correlation(frame, scheme, pulse, data));
        if (v > best.final_metric) {
            best.final_metric = v;
            best.symbols = data;
        }
    }
    return best;
}

}  // namespace

Decision oracle_coherent(const IqFrame& frame, const Scheme& scheme, const PulseTable& pulse, double assumed_phase)
{
    const Complex carrier = std::polar(1.0, -assumed_phase);
    return exhaustive(frame, scheme, pulse, [&](Complex c) { return (carrier * c).real(); });
}

Decision oracle_noncoherent(const IqFrame& frame, const Scheme& scheme, const PulseTable& pulse)
{
    return exhaustive(frame, scheme, pulse, [](Complex c) { return std::abs(c); });
}

}  // namespace cpm
