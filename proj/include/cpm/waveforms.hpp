// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cpm/error.hpp"

namespace cpm {

enum class SchemeKind { PcmFm, ArtmCpm };
enum class PulseKind { Rc3, Bessel6 };

struct Rational {
    int num = 0;
    int den = 1;
};

/// Full parameterization of a CPM waveform family.
///
/// Cumulative phases are integers modulo `p` in units of 2*pi/p. A completed
/// symbol `a` at index `i` advances the phase by pi*h_i*a, which is the integer
/// `phase_step(i, a)` on that modulus.
struct Scheme {
    SchemeKind kind = SchemeKind::PcmFm;
    std::string name;
    int M = 2;
    std::vector<int> alphabet;  // ascending odd integers
    std::vector<Rational> h_cycle;
    int L = 3;
    int p = 20;
    PulseKind pulse = PulseKind::Bessel6;

    static Scheme pcmfm();
    static Scheme artm_cpm();
    static Scheme from_kind(SchemeKind kind);
    static Scheme from_name(std::string_view name);

    int n_parities() const noexcept { return static_cast<int>(h_cycle.size()); }
    int parity(std::ptrdiff_t symbol_index) const noexcept;
    int bits_per_symbol() const noexcept;

    /// Alphabet rank of `symbol` (0 for the most negative); throws Alphabet.
    int rank(int symbol) const;
    bool contains(int symbol) const noexcept;

    /// Phase increment of a completed symbol, in units of 2*pi/p.
    int phase_step(std::ptrdiff_t symbol_index, int symbol) const;
    int phase_step_by_rank(std::ptrdiff_t symbol_index, int rank) const;

    /// Known symbol used for the L-1 head and L-1 tail pilots.
    int pilot_symbol() const noexcept { return 1; }
    int head_pilots() const noexcept { return L - 1; }
    int tail_pilots() const noexcept { return L - 1; }
    int pilot_count() const noexcept { return head_pilots() + tail_pilots(); }

    /// Number of bank entries (M^L) and of recent-symbol tuples (M^(L-1)).
    int n_codes() const noexcept;
    int n_recent() const noexcept;
};

/// Sampled frequency pulse g and phase pulse q over [0, L*T], time in units of T.
struct PulseTable {
    PulseKind kind = PulseKind::Rc3;
    int L = 3;
    int k = 4;
    std::vector<double> g;  // L*k + 1 samples at t = m/k
    std::vector<double> q;  // L*k + 1 samples, q.front() == 0, q.back() == 0.5

    /// q at sample offset m >= 0 from the pulse start; saturates at 1/2.
    double q_at(std::ptrdiff_t m) const noexcept
    {
        if (m <= 0)
            return 0.0;
        if (m >= static_cast<std::ptrdiff_t>(q.size()) - 1)
            return 0.5;
        return q[static_cast<std::size_t>(m)];
    }

    void write_csv(std::ostream& os) const;
};

PulseTable build_rc3_pulse(int L, int k);
PulseTable build_pcmfm_pulse(int k);
PulseTable build_pulse(const Scheme& scheme, int k);

/// Complex baseband samples, k per symbol.
struct IqFrame {
    std::vector<Complex> samples;
    int k = 4;
    int n_symbols = 0;

    std::span<const Complex> symbol(int n) const
    {
        return std::span<const Complex>(samples).subspan(static_cast<std::size_t>(n) * k, static_cast<std::size_t>(k));
    }
};

/// Continuation state of a modulator: everything needed to append symbols.
struct ModulatorState {
    int phase_index = 0;     // cumulative phase of symbols whose pulses are complete
    std::vector<int> tail;   // the last (up to L-1) symbols whose pulses are still running
    std::ptrdiff_t next_symbol_index = 0;
};

struct Modulated {
    IqFrame frame;
    int final_phase_index = 0;  // initial + every symbol's full increment, mod p
    ModulatorState carry;
};

/// Synthesizes s(t) = exp(j*phi) for `symbols` starting from `start`.
Modulated modulate(const Scheme& scheme, const PulseTable& pulse, std::span<const int> symbols,
                   const ModulatorState& start);

Modulated modulate(const Scheme& scheme, const PulseTable& pulse, std::span<const int> symbols,
                   int initial_phase_index = 0);

Modulated modulate(const Scheme& scheme, std::span<const int> symbols, int k, int initial_phase_index = 0);

/// Cumulative phase index after each symbol, starting from 0.
std::vector<int> boundary_phases(const Scheme& scheme, std::span<const int> symbols);

/// Head pilots + data + tail pilots.
std::vector<int> with_pilots(const Scheme& scheme, std::span<const int> data);

/// Table of the p unit phasors exp(j*2*pi*m/p).
std::vector<Complex> phasor_table(int p);

}  // namespace cpm
