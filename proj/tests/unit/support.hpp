// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

// Helpers shared by the unit tests. Nothing here calls the detector code;
// the reference waveforms are built straight from the phase formula.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "cpm/waveforms.hpp"

namespace cpmtest {

using cpm::Complex;

inline std::vector<int> random_symbols(const cpm::Scheme& s, std::size_t n, std::mt19937_64& rng)
{
    std::vector<int> out(n);
    for (int& a : out)
        a = s.alphabet[rng() % static_cast<std::uint64_t>(s.M)];
    return out;
}

// phi(t) = 2*pi*init/p + sum_i 2*pi*h_i*a_i*q(t - iT), evaluated sample by sample.
inline std::vector<Complex> direct_waveform(const cpm::Scheme& s, const cpm::PulseTable& pulse,
                                            const std::vector<int>& symbols, int init = 0)
{
    const int k = pulse.k;
    const std::size_t n = symbols.size() * static_cast<std::size_t>(k);
    std::vector<Complex> out(n);
    for (std::size_t m = 0; m < n; ++m) {
        double phi = 2.0 * M_PI * init / s.p;
        for (std::size_t i = 0; i < symbols.size(); ++i) {
            const auto off = static_cast<std::ptrdiff_t>(m) - static_cast<std::ptrdiff_t>(i) * k;
            if (off <= 0)
                break;
            const cpm::Rational h = s.h_cycle[i % s.h_cycle.size()];
            phi += 2.0 * M_PI * h.num * symbols[i] / h.den * pulse.q_at(off);
        }
        out[m] = std::polar(1.0, phi);
    }
    return out;
}

// Full-frame correlation sum r * conj(s) from sample `from` on.
inline Complex correlate(const std::vector<Complex>& r, const std::vector<Complex>& s, std::size_t from)
{
    Complex acc{};
    for (std::size_t m = from; m < r.size(); ++m)
        acc += r[m] * std::conj(s[m]);
    return acc;
}

inline std::vector<Complex> add_noise(std::vector<Complex> x, double sigma, std::uint64_t seed, double rot = 0.0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, sigma);
    const Complex e = std::polar(1.0, rot);
    for (Complex& v : x) {
        v *= e;
        v += Complex(n(rng), n(rng));
    }
    return x;
}

inline cpm::IqFrame to_frame(std::vector<Complex> samples, int k)
{
    cpm::IqFrame f;
    f.k = k;
    f.n_symbols = static_cast<int>(samples.size()) / k;
    f.samples = std::move(samples);
    return f;
}

}  // namespace cpmtest
