// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cpm/channel.hpp"

#include <cmath>

namespace cpm {

double noise_sigma(double ebn0_db, int M, int k)
{
    require(k >= 1, ErrorCode::Parameter, "oversampling k must be >= 1");
    require(M >= 2, ErrorCode::Parameter, "modulation order must be >= 2");
    const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    return std::sqrt(static_cast<double>(k) / (2.0 * std::log2(static_cast<double>(M)) * ebn0));
}

double noise_sigma(double ebn0_db, const Scheme& scheme, int k) { return noise_sigma(ebn0_db, scheme.M, k); }

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept
{
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

ChannelOutput apply_channel(const IqFrame& frame, const ChannelConfig& cfg, const Scheme& scheme)
{
    require(frame.samples.size() == static_cast<std::size_t>(frame.k) * static_cast<std::size_t>(frame.n_symbols),
            ErrorCode::Mismatch, "frame length is not k * n_symbols");

    // Phase and noise use separate streams so a frame sees the same noise under every phase mode.
    std::mt19937_64 phase_rng(derive_seed(cfg.seed, 0));
    std::mt19937_64 rng(derive_seed(cfg.seed, 1));
    ChannelOutput out;
    switch (cfg.phase_mode) {
    case PhaseMode::KnownZero:
        out.phase = 0.0;
        break;
    case PhaseMode::Explicit:
        require(cfg.explicit_phase >= 0.0 && cfg.explicit_phase < kTwoPi, ErrorCode::Parameter,
                "explicit carrier phase must lie in [0, 2*pi)");
        out.phase = cfg.explicit_phase;
        break;
    case PhaseMode::UniformRandom:
        out.phase = std::uniform_real_distribution<double>(0.0, kTwoPi)(phase_rng);
        break;
    }

    out.frame = frame;
    if (out.phase != 0.0) {
        const Complex rot = std::polar(1.0, out.phase);
        for (Complex& s : out.frame.samples)
            s *= rot;
    }
    if (!cfg.noiseless) {
        std::normal_distribution<double> gauss(0.0, noise_sigma(cfg.ebn0_db, scheme, frame.k));
        for (Complex& s : out.frame.samples) {
            const double x = gauss(rng);
            const double y = gauss(rng);
            s += Complex(x, y);
        }
    }
    return out;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace cpm
