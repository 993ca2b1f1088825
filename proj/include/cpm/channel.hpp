// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include "cpm/waveforms.hpp"

namespace cpm {

enum class PhaseMode { KnownZero, Explicit, UniformRandom };

struct ChannelConfig {
    double ebn0_db = 10.0;
    bool noiseless = false;  // stands in for Eb/N0 = +inf
    PhaseMode phase_mode = PhaseMode::KnownZero;
    double explicit_phase = 0.0;  // radians in [0, 2*pi), used with PhaseMode::Explicit
    std::uint64_t seed = 0;
};

struct ChannelOutput {
    IqFrame frame;
    double phase = 0.0;
};

/// Per-real-dimension, per-sample noise std for unit-magnitude samples with
/// Es = k, Eb = k / log2(M) and N0 = 2*sigma^2.
double noise_sigma(double ebn0_db, const Scheme& scheme, int k);
double noise_sigma(double ebn0_db, int M, int k);

/// Stream seed for item `index` of a run keyed by `master` (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// r[m] = s[m]*exp(j*v) + n[m]; deterministic in cfg.seed.
ChannelOutput apply_channel(const IqFrame& frame, const ChannelConfig& cfg, const Scheme& scheme);

/// Gaussian Q function.
double q_function(double x);

}  // namespace cpm
