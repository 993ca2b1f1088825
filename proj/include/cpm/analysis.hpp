// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cpm/waveforms.hpp"

namespace cpm {

enum class Method { Msd, Mlsd, Proposed };

std::string_view to_string(Method m) noexcept;

/// Per-symbol operation counts of a detector front end plus trellis update.
struct ComplexityRecord {
    Method method = Method::Mlsd;
    SchemeKind scheme = SchemeKind::PcmFm;
    int k = 4;
    int n_mf = 0;
    std::optional<int> n_s;  // absent for MSD, which has no trellis
    int n_p = 1;
    int paths = 0;           // N_s * N_p * M (fixed at 128 for MSD)
    int delta = 0;
    long long n_mul = 0;
    long long n_add = 0;
};

/// N_mul = 4*N_mf*k + 4*X + 2*X*delta,  N_add = N_mf*(5k-2) + 3*X + X*(1+2*delta),  X = N_s*N_p*M.
ComplexityRecord complexity(Method method, const Scheme& scheme, int k = 4, int n_p = 1);

/// Storage per received symbol, in sample-value units. Survived-path storage
/// scales with the traceback length N and is kept symbolic as a coefficient.
struct StorageRecord {
    Method method = Method::Mlsd;
    SchemeKind scheme = SchemeKind::PcmFm;
    int n_p = 1;
    int local_signal = 0;
    int rotation_angle = 0;
    std::optional<int> survived_path_per_n;
    std::optional<int> survived_phase;

    std::string survived_path_text() const;   // "80N" or "-"
    std::string survived_phase_text() const;  // "8" or "-"
    long long survived_path_cells(int traceback_n) const;
};

StorageRecord storage(Method method, const Scheme& scheme, int n_p = 1, int k = 4);

/// The six detector configurations compared side by side.
struct TableColumn {
    Method method;
    SchemeKind scheme;
    int n_p;
    std::string label;
};
std::vector<TableColumn> comparison_columns();

void write_complexity_csv(std::ostream& os, int k);
void write_storage_csv(std::ostream& os, int k, int traceback_n);

struct SpectrumEntry {
    double d_squared = 0.0;
    long long multiplicity = 0;  // unordered sequence pairs at this distance
    double coefficient = 0.0;    // estimated bit-error weight per symbol time
};

/// Distances of merge events within `depth` symbols, normalized so a
/// one-bit antipodal pair has d^2 = 2. Sorted ascending.
struct DistanceSpectrum {
    std::vector<SpectrumEntry> entries;
};

inline constexpr int kMaxSpectrumDepth = 8;
DistanceSpectrum distance_spectrum(const Scheme& scheme, int depth, int k = 4);

/// Normalized squared distance between two full signals.
double normalized_distance(std::span<const Complex> a, std::span<const Complex> b, const Scheme& scheme, int k);

/// Estimated union bound: sum of coefficient * Q(sqrt(d^2 * Eb/N0)) over the first `terms` entries.
double union_bound(const DistanceSpectrum& spectrum, double ebn0_db, int terms);

struct BerEstimate {
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// Normal-approximation 95% interval; rule of three when no errors were seen.
BerEstimate ber_confint(long long errors, long long bits);

}  // namespace cpm
