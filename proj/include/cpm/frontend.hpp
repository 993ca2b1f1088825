// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "cpm/waveforms.hpp"

namespace cpm {

/// M^L local waveforms exp(j*theta(t; a_{n-L+1..n})) over one symbol interval.
///
/// Entry codes are mixed-radix over alphabet ranks, oldest symbol most
/// significant: c = ((r(a_{n-2}) * M) + r(a_{n-1})) * M + r(a_n) for L = 3.
struct FilterBank {
    int parity = 0;
    int k = 4;
    int n_codes = 0;
    std::vector<Complex> locals;  // n_codes * k, row-major by code

    std::span<const Complex> local(int code) const
    {
        return std::span<const Complex>(locals).subspan(static_cast<std::size_t>(code) * k, static_cast<std::size_t>(k));
    }
};

/// One bank per h-parity.
struct FilterBanks {
    std::vector<FilterBank> by_parity;

    const FilterBank& for_symbol(const Scheme& scheme, std::ptrdiff_t symbol_index) const
    {
        return by_parity[static_cast<std::size_t>(scheme.parity(symbol_index))];
    }
};

struct CorrelationRow {
    int symbol_index = 0;
    std::vector<Complex> values;  // one per code, z_c = sum r[m] * conj(local_c[m])
};

/// Per-interval correlations for every interval of a frame; rows before L-1 are empty.
struct CorrelationMatrix {
    int n_symbols = 0;
    int n_codes = 0;
    int first = 0;  // first interval whose code is defined (L-1)
    std::vector<Complex> values;

    const Complex* row(int n) const { return values.data() + static_cast<std::size_t>(n) * n_codes; }
};

/// Symbols (oldest first) of bank code `code`.
std::vector<int> decode_code(const Scheme& scheme, int code);
int encode_code(const Scheme& scheme, std::span<const int> symbols_oldest_first);

FilterBank build_filter_bank(const Scheme& scheme, const PulseTable& pulse, int parity);
FilterBanks build_filter_banks(const Scheme& scheme, const PulseTable& pulse);

CorrelationRow correlate_symbol(const IqFrame& frame, int symbol_index, const FilterBank& bank, const Scheme& scheme);
CorrelationMatrix correlate_frame(const IqFrame& frame, const FilterBanks& banks, const Scheme& scheme);

}  // namespace cpm
