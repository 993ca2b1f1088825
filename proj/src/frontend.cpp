// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cpm/frontend.hpp"

#include <cmath>

namespace cpm {

std::vector<int> decode_code(const Scheme& scheme, int code)
{
    require(code >= 0 && code < scheme.n_codes(), ErrorCode::Range, "filter code out of range");
    std::vector<int> out(static_cast<std::size_t>(scheme.L));
    for (int i = scheme.L - 1; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = scheme.alphabet[static_cast<std::size_t>(code % scheme.M)];
        code /= scheme.M;
    }
    return out;
}

int encode_code(const Scheme& scheme, std::span<const int> symbols_oldest_first)
{
    require(static_cast<int>(symbols_oldest_first.size()) == scheme.L, ErrorCode::Parameter,
            "bank code needs exactly L symbols");
    int code = 0;
    for (int a : symbols_oldest_first)
        code = code * scheme.M + scheme.rank(a);
    return code;
}

FilterBank build_filter_bank(const Scheme& scheme, const PulseTable& pulse, int parity)
{
    require(parity >= 0 && parity < scheme.n_parities(), ErrorCode::Parameter, "bank parity out of range");
    require(pulse.L == scheme.L, ErrorCode::Mismatch, "pulse length does not match scheme");

    FilterBank bank;
    bank.parity = parity;
    bank.k = pulse.k;
    bank.n_codes = scheme.n_codes();
    bank.locals.reserve(static_cast<std::size_t>(bank.n_codes) * bank.k);

    // Symbol at offset d back from the current one has index parity (parity - d).
    std::vector<double> weight(static_cast<std::size_t>(scheme.L));
    for (int code = 0; code < bank.n_codes; ++code) {
        const std::vector<int> syms = decode_code(scheme, code);
        for (int i = 0; i < scheme.L; ++i) {
            const int back = scheme.L - 1 - i;
            const Rational h = scheme.h_cycle[static_cast<std::size_t>(scheme.parity(parity - back))];
            weight[static_cast<std::size_t>(i)] = kTwoPi * h.num * syms[static_cast<std::size_t>(i)] / static_cast<double>(h.den);
        }
        for (int j = 0; j < bank.k; ++j) {
            double theta = 0.0;
            for (int i = 0; i < scheme.L; ++i) {
                const int back = scheme.L - 1 - i;
                theta += weight[static_cast<std::size_t>(i)] * pulse.q_at(back * bank.k + j);
            }
            bank.locals.emplace_back(std::cos(theta), std::sin(theta));
        }
    }
    return bank;
}

FilterBanks build_filter_banks(const Scheme& scheme, const PulseTable& pulse)
{
    FilterBanks banks;
    for (int par = 0; par < scheme.n_parities(); ++par)
        banks.by_parity.push_back(build_filter_bank(scheme, pulse, par));
    return banks;
}

namespace {

void correlate_into(std::span<const Complex> r, const FilterBank& bank, Complex* out)
{
    for (int c = 0; c < bank.n_codes; ++c) {
        const Complex* loc = bank.locals.data() + static_cast<std::size_t>(c) * bank.k;
        double re = 0.0;
        double im = 0.0;
        for (int m = 0; m < bank.k; ++m) {
            // r * conj(loc)
            re += r[static_cast<std::size_t>(m)].real() * loc[m].real() + r[static_cast<std::size_t>(m)].imag() * loc[m].imag();
            im += r[static_cast<std::size_t>(m)].imag() * loc[m].real() - r[static_cast<std::size_t>(m)].real() * loc[m].imag();
        }
        out[c] = Complex(re, im);
    }
}

}  // namespace

CorrelationRow correlate_symbol(const IqFrame& frame, int symbol_index, const FilterBank& bank, const Scheme& scheme)
{
    require(symbol_index >= 0 && symbol_index < frame.n_symbols, ErrorCode::Range, "symbol index out of range");
    require(bank.k == frame.k, ErrorCode::Mismatch, "bank and frame oversampling differ");
    require(bank.parity == scheme.parity(symbol_index), ErrorCode::Mismatch, "bank parity does not match symbol index");
    CorrelationRow row;
    row.symbol_index = symbol_index;
    row.values.resize(static_cast<std::size_t>(bank.n_codes));
    correlate_into(frame.symbol(symbol_index), bank, row.values.data());
    return row;
}

CorrelationMatrix correlate_frame(const IqFrame& frame, const FilterBanks& banks, const Scheme& scheme)
{
    require(!banks.by_parity.empty() && banks.by_parity.front().k == frame.k, ErrorCode::Mismatch,
            "bank and frame oversampling differ");
    require(frame.samples.size() == static_cast<std::size_t>(frame.k) * static_cast<std::size_t>(frame.n_symbols),
            ErrorCode::Mismatch, "frame length is not k * n_symbols");
    CorrelationMatrix cm;
    cm.n_symbols = frame.n_symbols;
    cm.n_codes = scheme.n_codes();
    cm.first = scheme.L - 1;
    cm.values.assign(static_cast<std::size_t>(cm.n_symbols) * cm.n_codes, Complex{});
    for (int n = cm.first; n < frame.n_symbols; ++n)
        correlate_into(frame.symbol(n), banks.for_symbol(scheme, n), cm.values.data() + static_cast<std::size_t>(n) * cm.n_codes);
    return cm;
}

}  // namespace cpm
