// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cpm/waveforms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>

namespace cpm {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::Parameter: return "parameter";
    case ErrorCode::Alphabet: return "alphabet";
    case ErrorCode::Range: return "range";
    case ErrorCode::Mismatch: return "mismatch";
    case ErrorCode::TooLong: return "too_long";
    case ErrorCode::Io: return "io";
    case ErrorCode::Config: return "config";
    case ErrorCode::EmptyInput: return "empty_input";
    }
    return "unknown";
}

namespace {

int ipow(int base, int exp)
{
    int r = 1;
    for (int i = 0; i < exp; ++i)
        r *= base;
    return r;
}

int wrap(long long v, int p)
{
    const long long r = v % p;
    return static_cast<int>(r < 0 ? r + p : r);
}

}  // namespace

Scheme Scheme::pcmfm()
{
    Scheme s;
    s.kind = SchemeKind::PcmFm;
    s.name = "PCMFM";
    s.M = 2;
    s.alphabet = {-1, 1};
    s.h_cycle = {{7, 10}};
    s.L = 3;
    s.p = 20;
    s.pulse = PulseKind::Bessel6;
    return s;
}

Scheme Scheme::artm_cpm()
{
    Scheme s;
    s.kind = SchemeKind::ArtmCpm;
    s.name = "ARTM_CPM";
    s.M = 4;
    s.alphabet = {-3, -1, 1, 3};
    s.h_cycle = {{4, 16}, {5, 16}};
    s.L = 3;
    s.p = 32;
    s.pulse = PulseKind::Rc3;
    return s;
}

Scheme Scheme::from_kind(SchemeKind kind)
{
    return kind == SchemeKind::PcmFm ? pcmfm() : artm_cpm();
}

Scheme Scheme::from_name(std::string_view name)
{
    std::string up(name);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    std::erase_if(up, [](char c) { return c == '_' || c == '-' || c == '/'; });
    if (up == "PCMFM")
        return pcmfm();
    if (up == "ARTMCPM" || up == "ARTM")
        return artm_cpm();
    fail(ErrorCode::Parameter, "unknown scheme '" + std::string(name) + "' (expected PCMFM or ARTM_CPM)");
}

int Scheme::parity(std::ptrdiff_t symbol_index) const noexcept
{
    const auto n = static_cast<std::ptrdiff_t>(h_cycle.size());
    const auto r = symbol_index % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

int Scheme::bits_per_symbol() const noexcept
{
    int b = 0;
    while ((1 << b) < M)
        ++b;
    return b;
}

int Scheme::rank(int symbol) const
{
    const auto it = std::find(alphabet.begin(), alphabet.end(), symbol);
    if (it == alphabet.end())
        fail(ErrorCode::Alphabet, "symbol " + std::to_string(symbol) + " is not in the " + name + " alphabet");
    return static_cast<int>(it - alphabet.begin());
}

bool Scheme::contains(int symbol) const noexcept
{
    return std::find(alphabet.begin(), alphabet.end(), symbol) != alphabet.end();
}

int Scheme::phase_step(std::ptrdiff_t symbol_index, int symbol) const
{
    const Rational h = h_cycle[static_cast<std::size_t>(parity(symbol_index))];
    // pi*h*a in units of 2*pi/p is a*h*p/2.
    const long long scaled = static_cast<long long>(symbol) * h.num * p;
    if (scaled % (2LL * h.den) != 0)
        fail(ErrorCode::Parameter, "modulation index does not land on the phase modulus of " + name);
    return wrap(scaled / (2LL * h.den), p);
}

int Scheme::phase_step_by_rank(std::ptrdiff_t symbol_index, int r) const
{
    return phase_step(symbol_index, alphabet[static_cast<std::size_t>(r)]);
}

int Scheme::n_codes() const noexcept { return ipow(M, L); }
int Scheme::n_recent() const noexcept { return ipow(M, L - 1); }

// ---------------------------------------------------------------------------
// Pulses
// ---------------------------------------------------------------------------

namespace {

/// Fine-grid samples per symbol; a multiple of k so the coarse grid is a subset.
int fine_factor(int k) { return std::max(1, (512 + k - 1) / k); }

/// Integrates g on the fine grid, normalizes q(L) to 1/2 and decimates to k.
PulseTable finish_pulse(PulseKind kind, int L, int k, std::vector<double> g_fine, int factor)
{
    const double dt = 1.0 / (static_cast<double>(k) * factor);
    std::vector<double> q_fine(g_fine.size(), 0.0);
    for (std::size_t i = 1; i < g_fine.size(); ++i)
        q_fine[i] = q_fine[i - 1] + 0.5 * dt * (g_fine[i - 1] + g_fine[i]);

    const double scale = 0.5 / q_fine.back();
    PulseTable t;
    t.kind = kind;
    t.L = L;
    t.k = k;
    const int n = L * k + 1;
    t.g.resize(static_cast<std::size_t>(n));
    t.q.resize(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        t.g[static_cast<std::size_t>(m)] = g_fine[static_cast<std::size_t>(m) * factor] * scale;
        t.q[static_cast<std::size_t>(m)] = q_fine[static_cast<std::size_t>(m) * factor] * scale;
    }
    t.q.front() = 0.0;
    t.q.back() = 0.5;

    // Coarse g is rescaled so its own trapezoid area is exactly 1/2 as well.
    double area = 0.0;
    for (int m = 1; m < n; ++m)
        area += 0.5 * (t.g[static_cast<std::size_t>(m - 1)] + t.g[static_cast<std::size_t>(m)]) / k;
    for (double& v : t.g)
        v *= 0.5 / area;
    return t;
}

// Reverse Bessel polynomial of order 6, ascending powers of s.
constexpr std::array<double, 7> kBessel6 = {10395.0, 10395.0, 4725.0, 1260.0, 210.0, 21.0, 1.0};

double bessel6_gain(double w)
{
    Complex num = kBessel6[0];
    Complex den = 0.0;
    Complex sp = 1.0;
    const Complex s(0.0, w);
    for (double c : kBessel6) {
        den += c * sp;
        sp *= s;
    }
    return std::abs(num / den);
}

/// -3 dB frequency of the delay-normalized 6th-order Bessel prototype.
double bessel6_cutoff()
{
    double lo = 0.1;
    double hi = 10.0;
    const double target = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bessel6_gain(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

PulseTable build_rc3_pulse(int L, int k)
{
    require(L >= 1, ErrorCode::Parameter, "pulse length L must be >= 1");
    require(k >= 2, ErrorCode::Parameter, "oversampling k must be >= 2");
    const int factor = fine_factor(k);
    const int n = L * k * factor + 1;
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (static_cast<double>(k) * factor);
        g[static_cast<std::size_t>(i)] = (1.0 - std::cos(kTwoPi * t / L)) / (2.0 * L);
    }
    g.front() = 0.0;
    g.back() = 0.0;
    PulseTable t = finish_pulse(PulseKind::Rc3, L, k, std::move(g), factor);
    // The closed form integrates to exactly 1/2; keep the analytic samples.
    for (int m = 0; m <= L * k; ++m) {
        const double tt = static_cast<double>(m) / k;
        t.g[static_cast<std::size_t>(m)] = (1.0 - std::cos(kTwoPi * tt / L)) / (2.0 * L);
    }
    t.g.front() = 0.0;
    t.g.back() = 0.0;
    for (int m = 0; m <= L * k; ++m) {
        const double tt = static_cast<double>(m) / k;
        t.q[static_cast<std::size_t>(m)] = tt / (2.0 * L) - std::sin(kTwoPi * tt / L) / (4.0 * M_PI);
    }
    t.q.front() = 0.0;
    t.q.back() = 0.5;
    return t;
}

PulseTable build_pcmfm_pulse(int k)
{
    require(k >= 2, ErrorCode::Parameter, "oversampling k must be >= 2");
    constexpr int L = 3;
    const int factor = fine_factor(k);
    const int per_symbol = k * factor;
    const double dt = 1.0 / per_symbol;

    // H(s) = b0 / poly(s / w0), w0 placing the -3 dB point at 0.7 / T.
    const double w0 = kTwoPi * 0.7 / bessel6_cutoff();
    std::array<double, 6> a{};  // monic denominator coefficients a0..a5 after scaling
    for (int i = 0; i < 6; ++i)
        a[static_cast<std::size_t>(i)] = kBessel6[static_cast<std::size_t>(i)] * std::pow(w0, 6 - i);
    const double b0 = a[0];

    // Controllable canonical form driven by a unit rectangle on [0, T).
    using State = std::array<double, 6>;
    auto deriv = [&](const State& x, double u) {
        State dx{};
        for (int i = 0; i < 5; ++i)
            dx[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i) + 1];
        double acc = u;
        for (int i = 0; i < 6; ++i)
            acc -= a[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        dx[5] = acc;
        return dx;
    };

    const int n = L * per_symbol + 1;
    std::vector<double> g(static_cast<std::size_t>(n));
    State x{};
    g[0] = 0.0;
    for (int i = 1; i < n; ++i) {
        // The input switches off exactly on a grid point, so each RK4 step sees a constant input.
        const double u = (i <= per_symbol) ? 1.0 : 0.0;
        const State k1 = deriv(x, u);
        State tmp;
        for (std::size_t j = 0; j < 6; ++j) tmp[j] = x[j] + 0.5 * dt * k1[j];
        const State k2 = deriv(tmp, u);
        for (std::size_t j = 0; j < 6; ++j) tmp[j] = x[j] + 0.5 * dt * k2[j];
        const State k3 = deriv(tmp, u);
        for (std::size_t j = 0; j < 6; ++j) tmp[j] = x[j] + dt * k3[j];
        const State k4 = deriv(tmp, u);
        for (std::size_t j = 0; j < 6; ++j)
            x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        g[static_cast<std::size_t>(i)] = b0 * x[0];
    }
    return finish_pulse(PulseKind::Bessel6, L, k, std::move(g), factor);
}

PulseTable build_pulse(const Scheme& scheme, int k)
{
    return scheme.pulse == PulseKind::Rc3 ? build_rc3_pulse(scheme.L, k) : build_pcmfm_pulse(k);
}

void PulseTable::write_csv(std::ostream& os) const
{
    os << "t_over_T,g,q\n";
    for (std::size_t m = 0; m < g.size(); ++m)
        os << static_cast<double>(m) / k << ',' << g[m] << ',' << q[m] << '\n';
}

// ---------------------------------------------------------------------------
// Modulation
// ---------------------------------------------------------------------------

Modulated modulate(const Scheme& scheme, const PulseTable& pulse, std::span<const int> symbols,
                   const ModulatorState& start)
{
    require(start.phase_index >= 0 && start.phase_index < scheme.p, ErrorCode::Parameter,
            "initial phase index must be in [0, p)");
    require(pulse.L == scheme.L, ErrorCode::Mismatch, "pulse length does not match scheme");
    require(static_cast<int>(start.tail.size()) <= scheme.L - 1, ErrorCode::Parameter, "carry tail too long");
    for (int a : symbols)
        (void)scheme.rank(a);

    const int k = pulse.k;
    const int L = scheme.L;

    struct Active {
        std::ptrdiff_t index;
        int symbol;
        double weight;  // 2*pi*h*a
    };
    auto make_active = [&](std::ptrdiff_t idx, int a) {
        const Rational h = scheme.h_cycle[static_cast<std::size_t>(scheme.parity(idx))];
        return Active{idx, a, kTwoPi * h.num * a / static_cast<double>(h.den)};
    };

    std::vector<Active> active;
    const auto first = start.next_symbol_index - static_cast<std::ptrdiff_t>(start.tail.size());
    for (std::size_t i = 0; i < start.tail.size(); ++i)
        active.push_back(make_active(first + static_cast<std::ptrdiff_t>(i), start.tail[i]));

    int completed = start.phase_index;
    Modulated out;
    out.frame.k = k;
    out.frame.n_symbols = static_cast<int>(symbols.size());
    out.frame.samples.reserve(symbols.size() * static_cast<std::size_t>(k));

    const double unit = kTwoPi / scheme.p;
    std::ptrdiff_t idx = start.next_symbol_index;
    for (int a : symbols) {
        active.push_back(make_active(idx, a));
        while (!active.empty() && idx - active.front().index >= L) {
            completed = wrap(static_cast<long long>(completed) + scheme.phase_step(active.front().index, active.front().symbol), scheme.p);
            active.erase(active.begin());
        }
        for (int j = 0; j < k; ++j) {
            double phi = unit * completed;
            for (const Active& s : active)
                phi += s.weight * pulse.q_at((idx - s.index) * k + j);
            out.frame.samples.emplace_back(std::cos(phi), std::sin(phi));
        }
        ++idx;
    }

    while (!active.empty() && idx - active.front().index >= L) {
        completed = wrap(static_cast<long long>(completed) + scheme.phase_step(active.front().index, active.front().symbol), scheme.p);
        active.erase(active.begin());
    }
    int total = completed;
    out.carry.tail.clear();
    for (const Active& s : active) {
        total = wrap(static_cast<long long>(total) + scheme.phase_step(s.index, s.symbol), scheme.p);
        out.carry.tail.push_back(s.symbol);
    }
    out.final_phase_index = total;
    out.carry.phase_index = completed;
    out.carry.next_symbol_index = idx;
    return out;
}

Modulated modulate(const Scheme& scheme, const PulseTable& pulse, std::span<const int> symbols,
                   int initial_phase_index)
{
    ModulatorState start;
    start.phase_index = initial_phase_index;
    return modulate(scheme, pulse, symbols, start);
}

Modulated modulate(const Scheme& scheme, std::span<const int> symbols, int k, int initial_phase_index)
{
    return modulate(scheme, build_pulse(scheme, k), symbols, initial_phase_index);
}

std::vector<int> boundary_phases(const Scheme& scheme, std::span<const int> symbols)
{
    std::vector<int> out;
    out.reserve(symbols.size());
    int acc = 0;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        (void)scheme.rank(symbols[i]);
        acc = wrap(static_cast<long long>(acc) + scheme.phase_step(static_cast<std::ptrdiff_t>(i), symbols[i]), scheme.p);
        out.push_back(acc);
    }
    return out;
}

std::vector<int> with_pilots(const Scheme& scheme, std::span<const int> data)
{
    std::vector<int> out(static_cast<std::size_t>(scheme.head_pilots()), scheme.pilot_symbol());
    out.insert(out.end(), data.begin(), data.end());
    out.insert(out.end(), static_cast<std::size_t>(scheme.tail_pilots()), scheme.pilot_symbol());
    return out;
}

std::vector<Complex> phasor_table(int p)
{
    std::vector<Complex> t(static_cast<std::size_t>(p));
    for (int m = 0; m < p; ++m)
        t[static_cast<std::size_t>(m)] = std::polar(1.0, kTwoPi * m / p);
    return t;
}

}  // namespace cpm
