// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <iomanip>

#include <fstream>
#include <map>
#include <sstream>

#include "cpm/analysis.hpp"
#include "cpm/channel.hpp"
#include "support.hpp"

using namespace cpm;

namespace {

constexpr double kPcmfmD2Min = 2.56474228;
constexpr double kArtmD2Min = 2.987150862;

// The phase formula with the first symbol at index `first_index` (only its parity matters).
std::vector<Complex> waveform(const Scheme& s, const PulseTable& pulse, const std::vector<int>& sym, int first_index)
{
    const int k = pulse.k;
    std::vector<Complex> out(sym.size() * static_cast<std::size_t>(k));
    for (std::size_t m = 0; m < out.size(); ++m) {
        double phi = 0.0;
        for (std::size_t i = 0; i < sym.size(); ++i) {
            const auto off = static_cast<std::ptrdiff_t>(m) - static_cast<std::ptrdiff_t>(i) * k;
            const int par = ((first_index + static_cast<int>(i)) % s.n_parities() + s.n_parities()) % s.n_parities();
            const Rational h = s.h_cycle[static_cast<std::size_t>(par)];
            phi += 2.0 * M_PI * h.num * sym[i] / h.den * pulse.q_at(off);
        }
        out[m] = std::polar(1.0, phi);
    }
    return out;
}

// Merge events found by listing whole sequence pairs, independent of the
// library's depth-first walk.
struct MergeEvents {
    double d2_min = 1e300;
    long long at_min = 0;
    std::map<long long, long long> histogram;  // d^2 binned at 1e-6
};

MergeEvents enumerate_merges(const Scheme& s, int depth, int k)
{
    const PulseTable pulse = build_pulse(s, k);
    MergeEvents ev;
    const int pre = s.L - 1;
    long long n_pre = 1;
    for (int i = 0; i < pre; ++i)
        n_pre *= s.M;
    auto decode = [&](long long v, int n, std::vector<int>& out) {
        for (int i = n - 1; i >= 0; --i) {
            out[static_cast<std::size_t>(i)] = s.alphabet[static_cast<std::size_t>(v % s.M)];
            v /= s.M;
        }
    };
    for (int start_parity = 0; start_parity < s.n_parities(); ++start_parity) {
        for (long long mem = 0; mem < n_pre; ++mem) {
            std::vector<int> prefix(static_cast<std::size_t>(pre));
            decode(mem, pre, prefix);
            for (int n = s.L; n <= depth; ++n) {
                long long total = 1;
                for (int i = 0; i < n; ++i)
                    total *= s.M;
                std::vector<int> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
                for (long long ix = 0; ix < total; ++ix) {
                    decode(ix, n, x);
                    for (long long iy = 0; iy < total; ++iy) {
                        decode(iy, n, y);
                        if (s.rank(x[0]) >= s.rank(y[0]))
                            continue;
                        // First merge exactly at n: equal phase and equal last L-1 symbols,
                        // and no earlier point where both held.
                        auto merged_at = [&](int m) {
                            long long acc = 0;
                            for (int i = 0; i < m; ++i) {
                                const Rational h = s.h_cycle[static_cast<std::size_t>((start_parity + i) % s.n_parities())];
                                acc += static_cast<long long>(x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]) * h.num * (320 / h.den);
                            }
                            if (acc % 640 != 0)
                                return false;
                            for (int i = m - pre; i < m; ++i)
                                if (i < 0 || x[static_cast<std::size_t>(i)] != y[static_cast<std::size_t>(i)])
                                    return false;
                            return true;
                        };
                        if (!merged_at(n))
                            continue;
                        bool earlier = false;
                        for (int m = 1; m < n && !earlier; ++m)
                            earlier = merged_at(m);
                        if (earlier)
                            continue;
                        // Waveforms over the n diverging intervals; the prefix carries the start parity.
                        std::vector<int> fx = prefix, fy = prefix;
                        fx.insert(fx.end(), x.begin(), x.end());
                        fy.insert(fy.end(), y.begin(), y.end());
                        const auto wx = waveform(s, pulse, fx, start_parity - pre);
                        const auto wy = waveform(s, pulse, fy, start_parity - pre);
                        double d = 0.0;
                        for (std::size_t m = static_cast<std::size_t>(pre) * k; m < wx.size(); ++m)
                            d += std::norm(wx[m] - wy[m]);
                        const double d2 = d * s.bits_per_symbol() / (2.0 * k);
                        ev.histogram[std::llround(d2 * 1e6)] += 1;
                        if (d2 < ev.d2_min - 1e-9) {
                            ev.d2_min = d2;
                            ev.at_min = 1;
                        } else if (std::abs(d2 - ev.d2_min) <= 1e-9) {
                            ++ev.at_min;
                        }
                    }
                }
            }
        }
    }
    return ev;
}

std::string slurp(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("operation counts")
{
    const Scheme a = Scheme::pcmfm();
    const Scheme b = Scheme::artm_cpm();
    struct Row {
        Method m;
        const Scheme* s;
        int n_p;
        int n_mf;
        int n_s;
        long long mul, add;
    };
    const Row rows[] = {
        {Method::Msd, &a, 1, 8, -1, 896, 912},       {Method::Mlsd, &a, 1, 8, 80, 768, 784},
        {Method::Mlsd, &b, 1, 64, 512, 9216, 9344},  {Method::Proposed, &a, 1, 8, 8, 224, 240},
        {Method::Proposed, &b, 1, 64, 64, 2560, 2688}, {Method::Proposed, &b, 2, 64, 64, 4096, 4224},
    };
    for (const Row& r : rows) {
        const ComplexityRecord c = complexity(r.m, *r.s, 4, r.n_p);
        CHECK(c.n_mf == r.n_mf);
        if (r.n_s < 0)
            CHECK_FALSE(c.n_s.has_value());
        else
            CHECK(c.n_s.value() == r.n_s);
        CHECK(c.n_mul == r.mul);
        CHECK(c.n_add == r.add);
        CHECK(c.delta == (r.m == Method::Mlsd ? 0 : 1));
        // Same numbers from the closed form with X = N_s*N_p*M.
        const long long X = r.n_s < 0 ? 128 : static_cast<long long>(r.n_s) * r.n_p * r.s->M;
        CHECK(c.n_mul == 4LL * r.n_mf * 4 + 4 * X + 2 * X * c.delta);
        CHECK(c.n_add == static_cast<long long>(r.n_mf) * (5 * 4 - 2) + 3 * X + X * (1 + 2 * c.delta));
    }
    CHECK_THROWS_AS(complexity(Method::Msd, b), Error);
    CHECK_THROWS_AS(complexity(Method::Proposed, a, 4, 0), Error);
    CHECK(complexity(Method::Mlsd, a, 8).n_mul > complexity(Method::Mlsd, a, 4).n_mul);
}

TEST_CASE("storage accounting")
{
    const Scheme a = Scheme::pcmfm();
    const Scheme b = Scheme::artm_cpm();
    const StorageRecord msd = storage(Method::Msd, a);
    CHECK(msd.local_signal == 64);
    CHECK(msd.rotation_angle == 10);
    CHECK(msd.survived_path_text() == "-");
    CHECK(msd.survived_phase_text() == "-");

    const StorageRecord m1 = storage(Method::Mlsd, a);
    CHECK(m1.local_signal == 64);
    CHECK(m1.rotation_angle == 40);
    CHECK(m1.survived_path_text() == "80N");
    CHECK(m1.survived_phase_text() == "0");
    CHECK(m1.survived_path_cells(1000) == 80000);

    const StorageRecord m2 = storage(Method::Mlsd, b);
    CHECK(m2.local_signal == 512);
    CHECK(m2.rotation_angle == 64);
    CHECK(m2.survived_path_text() == "512N");
    CHECK(m2.survived_phase_text() == "0");

    const StorageRecord p1 = storage(Method::Proposed, a);
    CHECK(p1.local_signal == 64);
    CHECK(p1.rotation_angle == 40);
    CHECK(p1.survived_path_text() == "16N");
    CHECK(p1.survived_phase_text() == "8");

    const StorageRecord p2 = storage(Method::Proposed, b);
    CHECK(p2.survived_path_text() == "128N");
    CHECK(p2.survived_phase_text() == "64");

    const StorageRecord p3 = storage(Method::Proposed, b, 2);
    CHECK(p3.local_signal == 512);
    CHECK(p3.rotation_angle == 64);
    CHECK(p3.survived_path_text() == "256N");
    CHECK(p3.survived_phase_text() == "64");
}

TEST_CASE("table csv files match the checked-in copies")
{
    std::ostringstream c1, c2, s1, s2;
    write_complexity_csv(c1, 4);
    write_complexity_csv(c2, 4);
    write_storage_csv(s1, 4, 1000);
    write_storage_csv(s2, 4, 1000);
    CHECK(c1.str() == c2.str());
    CHECK(s1.str() == s2.str());
    CHECK(c1.str() == slurp(std::string(CPMDET_GOLDEN_DIR) + "/table2_complexity.csv"));
    CHECK(s1.str() == slurp(std::string(CPMDET_GOLDEN_DIR) + "/table3_storage.csv"));
    CHECK(comparison_columns().size() == 6);
}

TEST_CASE("normalized distance")
{
    const Scheme a = Scheme::pcmfm();
    std::vector<Complex> x(4, Complex(1, 0)), y(4, Complex(-1, 0));
    CHECK(normalized_distance(x, y, a, 4) == doctest::Approx(2.0));
    CHECK(normalized_distance(x, x, a, 4) == 0.0);
    CHECK(normalized_distance(y, x, a, 4) == normalized_distance(x, y, a, 4));
}

TEST_CASE("pcmfm distance spectrum against pair listing")
{
    const Scheme a = Scheme::pcmfm();
    const DistanceSpectrum ds = distance_spectrum(a, 6);
    REQUIRE_FALSE(ds.entries.empty());
    for (std::size_t i = 0; i < ds.entries.size(); ++i) {
        CHECK(ds.entries[i].d_squared > 0.0);
        CHECK(ds.entries[i].multiplicity > 0);
        if (i)
            CHECK(ds.entries[i].d_squared > ds.entries[i - 1].d_squared);
    }
    const MergeEvents ref = enumerate_merges(a, 6, 4);
    CHECK(ds.entries[0].d_squared == doctest::Approx(ref.d2_min).epsilon(1e-9));
    CHECK(ds.entries[0].multiplicity == ref.at_min);
    long long total = 0, ref_total = 0;
    for (const auto& e : ds.entries)
        total += e.multiplicity;
    for (const auto& [bin, n] : ref.histogram)
        ref_total += n;
    CHECK(total == ref_total);
    MESSAGE("pcmfm depth 6: d2_min=" << std::setprecision(10) << ref.d2_min << " pairs=" << ref.at_min);

    // Regression constants from the listing above.
    CHECK(ds.entries[0].d_squared == doctest::Approx(kPcmfmD2Min).epsilon(1e-6));
}

TEST_CASE("artm distance spectrum against pair listing")
{
    const Scheme b = Scheme::artm_cpm();
    // Shortest ARTM merge spans three differing symbols plus the pulse tail.
    CHECK(distance_spectrum(b, 4).entries.empty());
    const DistanceSpectrum ds = distance_spectrum(b, 5);
    const MergeEvents ref = enumerate_merges(b, 5, 4);
    REQUIRE_FALSE(ds.entries.empty());
    CHECK(ds.entries[0].d_squared == doctest::Approx(ref.d2_min).epsilon(1e-9));
    CHECK(ds.entries[0].multiplicity == ref.at_min);
    MESSAGE("artm depth 5: d2_min=" << std::setprecision(10) << ref.d2_min << " pairs=" << ref.at_min);
    CHECK(ds.entries[0].d_squared == doctest::Approx(kArtmD2Min).epsilon(1e-6));
}

TEST_CASE("distance spectrum limits")
{
    CHECK_THROWS_AS(distance_spectrum(Scheme::pcmfm(), 9), Error);
    CHECK_THROWS_AS(distance_spectrum(Scheme::pcmfm(), 0), Error);
    CHECK_THROWS_AS(distance_spectrum(Scheme::artm_cpm(), 8), Error);
}

TEST_CASE("union bound")
{
    DistanceSpectrum one;
    one.entries.push_back({2.0, 1, 1.0});
    CHECK(union_bound(one, 0.0, 1) == doctest::Approx(0.0786496).epsilon(1e-5));
    CHECK(union_bound(one, 60.0, 1) < 1e-100);
    const DistanceSpectrum ds = distance_spectrum(Scheme::pcmfm(), 6);
    double prev = 1e9;
    for (double eb = 0.0; eb <= 14.0; eb += 0.5) {
        const double u = union_bound(ds, eb, 2);
        CHECK(u <= prev);
        prev = u;
    }
    CHECK(union_bound(ds, 8.0, 2) >= union_bound(ds, 8.0, 1));
    CHECK_THROWS_AS(union_bound(ds, 8.0, 0), Error);
}

TEST_CASE("confidence intervals")
{
    const BerEstimate z = ber_confint(0, 1000000);
    CHECK(z.estimate == 0.0);
    CHECK(z.ci_low == 0.0);
    CHECK(z.ci_high == doctest::Approx(3e-6));
    const BerEstimate h = ber_confint(100, 1000000);
    const double hw = 1.96 * std::sqrt(1e-4 * (1 - 1e-4) / 1e6);
    CHECK(h.estimate == doctest::Approx(1e-4));
    CHECK(h.ci_low == doctest::Approx(1e-4 - hw));
    CHECK(h.ci_high == doctest::Approx(1e-4 + hw));
    CHECK(ber_confint(50, 50).estimate == 1.0);
    CHECK(ber_confint(50, 50).ci_high == 1.0);
    CHECK(ber_confint(1, 2).ci_low == 0.0);
    CHECK_THROWS_AS(ber_confint(1, 0), Error);
    CHECK_THROWS_AS(ber_confint(3, 2), Error);
    CHECK_THROWS_AS(ber_confint(-1, 2), Error);
}
