// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cpm/harness.hpp"
#include "support.hpp"

using namespace cpm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("cpmdet_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

std::string records_text(const std::vector<BerRecord>& r)
{
    std::ostringstream os;
    write_records_csv(os, r);
    return os.str();
}

ExperimentConfig small(SchemeKind s, const std::string& detector)
{
    ExperimentConfig c;
    c.scheme = s;
    c.set("detector", detector);
    c.ebn0_grid = {4.0, 7.0};
    c.n_frames = 20;
    c.frame_len = 60;
    c.min_errors = 0;
    c.workers = 1;
    return c;
}

}  // namespace

TEST_CASE("detector labels")
{
    CHECK(DetectorSpec::parse("PROPOSED", 2).label() == "PROPOSED_K2");
    CHECK(DetectorSpec::parse("proposed_k3").n_survivors == 3);
    CHECK(DetectorSpec::parse("MSD_W7").window == 7);
    CHECK(DetectorSpec::parse("MSD", 1, 3).label() == "MSD_W3");
    CHECK(DetectorSpec::parse("MLSD_COHERENT").label() == "MLSD_COHERENT");
    CHECK(DetectorSpec::parse("MLSD_PHASE_DEVIATION").kind == DetectorKind::MlsdPhaseDeviation);
    CHECK_THROWS_AS(DetectorSpec::parse("VITERBI"), Error);
    CHECK(phase_mode_for(DetectorKind::MlsdCoherent) == PhaseMode::KnownZero);
    CHECK(phase_mode_for(DetectorKind::MlsdPhaseDeviation) == PhaseMode::UniformRandom);
    CHECK(phase_mode_for(DetectorKind::Proposed) == PhaseMode::UniformRandom);
}

TEST_CASE("config defaults and validation")
{
    ExperimentConfig c;
    CHECK(c.ebn0_grid == std::vector<double>{6, 7, 8, 9, 10});
    CHECK(c.n_frames == 10000);
    CHECK(c.frame_len == 1000);
    CHECK(c.min_errors == 200);
    CHECK(c.k == 4);
    CHECK(c.violations().empty());

    c.ebn0_grid.clear();
    c.frame_len = 3;
    c.n_frames = 0;
    c.detector = DetectorSpec::parse("MSD", 1, 4);
    c.scheme = SchemeKind::ArtmCpm;
    const auto v = c.violations();
    CHECK(v.size() == 5);
    try {
        c.validate();
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Config);
        const std::string msg = e.what();
        CHECK(msg.find("ebn0") != std::string::npos);
        CHECK(msg.find("frame-len") != std::string::npos);
        CHECK(msg.find("frames") != std::string::npos);
        CHECK(msg.find("window") != std::string::npos);
    }

    ExperimentConfig d;
    d.frame_len = 4;  // L + 1
    CHECK(d.violations().empty());
    d.set("survivors", "5");
    CHECK(d.violations().size() == 1);
}

TEST_CASE("config overrides")
{
    ExperimentConfig c;
    c.set("scheme", "ARTM_CPM");
    c.set("detector", "PROPOSED");
    c.set("survivors", "2");
    c.set("ebn0", "6,8.5,10");
    c.set("frames", "12");
    c.set("frame-len", "30");
    c.set("seed", "99");
    c.set("min-errors", "0");
    c.set("out", "x.csv");
    c.set("oversample", "8");
    c.set("noiseless", "true");
    CHECK(c.scheme == SchemeKind::ArtmCpm);
    CHECK(c.detector.label() == "PROPOSED_K2");
    CHECK(c.ebn0_grid == std::vector<double>{6, 8.5, 10});
    CHECK(c.n_frames == 12);
    CHECK(c.frame_len == 30);
    CHECK(c.master_seed == 99);
    CHECK(c.min_errors == 0);
    CHECK(c.output_path == "x.csv");
    CHECK(c.k == 8);
    CHECK(c.noiseless);
    c.set("paper-scale", "true");
    CHECK(c.n_frames == 10000);
    CHECK(c.frame_len == 1000);
    CHECK_THROWS_AS(c.set("frames", "ten"), Error);
    CHECK_THROWS_AS(c.set("colour", "red"), Error);
    CHECK_THROWS_AS(c.set("scheme", "QPSK"), Error);
    CHECK_THROWS_AS(c.set("noiseless", "maybe"), Error);
}

TEST_CASE("config file round trip")
{
    const fs::path p = scratch("cfg.json");
    {
        std::ofstream f(p);
        f << R"({
  // comments are allowed
  "run": {"scheme": "ARTM_CPM", "seed": 7, "output": "out/ber.csv"},
  "detector": {"kind": "PROPOSED", "survivors": 2},
  "sweep": {"ebn0_db": [6, 7.5], "frames": 40, "frame_len": 100, "min_errors": 10}
})";
    }
    const ExperimentConfig c = ExperimentConfig::load(p.string());
    CHECK(c.scheme == SchemeKind::ArtmCpm);
    CHECK(c.master_seed == 7);
    CHECK(c.detector.label() == "PROPOSED_K2");
    CHECK(c.ebn0_grid == std::vector<double>{6, 7.5});
    CHECK(c.n_frames == 40);
    CHECK(c.frame_len == 100);
    CHECK(c.min_errors == 10);
    CHECK(c.output_path == "out/ber.csv");

    // The echo parses back to the same settings.
    const auto j = nlohmann::json::parse(c.to_json());
    CHECK(j["run"]["scheme"] == "ARTM_CPM");
    CHECK(j["sweep"]["frames"] == 40);
    {
        std::ofstream f(p);
        f << c.to_json();
    }
    const ExperimentConfig back = ExperimentConfig::load(p.string());
    CHECK(back.to_json() == c.to_json());

    {
        std::ofstream f(p);
        f << R"({"run": {"sceme": "PCMFM"}, "sweep": {"frames": "many"}})";
    }
    try {
        ExperimentConfig::load(p.string());
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Config);
        const std::string msg = e.what();
        CHECK(msg.find("run.sceme") != std::string::npos);
        CHECK(msg.find("frames") != std::string::npos);
    }
    {
        std::ofstream f(p);
        f << "{ not json";
    }
    CHECK_THROWS_AS(ExperimentConfig::load(p.string()), Error);
    try {
        ExperimentConfig::load((p.parent_path() / "missing.json").string());
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
        CHECK(std::string(e.what()).find("missing.json") != std::string::npos);
    }
}

TEST_CASE("bit error counting")
{
    const Scheme b = Scheme::artm_cpm();
    CHECK(count_bit_errors(b, std::vector<int>{-3}, std::vector<int>{3}) == 2);
    CHECK(count_bit_errors(b, std::vector<int>{-3}, std::vector<int>{-1}) == 1);
    CHECK(count_bit_errors(b, std::vector<int>{-1}, std::vector<int>{1}) == 2);
    CHECK(count_bit_errors(b, std::vector<int>{1, 1}, std::vector<int>{1, 1}) == 0);
    CHECK_THROWS_AS(count_bit_errors(b, std::vector<int>{1}, std::vector<int>{}), Error);
    std::mt19937_64 rng(1);
    for (const Scheme& s : {Scheme::pcmfm(), b}) {
        for (int t = 0; t < 200; ++t) {
            const auto x = cpmtest::random_symbols(s, 50, rng);
            const auto y = cpmtest::random_symbols(s, 50, rng);
            long long sym = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const long long e = count_bit_errors(s, std::span<const int>(&x[i], 1), std::span<const int>(&y[i], 1));
                if (x[i] != y[i]) {
                    CHECK(e >= 1);
                    CHECK(e <= s.bits_per_symbol());
                    ++sym;
                } else {
                    CHECK(e == 0);
                }
            }
            CHECK(count_bit_errors(s, x, y) <= s.bits_per_symbol() * sym);
        }
    }
}

TEST_CASE("frame data depends only on seed and index")
{
    const Scheme s = Scheme::artm_cpm();
    CHECK(frame_data(s, 5, 3, 100) == frame_data(s, 5, 3, 100));
    CHECK(frame_data(s, 5, 3, 100) != frame_data(s, 5, 4, 100));
    CHECK(frame_data(s, 6, 3, 100) != frame_data(s, 5, 3, 100));
    for (int a : frame_data(s, 1, 1, 500))
        CHECK(s.contains(a));
}

TEST_CASE("noiseless sweeps are error free")
{
    for (const char* det : {"MLSD_COHERENT", "PROPOSED", "MSD"}) {
        ExperimentConfig c = small(SchemeKind::PcmFm, det);
        c.noiseless = true;
        c.n_frames = 10;
        for (const BerRecord& r : run_sweep(c)) {
            CHECK(r.errors == 0);
            CHECK(r.ber == 0.0);
            CHECK(r.frames == 10);
            CHECK(r.bits == 600);
        }
    }
    for (const char* det : {"MLSD_COHERENT", "PROPOSED_K1", "PROPOSED_K2"}) {
        ExperimentConfig c = small(SchemeKind::ArtmCpm, det);
        c.noiseless = true;
        c.n_frames = 10;
        for (const BerRecord& r : run_sweep(c)) {
            CHECK(r.errors == 0);
            CHECK(r.bits == 1200);
        }
    }
}

TEST_CASE("sweep results do not depend on the worker count")
{
    for (const char* det : {"PROPOSED_K2", "MLSD_PHASE_DEVIATION"}) {
        ExperimentConfig c = small(SchemeKind::ArtmCpm, det);
        c.n_frames = 70;
        c.min_errors = 150;
        c.workers = 1;
        const auto one = run_sweep(c);
        c.workers = 3;
        const auto three = run_sweep(c);
        const auto again = run_sweep(c);
        CHECK(records_text(one) == records_text(three));
        CHECK(records_text(three) == records_text(again));
        for (const BerRecord& r : one) {
            CHECK(r.bits == r.frames * 120);
            CHECK(r.ber == doctest::Approx(static_cast<double>(r.errors) / r.bits));
            CHECK(r.ci_low <= r.ber);
            CHECK(r.ci_high >= r.ber);
        }
    }
}

TEST_CASE("early stop counts the simulated bits")
{
    ExperimentConfig c = small(SchemeKind::PcmFm, "MLSD_PHASE_DEVIATION");
    c.ebn0_grid = {2.0};
    c.n_frames = 1000;
    c.min_errors = 10;
    const auto r = run_sweep(c).front();
    CHECK(r.frames < 1000);
    CHECK(r.errors >= 10);
    CHECK(r.bits == r.frames * 60);
    CHECK(r.frames % 32 == 0);
}

TEST_CASE("outputs are written next to each other")
{
    ExperimentConfig c = small(SchemeKind::PcmFm, "PROPOSED");
    c.output_path = scratch("sweep/ber.csv").string();
    const auto rec = run_sweep(c);
    write_outputs(c, rec, 1.5);
    const std::string csv = slurp(c.output_path);
    CHECK(csv == records_text(rec));
    const auto summary = nlohmann::json::parse(slurp(scratch("sweep/ber.summary.json")));
    CHECK(summary["version"].get<std::string>().rfind("cpmdet ", 0) == 0);
    CHECK(summary["wall_seconds"] == 1.5);
    CHECK(summary["config"]["detector"]["kind"] == "PROPOSED_K1");
    CHECK(summary["points"].size() == 2);

    std::istringstream is(csv);
    const auto back = read_records_csv(is);
    REQUIRE(back.size() == rec.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].ber == rec[i].ber);
        CHECK(back[i].ci_high == rec[i].ci_high);
        CHECK(back[i].bits == rec[i].bits);
        CHECK(back[i].detector == rec[i].detector);
    }

    ExperimentConfig none = c;
    none.output_path.clear();
    CHECK_THROWS_AS(write_outputs(none, rec, 0.0), Error);
    std::istringstream bad("not,a,header\n");
    CHECK_THROWS_AS(read_records_csv(bad), Error);
}

TEST_CASE("curve emission")
{
    std::vector<BerRecord> recs;
    for (const char* det : {"PROPOSED_K1", "MLSD_COHERENT"})
        for (double eb : {10.0, 6.0, 8.0, 7.0, 9.0}) {
            BerRecord r;
            r.scheme = "PCMFM";
            r.detector = det;
            r.ebn0_db = eb;
            r.bits = 1000;
            r.errors = static_cast<long long>(20 - eb);
            const BerEstimate e = ber_confint(r.errors, r.bits);
            r.ber = e.estimate;
            r.ci_low = e.ci_low;
            r.ci_high = e.ci_high;
            recs.push_back(r);
        }
    std::ostringstream os;
    emit_curves(os, recs);
    const std::string text = os.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 11);
    std::istringstream is(text);
    const auto pts = read_curves(is);
    REQUIRE(pts.size() == 10);
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].series == pts[i - 1].series)
            CHECK(pts[i].ebn0_db > pts[i - 1].ebn0_db);
    CHECK(pts.front().series == "PCMFM/PROPOSED_K1");
    CHECK(pts.back().series == "PCMFM/MLSD_COHERENT");
    // Every record comes back unchanged.
    for (const BerRecord& r : recs) {
        const CurvePoint want{r.scheme + "/" + r.detector, r.ebn0_db, r.ber, r.ci_low, r.ci_high};
        CHECK(std::find(pts.begin(), pts.end(), want) != pts.end());
    }
    try {
        std::ostringstream empty;
        emit_curves(empty, {});
        FAIL("expected empty-input error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyInput);
    }
}

TEST_CASE("oracle suite")
{
    const OracleReport none = run_oracle_suite(SchemeKind::PcmFm, 0, 8, 10.0, 1);
    CHECK(none.trials == 0);
    CHECK(none.passed());
    const OracleReport r = run_oracle_suite(SchemeKind::PcmFm, 40, 8, 10.0, 3);
    CHECK(r.trials == 40);
    CHECK(r.coherent_agree == 40);
    CHECK(r.metric_dominance == 40);
    CHECK(r.passed());
    const OracleReport a = run_oracle_suite(SchemeKind::ArtmCpm, 10, 3, 10.0, 3);
    CHECK(a.coherent_agree == 10);
    CHECK(a.metric_dominance == 10);
    CHECK_THROWS_AS(run_oracle_suite(SchemeKind::PcmFm, 1, 11, 10.0, 1), Error);
}

TEST_CASE("near-optimality regression")
{
    // Measured on 1000 PCM/FM trials of up to 8 data symbols at 10 dB.
    constexpr long long kAgree = 1000;
    const OracleReport r = run_oracle_suite(SchemeKind::PcmFm, 1000, 8, 10.0, 2026);
    CHECK(r.metric_dominance == 1000);
    CHECK(r.noncoherent_agree == kAgree);
}

TEST_CASE("table dump")
{
    const fs::path dir = scratch("tables");
    dump_tables(dir.string(), 4, 1000);
    const std::string t2 = slurp(dir / "table2_complexity.csv");
    const std::string t3 = slurp(dir / "table3_storage.csv");
    dump_tables(dir.string(), 4, 1000);
    CHECK(slurp(dir / "table2_complexity.csv") == t2);
    CHECK(slurp(dir / "table3_storage.csv") == t3);
    CHECK(t2 == slurp(fs::path(CPMDET_GOLDEN_DIR) / "table2_complexity.csv"));
    CHECK(t3 == slurp(fs::path(CPMDET_GOLDEN_DIR) / "table3_storage.csv"));
    CHECK(t3.find("80N") != std::string::npos);
    CHECK_THROWS_AS(dump_tables(dir.string(), 4, 0), Error);
}

TEST_CASE("version string")
{
    CHECK(version_string().rfind("cpmdet 0.", 0) == 0);
}
