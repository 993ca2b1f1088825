// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <string>
#include <vector>

#include "cpm/analysis.hpp"
#include "cpm/channel.hpp"
#include "cpm/detectors.hpp"

namespace cpm {

enum class DetectorKind { MlsdCoherent, MlsdPhaseDeviation, Proposed, Msd };

struct DetectorSpec {
    DetectorKind kind = DetectorKind::Proposed;
    int n_survivors = 1;
    int window = 5;

    /// "MLSD_COHERENT", "MLSD_PHASE_DEVIATION", "PROPOSED_K2", "MSD_W5".
    std::string label() const;
    static DetectorSpec parse(std::string_view text, int n_survivors = 1, int window = 5);
};

/// Channel phase mode a detector is evaluated under.
PhaseMode phase_mode_for(DetectorKind kind) noexcept;

/// Owns whichever detector `spec` names; one instance per thread.
class AnyDetector {
public:
    AnyDetector(const Scheme& scheme, const PulseTable& pulse, const DetectorSpec& spec);
    Decision detect(const CorrelationMatrix& corr);
    Decision detect(const IqFrame& frame);
    const FilterBanks& banks() const noexcept { return banks_; }

private:
    Scheme scheme_;
    DetectorSpec spec_;
    FilterBanks banks_;
    std::unique_ptr<CoherentDetector> coherent_;
    std::unique_ptr<ProposedDetector> proposed_;
    std::unique_ptr<MsdDetector> msd_;
};

struct ExperimentConfig {
    SchemeKind scheme = SchemeKind::PcmFm;
    DetectorSpec detector;
    std::vector<double> ebn0_grid = {6, 7, 8, 9, 10};
    long long n_frames = 10000;
    int frame_len = 1000;       // data symbols per frame, pilots excluded
    int k = 4;
    std::uint64_t master_seed = 1;
    long long min_errors = 200; // 0 disables early stop
    bool noiseless = false;
    int workers = 0;            // 0 = hardware concurrency
    std::string output_path;    // records CSV; summary JSON goes next to it

    /// Every violated constraint, one message each; empty when valid.
    std::vector<std::string> violations() const;
    void validate() const;

    /// Applies a "key=value"-style override; keys match the CLI flag names.
    void set(std::string_view key, std::string_view value);

    void apply_paper_scale();

    static ExperimentConfig load(const std::string& path);
    std::string to_json() const;
};

struct BerRecord {
    std::string scheme;
    std::string detector;
    double ebn0_db = 0.0;
    long long frames = 0;
    long long bits = 0;
    long long errors = 0;
    double ber = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    double elapsed_seconds = 0.0;
    std::uint64_t seed = 0;
};

/// Bit errors between two equal-length symbol sequences under natural-binary rank mapping.
long long count_bit_errors(const Scheme& scheme, std::span<const int> sent, std::span<const int> decided);

/// Data symbols of frame `frame_index` for a run seeded with `master_seed`.
std::vector<int> frame_data(const Scheme& scheme, std::uint64_t master_seed, long long frame_index, int frame_len);

using ProgressFn = std::function<void(const BerRecord&)>;

std::vector<BerRecord> run_sweep(const ExperimentConfig& config, const ProgressFn& progress = {});

/// Deterministic part of the output: one row per point, no timing.
void write_records_csv(std::ostream& os, const std::vector<BerRecord>& records);
std::vector<BerRecord> read_records_csv(std::istream& is);

/// Summary with a config echo, version string and timings.
std::string summary_json(const ExperimentConfig& config, const std::vector<BerRecord>& records, double wall_seconds);

/// Writes `<output>` (records) and `<output stem>.summary.json`.
void write_outputs(const ExperimentConfig& config, const std::vector<BerRecord>& records, double wall_seconds);

struct CurvePoint {
    std::string series;
    double ebn0_db = 0.0;
    double ber = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool operator==(const CurvePoint&) const = default;
};

/// One series per (scheme, detector), rows ascending in Eb/N0.
void emit_curves(std::ostream& os, const std::vector<BerRecord>& records);
std::vector<CurvePoint> read_curves(std::istream& is);

struct OracleReport {
    long long trials = 0;
    long long coherent_agree = 0;
    long long noncoherent_agree = 0;
    long long metric_dominance = 0;  // trials where oracle |metric| >= detector |metric|

    double coherent_rate() const noexcept { return trials ? double(coherent_agree) / trials : 1.0; }
    double noncoherent_rate() const noexcept { return trials ? double(noncoherent_agree) / trials : 1.0; }
    double dominance_rate() const noexcept { return trials ? double(metric_dominance) / trials : 1.0; }
    bool passed() const noexcept
    {
        return coherent_agree == trials && metric_dominance == trials && noncoherent_rate() >= 0.95;
    }
};

/// Detector-vs-exhaustive-search equivalence over random noisy frames of 1..max_len data symbols.
OracleReport run_oracle_suite(SchemeKind scheme, long long trials, int max_len, double ebn0_db, std::uint64_t seed);

/// Writes table2_complexity.csv and table3_storage.csv into `dir`.
void dump_tables(const std::string& dir, int k, int traceback_n);

std::string version_string();

}  // namespace cpm
