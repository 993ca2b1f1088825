// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "cpm/frontend.hpp"

namespace cpm {

/// Frames handed to detectors carry L-1 head pilots and L-1 tail pilots
/// (see `with_pilots`); decisions cover the data symbols only.
struct Decision {
    std::vector<int> symbols;
    double final_metric = 0.0;  // real path metric (coherent) or |metric| (noncoherent)
};

struct TrellisShape {
    int states = 0;
    int branches = 0;
};

/// p*M^(L-1) states with M branches each.
TrellisShape coherent_trellis_shape(const Scheme& scheme);
/// M^L states with M branches each.
TrellisShape proposed_trellis_shape(const Scheme& scheme);

/// Coherent Viterbi MLSD over states (theta_{n-L}, a_{n-L+1}, ..., a_{n-1}).
class CoherentDetector {
public:
    CoherentDetector(Scheme scheme, FilterBanks banks);

    const TrellisShape& shape() const noexcept { return shape_; }

    /// Branch metric Re[exp(-j*(assumed_phase + theta)) * z_c]; full traceback.
    Decision detect(const IqFrame& frame, double assumed_phase = 0.0);
    Decision detect(const CorrelationMatrix& corr, double assumed_phase = 0.0);

private:
    Scheme scheme_;
    FilterBanks banks_;
    TrellisShape shape_;
    std::vector<Complex> phasors_;
    std::vector<double> metric_;
    std::vector<double> next_;
    std::vector<std::uint16_t> back_;
};

inline constexpr int kMaxSurvivors = 4;

/// One candidate path entering a state of the survived-phase trellis.
struct SurvivorCandidate {
    int prev_phase = 0;          // survived phase of the predecessor, mod p
    Complex prev_metric;         // accumulated complex correlation
    int exiting_symbol = 1;      // oldest symbol of the predecessor tuple
    std::ptrdiff_t exiting_index = 0;  // its symbol index (selects h)
    Complex correlation;         // matched-filter output of the new branch
    int prev_state = 0;
    int prev_rank = 0;
};

struct Survivor {
    int phase = 0;
    Complex metric;
    int prev_state = -1;
    int prev_rank = -1;
};

/// Extends every candidate by its rotated branch and keeps the `n_survivors`
/// largest by |metric|. Exact ties keep input order, so callers list
/// candidates by ascending predecessor state. Writes into `out`, returns the count.
///
///   phase'  = prev_phase + step(exiting_symbol)            (mod p)
///   metric' = prev_metric + exp(-j*2*pi*phase'/p) * correlation
int update_state(std::span<const SurvivorCandidate> candidates, const Scheme& scheme, int n_survivors,
                 std::span<Survivor> out);
std::vector<Survivor> update_state(std::span<const SurvivorCandidate> candidates, const Scheme& scheme,
                                   int n_survivors);

/// Noncoherent sequence detector whose states are the last L symbols, with
/// the cumulative phase carried on each survivor rather than in the state.
class ProposedDetector {
public:
    ProposedDetector(Scheme scheme, FilterBanks banks, int n_survivors = 1);

    const TrellisShape& shape() const noexcept { return shape_; }
    int n_survivors() const noexcept { return n_survivors_; }

    /// Predecessor codes of `code`, ascending.
    std::vector<int> predecessors(int code) const;

    Decision detect(const IqFrame& frame);
    Decision detect(const CorrelationMatrix& corr);

private:
    Scheme scheme_;
    FilterBanks banks_;
    int n_survivors_;
    TrellisShape shape_;
    std::vector<Complex> rotations_;  // exp(-j*2*pi*m/p)
    std::vector<Survivor> cur_;
    std::vector<Survivor> next_;
    std::vector<int> cur_count_;
    std::vector<int> next_count_;
    std::vector<SurvivorCandidate> cand_;
    std::vector<std::int32_t> back_;
};

/// Classic noncoherent multi-symbol detection: for every data symbol, the
/// window of `window` intervals centred on it is matched against every
/// hypothesis of the symbols it depends on; the middle symbol of the
/// hypothesis with the largest |correlation| is decided.
class MsdDetector {
public:
    MsdDetector(Scheme scheme, FilterBanks banks, int window = 5);

    int window() const noexcept { return window_; }
    Decision detect(const IqFrame& frame);
    Decision detect(const CorrelationMatrix& corr);

private:
    Scheme scheme_;
    FilterBanks banks_;
    int window_;
    std::vector<Complex> rotations_;
};

/// Exhaustive search over every data sequence; limited to 12 data symbols.
inline constexpr int kOracleMaxDataSymbols = 12;
Decision oracle_coherent(const IqFrame& frame, const Scheme& scheme, const PulseTable& pulse, double assumed_phase = 0.0);
Decision oracle_noncoherent(const IqFrame& frame, const Scheme& scheme, const PulseTable& pulse);

/// sum over the detection span (intervals L-1 .. N-1) of r * conj(s) for a given data sequence.
Complex sequence_correlation(const IqFrame& frame, const Scheme& scheme, const PulseTable& pulse, std::span<const int> data);

}  // namespace cpm
