#pragma once

#include "eacc/protocol.hpp"

#include <cstdint>

namespace eacc {

// Feed-forward cell states implementing Bob's conditional measurement:
// t=2 -> (X_on, Z_on) = (1 xor b, b), t=P -> (b, b). Not applicable for t=1.
struct PockelsSettings {
    int x_on = 0;
    int z_on = 0;
};

PockelsSettings pockels_settings(Trit t, int b);

// The unitary X^x_on Z^z_on applied to Bob's qubit before the fixed analyzer.
ComplexMatrix pockels_operator(const PockelsSettings& s);

// Fixed analyzer on Bob's side in the hardware path: (|pi/8>, |5pi/8>).
MeasurementBasis bob_analyzer();

// One protocol round. v and beta are absent exactly when t = 1.
struct TrialRecord {
    int q = 0;
    int alpha = 0;
    Trit t = Trit::One;
    int b = 0;
    std::optional<int> v;
    std::optional<int> beta;
    int q_hat = 0;
    bool success = false;
};

struct CountsTable {
    std::array<std::array<long long, 2>, 2> counts{};  // [q][q_hat]

    long long total() const {
        return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
    }
    long long successes() const { return counts[0][0] + counts[1][1]; }

    bool operator==(const CountsTable&) const = default;
};

// Two simulation paths with identical statistics: Direct samples Bob's
// outcome from the conditional Born distribution; Physical collapses Alice's
// side, applies the feed-forward X/Z operators to Bob's qubit and measures
// the fixed analyzer (beta = m xor b). Physical requires Bob's side of the
// strategy to be the feed-forward preset, since the analyzer is fixed.
enum class Backend { Direct, Physical };

TrialRecord simulate_trial(const DensityMatrix& rho, const MeasurementStrategy& strat,
                           const ButterflyView& view, Backend backend, RandomStream& rng);
TrialRecord simulate_trial(const NonSignalingBox& box, const ButterflyView& view,
                           RandomStream& rng);

struct RunOptions {
    Backend backend = Backend::Direct;
    unsigned threads = 0;  // 0 = hardware concurrency
};

// Trials are processed in fixed-size shards, each on its own derived random
// stream, so the table is identical for any thread count and any repeat of
// the same seed.
CountsTable run_trials(const DensityMatrix& rho, const MeasurementStrategy& strat,
                       const FiniteChannel& ch, long long n, std::uint64_t seed,
                       const RunOptions& options = {});
CountsTable run_trials(const NonSignalingBox& box, const FiniteChannel& ch, long long n,
                       std::uint64_t seed, const RunOptions& options = {});

struct SuccessEstimate {
    double p_hat = 0.0;
    double sigma = 0.0;  // binomial: sqrt(p(1-p)/n)
};

SuccessEstimate estimate_success(const CountsTable& counts);

std::string counts_to_csv(const CountsTable& counts);
CountsTable counts_from_csv(const std::string& text);

// Run metadata: seed, trial count, backend, strategy fingerprint.
std::string run_metadata_json(std::uint64_t seed, long long n, Backend backend,
                              const MeasurementStrategy& strat);

}  // namespace eacc
