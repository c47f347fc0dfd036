#pragma once

#include "eacc/protocol.hpp"

#include <cstdint>
#include <vector>

namespace eacc {

enum class Side { Alice, Bob };

// Linearization of the success objective in one party's measurement
// elements: success = sum_s (Tr[E_{s,0} R_{s,0}] + Tr[E_{s,1} R_{s,1}]) +
// constant, where {E_{s,0}, E_{s,1}} is that party's measurement for
// setting s.
struct ScoreOperators {
    std::array<std::array<ComplexMatrix, 2>, 2> r{
        std::array<ComplexMatrix, 2>{ComplexMatrix(2), ComplexMatrix(2)},
        std::array<ComplexMatrix, 2>{ComplexMatrix(2), ComplexMatrix(2)}};
    double constant = 0.0;
};

ScoreOperators score_operators(const DensityMatrix& rho, const MeasurementStrategy& strat,
                               const FiniteChannel& ch, Side side);

double objective_from_scores(const ScoreOperators& scores,
                             const std::array<BinaryMeasurement, 2>& side_measurements);

struct SeesawConfig {
    int max_sweeps = 200;
    double tol = 1e-10;                       // absolute improvement per full sweep
    std::optional<MeasurementStrategy> init;  // default: random angles from `seed`
    std::uint64_t seed = 0;
};

struct SeesawResult {
    MeasurementStrategy strategy;
    double final_objective = 0.0;
    int sweeps = 0;
    // initial objective, then one value per half-step
    std::vector<double> objective_trace;
};

// Alternating maximization: each half-step replaces every setting of one
// side by {positive_part_projector(R0 - R1), complement}, which maximizes
// the linearized objective over binary projective measurements. Degenerate
// score differences keep the previous setting. The objective never
// decreases; a decrease beyond tolerance raises std::logic_error.
SeesawResult seesaw(const DensityMatrix& rho, const FiniteChannel& ch, const SeesawConfig& cfg);

// Four analyzer angles drawn uniformly from [0, pi), feed-forward preset.
MeasurementStrategy random_strategy(std::uint64_t seed);

std::string seesaw_result_to_json(const SeesawResult& result);

}  // namespace eacc
