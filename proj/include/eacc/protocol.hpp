#pragma once

#include "eacc/channel.hpp"
#include "eacc/states.hpp"

#include <array>
#include <optional>

namespace eacc {

// Analyzer direction pair (|theta>, |theta + pi/2>); outcome 0 projects on
// the first ket.
struct MeasurementBasis {
    double angle = 0.0;

    Ket2 ket(int outcome) const;
    ComplexMatrix element(int outcome) const;
};

// Binary qubit measurement as a pair of projectors summing to identity.
// Usually rank-1 pairs built from an analyzer angle; the optimizer may also
// produce rank-0/rank-2 pairs (a trivial measurement), which evaluate fine.
class BinaryMeasurement {
public:
    static BinaryMeasurement from_angle(double theta);
    static BinaryMeasurement from_basis(const MeasurementBasis& basis);
    static BinaryMeasurement from_elements(ComplexMatrix e0, ComplexMatrix e1);

    const ComplexMatrix& element(int outcome) const;
    // Analyzer angle in [0, pi), recovered when outcome 0 is a rank-1 real
    // projector; nullopt otherwise.
    std::optional<double> angle() const;

private:
    BinaryMeasurement(ComplexMatrix e0, ComplexMatrix e1);

    std::array<ComplexMatrix, 2> elements_;
};

// Both parties' measurement settings plus Bob's feed-forward rule: which of
// his two settings each trit value selects (nullopt = irrelevant, the t=1
// branch ignores his outcome and the run fixes v=0 for the trace).
struct MeasurementStrategy {
    std::array<BinaryMeasurement, 2> alice;
    std::array<BinaryMeasurement, 2> bob;
    std::array<std::optional<int>, 3> bob_choice_map;  // indexed by trit_index

    int bob_choice(Trit t) const;
    bool bob_choice_irrelevant(Trit t) const;
};

std::array<std::optional<int>, 3> default_bob_choice();

// The CHSH-optimal preset: Alice measures at pi/4 or 0, Bob at pi/8 or
// 3pi/8; t=2 selects Bob's setting 1 and t=P his setting 0.
MeasurementStrategy chsh_strategy();
MeasurementStrategy strategy_from_angles(double alice0, double alice1, double bob0, double bob1);

struct RelationStats {
    std::array<std::array<double, 2>, 2> omega{};  // [q][v]

    double mean() const;
    double min() const;
};

// Probability that alpha XOR beta = q*v for each input pair, under the Born
// rule for the given state and settings.
RelationStats correlation_omega(const DensityMatrix& rho, const MeasurementStrategy& strat);

// Alice feeds (q, alpha) straight into the channel.
ChannelInput encode_input(int q, int alpha);

// Bob's decoding: t=1 returns b and ignores beta; t=2 and t=P return
// b XOR beta and require beta.
int decode(const ChannelOutput& y, std::optional<int> beta);

// Canonical access to a 4-input/6-output channel whose labels identify
// inputs with bit pairs ("01") and outputs with trit:bit pairs ("P:1"), in
// any order. Anything else is rejected, since the decoder is specific to
// this shape.
class ButterflyView {
public:
    explicit ButterflyView(const FiniteChannel& ch);

    int input_index(int b1, int b2) const;
    const ChannelOutput& output(int y) const;
    const FiniteChannel& channel() const { return *ch_; }

private:
    const FiniteChannel* ch_;
    std::array<int, 4> input_index_{};
    std::vector<ChannelOutput> outputs_;
};

// Exact Born-rule success probability of the assisted protocol over a
// butterfly-shaped channel, uniform message prior.
double exact_success(const DensityMatrix& rho, const MeasurementStrategy& strat,
                     const FiniteChannel& ch);

// Bipartite conditional distribution Pr[alpha, beta | q, v] with
// non-signaling marginals (checked within tol::comparison).
class NonSignalingBox {
public:
    // probs[q][v][alpha][beta]
    using Table = std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2>;

    explicit NonSignalingBox(const Table& probs);

    double prob(int q, int v, int alpha, int beta) const;
    double alice_marginal(int q, int alpha) const;
    double beta_given_alpha(int q, int v, int alpha, int beta) const;

    static NonSignalingBox pr_box();   // alpha XOR beta = q*v with certainty
    static NonSignalingBox uniform();  // independent unbiased bits
    static NonSignalingBox from_quantum(const DensityMatrix& rho, const MeasurementStrategy& strat);

private:
    Table probs_;
};

// Same protocol pipeline with the box replacing Born probabilities. Uses
// exact fraction arithmetic when box and channel entries allow it.
double box_success(const NonSignalingBox& box, const FiniteChannel& ch);

RelationStats correlation_omega(const NonSignalingBox& box);

// Strategy JSON stores analyzer angles (15 significant digits) and the
// feed-forward map; it requires angle-representable measurements.
std::string strategy_to_json(const MeasurementStrategy& strat);
MeasurementStrategy strategy_from_json(const std::string& text);
MeasurementStrategy load_strategy(const std::string& path);
void save_strategy(const MeasurementStrategy& strat, const std::string& path);

std::string box_to_json(const NonSignalingBox& box);
NonSignalingBox box_from_json(const std::string& text);
NonSignalingBox load_box(const std::string& path);

}  // namespace eacc
