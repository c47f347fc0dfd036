#include "eacc/protocol.hpp"

#include "eacc/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace eacc;

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Trigonometric Born oracle for werner(p) with angle-based settings:
// <P_theta x P_phi> = p cos^2(theta - phi)/2 + (1-p)/4.
double omega_oracle_werner(double p, double alice_base, double bob_base, int q, int v) {
    double w = 0.0;
    for (int alpha = 0; alpha < 2; ++alpha) {
        const int beta = alpha ^ (q & v);
        const double theta = alice_base + alpha * kPi / 2.0;
        const double phi = bob_base + beta * kPi / 2.0;
        const double c = std::cos(theta - phi);
        w += p * c * c / 2.0 + (1.0 - p) / 4.0;
    }
    return w;
}

MeasurementStrategy random_angle_strategy(RandomStream& rng) {
    return strategy_from_angles(kPi * rng.next_double(), kPi * rng.next_double(),
                                kPi * rng.next_double(), kPi * rng.next_double());
}

}  // namespace

TEST_CASE("chsh preset angles and feed-forward") {
    const MeasurementStrategy s = chsh_strategy();
    CHECK(*s.alice[0].angle() == doctest::Approx(kPi / 4.0).epsilon(1e-12));
    CHECK(*s.alice[1].angle() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(*s.bob[0].angle() == doctest::Approx(kPi / 8.0).epsilon(1e-12));
    CHECK(*s.bob[1].angle() == doctest::Approx(3.0 * kPi / 8.0).epsilon(1e-12));
    CHECK(s.bob_choice_irrelevant(Trit::One));
    CHECK(s.bob_choice(Trit::Two) == 1);
    CHECK(s.bob_choice(Trit::Parity) == 0);
    CHECK_THROWS_AS(s.bob_choice(Trit::One), std::invalid_argument);
}

TEST_CASE("basis projectors resolve the identity") {
    RandomStream rng(3);
    for (int i = 0; i < 25; ++i) {
        const MeasurementBasis basis{2.0 * kPi * rng.next_double()};
        CHECK(max_abs_diff(basis.element(0) + basis.element(1), ComplexMatrix::identity(2)) <=
              tol::comparison);
    }
}

TEST_CASE("binary measurement element validation and angle recovery") {
    CHECK_THROWS_AS(
        BinaryMeasurement::from_elements(ComplexMatrix::identity(2), ComplexMatrix::identity(2)),
        std::invalid_argument);
    const BinaryMeasurement m = BinaryMeasurement::from_angle(1.234);
    CHECK(*m.angle() == doctest::Approx(1.234).epsilon(1e-12));
    // rank-0 / rank-2 pair is valid but has no analyzer angle
    const BinaryMeasurement trivial =
        BinaryMeasurement::from_elements(ComplexMatrix(2), ComplexMatrix::identity(2));
    CHECK(!trivial.angle().has_value());
}

TEST_CASE("relation probability for the preset") {
    const RelationStats phi = correlation_omega(phi_plus(), chsh_strategy());
    const double expected = (1.0 + kInvSqrt2) / 2.0;
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v) CHECK(std::abs(phi.omega[q][v] - expected) <= 1e-12);

    const RelationStats mixed = correlation_omega(maximally_mixed(), chsh_strategy());
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v) CHECK(std::abs(mixed.omega[q][v] - 0.5) <= 1e-12);
}

TEST_CASE("relation probability for werner states matches the trig oracle") {
    const double alice_base[2] = {kPi / 4.0, 0.0};
    const double bob_base[2] = {kPi / 8.0, 3.0 * kPi / 8.0};
    for (double p : {0.0, 0.5, 1.0}) {
        const RelationStats stats = correlation_omega(werner(p), chsh_strategy());
        for (int q = 0; q < 2; ++q)
            for (int v = 0; v < 2; ++v) {
                const double oracle = omega_oracle_werner(p, alice_base[q], bob_base[v], q, v);
                CHECK(stats.omega[q][v] == doctest::Approx(oracle).epsilon(1e-12));
                CHECK(stats.omega[q][v] ==
                      doctest::Approx((1.0 + p * kInvSqrt2) / 2.0).epsilon(1e-12));
            }
    }
}

TEST_CASE("encode_input is the identity on bit pairs") {
    for (int q = 0; q < 2; ++q)
        for (int a = 0; a < 2; ++a) {
            const ChannelInput in = encode_input(q, a);
            CHECK(in.b1 == q);
            CHECK(in.b2 == a);
        }
    CHECK_THROWS_AS(encode_input(2, 0), std::invalid_argument);
}

TEST_CASE("decode follows the feed-forward table") {
    CHECK(decode(ChannelOutput{Trit::One, 1}, std::nullopt) == 1);
    CHECK(decode(ChannelOutput{Trit::One, 0}, 1) == 0);  // beta ignored
    CHECK(decode(ChannelOutput{Trit::Two, 0}, 1) == 1);
    CHECK(decode(ChannelOutput{Trit::Parity, 1}, 1) == 0);
    CHECK_THROWS_AS(decode(ChannelOutput{Trit::Two, 0}, std::nullopt), std::invalid_argument);
    CHECK_THROWS_AS(decode(ChannelOutput{Trit::Parity, 1}, std::nullopt), std::invalid_argument);
}

TEST_CASE("exact success of the preset protocol") {
    const FiniteChannel ch = butterfly_channel();
    const MeasurementStrategy strat = chsh_strategy();
    CHECK(std::abs(exact_success(phi_plus(), strat, ch) - (2.0 + kInvSqrt2) / 3.0) <= 1e-12);
    CHECK(std::abs(exact_success(maximally_mixed(), strat, ch) - 2.0 / 3.0) <= 1e-12);
    for (double p : {0.25, kInvSqrt2, 1.0})
        CHECK(std::abs(exact_success(werner(p), strat, ch) - (2.0 + p * kInvSqrt2) / 3.0) <= 1e-12);
}

TEST_CASE("success decomposes as omega + (1 - omega)/3 when omega is flat") {
    const FiniteChannel ch = butterfly_channel();
    const MeasurementStrategy strat = chsh_strategy();
    for (double p : {0.0, 0.3, kInvSqrt2, 1.0}) {
        const DensityMatrix rho = werner(p);
        const RelationStats stats = correlation_omega(rho, strat);
        for (int q = 0; q < 2; ++q)
            for (int v = 0; v < 2; ++v)
                REQUIRE(std::abs(stats.omega[q][v] - stats.mean()) <= 1e-12);
        const double w = stats.mean();
        CHECK(std::abs(exact_success(rho, strat, ch) - (w + (1.0 - w) / 3.0)) <= 1e-12);
    }
}

TEST_CASE("alice's outcome marginal is uniform for the preset") {
    const DensityMatrix rho = phi_plus();
    const MeasurementStrategy strat = chsh_strategy();
    for (int q = 0; q < 2; ++q)
        for (int alpha = 0; alpha < 2; ++alpha) {
            const double p =
                (kron(strat.alice[static_cast<std::size_t>(q)].element(alpha),
                      ComplexMatrix::identity(2)) *
                 rho.matrix())
                    .trace()
                    .real();
            CHECK(std::abs(p - 0.5) <= 1e-12);
        }
}

TEST_CASE("exact success requires a butterfly-shaped channel") {
    const MeasurementStrategy strat = chsh_strategy();
    CHECK_THROWS_AS(exact_success(phi_plus(), strat, identity_channel(4)), std::invalid_argument);
    CHECK_THROWS_AS(exact_success(phi_plus(), strat, identity_channel(6)), std::invalid_argument);
}

TEST_CASE("exact success is invariant under output relabeling") {
    const FiniteChannel ch = butterfly_channel();
    const int perm[6] = {2, 4, 0, 5, 1, 3};
    std::vector<std::string> labels(6);
    std::vector<std::vector<double>> probs(4, std::vector<double>(6, 0.0));
    for (int y = 0; y < 6; ++y) {
        labels[static_cast<std::size_t>(perm[y])] = ch.output_labels()[static_cast<std::size_t>(y)];
        for (int x = 0; x < 4; ++x)
            probs[static_cast<std::size_t>(x)][static_cast<std::size_t>(perm[y])] = ch.prob(x, y);
    }
    const FiniteChannel shuffled(ch.input_labels(), labels, probs);
    for (double p : {0.4, 1.0})
        CHECK(std::abs(exact_success(werner(p), chsh_strategy(), shuffled) -
                       exact_success(werner(p), chsh_strategy(), ch)) <= 1e-12);
}

TEST_CASE("pr box transmits with certainty, uniform box gives 2/3") {
    const FiniteChannel ch = butterfly_channel();
    CHECK(box_success(NonSignalingBox::pr_box(), ch) == 1.0);
    CHECK(box_success(NonSignalingBox::uniform(), ch) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    const RelationStats pr = correlation_omega(NonSignalingBox::pr_box());
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v) CHECK(pr.omega[q][v] == 1.0);
}

TEST_CASE("quantum-induced box reproduces the exact pipeline") {
    const FiniteChannel ch = butterfly_channel();
    RandomStream rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const MeasurementStrategy strat = random_angle_strategy(rng);
        const DensityMatrix rho = trial % 2 == 0 ? phi_plus() : werner(0.7);
        const NonSignalingBox box = NonSignalingBox::from_quantum(rho, strat);
        CHECK(std::abs(box_success(box, ch) - exact_success(rho, strat, ch)) <= 1e-12);
    }
}

TEST_CASE("signaling distributions are rejected") {
    NonSignalingBox::Table t{};
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) t[q][v][a][b] = 0.25;
    t[0][0][0][0] = 0.5;  // alpha marginal now depends on v
    t[0][0][0][1] = 0.0;
    CHECK_THROWS_AS((NonSignalingBox{t}), std::invalid_argument);
}

TEST_CASE("strategy and box JSON round trips") {
    const MeasurementStrategy strat = chsh_strategy();
    const MeasurementStrategy back = strategy_from_json(strategy_to_json(strat));
    for (int i = 0; i < 2; ++i) {
        CHECK(*back.alice[static_cast<std::size_t>(i)].angle() ==
              doctest::Approx(*strat.alice[static_cast<std::size_t>(i)].angle()).epsilon(1e-15));
        CHECK(*back.bob[static_cast<std::size_t>(i)].angle() ==
              doctest::Approx(*strat.bob[static_cast<std::size_t>(i)].angle()).epsilon(1e-15));
    }
    CHECK(back.bob_choice_map == strat.bob_choice_map);

    const NonSignalingBox box = NonSignalingBox::pr_box();
    const NonSignalingBox box_back = box_from_json(box_to_json(box));
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    CHECK(box_back.prob(q, v, a, b) == box.prob(q, v, a, b));
}
