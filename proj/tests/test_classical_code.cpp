#include "eacc/classical_code.hpp"

#include "eacc/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace eacc;

namespace {

// indices into the canonical butterfly orderings
constexpr int kIn00 = 0, kIn01 = 1, kIn10 = 2, kIn11 = 3;
constexpr int kOut10 = 0, kOut11 = 1, kOut20 = 2, kOut21 = 3, kOutP0 = 4, kOutP1 = 5;

// Exhaustive-decoding oracle: the best success for a fixed encoding over all
// M^num_outputs decodings, computed without the MAP shortcut.
double best_decoding_oracle(const FiniteChannel& ch, const std::vector<int>& encoding) {
    const int m = static_cast<int>(encoding.size());
    const int outputs = ch.num_outputs();
    long long total = 1;
    for (int y = 0; y < outputs; ++y) total *= m;
    double best = 0.0;
    for (long long mask = 0; mask < total; ++mask) {
        ClassicalCode code{m, encoding, std::vector<int>(static_cast<std::size_t>(outputs))};
        long long rest = mask;
        for (int y = 0; y < outputs; ++y) {
            code.decoding[static_cast<std::size_t>(y)] = static_cast<int>(rest % m);
            rest /= m;
        }
        best = std::max(best, evaluate_code(ch, code));
    }
    return best;
}

}  // namespace

TEST_CASE("the reference two-message code achieves exactly 5/6") {
    const FiniteChannel ch = butterfly_channel();
    ClassicalCode code;
    code.num_messages = 2;
    code.encoding = {kIn01, kIn10};
    code.decoding = std::vector<int>(6, 0);
    code.decoding[kOut10] = 0;
    code.decoding[kOut21] = 0;
    code.decoding[kOut11] = 1;
    code.decoding[kOut20] = 1;
    code.decoding[kOutP1] = 0;  // the guess branch, fixed to message 0
    code.decoding[kOutP0] = 0;  // probability-zero output

    const auto exact = evaluate_code_exact(ch, code);
    REQUIRE(exact.has_value());
    CHECK(*exact == Rational::of(5, 6));
    CHECK(evaluate_code(ch, code) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("mapping both messages to one input caps success at 1/2") {
    const FiniteChannel ch = butterfly_channel();
    const std::vector<int> encoding = {kIn01, kIn01};
    CHECK(best_decoding_oracle(ch, encoding) <= 0.5 + 1e-12);
}

TEST_CASE("MAP decoding on the diagonal encoding also reaches 5/6") {
    const FiniteChannel ch = butterfly_channel();
    const ClassicalCode code = map_decoder(ch, {kIn00, kIn11});
    CHECK(evaluate_code(ch, code) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(best_decoding_oracle(ch, {kIn00, kIn11}) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("map_decoder follows the rule and the tie-breaks") {
    const FiniteChannel ch = butterfly_channel();
    const ClassicalCode code = map_decoder(ch, {kIn01, kIn10});
    CHECK(code.decoding[kOut21] == 0);  // certainly message 0
    CHECK(code.decoding[kOut10] == 0);
    CHECK(code.decoding[kOut11] == 1);
    CHECK(code.decoding[kOut20] == 1);
    CHECK(code.decoding[kOutP1] == 0);  // tie -> smallest message index
    CHECK(code.decoding[kOutP0] == 0);  // probability-zero output -> smallest index
}

TEST_CASE("MAP decoding beats every explicit decoding for every encoding") {
    const FiniteChannel ch = butterfly_channel();
    std::vector<int> encoding(2);
    for (encoding[0] = 0; encoding[0] < 4; ++encoding[0])
        for (encoding[1] = 0; encoding[1] < 4; ++encoding[1]) {
            const double map_val = evaluate_code(ch, map_decoder(ch, encoding));
            CHECK(map_val >= best_decoding_oracle(ch, encoding) - 1e-12);
        }
}

TEST_CASE("best deterministic code on reference channels") {
    const FiniteChannel ch = butterfly_channel();
    const BestCode best = best_deterministic_code(ch, 2);
    REQUIRE(best.exact.has_value());
    CHECK(*best.exact == Rational::of(5, 6));
    CHECK(evaluate_code(ch, best.code) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));

    CHECK(best_deterministic_code(ch, 1).success == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(best_deterministic_code(identity_channel(4), 4).success ==
          doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(best_deterministic_code(ch, 20), std::length_error);
}

TEST_CASE("four messages over the butterfly reach exactly 1/2") {
    // regression pin for the M=4 enumeration
    const BestCode best = best_deterministic_code(butterfly_channel(), 4);
    REQUIRE(best.exact.has_value());
    CHECK(*best.exact == Rational::of(1, 2));
}

TEST_CASE("mixture success is the weighted mean and never beats the best code") {
    const FiniteChannel ch = butterfly_channel();
    const ClassicalCode good = map_decoder(ch, {kIn01, kIn10});

    std::vector<std::pair<ClassicalCode, double>> single = {{good, 1.0}};
    CHECK(mixture_success(ch, single) == doctest::Approx(evaluate_code(ch, good)).epsilon(1e-15));

    const ClassicalCode half = map_decoder(ch, {kIn01, kIn01});  // indistinguishable encodings
    CHECK(evaluate_code(ch, half) == doctest::Approx(0.5).epsilon(1e-12));
    std::vector<std::pair<ClassicalCode, double>> pair = {{good, 0.5}, {half, 0.5}};
    CHECK(mixture_success(ch, pair) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    // shared randomness never helps: random 10-code mixtures stay below 5/6
    RandomStream rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::pair<ClassicalCode, double>> mixture;
        double weight_sum = 0.0;
        for (int i = 0; i < 10; ++i) {
            const std::vector<int> enc = {static_cast<int>(rng.next_u64() & 3),
                                          static_cast<int>(rng.next_u64() & 3)};
            const double w = rng.next_double() + 1e-3;
            mixture.emplace_back(map_decoder(ch, enc), w);
            weight_sum += w;
        }
        for (auto& [code, w] : mixture) w /= weight_sum;
        CHECK(mixture_success(ch, mixture) <= 5.0 / 6.0 + 1e-12);
    }

    std::vector<std::pair<ClassicalCode, double>> bad = {{good, 0.7}};
    CHECK_THROWS_AS(mixture_success(ch, bad), std::invalid_argument);
    std::vector<std::pair<ClassicalCode, double>> negative = {{good, 1.5}, {half, -0.5}};
    CHECK_THROWS_AS(mixture_success(ch, negative), std::invalid_argument);
}

TEST_CASE("code JSON round trip") {
    const ClassicalCode code = map_decoder(butterfly_channel(), {kIn01, kIn10});
    const ClassicalCode back = code_from_json(code_to_json(code));
    CHECK(back.num_messages == code.num_messages);
    CHECK(back.encoding == code.encoding);
    CHECK(back.decoding == code.decoding);
}
