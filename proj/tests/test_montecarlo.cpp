#include "eacc/montecarlo.hpp"

#include <doctest.h>

#include <cmath>

using namespace eacc;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

}

TEST_CASE("pockels settings per trit and bit") {
    CHECK(pockels_settings(Trit::Two, 0).x_on == 1);
    CHECK(pockels_settings(Trit::Two, 0).z_on == 0);
    CHECK(pockels_settings(Trit::Two, 1).x_on == 0);
    CHECK(pockels_settings(Trit::Two, 1).z_on == 1);
    CHECK(pockels_settings(Trit::Parity, 1).x_on == 1);
    CHECK(pockels_settings(Trit::Parity, 1).z_on == 1);
    CHECK(pockels_settings(Trit::Parity, 0).x_on == 0);
    CHECK(pockels_settings(Trit::Parity, 0).z_on == 0);
    CHECK_THROWS_AS(pockels_settings(Trit::One, 0), std::invalid_argument);
}

TEST_CASE("feed-forward operators implement bob's conditional measurement") {
    // U(t,b)^dag |A_m><A_m| U(t,b) = B^{v(t)}_{m xor b} for t in {2, P}
    const MeasurementStrategy strat = chsh_strategy();
    const MeasurementBasis analyzer = bob_analyzer();
    for (Trit t : {Trit::Two, Trit::Parity}) {
        const int v = strat.bob_choice(t);
        for (int b = 0; b < 2; ++b) {
            const ComplexMatrix u = pockels_operator(pockels_settings(t, b));
            for (int m = 0; m < 2; ++m) {
                const ComplexMatrix effective = u.adjoint() * analyzer.element(m) * u;
                const ComplexMatrix expected =
                    strat.bob[static_cast<std::size_t>(v)].element(m ^ b);
                CHECK(max_abs_diff(effective, expected) <= 1e-12);
            }
        }
    }
}

TEST_CASE("trial records satisfy their structural invariants") {
    const FiniteChannel ch = butterfly_channel();
    const ButterflyView view(ch);
    const DensityMatrix rho = phi_plus();
    const MeasurementStrategy strat = chsh_strategy();
    for (Backend backend : {Backend::Direct, Backend::Physical}) {
        RandomStream rng(404);
        for (int i = 0; i < 2000; ++i) {
            const TrialRecord rec = simulate_trial(rho, strat, view, backend, rng);
            CHECK(rec.success == (rec.q == rec.q_hat));
            CHECK(rec.v.has_value() == (rec.t != Trit::One));
            CHECK(rec.beta.has_value() == (rec.t != Trit::One));
            if (rec.t == Trit::Two) CHECK(*rec.v == 1);
            if (rec.t == Trit::Parity) CHECK(*rec.v == 0);
        }
    }
}

TEST_CASE("simulated success matches the exact value on both backends") {
    const FiniteChannel ch = butterfly_channel();
    const DensityMatrix rho = phi_plus();
    const MeasurementStrategy strat = chsh_strategy();
    const double expected = (2.0 + kInvSqrt2) / 3.0;
    const long long n = 200000;
    const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n));

    for (Backend backend : {Backend::Direct, Backend::Physical}) {
        const CountsTable counts = run_trials(rho, strat, ch, n, 99, RunOptions{backend, 0});
        CHECK(counts.total() == n);
        const SuccessEstimate est = estimate_success(counts);
        CHECK(std::abs(est.p_hat - expected) <= 4.0 * sigma);
    }
}

TEST_CASE("identical seeds give identical tables, independent of threads") {
    const FiniteChannel ch = butterfly_channel();
    const DensityMatrix rho = werner(0.8);
    const MeasurementStrategy strat = chsh_strategy();
    const CountsTable a = run_trials(rho, strat, ch, 300000, 7, RunOptions{Backend::Direct, 1});
    const CountsTable b = run_trials(rho, strat, ch, 300000, 7, RunOptions{Backend::Direct, 4});
    const CountsTable c = run_trials(rho, strat, ch, 300000, 7, RunOptions{Backend::Direct, 0});
    CHECK(a == b);
    CHECK(a == c);
    const CountsTable d = run_trials(rho, strat, ch, 300000, 8, RunOptions{Backend::Direct, 1});
    CHECK(a != d);
}

TEST_CASE("pr box transmits every trial") {
    const CountsTable counts =
        run_trials(NonSignalingBox::pr_box(), butterfly_channel(), 100000, 3);
    CHECK(counts.successes() == counts.total());
    CHECK(counts.total() == 100000);
}

TEST_CASE("estimate_success arithmetic") {
    CountsTable reported;
    reported.counts[0][0] = 94422;  // split the published-shape totals across q
    reported.counts[1][1] = 94423;
    reported.counts[0][1] = 11714;
    reported.counts[1][0] = 11715;
    REQUIRE(reported.successes() == 188845);
    REQUIRE(reported.total() - reported.successes() == 23429);
    const SuccessEstimate est = estimate_success(reported);
    CHECK(est.p_hat == doctest::Approx(0.8896).epsilon(1e-4));

    CountsTable one;
    one.counts[1][1] = 1;
    const SuccessEstimate single = estimate_success(one);
    CHECK(single.p_hat == 1.0);
    CHECK(single.sigma == 0.0);

    CountsTable half;
    half.counts[0][0] = 300;
    half.counts[0][1] = 300;
    half.counts[1][0] = 200;
    half.counts[1][1] = 200;
    const SuccessEstimate even = estimate_success(half);
    CHECK(even.p_hat == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(even.sigma == doctest::Approx(std::sqrt(0.25 / 1000.0)).epsilon(1e-12));

    CHECK_THROWS_AS(estimate_success(CountsTable{}), std::invalid_argument);
}

TEST_CASE("per-setting relation frequencies match the born values") {
    const FiniteChannel ch = butterfly_channel();
    const ButterflyView view(ch);
    const DensityMatrix rho = phi_plus();
    const MeasurementStrategy strat = chsh_strategy();
    const RelationStats stats = correlation_omega(rho, strat);

    RandomStream rng(606);
    long long hold[2][2] = {};
    long long seen[2][2] = {};
    for (int i = 0; i < 300000; ++i) {
        const TrialRecord rec = simulate_trial(rho, strat, view, Backend::Direct, rng);
        if (!rec.v) continue;
        ++seen[rec.q][*rec.v];
        if ((rec.alpha ^ *rec.beta) == (rec.q & *rec.v)) ++hold[rec.q][*rec.v];
    }
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v) {
            REQUIRE(seen[q][v] > 10000);
            const double freq = static_cast<double>(hold[q][v]) / static_cast<double>(seen[q][v]);
            const double w = stats.omega[q][v];
            const double sigma = std::sqrt(w * (1.0 - w) / static_cast<double>(seen[q][v]));
            CHECK(std::abs(freq - w) <= 4.0 * sigma);
        }
}

TEST_CASE("backends agree within statistics") {
    const FiniteChannel ch = butterfly_channel();
    const DensityMatrix rho = werner(0.9);
    const MeasurementStrategy strat = chsh_strategy();
    const long long n = 200000;
    const SuccessEstimate direct =
        estimate_success(run_trials(rho, strat, ch, n, 11, RunOptions{Backend::Direct, 0}));
    const SuccessEstimate physical =
        estimate_success(run_trials(rho, strat, ch, n, 12, RunOptions{Backend::Physical, 0}));
    const double sigma = std::hypot(direct.sigma, physical.sigma);
    CHECK(std::abs(direct.p_hat - physical.p_hat) <= 4.0 * sigma);
}

TEST_CASE("success counts pass a chi-square sanity check") {
    // flaky-tolerant: threshold at the p = 0.001 quantile of chi-square(1)
    const FiniteChannel ch = butterfly_channel();
    const DensityMatrix rho = phi_plus();
    const MeasurementStrategy strat = chsh_strategy();
    const long long n = 100000;
    const double p = (2.0 + kInvSqrt2) / 3.0;
    const CountsTable counts = run_trials(rho, strat, ch, n, 2718);
    const double observed = static_cast<double>(counts.successes());
    const double expected = p * static_cast<double>(n);
    const double chi2 = (observed - expected) * (observed - expected) / expected +
                        (n - observed - (n - expected)) * (n - observed - (n - expected)) /
                            (n - expected);
    CHECK(chi2 < 10.83);
}

TEST_CASE("physical backend restrictions") {
    const FiniteChannel ch = butterfly_channel();
    const MeasurementStrategy off_preset = strategy_from_angles(0.3, 1.2, 0.7, 2.1);
    CHECK_THROWS_AS(
        run_trials(phi_plus(), off_preset, ch, 10, 1, RunOptions{Backend::Physical, 0}),
        std::invalid_argument);
    CHECK_THROWS_AS(run_trials(NonSignalingBox::pr_box(), ch, 10, 1,
                               RunOptions{Backend::Physical, 0}),
                    std::invalid_argument);
}

TEST_CASE("counts CSV round trip") {
    CountsTable counts;
    counts.counts[0][0] = 11;
    counts.counts[0][1] = 22;
    counts.counts[1][0] = 33;
    counts.counts[1][1] = 44;
    CHECK(counts_from_csv(counts_to_csv(counts)) == counts);
    CHECK_THROWS_AS(counts_from_csv("q,q_hat,count\n0,0,5\n"), std::invalid_argument);
}
