#include "eacc/montecarlo.hpp"

#include "eacc/util.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace eacc {

namespace {

constexpr long long kShardSize = 1 << 16;

ComplexMatrix bob_conditional_state(const DensityMatrix& rho, const ComplexMatrix& alice_element,
                                    double& prob_out) {
    // Tr_A[(E x I) rho (E x I)] for a projector E; normalized by its trace.
    const ComplexMatrix m = kron(alice_element, ComplexMatrix::identity(2));
    const ComplexMatrix collapsed = m * rho.matrix() * m;
    ComplexMatrix bob(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Complex s(0.0, 0.0);
            for (int k = 0; k < 2; ++k) s += collapsed(2 * k + i, 2 * k + j);
            bob(i, j) = s;
        }
    prob_out = bob.trace().real();
    return bob;
}

bool matches_preset_bob(const MeasurementStrategy& strat) {
    const MeasurementStrategy preset = chsh_strategy();
    for (int v = 0; v < 2; ++v)
        for (int outcome = 0; outcome < 2; ++outcome)
            if (max_abs_diff(strat.bob[static_cast<std::size_t>(v)].element(outcome),
                             preset.bob[static_cast<std::size_t>(v)].element(outcome)) > 1e-9)
                return false;
    return strat.bob_choice_map == preset.bob_choice_map;
}

}  // namespace

PockelsSettings pockels_settings(Trit t, int b) {
    if ((b & ~1) != 0) throw std::invalid_argument("pockels_settings: b must be a bit");
    switch (t) {
        case Trit::Two: return PockelsSettings{1 ^ b, b};
        case Trit::Parity: return PockelsSettings{b, b};
        case Trit::One:
            throw std::invalid_argument("pockels_settings: not applicable for t = 1");
    }
    throw std::invalid_argument("pockels_settings: bad trit");
}

ComplexMatrix pockels_operator(const PockelsSettings& s) {
    ComplexMatrix u = ComplexMatrix::identity(2);
    if (s.z_on) u = sigma_z() * u;
    if (s.x_on) u = sigma_x() * u;  // X after Z; the order only changes a phase
    return u;
}

MeasurementBasis bob_analyzer() { return MeasurementBasis{std::numbers::pi / 8.0}; }

TrialRecord simulate_trial(const DensityMatrix& rho, const MeasurementStrategy& strat,
                           const ButterflyView& view, Backend backend, RandomStream& rng) {
    if (backend == Backend::Physical && !matches_preset_bob(strat))
        throw std::invalid_argument(
            "physical backend requires Bob's preset measurements (fixed analyzer hardware)");

    TrialRecord rec;
    rec.q = rng.next_bit();
    const auto& alice = strat.alice[static_cast<std::size_t>(rec.q)];
    const double p_alpha0 =
        (kron(alice.element(0), ComplexMatrix::identity(2)) * rho.matrix()).trace().real();
    rec.alpha = rng.next_double() < p_alpha0 ? 0 : 1;

    const int x = view.input_index(rec.q, rec.alpha);
    const int y = sample_output(view.channel(), x, rng);
    const ChannelOutput& out = view.output(y);
    rec.t = out.t;
    rec.b = out.b;

    if (out.t == Trit::One) {
        rec.q_hat = decode(out, std::nullopt);
        rec.success = rec.q_hat == rec.q;
        return rec;
    }

    const int v = strat.bob_choice(out.t);
    rec.v = v;
    if (backend == Backend::Direct) {
        const double p_joint0 =
            (kron(alice.element(rec.alpha), strat.bob[static_cast<std::size_t>(v)].element(0)) *
             rho.matrix())
                .trace()
                .real();
        const double p_alpha =
            (kron(alice.element(rec.alpha), ComplexMatrix::identity(2)) * rho.matrix())
                .trace()
                .real();
        const double p_beta0 = p_alpha > 0.0 ? p_joint0 / p_alpha : 0.5;
        rec.beta = rng.next_double() < p_beta0 ? 0 : 1;
    } else {
        double p_alpha = 0.0;
        ComplexMatrix bob_state = bob_conditional_state(rho, alice.element(rec.alpha), p_alpha);
        const ComplexMatrix u = pockels_operator(pockels_settings(out.t, out.b));
        const ComplexMatrix rotated = u * bob_state * u.adjoint();
        const ComplexMatrix analyzer0 = bob_analyzer().element(0);
        const double p_m0 = p_alpha > 0.0 ? (analyzer0 * rotated).trace().real() / p_alpha : 0.5;
        const int m = rng.next_double() < p_m0 ? 0 : 1;
        rec.beta = m ^ out.b;  // outcome flip folded into the feed-forward logic
    }
    rec.q_hat = decode(out, rec.beta);
    rec.success = rec.q_hat == rec.q;
    return rec;
}

TrialRecord simulate_trial(const NonSignalingBox& box, const ButterflyView& view,
                           RandomStream& rng) {
    TrialRecord rec;
    rec.q = rng.next_bit();
    rec.alpha = rng.next_double() < box.alice_marginal(rec.q, 0) ? 0 : 1;

    const int x = view.input_index(rec.q, rec.alpha);
    const int y = sample_output(view.channel(), x, rng);
    const ChannelOutput& out = view.output(y);
    rec.t = out.t;
    rec.b = out.b;

    if (out.t == Trit::One) {
        rec.q_hat = decode(out, std::nullopt);
        rec.success = rec.q_hat == rec.q;
        return rec;
    }
    const int v = out.t == Trit::Two ? 1 : 0;
    rec.v = v;
    rec.beta = rng.next_double() < box.beta_given_alpha(rec.q, v, rec.alpha, 0) ? 0 : 1;
    rec.q_hat = decode(out, rec.beta);
    rec.success = rec.q_hat == rec.q;
    return rec;
}

namespace {

// Per-trial sampling thresholds, precomputed once per run. The physical
// entries go through the collapse + feed-forward operator path; the direct
// entries through the conditional Born distribution.
struct QuantumTrialTables {
    std::array<double, 2> p_alpha0{};                          // [q]
    std::array<std::array<std::array<double, 6>, 2>, 2> p0{};  // [q][alpha][y] -> Pr[draw < p0]
};

QuantumTrialTables build_tables(const DensityMatrix& rho, const MeasurementStrategy& strat,
                                const ButterflyView& view, Backend backend) {
    QuantumTrialTables tab;
    const ComplexMatrix id2 = ComplexMatrix::identity(2);
    for (int q = 0; q < 2; ++q) {
        const auto& alice = strat.alice[static_cast<std::size_t>(q)];
        tab.p_alpha0[static_cast<std::size_t>(q)] =
            (kron(alice.element(0), id2) * rho.matrix()).trace().real();
        for (int alpha = 0; alpha < 2; ++alpha) {
            const double p_alpha =
                (kron(alice.element(alpha), id2) * rho.matrix()).trace().real();
            for (int y = 0; y < 6; ++y) {
                const ChannelOutput& out = view.output(y);
                if (out.t == Trit::One) continue;
                double p0 = 0.5;
                if (p_alpha > 0.0) {
                    if (backend == Backend::Direct) {
                        const int v = strat.bob_choice(out.t);
                        p0 = (kron(alice.element(alpha),
                                   strat.bob[static_cast<std::size_t>(v)].element(0)) *
                              rho.matrix())
                                 .trace()
                                 .real() /
                             p_alpha;
                    } else {
                        double pa = 0.0;
                        const ComplexMatrix bob =
                            bob_conditional_state(rho, alice.element(alpha), pa);
                        const ComplexMatrix u = pockels_operator(pockels_settings(out.t, out.b));
                        p0 = (bob_analyzer().element(0) * (u * bob * u.adjoint())).trace().real() /
                             pa;
                    }
                }
                tab.p0[static_cast<std::size_t>(q)][static_cast<std::size_t>(alpha)]
                      [static_cast<std::size_t>(y)] = p0;
            }
        }
    }
    return tab;
}

template <typename TrialFn>
CountsTable run_sharded(long long n, std::uint64_t seed, unsigned threads, TrialFn&& trial) {
    if (n < 1) throw std::invalid_argument("run_trials: need at least one trial");
    const std::size_t shards = static_cast<std::size_t>((n + kShardSize - 1) / kShardSize);
    std::vector<CountsTable> partial(shards);
    parallel_for_index(shards, threads, [&](std::size_t shard) {
        RandomStream rng = RandomStream::child(seed, shard);
        const long long begin = static_cast<long long>(shard) * kShardSize;
        const long long end = std::min(n, begin + kShardSize);
        CountsTable local;
        for (long long i = begin; i < end; ++i) {
            const auto [q, q_hat] = trial(rng);
            ++local.counts[static_cast<std::size_t>(q)][static_cast<std::size_t>(q_hat)];
        }
        partial[shard] = local;
    });
    CountsTable total;
    for (const auto& p : partial)
        for (int q = 0; q < 2; ++q)
            for (int d = 0; d < 2; ++d)
                total.counts[static_cast<std::size_t>(q)][static_cast<std::size_t>(d)] +=
                    p.counts[static_cast<std::size_t>(q)][static_cast<std::size_t>(d)];
    return total;
}

}  // namespace

CountsTable run_trials(const DensityMatrix& rho, const MeasurementStrategy& strat,
                       const FiniteChannel& ch, long long n, std::uint64_t seed,
                       const RunOptions& options) {
    const ButterflyView view(ch);
    if (options.backend == Backend::Physical && !matches_preset_bob(strat))
        throw std::invalid_argument(
            "physical backend requires Bob's preset measurements (fixed analyzer hardware)");
    const QuantumTrialTables tab = build_tables(rho, strat, view, options.backend);

    return run_sharded(n, seed, options.threads, [&](RandomStream& rng) {
        const int q = rng.next_bit();
        const int alpha = rng.next_double() < tab.p_alpha0[static_cast<std::size_t>(q)] ? 0 : 1;
        const int y = sample_output(view.channel(), view.input_index(q, alpha), rng);
        const ChannelOutput& out = view.output(y);
        int q_hat;
        if (out.t == Trit::One) {
            q_hat = decode(out, std::nullopt);
        } else {
            const double p0 = tab.p0[static_cast<std::size_t>(q)][static_cast<std::size_t>(alpha)]
                                    [static_cast<std::size_t>(y)];
            const int draw = rng.next_double() < p0 ? 0 : 1;
            // Physical path: draw is the analyzer outcome m and beta = m xor b.
            const int beta = options.backend == Backend::Direct ? draw : draw ^ out.b;
            q_hat = decode(out, beta);
        }
        return std::pair<int, int>{q, q_hat};
    });
}

CountsTable run_trials(const NonSignalingBox& box, const FiniteChannel& ch, long long n,
                       std::uint64_t seed, const RunOptions& options) {
    const ButterflyView view(ch);
    if (options.backend == Backend::Physical)
        throw std::invalid_argument("physical backend needs a quantum state source");
    return run_sharded(n, seed, options.threads, [&](RandomStream& rng) {
        const TrialRecord rec = simulate_trial(box, view, rng);
        return std::pair<int, int>{rec.q, rec.q_hat};
    });
}

SuccessEstimate estimate_success(const CountsTable& counts) {
    const long long total = counts.total();
    if (total <= 0) throw std::invalid_argument("estimate_success: empty counts table");
    const double p = static_cast<double>(counts.successes()) / static_cast<double>(total);
    return SuccessEstimate{p, std::sqrt(p * (1.0 - p) / static_cast<double>(total))};
}

std::string counts_to_csv(const CountsTable& counts) {
    std::ostringstream out;
    out << "q,q_hat,count\n";
    for (int q = 0; q < 2; ++q)
        for (int d = 0; d < 2; ++d)
            out << q << "," << d << ","
                << counts.counts[static_cast<std::size_t>(q)][static_cast<std::size_t>(d)] << "\n";
    return out.str();
}

CountsTable counts_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("counts CSV: empty");
    CountsTable counts;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int q, d;
        long long c;
        if (std::sscanf(line.c_str(), "%d,%d,%lld", &q, &d, &c) != 3 || (q & ~1) || (d & ~1))
            throw std::invalid_argument("counts CSV: bad row '" + line + "'");
        counts.counts[static_cast<std::size_t>(q)][static_cast<std::size_t>(d)] = c;
        ++rows;
    }
    if (rows != 4) throw std::invalid_argument("counts CSV: expected 4 rows");
    return counts;
}

std::string run_metadata_json(std::uint64_t seed, long long n, Backend backend,
                              const MeasurementStrategy& strat) {
    nlohmann::json j;
    j["seed"] = seed;
    j["n"] = n;
    j["backend"] = backend == Backend::Direct ? "direct" : "physical";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(strategy_to_json(strat))));
    j["strategy_hash"] = std::string(buf);
    return j.dump(2);
}

}  // namespace eacc
