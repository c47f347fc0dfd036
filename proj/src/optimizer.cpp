#include "eacc/optimizer.hpp"

#include "eacc/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace eacc {

namespace {

// Tr_B[(I x W) rho]: 2x2 operator on Alice's side with Tr[A K] = Tr[(A x W) rho].
ComplexMatrix contract_bob(const ComplexMatrix& rho, const ComplexMatrix& w) {
    ComplexMatrix k(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Complex s(0.0, 0.0);
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c) s += w(b, c) * rho(2 * i + c, 2 * j + b);
            k(i, j) = s;
        }
    return k;
}

// Tr_A[(A x I) rho]: 2x2 operator on Bob's side with Tr[B K] = Tr[(A x B) rho].
ComplexMatrix contract_alice(const ComplexMatrix& rho, const ComplexMatrix& a) {
    ComplexMatrix k(2);
    for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
            Complex s(0.0, 0.0);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) s += a(i, j) * rho(2 * j + b, 2 * i + c);
            k(b, c) = s;
        }
    return k;
}

}  // namespace

ScoreOperators score_operators(const DensityMatrix& rho, const MeasurementStrategy& strat,
                               const FiniteChannel& ch, Side side) {
    const ButterflyView view(ch);
    ScoreOperators scores;

    if (side == Side::Alice) {
        for (int q = 0; q < 2; ++q)
            for (int alpha = 0; alpha < 2; ++alpha) {
                // W collects channel weight times Bob's accepting element per output.
                ComplexMatrix w(2);
                const int x = view.input_index(q, alpha);
                for (int y = 0; y < ch.num_outputs(); ++y) {
                    const double n = ch.prob(x, y);
                    if (n == 0.0) continue;
                    const ChannelOutput& out = view.output(y);
                    if (out.t == Trit::One) {
                        if (out.b == q) w = w + n * ComplexMatrix::identity(2);
                    } else {
                        const int v = strat.bob_choice(out.t);
                        w = w + n * strat.bob[static_cast<std::size_t>(v)].element(out.b ^ q);
                    }
                }
                scores.r[static_cast<std::size_t>(q)][static_cast<std::size_t>(alpha)] =
                    0.5 * contract_bob(rho.matrix(), w);
            }
        scores.constant = 0.0;
        return scores;
    }

    for (int q = 0; q < 2; ++q)
        for (int alpha = 0; alpha < 2; ++alpha) {
            const ComplexMatrix k = contract_alice(
                rho.matrix(), strat.alice[static_cast<std::size_t>(q)].element(alpha));
            const int x = view.input_index(q, alpha);
            for (int y = 0; y < ch.num_outputs(); ++y) {
                const double n = ch.prob(x, y);
                if (n == 0.0) continue;
                const ChannelOutput& out = view.output(y);
                if (out.t == Trit::One) {
                    if (out.b == q) scores.constant += 0.5 * n * k.trace().real();
                } else {
                    const int v = strat.bob_choice(out.t);
                    auto& r = scores.r[static_cast<std::size_t>(v)]
                                      [static_cast<std::size_t>(out.b ^ q)];
                    r = r + (0.5 * n) * k;
                }
            }
        }
    return scores;
}

double objective_from_scores(const ScoreOperators& scores,
                             const std::array<BinaryMeasurement, 2>& side_measurements) {
    double obj = scores.constant;
    for (int s = 0; s < 2; ++s)
        for (int outcome = 0; outcome < 2; ++outcome)
            obj += (side_measurements[static_cast<std::size_t>(s)].element(outcome) *
                    scores.r[static_cast<std::size_t>(s)][static_cast<std::size_t>(outcome)])
                       .trace()
                       .real();
    return obj;
}

MeasurementStrategy random_strategy(std::uint64_t seed) {
    RandomStream rng(seed);
    const double pi = std::numbers::pi;
    const double a0 = pi * rng.next_double();
    const double a1 = pi * rng.next_double();
    const double b0 = pi * rng.next_double();
    const double b1 = pi * rng.next_double();
    return strategy_from_angles(a0, a1, b0, b1);
}

SeesawResult seesaw(const DensityMatrix& rho, const FiniteChannel& ch, const SeesawConfig& cfg) {
    if (cfg.max_sweeps < 1) throw std::invalid_argument("seesaw: max_sweeps must be >= 1");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("seesaw: tol must be positive");

    SeesawResult result{cfg.init ? *cfg.init : random_strategy(cfg.seed), 0.0, 0, {}};
    double obj = exact_success(rho, result.strategy, ch);
    result.objective_trace.push_back(obj);

    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        const double sweep_start = obj;
        for (Side side : {Side::Alice, Side::Bob}) {
            const ScoreOperators scores = score_operators(rho, result.strategy, ch, side);
            auto& measurements = side == Side::Alice ? result.strategy.alice : result.strategy.bob;
            for (int s = 0; s < 2; ++s) {
                const ComplexMatrix diff =
                    scores.r[static_cast<std::size_t>(s)][0] - scores.r[static_cast<std::size_t>(s)][1];
                if (diff.max_abs() <= tol::comparison) continue;  // flat direction: keep setting
                ComplexMatrix e0 = positive_part_projector(diff);
                ComplexMatrix e1 = ComplexMatrix::identity(2) - e0;
                measurements[static_cast<std::size_t>(s)] =
                    BinaryMeasurement::from_elements(std::move(e0), std::move(e1));
            }
            const double next = exact_success(rho, result.strategy, ch);
            if (next < obj - 1e-10) {
                std::ostringstream msg;
                msg << "seesaw: objective decreased from " << obj << " to " << next << " at sweep "
                    << sweep << (side == Side::Alice ? " (Alice step)" : " (Bob step)");
                throw std::logic_error(msg.str());
            }
            obj = next;
            result.objective_trace.push_back(obj);
        }
        result.sweeps = sweep + 1;
        if (obj - sweep_start < cfg.tol) break;
    }

    result.final_objective = obj;
    return result;
}

std::string seesaw_result_to_json(const SeesawResult& result) {
    nlohmann::json j;
    j["final_objective"] = result.final_objective;
    j["iterations"] = result.sweeps;
    nlohmann::json angles;
    auto side_angles = [](const std::array<BinaryMeasurement, 2>& side) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& m : side) {
            const auto a = m.angle();
            if (a)
                arr.push_back(*a);
            else
                arr.push_back(nullptr);  // not angle-representable (rank-0/2 element)
        }
        return arr;
    };
    angles["alice"] = side_angles(result.strategy.alice);
    angles["bob"] = side_angles(result.strategy.bob);
    j["angles"] = angles;
    j["trace"] = result.objective_trace;
    return j.dump(2);
}

}  // namespace eacc
