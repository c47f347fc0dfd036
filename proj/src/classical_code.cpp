#include "eacc/classical_code.hpp"

#include "eacc/qmath.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace eacc {

namespace {

void validate_code(const FiniteChannel& ch, const ClassicalCode& code) {
    if (code.num_messages < 1) throw std::invalid_argument("code: need at least one message");
    if (static_cast<int>(code.encoding.size()) != code.num_messages)
        throw std::invalid_argument("code: encoding must cover every message");
    if (static_cast<int>(code.decoding.size()) != ch.num_outputs())
        throw std::invalid_argument("code: decoding must cover every output");
    for (int x : code.encoding)
        if (x < 0 || x >= ch.num_inputs())
            throw std::invalid_argument("code: encoding maps to an invalid input");
    for (int q : code.decoding)
        if (q < 0 || q >= code.num_messages)
            throw std::invalid_argument("code: decoding maps to an invalid message");
}

// Exact fractions for every channel entry, or nullopt if any entry is not a
// recoverable small fraction.
std::optional<std::vector<std::vector<Rational>>> rational_rows(const FiniteChannel& ch) {
    std::vector<std::vector<Rational>> rows(static_cast<std::size_t>(ch.num_inputs()));
    for (int x = 0; x < ch.num_inputs(); ++x) {
        rows[static_cast<std::size_t>(x)].reserve(static_cast<std::size_t>(ch.num_outputs()));
        for (int y = 0; y < ch.num_outputs(); ++y) {
            const auto r = Rational::from_double(ch.prob(x, y));
            if (!r) return std::nullopt;
            rows[static_cast<std::size_t>(x)].push_back(*r);
        }
    }
    return rows;
}

}  // namespace

double evaluate_code(const FiniteChannel& ch, const ClassicalCode& code) {
    validate_code(ch, code);
    double sum = 0.0;
    for (int q = 0; q < code.num_messages; ++q) {
        const int x = code.encoding[static_cast<std::size_t>(q)];
        for (int y = 0; y < ch.num_outputs(); ++y)
            if (code.decoding[static_cast<std::size_t>(y)] == q) sum += ch.prob(x, y);
    }
    return sum / code.num_messages;
}

std::optional<Rational> evaluate_code_exact(const FiniteChannel& ch, const ClassicalCode& code) {
    validate_code(ch, code);
    const auto rows = rational_rows(ch);
    if (!rows) return std::nullopt;
    Rational sum{0, 1};
    for (int q = 0; q < code.num_messages; ++q) {
        const int x = code.encoding[static_cast<std::size_t>(q)];
        for (int y = 0; y < ch.num_outputs(); ++y)
            if (code.decoding[static_cast<std::size_t>(y)] == q)
                sum = sum + (*rows)[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
    }
    return sum * Rational::of(1, code.num_messages);
}

ClassicalCode map_decoder(const FiniteChannel& ch, const std::vector<int>& encoding) {
    const int m = static_cast<int>(encoding.size());
    if (m < 1) throw std::invalid_argument("map_decoder: empty encoding");
    for (int x : encoding)
        if (x < 0 || x >= ch.num_inputs())
            throw std::invalid_argument("map_decoder: encoding maps to an invalid input");

    ClassicalCode code{m, encoding, std::vector<int>(static_cast<std::size_t>(ch.num_outputs()), 0)};
    for (int y = 0; y < ch.num_outputs(); ++y) {
        int best = 0;
        double best_p = ch.prob(encoding[0], y);
        for (int q = 1; q < m; ++q) {
            const double p = ch.prob(encoding[static_cast<std::size_t>(q)], y);
            if (p > best_p) {  // strict: ties keep the smallest message index
                best = q;
                best_p = p;
            }
        }
        code.decoding[static_cast<std::size_t>(y)] = best;
    }
    return code;
}

BestCode best_deterministic_code(const FiniteChannel& ch, int num_messages) {
    if (num_messages < 1) throw std::invalid_argument("best_deterministic_code: M must be positive");
    const double count = std::pow(static_cast<double>(ch.num_inputs()), num_messages);
    constexpr double kMaxEncodings = 2e6;
    if (count > kMaxEncodings)
        throw std::length_error("best_deterministic_code: " + std::to_string(count) +
                                " encodings exceed the enumeration budget of " +
                                std::to_string(static_cast<long long>(kMaxEncodings)));

    const auto rows = rational_rows(ch);
    std::vector<int> encoding(static_cast<std::size_t>(num_messages), 0);
    std::optional<BestCode> best;
    for (;;) {
        ClassicalCode code = map_decoder(ch, encoding);
        BestCode cand{code, 0.0, std::nullopt};
        if (rows) {
            cand.exact = evaluate_code_exact(ch, code);
            cand.success = cand.exact->to_double();
        } else {
            cand.success = evaluate_code(ch, code);
        }
        const bool better = !best || (best->exact && cand.exact ? *cand.exact > *best->exact
                                                                : cand.success > best->success);
        if (better) best = std::move(cand);

        // next encoding in mixed radix, least-significant message first
        int pos = 0;
        while (pos < num_messages) {
            if (++encoding[static_cast<std::size_t>(pos)] < ch.num_inputs()) break;
            encoding[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == num_messages) break;
    }
    return *best;
}

double mixture_success(const FiniteChannel& ch,
                       std::span<const std::pair<ClassicalCode, double>> codes) {
    if (codes.empty()) throw std::invalid_argument("mixture_success: empty mixture");
    double weight_sum = 0.0;
    for (const auto& [code, w] : codes) {
        if (w < 0.0) throw std::invalid_argument("mixture_success: negative weight");
        weight_sum += w;
    }
    if (std::abs(weight_sum - 1.0) > tol::comparison)
        throw std::invalid_argument("mixture_success: weights must sum to 1");
    double mean = 0.0;
    for (const auto& [code, w] : codes) mean += w * evaluate_code(ch, code);
    return mean;
}

std::string code_to_json(const ClassicalCode& code) {
    nlohmann::json j;
    j["encoding"] = code.encoding;
    j["decoding"] = code.decoding;
    return j.dump(2);
}

ClassicalCode code_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ClassicalCode code;
    code.encoding = j.at("encoding").get<std::vector<int>>();
    code.decoding = j.at("decoding").get<std::vector<int>>();
    code.num_messages = static_cast<int>(code.encoding.size());
    return code;
}

}  // namespace eacc
