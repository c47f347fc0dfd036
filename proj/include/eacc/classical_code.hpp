#pragma once

#include "eacc/channel.hpp"
#include "eacc/rational.hpp"

#include <optional>
#include <span>
#include <utility>

namespace eacc {

// Deterministic code: an encoding of each message to a channel input and a
// decoding of each channel output back to a message.
struct ClassicalCode {
    int num_messages = 0;
    std::vector<int> encoding;  // message -> input index
    std::vector<int> decoding;  // output index -> message
};

// Average success probability under a uniform message prior:
// (1/M) * sum_q sum_y Pr[y|enc(q)] [dec(y) = q].
double evaluate_code(const FiniteChannel& ch, const ClassicalCode& code);

// Same sum in exact fraction arithmetic; available when every channel entry
// recovers an exact small fraction.
std::optional<Rational> evaluate_code_exact(const FiniteChannel& ch, const ClassicalCode& code);

// Maximum a posteriori decoding for a given encoding under a uniform prior.
// Ties (including probability-zero outputs) decode to the smallest message
// index, so runs are reproducible.
ClassicalCode map_decoder(const FiniteChannel& ch, const std::vector<int>& encoding);

struct BestCode {
    ClassicalCode code;
    double success = 0.0;
    std::optional<Rational> exact;
};

// Global optimum over all num_inputs^M encodings, each completed with its
// MAP decoder. Throws std::length_error when the enumeration is infeasible.
BestCode best_deterministic_code(const FiniteChannel& ch, int num_messages);

// Weighted mean success of a shared-randomness mixture of codes. Never beats
// the best deterministic code.
double mixture_success(const FiniteChannel& ch,
                       std::span<const std::pair<ClassicalCode, double>> codes);

std::string code_to_json(const ClassicalCode& code);
ClassicalCode code_from_json(const std::string& text);

}  // namespace eacc
