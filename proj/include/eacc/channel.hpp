#pragma once

#include "eacc/rng.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace eacc {

struct ChannelInput {
    int b1 = 0;  // first input bit (the message bit q in the assisted protocol)
    int b2 = 0;  // second input bit (Alice's outcome alpha)
};

// Which part of the input the channel reveals: bit 1, bit 2, or their parity.
enum class Trit { One, Two, Parity };

char trit_char(Trit t);
Trit trit_from_char(char c);
int trit_index(Trit t);

struct ChannelOutput {
    Trit t = Trit::One;
    int b = 0;
};

// Finite classical channel as a row-stochastic matrix Pr[y|x]. Rows must sum
// to 1 within tol::comparison; immutable after construction.
class FiniteChannel {
public:
    FiniteChannel(std::vector<std::string> input_labels, std::vector<std::string> output_labels,
                  std::vector<std::vector<double>> probs);

    int num_inputs() const { return static_cast<int>(probs_.size()); }
    int num_outputs() const { return num_outputs_; }
    double prob(int x, int y) const;
    const std::vector<double>& row(int x) const;
    const std::vector<std::string>& input_labels() const { return input_labels_; }
    const std::vector<std::string>& output_labels() const { return output_labels_; }

private:
    std::vector<std::string> input_labels_;
    std::vector<std::string> output_labels_;
    std::vector<std::vector<double>> probs_;
    int num_outputs_ = 0;
};

// The 4-input/6-output channel that reveals one input bit or the parity,
// each with probability 1/3. Inputs ordered (0,0),(0,1),(1,0),(1,1); outputs
// ordered (1,0),(1,1),(2,0),(2,1),(P,0),(P,1). This ordering is normative
// for every file format here.
FiniteChannel butterfly_channel();

// Noiseless n-symbol channel (used as a reference case).
FiniteChannel identity_channel(int n);

std::string butterfly_input_label(int b1, int b2);
std::string butterfly_output_label(Trit t, int b);

int sample_output(const FiniteChannel& ch, int x, RandomStream& rng);

// Counts or frequencies over input/output combinations; rows follow the
// channel's input order, columns its output order.
struct TruthTable {
    std::vector<std::vector<double>> data;

    int rows() const { return static_cast<int>(data.size()); }
    int cols() const { return data.empty() ? 0 : static_cast<int>(data.front().size()); }
};

TruthTable ideal_table(const FiniteChannel& ch);
TruthTable row_normalized(const TruthTable& t);

// Overlap Tr(A B^T) / Tr(B B^T) between the measured and ideal tables, both
// row-normalized first. Self-overlap is exactly 1.
double inquisition(const TruthTable& measured, const TruthTable& ideal);

TruthTable empirical_table(std::span<const std::pair<int, int>> samples, int num_inputs,
                           int num_outputs);

std::string channel_to_json(const FiniteChannel& ch);
FiniteChannel channel_from_json(const std::string& text);
FiniteChannel load_channel(const std::string& path);
void save_channel(const FiniteChannel& ch, const std::string& path);

std::string truth_table_to_csv(const TruthTable& t, const std::vector<std::string>& input_labels,
                               const std::vector<std::string>& output_labels);
TruthTable truth_table_from_csv(const std::string& text);

}  // namespace eacc
