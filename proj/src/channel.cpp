#include "eacc/channel.hpp"

#include "eacc/qmath.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eacc {

char trit_char(Trit t) {
    switch (t) {
        case Trit::One: return '1';
        case Trit::Two: return '2';
        case Trit::Parity: return 'P';
    }
    throw std::invalid_argument("trit_char: bad trit");
}

Trit trit_from_char(char c) {
    switch (c) {
        case '1': return Trit::One;
        case '2': return Trit::Two;
        case 'P': return Trit::Parity;
        default: throw std::invalid_argument(std::string("trit_from_char: bad trit '") + c + "'");
    }
}

int trit_index(Trit t) { return static_cast<int>(t); }

FiniteChannel::FiniteChannel(std::vector<std::string> input_labels,
                             std::vector<std::string> output_labels,
                             std::vector<std::vector<double>> probs)
    : input_labels_(std::move(input_labels)),
      output_labels_(std::move(output_labels)),
      probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("FiniteChannel: no inputs");
    num_outputs_ = static_cast<int>(probs_.front().size());
    if (num_outputs_ == 0) throw std::invalid_argument("FiniteChannel: no outputs");
    if (input_labels_.size() != probs_.size() ||
        output_labels_.size() != static_cast<std::size_t>(num_outputs_))
        throw std::invalid_argument("FiniteChannel: label count mismatch");
    for (const auto& row : probs_) {
        if (static_cast<int>(row.size()) != num_outputs_)
            throw std::invalid_argument("FiniteChannel: ragged probability matrix");
        double sum = 0.0;
        for (double p : row) {
            if (!(p >= 0.0) || p > 1.0 + tol::comparison)
                throw std::invalid_argument("FiniteChannel: entry outside [0, 1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > tol::comparison)
            throw std::invalid_argument("FiniteChannel: row does not sum to 1");
    }
}

double FiniteChannel::prob(int x, int y) const {
    if (x < 0 || x >= num_inputs() || y < 0 || y >= num_outputs_)
        throw std::invalid_argument("FiniteChannel: index out of range");
    return probs_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
}

const std::vector<double>& FiniteChannel::row(int x) const {
    if (x < 0 || x >= num_inputs()) throw std::invalid_argument("FiniteChannel: input out of range");
    return probs_[static_cast<std::size_t>(x)];
}

std::string butterfly_input_label(int b1, int b2) {
    return std::string(1, static_cast<char>('0' + b1)) + static_cast<char>('0' + b2);
}

std::string butterfly_output_label(Trit t, int b) {
    return std::string(1, trit_char(t)) + ":" + static_cast<char>('0' + b);
}

FiniteChannel butterfly_channel() {
    std::vector<std::string> in_labels, out_labels;
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2) in_labels.push_back(butterfly_input_label(b1, b2));
    for (Trit t : {Trit::One, Trit::Two, Trit::Parity})
        for (int b = 0; b < 2; ++b) out_labels.push_back(butterfly_output_label(t, b));

    const double third = 1.0 / 3.0;
    std::vector<std::vector<double>> probs(4, std::vector<double>(6, 0.0));
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2) {
            const int x = 2 * b1 + b2;
            probs[x][0 + b1] = third;         // t = 1 reveals b1
            probs[x][2 + b2] = third;         // t = 2 reveals b2
            probs[x][4 + (b1 ^ b2)] = third;  // t = P reveals the parity
        }
    return FiniteChannel(std::move(in_labels), std::move(out_labels), std::move(probs));
}

FiniteChannel identity_channel(int n) {
    if (n < 1) throw std::invalid_argument("identity_channel: need at least one symbol");
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    std::vector<std::vector<double>> probs(static_cast<std::size_t>(n),
                                           std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) probs[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    return FiniteChannel(labels, labels, std::move(probs));
}

int sample_output(const FiniteChannel& ch, int x, RandomStream& rng) {
    if (x < 0 || x >= ch.num_inputs())
        throw std::invalid_argument("sample_output: input index out of range");
    return static_cast<int>(rng.sample_discrete(ch.row(x)));
}

TruthTable ideal_table(const FiniteChannel& ch) {
    TruthTable t;
    t.data.reserve(static_cast<std::size_t>(ch.num_inputs()));
    for (int x = 0; x < ch.num_inputs(); ++x) t.data.push_back(ch.row(x));
    return t;
}

TruthTable row_normalized(const TruthTable& t) {
    TruthTable out = t;
    for (auto& row : out.data) {
        double sum = 0.0;
        for (double v : row) sum += v;
        if (sum > 0.0)
            for (double& v : row) v /= sum;
        // all-zero rows stay zero
    }
    return out;
}

double inquisition(const TruthTable& measured, const TruthTable& ideal) {
    if (measured.rows() != ideal.rows() || measured.cols() != ideal.cols())
        throw std::invalid_argument("inquisition: table dimensions differ");
    const TruthTable a = row_normalized(measured);
    const TruthTable b = row_normalized(ideal);
    auto overlap = [](const TruthTable& u, const TruthTable& v) {
        double s = 0.0;
        for (int i = 0; i < u.rows(); ++i)
            for (int j = 0; j < u.cols(); ++j)
                s += u.data[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                     v.data[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        return s;
    };
    const double denom = overlap(b, b);
    if (denom == 0.0) throw std::invalid_argument("inquisition: ideal table is all zero");
    return overlap(a, b) / denom;
}

TruthTable empirical_table(std::span<const std::pair<int, int>> samples, int num_inputs,
                           int num_outputs) {
    if (samples.empty()) throw std::invalid_argument("empirical_table: no samples");
    TruthTable t;
    t.data.assign(static_cast<std::size_t>(num_inputs),
                  std::vector<double>(static_cast<std::size_t>(num_outputs), 0.0));
    for (const auto& [x, y] : samples) {
        if (x < 0 || x >= num_inputs || y < 0 || y >= num_outputs)
            throw std::invalid_argument("empirical_table: sample index out of range");
        t.data[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] += 1.0;
    }
    return t;
}

std::string channel_to_json(const FiniteChannel& ch) {
    nlohmann::json j;
    j["input_labels"] = ch.input_labels();
    j["output_labels"] = ch.output_labels();
    nlohmann::json probs = nlohmann::json::array();
    for (int x = 0; x < ch.num_inputs(); ++x) probs.push_back(ch.row(x));
    j["probs"] = probs;
    return j.dump(2);
}

FiniteChannel channel_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    return FiniteChannel(j.at("input_labels").get<std::vector<std::string>>(),
                         j.at("output_labels").get<std::vector<std::string>>(),
                         j.at("probs").get<std::vector<std::vector<double>>>());
}

FiniteChannel load_channel(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open channel file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return channel_from_json(buf.str());
}

void save_channel(const FiniteChannel& ch, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write channel file: " + path);
    out << channel_to_json(ch) << "\n";
}

std::string truth_table_to_csv(const TruthTable& t, const std::vector<std::string>& input_labels,
                               const std::vector<std::string>& output_labels) {
    if (static_cast<int>(input_labels.size()) != t.rows() ||
        static_cast<int>(output_labels.size()) != t.cols())
        throw std::invalid_argument("truth_table_to_csv: label count mismatch");
    std::ostringstream out;
    out << "input";
    for (const auto& label : output_labels) out << "," << label;
    out << "\n";
    char buf[64];
    for (int i = 0; i < t.rows(); ++i) {
        out << input_labels[static_cast<std::size_t>(i)];
        for (int j = 0; j < t.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g",
                          t.data[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            out << "," << buf;
        }
        out << "\n";
    }
    return out.str();
}

TruthTable truth_table_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("truth table CSV: empty");
    TruthTable t;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        bool first = true;
        while (std::getline(ls, cell, ',')) {
            if (first) {  // input label column
                first = false;
                continue;
            }
            row.push_back(std::stod(cell));
        }
        t.data.push_back(std::move(row));
    }
    if (t.data.empty()) throw std::invalid_argument("truth table CSV: no rows");
    return t;
}

}  // namespace eacc
