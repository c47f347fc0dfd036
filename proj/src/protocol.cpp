#include "eacc/protocol.hpp"

#include "eacc/rational.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace eacc {

namespace {

constexpr double kPi = std::numbers::pi;

double born_probability(const DensityMatrix& rho, const ComplexMatrix& alice_element,
                        const ComplexMatrix& bob_element) {
    const ComplexMatrix joint = kron(alice_element, bob_element);
    Complex tr(0.0, 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) tr += joint(i, j) * rho.matrix()(j, i);
    return tr.real();
}

double alice_marginal_born(const DensityMatrix& rho, const ComplexMatrix& alice_element) {
    return born_probability(rho, alice_element, ComplexMatrix::identity(2));
}

}  // namespace

Ket2 MeasurementBasis::ket(int outcome) const {
    if (outcome != 0 && outcome != 1) throw std::invalid_argument("basis outcome must be 0 or 1");
    return angle_ket(outcome == 0 ? angle : angle + kPi / 2.0);
}

ComplexMatrix MeasurementBasis::element(int outcome) const { return projector(ket(outcome)); }

BinaryMeasurement::BinaryMeasurement(ComplexMatrix e0, ComplexMatrix e1)
    : elements_{std::move(e0), std::move(e1)} {}

BinaryMeasurement BinaryMeasurement::from_angle(double theta) {
    return from_basis(MeasurementBasis{theta});
}

BinaryMeasurement BinaryMeasurement::from_basis(const MeasurementBasis& basis) {
    return BinaryMeasurement(basis.element(0), basis.element(1));
}

BinaryMeasurement BinaryMeasurement::from_elements(ComplexMatrix e0, ComplexMatrix e1) {
    if (e0.dim() != 2 || e1.dim() != 2)
        throw std::invalid_argument("BinaryMeasurement: elements must be 2x2");
    for (const auto* e : {&e0, &e1}) {
        if (!e->is_hermitian())
            throw std::invalid_argument("BinaryMeasurement: element is not Hermitian");
        const EigenSystem es = eig_hermitian(*e);
        for (double lam : es.eigenvalues)
            if (lam < -density_psd_tol)
                throw std::invalid_argument("BinaryMeasurement: element is not PSD");
    }
    if (max_abs_diff(e0 + e1, ComplexMatrix::identity(2)) > tol::comparison)
        throw std::invalid_argument("BinaryMeasurement: elements must sum to identity");
    return BinaryMeasurement(std::move(e0), std::move(e1));
}

const ComplexMatrix& BinaryMeasurement::element(int outcome) const {
    if (outcome != 0 && outcome != 1)
        throw std::invalid_argument("BinaryMeasurement: outcome must be 0 or 1");
    return elements_[static_cast<std::size_t>(outcome)];
}

std::optional<double> BinaryMeasurement::angle() const {
    const ComplexMatrix& e0 = elements_[0];
    const EigenSystem es = eig_hermitian(e0);
    if (std::abs(es.eigenvalues[0] - 1.0) > 1e-9 || std::abs(es.eigenvalues[1]) > 1e-9)
        return std::nullopt;
    Complex v0 = es.eigenvectors(0, 0);
    Complex v1 = es.eigenvectors(1, 0);
    // strip the global phase via the dominant component
    const Complex lead = std::abs(v0) >= std::abs(v1) ? v0 : v1;
    const Complex phase = lead / std::abs(lead);
    v0 /= phase;
    v1 /= phase;
    if (std::abs(v0.imag()) > 1e-9 || std::abs(v1.imag()) > 1e-9) return std::nullopt;
    double theta = std::atan2(v1.real(), v0.real());
    while (theta < 0.0) theta += kPi;
    while (theta >= kPi) theta -= kPi;
    if (max_abs_diff(projector(angle_ket(theta)), e0) > tol::reconstruction) return std::nullopt;
    return theta;
}

int MeasurementStrategy::bob_choice(Trit t) const {
    const auto& v = bob_choice_map[static_cast<std::size_t>(trit_index(t))];
    if (!v) throw std::invalid_argument("bob_choice: setting is irrelevant for this trit");
    return *v;
}

bool MeasurementStrategy::bob_choice_irrelevant(Trit t) const {
    return !bob_choice_map[static_cast<std::size_t>(trit_index(t))].has_value();
}

std::array<std::optional<int>, 3> default_bob_choice() {
    std::array<std::optional<int>, 3> map;
    map[static_cast<std::size_t>(trit_index(Trit::One))] = std::nullopt;
    map[static_cast<std::size_t>(trit_index(Trit::Two))] = 1;
    map[static_cast<std::size_t>(trit_index(Trit::Parity))] = 0;
    return map;
}

MeasurementStrategy chsh_strategy() {
    return strategy_from_angles(kPi / 4.0, 0.0, kPi / 8.0, 3.0 * kPi / 8.0);
}

MeasurementStrategy strategy_from_angles(double alice0, double alice1, double bob0, double bob1) {
    return MeasurementStrategy{
        {BinaryMeasurement::from_angle(alice0), BinaryMeasurement::from_angle(alice1)},
        {BinaryMeasurement::from_angle(bob0), BinaryMeasurement::from_angle(bob1)},
        default_bob_choice()};
}

double RelationStats::mean() const {
    return (omega[0][0] + omega[0][1] + omega[1][0] + omega[1][1]) / 4.0;
}

double RelationStats::min() const {
    double m = omega[0][0];
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v) m = std::min(m, omega[q][v]);
    return m;
}

RelationStats correlation_omega(const DensityMatrix& rho, const MeasurementStrategy& strat) {
    RelationStats stats;
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v) {
            double w = 0.0;
            for (int alpha = 0; alpha < 2; ++alpha) {
                const int beta = alpha ^ (q & v);
                w += born_probability(rho, strat.alice[static_cast<std::size_t>(q)].element(alpha),
                                      strat.bob[static_cast<std::size_t>(v)].element(beta));
            }
            stats.omega[q][v] = w;
        }
    return stats;
}

ChannelInput encode_input(int q, int alpha) {
    if ((q & ~1) || (alpha & ~1)) throw std::invalid_argument("encode_input: arguments must be bits");
    return ChannelInput{q, alpha};
}

int decode(const ChannelOutput& y, std::optional<int> beta) {
    if (y.t == Trit::One) return y.b;
    if (!beta) throw std::invalid_argument("decode: beta required unless t = 1");
    return y.b ^ *beta;
}

ButterflyView::ButterflyView(const FiniteChannel& ch) : ch_(&ch) {
    if (ch.num_inputs() != 4 || ch.num_outputs() != 6)
        throw std::invalid_argument("channel is not butterfly-shaped: need 4 inputs and 6 outputs");
    input_index_.fill(-1);
    for (int x = 0; x < 4; ++x) {
        const std::string& label = ch.input_labels()[static_cast<std::size_t>(x)];
        if (label.size() != 2 || (label[0] != '0' && label[0] != '1') ||
            (label[1] != '0' && label[1] != '1'))
            throw std::invalid_argument("channel is not butterfly-shaped: bad input label '" + label +
                                        "'");
        const int idx = 2 * (label[0] - '0') + (label[1] - '0');
        if (input_index_[static_cast<std::size_t>(idx)] != -1)
            throw std::invalid_argument("channel is not butterfly-shaped: duplicate input label");
        input_index_[static_cast<std::size_t>(idx)] = x;
    }
    outputs_.resize(6);
    std::array<bool, 6> seen{};
    for (int y = 0; y < 6; ++y) {
        const std::string& label = ch.output_labels()[static_cast<std::size_t>(y)];
        if (label.size() != 3 || label[1] != ':' || (label[2] != '0' && label[2] != '1'))
            throw std::invalid_argument("channel is not butterfly-shaped: bad output label '" +
                                        label + "'");
        const Trit t = trit_from_char(label[0]);
        const int b = label[2] - '0';
        const int key = 2 * trit_index(t) + b;
        if (seen[static_cast<std::size_t>(key)])
            throw std::invalid_argument("channel is not butterfly-shaped: duplicate output label");
        seen[static_cast<std::size_t>(key)] = true;
        outputs_[static_cast<std::size_t>(y)] = ChannelOutput{t, b};
    }
}

int ButterflyView::input_index(int b1, int b2) const {
    return input_index_[static_cast<std::size_t>(2 * b1 + b2)];
}

const ChannelOutput& ButterflyView::output(int y) const {
    return outputs_[static_cast<std::size_t>(y)];
}

double exact_success(const DensityMatrix& rho, const MeasurementStrategy& strat,
                     const FiniteChannel& ch) {
    const ButterflyView view(ch);
    double sum = 0.0;
    for (int q = 0; q < 2; ++q)
        for (int alpha = 0; alpha < 2; ++alpha) {
            const ChannelInput in = encode_input(q, alpha);
            const int x = view.input_index(in.b1, in.b2);
            const ComplexMatrix& a = strat.alice[static_cast<std::size_t>(q)].element(alpha);
            for (int y = 0; y < ch.num_outputs(); ++y) {
                const double w = ch.prob(x, y);
                if (w == 0.0) continue;
                const ChannelOutput& out = view.output(y);
                if (out.t == Trit::One) {
                    // beta is summed out; decode returns b regardless
                    if (out.b == q) sum += w * alice_marginal_born(rho, a);
                } else {
                    const int v = strat.bob_choice(out.t);
                    const int beta = out.b ^ q;  // the unique beta with decode = q
                    sum += w * born_probability(rho, a,
                                                strat.bob[static_cast<std::size_t>(v)].element(beta));
                }
            }
        }
    return 0.5 * sum;
}

NonSignalingBox::NonSignalingBox(const Table& probs) : probs_(probs) {
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v) {
            double sum = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    double& p = probs_[q][v][a][b];
                    if (p < -tol::comparison)
                        throw std::invalid_argument("NonSignalingBox: negative probability");
                    p = std::max(0.0, p);
                    sum += p;
                }
            if (std::abs(sum - 1.0) > tol::comparison)
                throw std::invalid_argument("NonSignalingBox: distribution does not sum to 1");
        }
    // marginal of alpha must not depend on v, marginal of beta not on q
    for (int q = 0; q < 2; ++q)
        for (int a = 0; a < 2; ++a) {
            const double m0 = probs_[q][0][a][0] + probs_[q][0][a][1];
            const double m1 = probs_[q][1][a][0] + probs_[q][1][a][1];
            if (std::abs(m0 - m1) > tol::comparison)
                throw std::invalid_argument("NonSignalingBox: alpha marginal signals v");
        }
    for (int v = 0; v < 2; ++v)
        for (int b = 0; b < 2; ++b) {
            const double m0 = probs_[0][v][0][b] + probs_[0][v][1][b];
            const double m1 = probs_[1][v][0][b] + probs_[1][v][1][b];
            if (std::abs(m0 - m1) > tol::comparison)
                throw std::invalid_argument("NonSignalingBox: beta marginal signals q");
        }
}

double NonSignalingBox::prob(int q, int v, int alpha, int beta) const {
    return probs_[q][v][alpha][beta];
}

double NonSignalingBox::alice_marginal(int q, int alpha) const {
    return probs_[q][0][alpha][0] + probs_[q][0][alpha][1];
}

double NonSignalingBox::beta_given_alpha(int q, int v, int alpha, int beta) const {
    const double marginal = probs_[q][v][alpha][0] + probs_[q][v][alpha][1];
    if (marginal == 0.0) throw std::invalid_argument("beta_given_alpha: conditioning on a null event");
    return probs_[q][v][alpha][beta] / marginal;
}

NonSignalingBox NonSignalingBox::pr_box() {
    Table t{};
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) t[q][v][a][b] = ((a ^ b) == (q & v)) ? 0.5 : 0.0;
    return NonSignalingBox(t);
}

NonSignalingBox NonSignalingBox::uniform() {
    Table t{};
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) t[q][v][a][b] = 0.25;
    return NonSignalingBox(t);
}

NonSignalingBox NonSignalingBox::from_quantum(const DensityMatrix& rho,
                                              const MeasurementStrategy& strat) {
    Table t{};
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    t[q][v][a][b] =
                        born_probability(rho, strat.alice[static_cast<std::size_t>(q)].element(a),
                                         strat.bob[static_cast<std::size_t>(v)].element(b));
    return NonSignalingBox(t);
}

namespace {

// Feed-forward map for the box pipeline is the canonical one (t=2 -> v=1,
// t=P -> v=0), matching the decode rule.
int box_choice(Trit t) { return t == Trit::Two ? 1 : 0; }

std::optional<Rational> box_success_exact(const NonSignalingBox& box, const ButterflyView& view) {
    std::array<std::array<std::array<std::array<Rational, 2>, 2>, 2>, 2> rb;
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const auto r = Rational::from_double(box.prob(q, v, a, b));
                    if (!r) return std::nullopt;
                    rb[q][v][a][b] = *r;
                }
    const FiniteChannel& ch = view.channel();
    Rational sum{0, 1};
    for (int q = 0; q < 2; ++q)
        for (int alpha = 0; alpha < 2; ++alpha) {
            const int x = view.input_index(q, alpha);
            for (int y = 0; y < ch.num_outputs(); ++y) {
                const auto w = Rational::from_double(ch.prob(x, y));
                if (!w) return std::nullopt;
                if (w->num == 0) continue;
                const ChannelOutput& out = view.output(y);
                if (out.t == Trit::One) {
                    if (out.b == q) sum = sum + *w * (rb[q][0][alpha][0] + rb[q][0][alpha][1]);
                } else {
                    const int v = box_choice(out.t);
                    sum = sum + *w * rb[q][v][alpha][out.b ^ q];
                }
            }
        }
    return sum * Rational::of(1, 2);
}

}  // namespace

double box_success(const NonSignalingBox& box, const FiniteChannel& ch) {
    const ButterflyView view(ch);
    if (const auto exact = box_success_exact(box, view)) return exact->to_double();
    double sum = 0.0;
    for (int q = 0; q < 2; ++q)
        for (int alpha = 0; alpha < 2; ++alpha) {
            const int x = view.input_index(q, alpha);
            for (int y = 0; y < ch.num_outputs(); ++y) {
                const double w = ch.prob(x, y);
                if (w == 0.0) continue;
                const ChannelOutput& out = view.output(y);
                if (out.t == Trit::One) {
                    if (out.b == q) sum += w * box.alice_marginal(q, alpha);
                } else {
                    sum += w * box.prob(q, box_choice(out.t), alpha, out.b ^ q);
                }
            }
        }
    return 0.5 * sum;
}

RelationStats correlation_omega(const NonSignalingBox& box) {
    RelationStats stats;
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v) {
            double w = 0.0;
            for (int alpha = 0; alpha < 2; ++alpha) w += box.prob(q, v, alpha, alpha ^ (q & v));
            stats.omega[q][v] = w;
        }
    return stats;
}

namespace {

nlohmann::json bob_choice_to_json(const MeasurementStrategy& strat) {
    nlohmann::json j;
    for (Trit t : {Trit::One, Trit::Two, Trit::Parity}) {
        const std::string key(1, trit_char(t));
        if (strat.bob_choice_irrelevant(t))
            j[key] = "irrelevant";
        else
            j[key] = strat.bob_choice(t);
    }
    return j;
}

}  // namespace

std::string strategy_to_json(const MeasurementStrategy& strat) {
    auto angle_of = [](const BinaryMeasurement& m) {
        const auto a = m.angle();
        if (!a)
            throw std::invalid_argument(
                "strategy_to_json: measurement is not representable by an analyzer angle");
        return *a;
    };
    nlohmann::json j;
    j["alice_angles"] = {angle_of(strat.alice[0]), angle_of(strat.alice[1])};
    j["bob_angles"] = {angle_of(strat.bob[0]), angle_of(strat.bob[1])};
    j["bob_choice"] = bob_choice_to_json(strat);
    return j.dump(2);
}

MeasurementStrategy strategy_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const auto alice = j.at("alice_angles").get<std::vector<double>>();
    const auto bob = j.at("bob_angles").get<std::vector<double>>();
    if (alice.size() != 2 || bob.size() != 2)
        throw std::invalid_argument("strategy JSON: need two angles per party");
    MeasurementStrategy strat = strategy_from_angles(alice[0], alice[1], bob[0], bob[1]);
    if (j.contains("bob_choice")) {
        for (Trit t : {Trit::One, Trit::Two, Trit::Parity}) {
            const std::string key(1, trit_char(t));
            const auto& entry = j.at("bob_choice").at(key);
            auto& slot = strat.bob_choice_map[static_cast<std::size_t>(trit_index(t))];
            if (entry.is_string() && entry.get<std::string>() == "irrelevant")
                slot = std::nullopt;
            else
                slot = entry.get<int>();
        }
    }
    return strat;
}

MeasurementStrategy load_strategy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open strategy file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return strategy_from_json(buf.str());
}

void save_strategy(const MeasurementStrategy& strat, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write strategy file: " + path);
    out << strategy_to_json(strat) << "\n";
}

std::string box_to_json(const NonSignalingBox& box) {
    // probs[q][v][alpha][beta], nested
    nlohmann::json q_arr = nlohmann::json::array();
    for (int q = 0; q < 2; ++q) {
        nlohmann::json v_arr = nlohmann::json::array();
        for (int v = 0; v < 2; ++v) {
            nlohmann::json a_arr = nlohmann::json::array();
            for (int a = 0; a < 2; ++a)
                a_arr.push_back({box.prob(q, v, a, 0), box.prob(q, v, a, 1)});
            v_arr.push_back(a_arr);
        }
        q_arr.push_back(v_arr);
    }
    nlohmann::json j;
    j["probs"] = q_arr;
    return j.dump(2);
}

NonSignalingBox box_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const auto& p = j.at("probs");
    NonSignalingBox::Table t{};
    for (int q = 0; q < 2; ++q)
        for (int v = 0; v < 2; ++v)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) t[q][v][a][b] = p.at(q).at(v).at(a).at(b).get<double>();
    return NonSignalingBox(t);
}

NonSignalingBox load_box(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open box file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return box_from_json(buf.str());
}

}  // namespace eacc
