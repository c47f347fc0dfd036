#include "eacc/states.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eacc {

namespace {

void validate_density(const ComplexMatrix& rho) {
    if (rho.dim() != 4) throw std::invalid_argument("DensityMatrix: dimension must be 4");
    if (!rho.is_hermitian())
        throw std::invalid_argument("DensityMatrix: matrix is not Hermitian within tolerance");
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > density_trace_tol)
        throw std::invalid_argument("DensityMatrix: trace differs from 1 beyond tolerance");
    const EigenSystem es = eig_hermitian(rho);
    if (es.eigenvalues.back() < -density_psd_tol)
        throw std::invalid_argument("DensityMatrix: matrix has a negative eigenvalue beyond tolerance");
}

// sy x sy, the two-qubit spin flip (real symmetric).
ComplexMatrix spin_flip() {
    return ComplexMatrix::from_rows({{0.0, 0.0, 0.0, -1.0},
                                     {0.0, 0.0, 1.0, 0.0},
                                     {0.0, 1.0, 0.0, 0.0},
                                     {-1.0, 0.0, 0.0, 0.0}});
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m) {
    const EigenSystem es = eig_hermitian(m);
    const int n = m.dim();
    ComplexMatrix out(n);
    for (int k = 0; k < n; ++k) {
        const double lam = std::max(0.0, es.eigenvalues[static_cast<std::size_t>(k)]);
        const double root = std::sqrt(lam);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out(i, j) += root * es.eigenvectors(i, k) * std::conj(es.eigenvectors(j, k));
    }
    return out;
}

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) { validate_density(rho_); }

Ket4 phi_plus_ket() {
    const double r = 1.0 / std::sqrt(2.0);
    return Ket4{Complex(r, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(r, 0.0)};
}

DensityMatrix phi_plus() {
    // exact entries 1/2 at the four corners
    ComplexMatrix m(4);
    m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = Complex(0.5, 0.0);
    return DensityMatrix(m);
}

DensityMatrix maximally_mixed() { return DensityMatrix(ComplexMatrix::identity(4) * 0.25); }

DensityMatrix werner(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("werner: p must lie in [0, 1]");
    const ComplexMatrix mix = projector(phi_plus_ket()) * p + ComplexMatrix::identity(4) * ((1.0 - p) / 4.0);
    return DensityMatrix(mix);
}

double fidelity_with_pure(const DensityMatrix& rho, const Ket4& target) {
    double norm2 = 0.0;
    for (const auto& c : target) norm2 += std::norm(c);
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-10)
        throw std::invalid_argument("fidelity_with_pure: target ket is not normalized");
    Complex val(0.0, 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) val += std::conj(target[i]) * rho.matrix()(i, j) * target[j];
    return std::clamp(val.real(), 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    const ComplexMatrix root = matrix_sqrt_psd(rho.matrix());
    const ComplexMatrix inner = root * sigma.matrix() * root;
    const EigenSystem es = eig_hermitian(inner);
    double sum = 0.0;
    for (double lam : es.eigenvalues) sum += std::sqrt(std::max(0.0, lam));
    return std::clamp(sum * sum, 0.0, 1.0);
}

double tangle(const DensityMatrix& rho) {
    const ComplexMatrix s = spin_flip();
    const ComplexMatrix root = matrix_sqrt_psd(rho.matrix());
    const ComplexMatrix flipped = s * rho.matrix().conjugate() * s;
    // Same nonzero spectrum as rho * flipped, but Hermitian PSD by construction.
    const ComplexMatrix m = root * flipped * root;
    const EigenSystem es = eig_hermitian(m);
    double c = 0.0;
    for (std::size_t k = 0; k < es.eigenvalues.size(); ++k) {
        const double lam = std::sqrt(std::max(0.0, es.eigenvalues[k]));
        c += (k == 0) ? lam : -lam;
    }
    c = std::max(0.0, c);
    return std::clamp(c * c, 0.0, 1.0);
}

double purity(const DensityMatrix& rho) {
    const Complex t = (rho.matrix() * rho.matrix()).trace();
    return std::clamp(t.real(), 0.25, 1.0);
}

StateMetrics state_metrics(const DensityMatrix& rho, const Ket4& target) {
    return StateMetrics{fidelity_with_pure(rho, target), tangle(rho), purity(rho)};
}

std::string density_matrix_to_json(const DensityMatrix& rho) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 4; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < 4; ++j) {
            const Complex v = rho.matrix()(i, j);
            row.push_back({v.real(), v.imag()});
        }
        rows.push_back(row);
    }
    return rows.dump(2);
}

DensityMatrix density_matrix_from_json(const std::string& text) {
    const nlohmann::json rows = nlohmann::json::parse(text);
    if (!rows.is_array() || rows.size() != 4)
        throw std::invalid_argument("state JSON: expected a 4x4 nested array");
    ComplexMatrix m(4);
    for (int i = 0; i < 4; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || row.size() != 4)
            throw std::invalid_argument("state JSON: expected a 4x4 nested array");
        for (int j = 0; j < 4; ++j) {
            const auto& pair = row[static_cast<std::size_t>(j)];
            if (!pair.is_array() || pair.size() != 2)
                throw std::invalid_argument("state JSON: entries must be [re, im] pairs");
            m(i, j) = Complex(pair[0].get<double>(), pair[1].get<double>());
        }
    }
    return DensityMatrix(m);
}

DensityMatrix load_density_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open state file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return density_matrix_from_json(buf.str());
}

void save_density_matrix(const DensityMatrix& rho, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write state file: " + path);
    out << density_matrix_to_json(rho) << "\n";
}

}  // namespace eacc
