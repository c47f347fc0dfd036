#pragma once

#include "eacc/qmath.hpp"

#include <string>

namespace eacc {

// Validated two-qubit state: Hermitian within tol::hermiticity, unit trace
// within 1e-10, smallest eigenvalue >= -1e-9. Basis convention: |0> is
// horizontal, |1> is vertical; measurement outcome 0 is the first ket of a
// basis pair.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix rho);

    const ComplexMatrix& matrix() const { return rho_; }

private:
    ComplexMatrix rho_;
};

inline constexpr double density_trace_tol = 1e-10;
inline constexpr double density_psd_tol = 1e-9;

struct StateMetrics {
    double fidelity = 0.0;  // in [0, 1]
    double tangle = 0.0;    // in [0, 1]
    double purity = 0.0;    // in [1/4, 1]
};

// (|00> + |11>)/sqrt(2) as a ket and as a rank-1 state.
Ket4 phi_plus_ket();
DensityMatrix phi_plus();

DensityMatrix maximally_mixed();

// p * |phi+><phi+| + (1-p) * I/4 for p in [0, 1].
DensityMatrix werner(double p);

// <psi|rho|psi>. Target must be normalized within 1e-10.
double fidelity_with_pure(const DensityMatrix& rho, const Ket4& target);

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 between two states.
// Reduces to <psi|rho|psi> when sigma is pure.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// Concurrence squared via the spin-flip spectrum: with lambda_i the
// descending square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy),
// tangle = max(0, l1 - l2 - l3 - l4)^2.
double tangle(const DensityMatrix& rho);

double purity(const DensityMatrix& rho);

StateMetrics state_metrics(const DensityMatrix& rho, const Ket4& target);

// State files are a bare 4x4 nested JSON array of [re, im] pairs.
std::string density_matrix_to_json(const DensityMatrix& rho);
DensityMatrix density_matrix_from_json(const std::string& text);
DensityMatrix load_density_matrix(const std::string& path);
void save_density_matrix(const DensityMatrix& rho, const std::string& path);

}  // namespace eacc
