#pragma once

#include <array>
#include <complex>
#include <vector>

namespace eacc {

using Complex = std::complex<double>;
using Ket2 = std::array<Complex, 2>;
using Ket4 = std::array<Complex, 4>;

// Shared numeric tolerances. Single source for all modules and tests.
namespace tol {
inline constexpr double hermiticity = 1e-10;      // admission of Hermitian inputs
inline constexpr double reconstruction = 1e-9;    // eigendecomposition residuals
inline constexpr double comparison = 1e-12;       // entrywise equality
inline constexpr double zero_eigenvalue = 1e-10;  // |lambda| below this counts as kernel
}  // namespace tol

// Dense square complex matrix, row-major storage. All use in this project is
// tiny and fixed-size: 2x2 and 4x4 operators, with Kronecker products up to
// dimension 16.
class ComplexMatrix {
public:
    explicit ComplexMatrix(int dim);
    static ComplexMatrix identity(int dim);
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

    int dim() const { return dim_; }
    Complex& operator()(int r, int c) { return entries_[static_cast<std::size_t>(r) * dim_ + c]; }
    const Complex& operator()(int r, int c) const {
        return entries_[static_cast<std::size_t>(r) * dim_ + c];
    }

    ComplexMatrix operator+(const ComplexMatrix& other) const;
    ComplexMatrix operator-(const ComplexMatrix& other) const;
    ComplexMatrix operator*(const ComplexMatrix& other) const;
    ComplexMatrix operator*(Complex scalar) const;
    ComplexMatrix operator*(double scalar) const { return *this * Complex(scalar, 0.0); }

    ComplexMatrix adjoint() const;
    ComplexMatrix conjugate() const;
    ComplexMatrix transpose() const;
    Complex trace() const;
    double max_abs() const;
    bool is_hermitian(double tolerance = tol::hermiticity) const;

private:
    int dim_;
    std::vector<Complex> entries_;
};

ComplexMatrix operator*(Complex scalar, const ComplexMatrix& m);
ComplexMatrix operator*(double scalar, const ComplexMatrix& m);

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);

// Kronecker product. Factors must be 2x2 or 4x4; anything else (including
// results of previous products fed back in beyond dimension 16) is rejected.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
Ket4 kron(const Ket2& a, const Ket2& b);

struct EigenSystem {
    std::vector<double> eigenvalues;  // sorted descending
    ComplexMatrix eigenvectors;       // orthonormal columns, column i pairs with eigenvalue i
};

// Eigendecomposition of a Hermitian matrix. Throws std::invalid_argument if
// the input fails the hermiticity tolerance.
EigenSystem eig_hermitian(const ComplexMatrix& h);

// Projector onto the strictly positive eigenspace of a Hermitian matrix.
// Eigenvalues within tol::zero_eigenvalue of zero go to the complement.
ComplexMatrix positive_part_projector(const ComplexMatrix& h);

ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
ComplexMatrix sigma_z();

// |theta> = cos(theta)|0> + sin(theta)|1>
Ket2 angle_ket(double theta);
ComplexMatrix projector(const Ket2& ket);
ComplexMatrix projector(const Ket4& ket);

}  // namespace eacc
