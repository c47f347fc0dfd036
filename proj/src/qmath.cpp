#include "eacc/qmath.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace eacc {

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("ComplexMatrix: dimension must be positive");
    entries_.assign(static_cast<std::size_t>(dim) * dim, Complex(0.0, 0.0));
}

ComplexMatrix ComplexMatrix::identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    const int n = static_cast<int>(rows.size());
    ComplexMatrix m(n);
    int r = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("ComplexMatrix: rows must form a square matrix");
        int c = 0;
        for (const auto& v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& other) const {
    if (dim_ != other.dim_) throw std::invalid_argument("matrix dimension mismatch");
    ComplexMatrix out(dim_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i] + other.entries_[i];
    return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& other) const {
    if (dim_ != other.dim_) throw std::invalid_argument("matrix dimension mismatch");
    ComplexMatrix out(dim_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i] - other.entries_[i];
    return out;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& other) const {
    if (dim_ != other.dim_) throw std::invalid_argument("matrix dimension mismatch");
    ComplexMatrix out(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < dim_; ++k) {
            const Complex aik = (*this)(i, k);
            if (aik == Complex(0.0, 0.0)) continue;
            for (int j = 0; j < dim_; ++j) out(i, j) += aik * other(k, j);
        }
    return out;
}

ComplexMatrix ComplexMatrix::operator*(Complex scalar) const {
    ComplexMatrix out(dim_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i] * scalar;
    return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) out(i, j) = std::conj((*this)(j, i));
    return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
    ComplexMatrix out(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) out(i, j) = std::conj((*this)(i, j));
    return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix out(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) out(i, j) = (*this)(j, i);
    return out;
}

Complex ComplexMatrix::trace() const {
    Complex t(0.0, 0.0);
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& v : entries_) m = std::max(m, std::abs(v));
    return m;
}

bool ComplexMatrix::is_hermitian(double tolerance) const {
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j)
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tolerance) return false;
    return true;
}

ComplexMatrix operator*(Complex scalar, const ComplexMatrix& m) { return m * scalar; }
ComplexMatrix operator*(double scalar, const ComplexMatrix& m) { return m * scalar; }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("matrix dimension mismatch");
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("matrix dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) s += std::norm(a(i, j) - b(i, j));
    return std::sqrt(s);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const bool a_ok = a.dim() == 2 || a.dim() == 4;
    const bool b_ok = b.dim() == 2 || b.dim() == 4;
    if (!a_ok || !b_ok || a.dim() * b.dim() > 16)
        throw std::invalid_argument("kron: unsupported dimension (factors must be 2x2 or 4x4)");
    ComplexMatrix out(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) {
            const Complex aij = a(i, j);
            if (aij == Complex(0.0, 0.0)) continue;
            for (int k = 0; k < b.dim(); ++k)
                for (int l = 0; l < b.dim(); ++l)
                    out(i * b.dim() + k, j * b.dim() + l) = aij * b(k, l);
        }
    return out;
}

Ket4 kron(const Ket2& a, const Ket2& b) {
    Ket4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out[static_cast<std::size_t>(2 * i + j)] = a[i] * b[j];
    return out;
}

EigenSystem eig_hermitian(const ComplexMatrix& h) {
    if (!h.is_hermitian())
        throw std::invalid_argument("eig_hermitian: matrix is not Hermitian within tolerance");
    const int n = h.dim();
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = h(i, j);
    // Symmetrize the rounding residue so the solver sees an exactly Hermitian input.
    m = (m + m.adjoint().eval()) * 0.5;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eig_hermitian: eigensolver failed to converge");

    EigenSystem out{std::vector<double>(static_cast<std::size_t>(n)), ComplexMatrix(n)};
    // Eigen sorts ascending; flip to descending.
    for (int k = 0; k < n; ++k) {
        const int src = n - 1 - k;
        out.eigenvalues[static_cast<std::size_t>(k)] = solver.eigenvalues()(src);
        for (int i = 0; i < n; ++i) out.eigenvectors(i, k) = solver.eigenvectors()(i, src);
    }
    return out;
}

ComplexMatrix positive_part_projector(const ComplexMatrix& h) {
    const EigenSystem es = eig_hermitian(h);
    const int n = h.dim();
    ComplexMatrix p(n);
    for (int k = 0; k < n; ++k) {
        if (es.eigenvalues[static_cast<std::size_t>(k)] <= tol::zero_eigenvalue) continue;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                p(i, j) += es.eigenvectors(i, k) * std::conj(es.eigenvectors(j, k));
    }
    return p;
}

ComplexMatrix sigma_x() {
    return ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
}

ComplexMatrix sigma_y() {
    return ComplexMatrix::from_rows({{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}});
}

ComplexMatrix sigma_z() {
    return ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
}

Ket2 angle_ket(double theta) {
    return Ket2{Complex(std::cos(theta), 0.0), Complex(std::sin(theta), 0.0)};
}

ComplexMatrix projector(const Ket2& ket) {
    ComplexMatrix p(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) p(i, j) = ket[i] * std::conj(ket[j]);
    return p;
}

ComplexMatrix projector(const Ket4& ket) {
    ComplexMatrix p(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) p(i, j) = ket[i] * std::conj(ket[j]);
    return p;
}

}  // namespace eacc
