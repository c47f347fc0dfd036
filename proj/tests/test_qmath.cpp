#include "eacc/qmath.hpp"
#include "eacc/rng.hpp"
#include "eacc/states.hpp"

#include <doctest.h>

#include <cmath>

using namespace eacc;

namespace {

ComplexMatrix random_hermitian(int dim, RandomStream& rng) {
    ComplexMatrix h(dim);
    for (int i = 0; i < dim; ++i) {
        h(i, i) = Complex(2.0 * rng.next_double() - 1.0, 0.0);
        for (int j = i + 1; j < dim; ++j) {
            const Complex v(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0);
            h(i, j) = v;
            h(j, i) = std::conj(v);
        }
    }
    return h;
}

// Independent determinant oracle: cofactor expansion, no eigensolver involved.
Complex det(const ComplexMatrix& m) {
    const int n = m.dim();
    if (n == 1) return m(0, 0);
    Complex sum(0.0, 0.0);
    for (int col = 0; col < n; ++col) {
        ComplexMatrix minor(n - 1);
        for (int i = 1; i < n; ++i) {
            int mc = 0;
            for (int j = 0; j < n; ++j) {
                if (j == col) continue;
                minor(i - 1, mc++) = m(i, j);
            }
        }
        const Complex term = m(0, col) * det(minor);
        sum += (col % 2 == 0) ? term : -term;
    }
    return sum;
}

ComplexMatrix shifted(const ComplexMatrix& m, double lambda) {
    ComplexMatrix out = m;
    for (int i = 0; i < m.dim(); ++i) out(i, i) -= lambda;
    return out;
}

}  // namespace

TEST_CASE("kron identity and basis cases") {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    CHECK(max_abs_diff(kron(i2, i2), ComplexMatrix::identity(4)) == 0.0);

    const ComplexMatrix zi = kron(sigma_z(), i2);
    const ComplexMatrix expected = ComplexMatrix::from_rows({{1, 0, 0, 0},
                                                             {0, 1, 0, 0},
                                                             {0, 0, -1, 0},
                                                             {0, 0, 0, -1}});
    CHECK(max_abs_diff(zi, expected) == 0.0);

    const ComplexMatrix p0 = projector(Ket2{Complex(1, 0), Complex(0, 0)});
    const ComplexMatrix p1 = projector(Ket2{Complex(0, 0), Complex(1, 0)});
    const ComplexMatrix k = kron(p0, p1);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(k(i, j) == Complex(i == 1 && j == 1 ? 1.0 : 0.0, 0.0));
}

TEST_CASE("kron dimension rules") {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    const ComplexMatrix i4 = ComplexMatrix::identity(4);
    CHECK(kron(i4, i4).dim() == 16);
    CHECK(kron(i4, i2).dim() == 8);
    const ComplexMatrix i8 = kron(i4, i2);
    CHECK_THROWS_AS(kron(i8, i2), std::invalid_argument);
    CHECK_THROWS_AS(kron(i2, i8), std::invalid_argument);
    CHECK_THROWS_AS(kron(ComplexMatrix::identity(3), i2), std::invalid_argument);
}

TEST_CASE("kron is bilinear and associative on tested triples") {
    RandomStream rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_hermitian(2, rng);
        const ComplexMatrix b = random_hermitian(2, rng);
        const ComplexMatrix c = random_hermitian(2, rng);
        CHECK(max_abs_diff(kron(a + b, c), kron(a, c) + kron(b, c)) <= tol::comparison);
        CHECK(max_abs_diff(kron(a, b + c), kron(a, b) + kron(a, c)) <= tol::comparison);
        CHECK(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) <= tol::comparison);
    }
}

TEST_CASE("eig_hermitian on known spectra") {
    const EigenSystem diag = eig_hermitian(ComplexMatrix::from_rows({{3, 0}, {0, 1}}));
    CHECK(diag.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(diag.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));

    const EigenSystem sx = eig_hermitian(sigma_x());
    CHECK(sx.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sx.eigenvalues[1] == doctest::Approx(-1.0).epsilon(1e-12));
    // Hadamard-type eigenvectors: equal-magnitude components
    CHECK(std::abs(sx.eigenvectors(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("eig_hermitian matches the characteristic polynomial on werner(0.5)") {
    const ComplexMatrix w = werner(0.5).matrix();
    // char-poly oracle: the claimed eigenvalues are roots of det(W - lambda I)
    CHECK(std::abs(det(shifted(w, 0.625))) <= 1e-12);
    CHECK(std::abs(det(shifted(w, 0.125))) <= 1e-12);
    CHECK(std::abs(det(shifted(w, 0.2))) > 1e-6);  // non-eigenvalue control

    const EigenSystem es = eig_hermitian(w);
    CHECK(es.eigenvalues[0] == doctest::Approx(0.625).epsilon(1e-10));
    for (int k = 1; k < 4; ++k)
        CHECK(es.eigenvalues[static_cast<std::size_t>(k)] == doctest::Approx(0.125).epsilon(1e-10));
}

TEST_CASE("eig_hermitian reconstruction and orthonormality on random input") {
    RandomStream rng(77);
    for (int dim : {2, 4}) {
        for (int trial = 0; trial < 50; ++trial) {
            const ComplexMatrix h = random_hermitian(dim, rng);
            const EigenSystem es = eig_hermitian(h);
            for (std::size_t k = 0; k + 1 < es.eigenvalues.size(); ++k)
                CHECK(es.eigenvalues[k] >= es.eigenvalues[k + 1]);

            ComplexMatrix recon(dim);
            for (int k = 0; k < dim; ++k)
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j)
                        recon(i, j) += es.eigenvalues[static_cast<std::size_t>(k)] *
                                       es.eigenvectors(i, k) * std::conj(es.eigenvectors(j, k));
            CHECK(frobenius_distance(recon, h) <= tol::reconstruction);
            CHECK(max_abs_diff(es.eigenvectors.adjoint() * es.eigenvectors,
                               ComplexMatrix::identity(dim)) <= tol::reconstruction);
        }
    }
}

TEST_CASE("eig_hermitian rejects non-Hermitian input") {
    ComplexMatrix m = ComplexMatrix::identity(2);
    m(0, 1) = Complex(0.1, 0.0);
    CHECK_THROWS_AS(eig_hermitian(m), std::invalid_argument);
}

TEST_CASE("positive_part_projector on known operators") {
    CHECK(max_abs_diff(positive_part_projector(sigma_z()),
                       ComplexMatrix::from_rows({{1, 0}, {0, 0}})) <= tol::comparison);
    CHECK(positive_part_projector(ComplexMatrix::identity(2) * -1.0).max_abs() <= tol::comparison);
    const ComplexMatrix half = (ComplexMatrix::identity(2) + sigma_x()) * 0.5;
    CHECK(max_abs_diff(positive_part_projector(sigma_x()), half) <= tol::reconstruction);
}

TEST_CASE("positive_part_projector is an orthogonal projector commuting with its input") {
    RandomStream rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const int dim = trial % 2 == 0 ? 2 : 4;
        const ComplexMatrix h = random_hermitian(dim, rng);
        const ComplexMatrix p = positive_part_projector(h);
        CHECK(max_abs_diff(p * p, p) <= tol::reconstruction);
        CHECK(max_abs_diff(p * h, h * p) <= tol::reconstruction);
    }
}

TEST_CASE("positive, negative and kernel parts resolve the identity") {
    // H with an exact zero mode: diag(2, 0, -1) embedded via a basis rotation
    RandomStream rng(9);
    const ComplexMatrix h0 = random_hermitian(4, rng);
    const EigenSystem basis = eig_hermitian(h0);
    const double lams[4] = {2.0, 0.0, 0.0, -1.0};
    ComplexMatrix h(4);
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                h(i, j) += lams[k] * basis.eigenvectors(i, k) * std::conj(basis.eigenvectors(j, k));

    const ComplexMatrix pos = positive_part_projector(h);
    const ComplexMatrix neg = positive_part_projector(h * -1.0);
    // kernel projector straight from the eigensystem
    const EigenSystem es = eig_hermitian(h);
    ComplexMatrix ker(4);
    for (int k = 0; k < 4; ++k) {
        if (std::abs(es.eigenvalues[static_cast<std::size_t>(k)]) > tol::zero_eigenvalue) continue;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                ker(i, j) += es.eigenvectors(i, k) * std::conj(es.eigenvectors(j, k));
    }
    CHECK(max_abs_diff(pos + neg + ker, ComplexMatrix::identity(4)) <= tol::reconstruction);
    // zero modes are excluded from the positive part
    CHECK(std::abs(pos.trace().real() - 1.0) <= tol::reconstruction);
    CHECK(std::abs(neg.trace().real() - 1.0) <= tol::reconstruction);
}
