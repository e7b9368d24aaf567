#include <catch2/catch_amalgamated.hpp>

#include "qmod/linalg.hpp"
#include "qmod/random.hpp"

using namespace qmod;

namespace {

cmat identity4() { return cmat::Identity(4, 4); }

} // namespace

TEST_CASE("kron identity cases", "[linalg]") {
    cmat i2 = cmat::Identity(2, 2);
    REQUIRE((kron(i2, i2) - identity4()).norm() == 0.0);

    cmat zi = kron(pauli_z(), i2);
    cmat expected = cmat::Zero(4, 4);
    expected.diagonal() << 1, 1, -1, -1;
    REQUIRE((zi - expected).norm() == 0.0);
}

TEST_CASE("kron of sigma_y with sigma_y matches elementwise expansion", "[linalg]") {
    // hand expansion of (sigma_y (x) sigma_y)[(i*2+k),(j*2+l)] = y[i,j] y[k,l]
    cmat expected = cmat::Zero(4, 4);
    expected(0, 3) = -1;
    expected(1, 2) = 1;
    expected(2, 1) = 1;
    expected(3, 0) = -1;
    REQUIRE((kron(pauli_y(), pauli_y()) - expected).norm() < 1e-15);
}

TEST_CASE("kron is associative and bilinear", "[linalg]") {
    Rng rng(7);
    for (int it = 0; it < 5; ++it) {
        cmat a = rng.matrix(2, 3), b = rng.matrix(3, 2), c = rng.matrix(2, 2);
        REQUIRE((kron(kron(a, b), c) - kron(a, kron(b, c))).norm() < 1e-12);

        complex lam = rng.cnormal();
        REQUIRE((kron(lam * a, b) - lam * kron(a, b)).norm() < 1e-12);
        cmat a2 = rng.matrix(2, 3);
        REQUIRE((kron(a + a2, b) - (kron(a, b) + kron(a2, b))).norm() < 1e-12);
        REQUIRE((kron(a, lam * b) - lam * kron(a, b)).norm() < 1e-12);
    }
}

TEST_CASE("hermitian_eig on Pauli matrices", "[linalg]") {
    Spectrum sz = hermitian_eig(pauli_z());
    REQUIRE(sz.eigenvalues(0) == Catch::Approx(1.0));
    REQUIRE(sz.eigenvalues(1) == Catch::Approx(-1.0));

    Spectrum sx = hermitian_eig(pauli_x());
    REQUIRE(sx.eigenvalues(0) == Catch::Approx(1.0));
    REQUIRE(sx.eigenvalues(1) == Catch::Approx(-1.0));
    cvec plus(2), minus(2);
    plus << 1, 1;
    minus << 1, -1;
    plus /= std::sqrt(2.0);
    minus /= std::sqrt(2.0);
    // eigenvectors are defined up to phase
    REQUIRE(std::abs(plus.dot(sx.eigenvectors.col(0))) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(std::abs(minus.dot(sx.eigenvectors.col(1))) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("hermitian_eig reconstructs random Hermitian input", "[linalg]") {
    Rng rng(11);
    for (Eigen::Index n : {2, 5, 9}) {
        cmat h = rng.hermitian(n);
        Spectrum s = hermitian_eig(h);
        cmat rec = s.eigenvectors * s.eigenvalues.asDiagonal().toDenseMatrix().cast<complex>() *
                   s.eigenvectors.adjoint();
        REQUIRE((rec - h).norm() < 1e-12);
        REQUIRE((s.eigenvectors.adjoint() * s.eigenvectors - cmat::Identity(n, n)).norm() < 1e-12);
        for (Eigen::Index i = 0; i + 1 < n; ++i)
            REQUIRE(s.eigenvalues(i) >= s.eigenvalues(i + 1));
    }
}

TEST_CASE("hermitian_eig rejects non-Hermitian input", "[linalg]") {
    REQUIRE_THROWS_AS(hermitian_eig(sigma_plus()), NotHermitian);
}

TEST_CASE("psd_sqrt basics", "[linalg]") {
    REQUIRE((psd_sqrt(identity4()) - identity4()).norm() < 1e-14);

    cmat d = cmat::Zero(2, 2);
    d.diagonal() << 4, 1;
    cmat expected = cmat::Zero(2, 2);
    expected.diagonal() << 2, 1;
    REQUIRE((psd_sqrt(d) - expected).norm() < 1e-14);
}

TEST_CASE("psd_sqrt squaring oracle on random PSD input", "[linalg]") {
    Rng rng(13);
    for (Eigen::Index n : {3, 6}) {
        cmat p = rng.psd(n);
        cmat q = psd_sqrt(p);
        REQUIRE((q * q - p).norm() < 1e-10);
        REQUIRE((q - q.adjoint()).norm() < 1e-12);
    }
}

TEST_CASE("psd_sqrt rejects indefinite input, clamps roundoff", "[linalg]") {
    cmat bad = cmat::Zero(2, 2);
    bad.diagonal() << 1, -1;
    REQUIRE_THROWS_AS(psd_sqrt(bad), NotPSD);

    cmat near = cmat::Zero(2, 2);
    near.diagonal() << 1, -1e-12; // within the clamping window
    cmat q = psd_sqrt(near);
    REQUIRE(q(1, 1).real() == 0.0);
}

TEST_CASE("unitary_from_hermitian", "[linalg]") {
    cmat z = cmat::Zero(3, 3);
    REQUIRE((unitary_from_hermitian(z, 0.37) - cmat::Identity(3, 3)).norm() < 1e-14);

    cmat u = unitary_from_hermitian(pauli_z(), std::numbers::pi);
    REQUIRE((u + cmat::Identity(2, 2)).norm() < 1e-12); // exp(i pi sigma_z) = -I

    Rng rng(17);
    cmat h = rng.hermitian(6);
    cmat w = unitary_from_hermitian(h, 0.37);
    REQUIRE((w.adjoint() * w - cmat::Identity(6, 6)).norm() < 1e-12);

    REQUIRE_THROWS_AS(unitary_from_hermitian(sigma_minus(), 1.0), NotHermitian);
}

TEST_CASE("antilinear adjoint", "[linalg]") {
    auto k = AntilinearOperator::conjugation(3);
    REQUIRE((k.adjoint().matrix() - cmat::Identity(3, 3)).norm() == 0.0);

    AntilinearOperator sy{pauli_y()};
    REQUIRE((sy.adjoint().matrix() + pauli_y()).norm() == 0.0); // sigma_y^T = -sigma_y

    Rng rng(19);
    AntilinearOperator s{rng.matrix(4, 4)};
    AntilinearOperator sdag = antilinear_adjoint(s);
    for (int it = 0; it < 20; ++it) {
        cvec x = rng.vector(4), y = rng.vector(4);
        complex lhs = x.dot(s.apply(y));
        complex rhs = y.dot(sdag.apply(x));
        REQUIRE(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("antilinear_polar on plain conjugation and diagonal scaling", "[linalg]") {
    auto [j0, d0] = antilinear_polar(AntilinearOperator::conjugation(3));
    REQUIRE((j0.matrix() - cmat::Identity(3, 3)).norm() < 1e-14);
    REQUIRE((d0 - cmat::Identity(3, 3)).norm() < 1e-14);

    cmat m = cmat::Zero(2, 2);
    m.diagonal() << 2.0, 0.5;
    auto [j, d] = antilinear_polar(AntilinearOperator{m});
    cmat dref = cmat::Zero(2, 2);
    dref.diagonal() << 4.0, 0.25; // Delta = M^T conj(M)
    REQUIRE((d - dref).norm() < 1e-12);
    REQUIRE((j.matrix() - cmat::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("antilinear_polar reconstruction on random invertible input", "[linalg]") {
    Rng rng(23);
    for (Eigen::Index n : {2, 4, 6}) {
        AntilinearOperator s{rng.invertible(n)};
        auto [j, delta] = antilinear_polar(s);
        cmat sqrt_delta = psd_sqrt(delta);
        // S = J Delta^{1/2}: matrix of the composition is J_m conj(sqrt_delta)
        cmat rec = j.matrix() * sqrt_delta.conjugate();
        REQUIRE((rec - s.matrix()).norm() < 1e-10);
        REQUIRE((j.matrix().adjoint() * j.matrix() - cmat::Identity(n, n)).norm() < 1e-10);
    }
}

TEST_CASE("antilinear_polar modular properties on the involutive class", "[linalg]") {
    // Maps of the form v -> A conj(A^{-1} v) square to the identity; this is
    // the class the Tomita engine produces and where J inherits J^2 = I and
    // J Delta^{1/2} J = Delta^{-1/2}.
    Rng rng(29);
    for (Eigen::Index n : {2, 4, 7}) {
        cmat a = rng.invertible(n, 50.0);
        cmat m = a * a.conjugate().inverse();
        AntilinearOperator s{m};
        REQUIRE((s.squared() - cmat::Identity(n, n)).norm() < 1e-10);

        auto [j, delta] = antilinear_polar(s);
        REQUIRE((delta - delta.adjoint()).norm() < 1e-10);
        Spectrum sp = hermitian_eig(delta);
        REQUIRE(sp.eigenvalues.minCoeff() > 0.0);
        REQUIRE((j.squared() - cmat::Identity(n, n)).norm() < 1e-10);

        cmat sqrt_delta = psd_sqrt(delta);
        cmat inv_sqrt = spectral_function(sp, [](double lam) { return 1.0 / std::sqrt(lam); });
        REQUIRE((j.sandwich(sqrt_delta) - inv_sqrt).norm() < 1e-10);
    }
}

TEST_CASE("antilinear_polar rejects singular input", "[linalg]") {
    cmat m = cmat::Zero(2, 2);
    m(0, 0) = 1.0;
    REQUIRE_THROWS_AS(antilinear_polar(AntilinearOperator{m}), Singular);
}

TEST_CASE("applying an antilinear operator twice equals its linear square", "[linalg]") {
    Rng rng(31);
    AntilinearOperator s{rng.matrix(5, 5)};
    for (int it = 0; it < 10; ++it) {
        cvec v = rng.vector(5);
        REQUIRE((s.apply(s.apply(v)) - s.squared() * v).norm() < 1e-12);
    }
}
