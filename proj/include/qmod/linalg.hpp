#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>

#include "qmod/errors.hpp"

namespace qmod {

using complex = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;

/// Numerical thresholds shared across the toolkit. All values are absolute
/// unless noted otherwise; every front end exposes them in configuration.
struct Tolerances {
    double herm = 1e-10;          ///< Hermiticity check, ||H - H^dag||_F
    double eig = 1e-9;            ///< eigendecomposition / reconstruction residuals
    double psd = 1e-10;           ///< clamping window for tiny negative eigenvalues
    double modular = 1e-9;        ///< modular property residuals
    double closure = 1e-10;       ///< algebra span membership / closure residuals
    double rank = 1e-10;          ///< relative singular-value cutoff for rank decisions
    double cond_bound = 1e8;      ///< largest acceptable condition number
    double quadrature_rel = 1e-8; ///< relative quadrature refinement target
};

inline cmat pauli_x() {
    cmat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline cmat pauli_y() {
    cmat m(2, 2);
    m << complex(0, 0), complex(0, -1), complex(0, 1), complex(0, 0);
    return m;
}

inline cmat pauli_z() {
    cmat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline cmat sigma_plus() {
    cmat m = cmat::Zero(2, 2);
    m(0, 1) = 1;
    return m;
}

inline cmat sigma_minus() {
    cmat m = cmat::Zero(2, 2);
    m(1, 0) = 1;
    return m;
}

/// Kronecker product, (A (x) B)[i*rB+k, j*cB+l] = A[i,j] B[k,l].
inline cmat kron(const cmat& a, const cmat& b) {
    cmat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline void require_hermitian(const cmat& h, double tau_herm, const char* who) {
    if (h.rows() != h.cols())
        throw DimensionMismatch(std::string(who) + ": matrix is not square");
    if ((h - h.adjoint()).norm() > tau_herm)
        throw NotHermitian(std::string(who) + ": matrix is not Hermitian within tolerance");
}

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
struct Spectrum {
    rvec eigenvalues;
    cmat eigenvectors;
};

inline Spectrum hermitian_eig(const cmat& h, double tau_herm = Tolerances{}.herm) {
    require_hermitian(h, tau_herm, "hermitian_eig");
    Eigen::SelfAdjointEigenSolver<cmat> solver((h + h.adjoint()) / 2.0);
    if (solver.info() != Eigen::Success)
        throw Error("hermitian_eig: eigensolver did not converge");
    Spectrum s;
    s.eigenvalues = solver.eigenvalues().reverse();
    s.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return s;
}

/// V f(lambda) V^dag for a Hermitian spectrum; f may return complex values.
template <typename F>
cmat spectral_function(const Spectrum& s, F&& f) {
    cvec d(s.eigenvalues.size());
    for (Eigen::Index i = 0; i < d.size(); ++i)
        d[i] = f(s.eigenvalues[i]);
    return s.eigenvectors * d.asDiagonal() * s.eigenvectors.adjoint();
}

/// Hermitian PSD square root. Eigenvalues in [-tau_psd, 0] are clamped to zero;
/// anything below -tau_psd is rejected.
inline cmat psd_sqrt(const cmat& p, double tau_psd = Tolerances{}.psd,
                     double tau_herm = Tolerances{}.herm) {
    Spectrum s = hermitian_eig(p, tau_herm);
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
        if (s.eigenvalues[i] < -tau_psd)
            throw NotPSD("psd_sqrt: eigenvalue " + std::to_string(s.eigenvalues[i]) +
                         " below clamping window");
    }
    cmat q = spectral_function(s, [](double lam) { return std::sqrt(std::max(lam, 0.0)); });
    return (q + q.adjoint()) / 2.0;
}

/// exp(i s H) for Hermitian H, unitary by construction.
inline cmat unitary_from_hermitian(const cmat& h, double s,
                                   double tau_herm = Tolerances{}.herm) {
    Spectrum sp = hermitian_eig(h, tau_herm);
    return spectral_function(sp, [s](double lam) { return std::exp(complex(0, s * lam)); });
}

inline double condition_number(const cmat& m) {
    Eigen::JacobiSVD<cmat> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) <= 0.0)
        return std::numeric_limits<double>::infinity();
    return sv(0) / sv(sv.size() - 1);
}

/// Antilinear map v -> M conj(v) in the fixed orthonormal basis. Storing the
/// matrix makes conjugations such as S and J ordinary testable values. The
/// adjoint is defined through the antilinear pairing <x, S y> = <y, S* x>,
/// which in this convention is the plain transpose.
class AntilinearOperator {
public:
    explicit AntilinearOperator(cmat m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols())
            throw DimensionMismatch("AntilinearOperator: matrix must be square");
    }

    /// Plain componentwise conjugation.
    static AntilinearOperator conjugation(Eigen::Index n) {
        return AntilinearOperator(cmat::Identity(n, n));
    }

    const cmat& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

    cvec apply(const cvec& v) const {
        if (v.size() != m_.rows())
            throw DimensionMismatch("AntilinearOperator::apply: dimension mismatch");
        return m_ * v.conjugate();
    }

    AntilinearOperator adjoint() const { return AntilinearOperator(m_.transpose()); }

    /// S∘S as a linear map.
    cmat squared() const { return m_ * m_.conjugate(); }

    /// S∘A∘S as a linear map, for linear A.
    cmat sandwich(const cmat& a) const { return m_ * a.conjugate() * m_.conjugate(); }

    /// S∘T as a linear map, for antilinear T.
    cmat compose(const AntilinearOperator& t) const { return m_ * t.m_.conjugate(); }

private:
    cmat m_;
};

inline AntilinearOperator antilinear_adjoint(const AntilinearOperator& s) {
    return s.adjoint();
}

/// Polar decomposition S = J Delta^{1/2} of an invertible antilinear map.
/// Delta = M^T conj(M) is Hermitian positive; J is antiunitary. When S is an
/// involution (S∘S = I, the Tomita case) J is an involution as well and
/// J Delta^{1/2} J = Delta^{-1/2}; for general invertible S only the
/// reconstruction and the unitarity of J are guaranteed.
inline std::pair<AntilinearOperator, cmat> antilinear_polar(
    const AntilinearOperator& s, double cond_bound = Tolerances{}.cond_bound) {
    const cmat& m = s.matrix();
    const double cond = condition_number(m);
    if (!(cond < cond_bound))
        throw Singular("antilinear_polar: matrix numerically singular (cond = " +
                       std::to_string(cond) + ")");
    cmat delta = m.transpose() * m.conjugate();
    delta = (delta + delta.adjoint()) / 2.0;
    Spectrum sp = hermitian_eig(delta, 1e-8 * std::max(1.0, delta.norm()));
    cmat inv_sqrt = spectral_function(sp, [](double lam) { return 1.0 / std::sqrt(lam); });
    cmat j = m * inv_sqrt.conjugate();
    return {AntilinearOperator(std::move(j)), std::move(delta)};
}

} // namespace qmod
