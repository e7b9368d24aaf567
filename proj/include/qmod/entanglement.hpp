#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

#include "qmod/linalg.hpp"

namespace qmod::ent {

struct TwoQubitState {
    cvec amplitudes; // basis {|00>, |01>, |10>, |11>}

    explicit TwoQubitState(cvec a) : amplitudes(std::move(a)) {
        if (amplitudes.size() != 4)
            throw DimensionMismatch("TwoQubitState: four amplitudes required");
        if (std::abs(amplitudes.norm() - 1.0) > 1e-12)
            throw NotNormalized("TwoQubitState: amplitudes are not unit norm");
    }
};

struct TwoQubitDensity {
    cmat rho;

    explicit TwoQubitDensity(cmat r) : rho(std::move(r)) {
        if (rho.rows() != 4 || rho.cols() != 4)
            throw DimensionMismatch("TwoQubitDensity: 4x4 matrix required");
        if ((rho - rho.adjoint()).norm() > 1e-8)
            throw InvalidDensity("TwoQubitDensity: not Hermitian");
        if (std::abs(rho.trace().real() - 1.0) > 1e-8 || std::abs(rho.trace().imag()) > 1e-8)
            throw InvalidDensity("TwoQubitDensity: trace is not one");
        Eigen::SelfAdjointEigenSolver<cmat> es((rho + rho.adjoint()) / 2.0);
        if (es.eigenvalues().minCoeff() < -1e-8)
            throw InvalidDensity("TwoQubitDensity: negative eigenvalue");
    }

    static TwoQubitDensity pure(const TwoQubitState& s) {
        return TwoQubitDensity(s.amplitudes * s.amplitudes.adjoint());
    }
};

/// Four measurement angles (radians) for the two dichotomic settings per side.
struct BellSettings {
    double alpha = 0, beta = 0, alpha_p = 0, beta_p = 0;
};

struct ConcurrenceValue {
    double value = 0; // in [0, 1]
};

inline const cmat& spin_flip_matrix() {
    static const cmat f = kron(pauli_y(), pauli_y());
    return f;
}

/// |psi~> = (sigma_y (x) sigma_y) |psi*>.
inline TwoQubitState spin_flip_pure(const TwoQubitState& psi) {
    return TwoQubitState(spin_flip_matrix() * psi.amplitudes.conjugate());
}

/// Pure-state concurrence C = |<psi~|psi>|.
inline ConcurrenceValue concurrence_pure(const TwoQubitState& psi) {
    const complex overlap = spin_flip_pure(psi).amplitudes.dot(psi.amplitudes);
    return {std::clamp(std::abs(overlap), 0.0, 1.0)};
}

/// Mixed-state concurrence: with R = sqrt(rho) rho~ sqrt(rho) and eigenvalues
/// l_i of R in decreasing order, C = max(0, sqrt(l1) - sqrt(l2) - sqrt(l3)
/// - sqrt(l4)). The square roots are evaluated as the singular values of
/// sqrt(rho~) sqrt(rho), whose Gram matrix is exactly R; unlike eigenvalues
/// of R itself, singular values do not square away half the precision of the
/// near-zero modes. Eigenvalues of rho below 1e-14 are treated as exact
/// zeros for the same reason.
inline ConcurrenceValue wootters_concurrence(const TwoQubitDensity& d) {
    const cmat& f = spin_flip_matrix();
    Spectrum sp_rho = hermitian_eig((d.rho + d.rho.adjoint()) / 2.0, 1e-8);
    cmat root = spectral_function(
        sp_rho, [](double l) { return l > 1e-14 ? std::sqrt(l) : 0.0; });
    cmat root_tilde = f * root.conjugate() * f; // sqrt(rho~) = F conj(sqrt(rho)) F
    Eigen::JacobiSVD<cmat> svd(root_tilde * root);
    const auto& sv = svd.singularValues();
    double c = sv(0) - sv(1) - sv(2) - sv(3);
    return {std::clamp(c, 0.0, 1.0)};
}

/// Concurrence as the expectation value of a modular conjugation,
/// C = |<psi| J |psi>|. Works in any Hilbert dimension.
inline ConcurrenceValue modular_concurrence(const cvec& psi, const AntilinearOperator& j) {
    if (psi.size() != j.dim())
        throw DimensionMismatch("modular_concurrence: state and conjugation dimensions differ");
    const cvec n = psi / psi.norm();
    return {std::clamp(std::abs(n.dot(j.apply(n))), 0.0, 1.0)};
}

/// Dichotomic observable in the z-x plane.
inline cmat dichotomic(double theta) {
    return std::cos(theta) * pauli_z() + std::sin(theta) * pauli_x();
}

/// The four-term correlation operator for the given settings.
inline cmat chsh_operator(const BellSettings& s) {
    return kron(dichotomic(s.alpha), dichotomic(s.beta) + dichotomic(s.beta_p)) +
           kron(dichotomic(s.alpha_p), dichotomic(s.beta) - dichotomic(s.beta_p));
}

inline double chsh_expectation(const TwoQubitState& psi, const BellSettings& s) {
    const complex v = psi.amplitudes.dot(chsh_operator(s) * psi.amplitudes);
    return v.real(); // imaginary residual is O(eps) for Hermitian operators
}

inline double chsh_expectation(const TwoQubitDensity& rho, const BellSettings& s) {
    return (rho.rho * chsh_operator(s)).trace().real();
}

/// Largest attainable CHSH value for a given concurrence, 2 sqrt(1 + C^2).
inline double max_violation_from_concurrence(const ConcurrenceValue& c) {
    return 2.0 * std::sqrt(1.0 + c.value * c.value);
}

namespace detail {

/// Correlation matrix T_ij = tr(rho sigma_i (x) sigma_j) for i, j in {z, x}.
inline Eigen::Matrix2d correlation_zx(const cmat& rho) {
    const std::array<cmat, 2> paulis{pauli_z(), pauli_x()};
    Eigen::Matrix2d t;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            t(i, j) = (rho * kron(paulis[i], paulis[j])).trace().real();
    return t;
}

inline Eigen::Vector2d direction(double theta) {
    return Eigen::Vector2d(std::cos(theta), std::sin(theta));
}

inline double chsh_bilinear(const Eigen::Matrix2d& t, const BellSettings& s) {
    return direction(s.alpha).dot(t * (direction(s.beta) + direction(s.beta_p))) +
           direction(s.alpha_p).dot(t * (direction(s.beta) - direction(s.beta_p)));
}

/// Golden-section maximization of a 1-d slice on [lo, hi]; returns the best
/// sampled point, so the result can only improve on the inputs.
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, int iters) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return (f1 >= f2) ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

/// Maximize the CHSH combination of a 2x2 correlation matrix over the four
/// angles: coarse grid (alpha restricted to [0, pi) by the joint half-turn
/// symmetry), then coordinate-wise golden-section refinement. Deterministic
/// with lexicographic tie-breaking.
inline std::pair<BellSettings, double> maximize_bilinear(const Eigen::Matrix2d& t,
                                                         int coarse_grid_steps,
                                                         int refine_iters) {
    const double tau = 2.0 * std::numbers::pi;
    const double step = tau / coarse_grid_steps;

    BellSettings best;
    double best_val = chsh_bilinear(t, best);
    for (int ia = 0; ia < coarse_grid_steps / 2; ++ia)
        for (int ib = 0; ib < coarse_grid_steps; ++ib)
            for (int iap = 0; iap < coarse_grid_steps; ++iap)
                for (int ibp = 0; ibp < coarse_grid_steps; ++ibp) {
                    BellSettings s{ia * step, ib * step, iap * step, ibp * step};
                    const double v = chsh_bilinear(t, s);
                    if (v > best_val) {
                        best_val = v;
                        best = s;
                    }
                }

    // Each slice along one angle is a sinusoid, so an 8-point scan locates a
    // bracket of width a quarter period that contains the slice maximum.
    auto refine_coord = [&](double* coord) {
        auto slice = [&](double theta) {
            const double saved = *coord;
            *coord = theta;
            const double v = chsh_bilinear(t, best);
            *coord = saved;
            return v;
        };
        double center = *coord, center_val = slice(center);
        for (int i = 0; i < 8; ++i) {
            const double theta = *coord + i * tau / 8.0;
            const double v = slice(theta);
            if (v > center_val) {
                center = theta;
                center_val = v;
            }
        }
        auto [arg, val] = golden_max(slice, center - tau / 8.0, center + tau / 8.0, refine_iters);
        if (val > center_val) {
            *coord = arg;
            best_val = std::max(best_val, val);
        } else {
            *coord = center;
            best_val = std::max(best_val, center_val);
        }
    };

    for (int cycle = 0; cycle < 6; ++cycle) {
        const double before = best_val;
        refine_coord(&best.alpha);
        refine_coord(&best.beta);
        refine_coord(&best.alpha_p);
        refine_coord(&best.beta_p);
        if (best_val - before < 1e-14)
            break;
    }
    return {best, best_val};
}

} // namespace detail

/// Numerically maximized CHSH expectation for a two-qubit state with z-x
/// plane observables. Guaranteed not below the coarse-grid optimum.
inline std::pair<BellSettings, double> maximize_chsh(const TwoQubitDensity& rho,
                                                     int coarse_grid_steps = 24,
                                                     int refine_iters = 60) {
    return detail::maximize_bilinear(detail::correlation_zx(rho.rho), coarse_grid_steps,
                                     refine_iters);
}

inline std::pair<BellSettings, double> maximize_chsh(const TwoQubitState& psi,
                                                     int coarse_grid_steps = 24,
                                                     int refine_iters = 60) {
    return maximize_chsh(TwoQubitDensity::pure(psi), coarse_grid_steps, refine_iters);
}

} // namespace qmod::ent
