#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "qmod/linalg.hpp"

namespace qmod {

/// Seeded random source for tests, verification sweeps and instance
/// generators. Distributions are derived from raw mt19937_64 output so the
/// stream is identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 42) : gen_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        // inclusive range; bias is negligible for the small ranges used here
        return lo + static_cast<std::int64_t>(uniform() * static_cast<double>(hi - lo + 1));
    }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    complex cnormal() { return complex(normal(), normal()) / std::sqrt(2.0); }

    cvec vector(Eigen::Index n) {
        cvec v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v[i] = cnormal();
        return v;
    }

    cvec state(Eigen::Index n) {
        cvec v = vector(n);
        return v / v.norm();
    }

    cmat matrix(Eigen::Index rows, Eigen::Index cols) {
        cmat m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                m(i, j) = cnormal();
        return m;
    }

    cmat hermitian(Eigen::Index n) {
        cmat m = matrix(n, n);
        return (m + m.adjoint()) / 2.0;
    }

    cmat psd(Eigen::Index n) {
        cmat m = matrix(n, n);
        return m.adjoint() * m / static_cast<double>(n);
    }

    cmat density(Eigen::Index n) {
        cmat p = psd(n);
        return p / p.trace().real();
    }

    /// Haar-distributed unitary via QR with phase fixing.
    cmat unitary(Eigen::Index n) {
        cmat m = matrix(n, n);
        Eigen::HouseholderQR<cmat> qr(m);
        cmat q = qr.householderQ();
        cmat r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Eigen::Index i = 0; i < n; ++i) {
            complex d = r(i, i);
            q.col(i) *= (std::abs(d) > 0) ? d / std::abs(d) : complex(1, 0);
        }
        return q;
    }

    /// Invertible matrix with condition number below the given bound.
    cmat invertible(Eigen::Index n, double max_cond = 1e4) {
        for (;;) {
            cmat m = matrix(n, n);
            if (condition_number(m) < max_cond)
                return m;
        }
    }

private:
    std::mt19937_64 gen_;
};

} // namespace qmod
