#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qmod/linalg.hpp"

namespace qmod::fock {

/// Occupation levels 0..n_max per mode.
struct FockCutoff {
    int n_max;
};

/// A truncated bosonic Fock space over a fixed number of modes. Basis states
/// are occupation tuples (n_0, ..., n_{M-1}); mode 0 is the most significant
/// index, so the vacuum sits at index 0.
struct ModeSystem {
    int modes;
    FockCutoff cutoff;

    ModeSystem(int modes_, FockCutoff cutoff_) : modes(modes_), cutoff(cutoff_) {
        if (modes < 1)
            throw DimensionMismatch("ModeSystem: at least one mode required");
        if (cutoff.n_max < 1)
            throw DimensionMismatch("ModeSystem: n_max must be >= 1");
    }

    Eigen::Index levels() const { return cutoff.n_max + 1; }

    Eigen::Index dimension() const {
        Eigen::Index d = 1;
        for (int i = 0; i < modes; ++i)
            d *= levels();
        return d;
    }

    int occupation(Eigen::Index index, int mode) const {
        Eigen::Index stride = 1;
        for (int i = mode + 1; i < modes; ++i)
            stride *= levels();
        return static_cast<int>((index / stride) % levels());
    }

    int total_occupation(Eigen::Index index) const {
        int total = 0;
        for (int m = 0; m < modes; ++m)
            total += occupation(index, m);
        return total;
    }
};

/// Single-mode ladder matrix, a|n> = sqrt(n)|n-1>.
inline cmat single_mode_annihilation(Eigen::Index levels) {
    cmat a = cmat::Zero(levels, levels);
    for (Eigen::Index n = 1; n < levels; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

/// Ladder operator for one mode, embedded with identities on the others.
inline cmat annihilation(const ModeSystem& sys, int mode) {
    if (mode < 0 || mode >= sys.modes)
        throw IndexOutOfRange("annihilation: mode " + std::to_string(mode) + " out of range");
    cmat op = cmat::Identity(1, 1);
    for (int m = 0; m < sys.modes; ++m) {
        cmat factor = (m == mode) ? single_mode_annihilation(sys.levels())
                                  : cmat::Identity(sys.levels(), sys.levels());
        op = kron(op, factor);
    }
    return op;
}

inline cmat creation(const ModeSystem& sys, int mode) {
    return annihilation(sys, mode).adjoint();
}

/// a(c) = sum_i conj(c_i) a_i; antilinear in the coefficient vector.
inline cmat smeared_annihilation(const ModeSystem& sys, const cvec& c) {
    if (c.size() != sys.modes)
        throw DimensionMismatch("smeared_annihilation: one coefficient per mode required");
    cmat op = cmat::Zero(sys.dimension(), sys.dimension());
    for (int m = 0; m < sys.modes; ++m)
        op += std::conj(c[m]) * annihilation(sys, m);
    return op;
}

inline cmat smeared_creation(const ModeSystem& sys, const cvec& c) {
    return smeared_annihilation(sys, c).adjoint();
}

/// Self-adjoint Segal field, (a(c) + a*(c)) / sqrt(2).
inline cmat segal_field(const ModeSystem& sys, const cvec& c) {
    cmat a = smeared_annihilation(sys, c);
    return (a + a.adjoint()) / std::sqrt(2.0);
}

/// Dephasing-normalized field, a(c) + a*(c) = sqrt(2) * Segal field. With this
/// normalization the vacuum obeys <0|e^{i phi(c)}|0> = e^{-<c,c>/2}.
inline cmat dephasing_field(const ModeSystem& sys, const cvec& c) {
    cmat a = smeared_annihilation(sys, c);
    return a + a.adjoint();
}

/// Weyl operator W(c) = e^{i Segal(c)}, unitary by construction.
inline cmat weyl(const ModeSystem& sys, const cvec& c) {
    return unitary_from_hermitian(segal_field(sys, c), 1.0);
}

inline cvec vacuum(const ModeSystem& sys) {
    cvec v = cvec::Zero(sys.dimension());
    v[0] = 1.0;
    return v;
}

/// <0|U|0> in the truncated space.
inline complex vacuum_expectation(const ModeSystem& sys, const cmat& u) {
    if (u.rows() != sys.dimension() || u.cols() != sys.dimension())
        throw DimensionMismatch("vacuum_expectation: operator does not match the mode system");
    return u(0, 0);
}

/// Diagonal projector onto total occupation <= max_total; this is the
/// truncation-safe subspace on which ladder identities hold exactly.
inline cmat occupation_projector(const ModeSystem& sys, int max_total) {
    cmat p = cmat::Zero(sys.dimension(), sys.dimension());
    for (Eigen::Index i = 0; i < sys.dimension(); ++i)
        if (sys.total_occupation(i) <= max_total)
            p(i, i) = 1.0;
    return p;
}

/// Parity (-1)^{total occupation}, the unitary implementing a -> -a.
inline cmat parity(const ModeSystem& sys) {
    cmat p = cmat::Zero(sys.dimension(), sys.dimension());
    for (Eigen::Index i = 0; i < sys.dimension(); ++i)
        p(i, i) = (sys.total_occupation(i) % 2 == 0) ? 1.0 : -1.0;
    return p;
}

/// Probability mass sitting on states with some mode at the cutoff level,
/// where ladder truncation corrupts the dynamics.
inline double boundary_occupation_probability(const ModeSystem& sys, const cvec& v) {
    if (v.size() != sys.dimension())
        throw DimensionMismatch("boundary_occupation_probability: dimension mismatch");
    double mass = 0.0;
    for (Eigen::Index i = 0; i < sys.dimension(); ++i) {
        for (int m = 0; m < sys.modes; ++m) {
            if (sys.occupation(i, m) == sys.cutoff.n_max) {
                mass += std::norm(v[i]);
                break;
            }
        }
    }
    return mass;
}

} // namespace qmod::fock
