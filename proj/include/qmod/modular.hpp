#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "qmod/linalg.hpp"
#include "qmod/random.hpp"

namespace qmod::modular {

/// Hilbert-Schmidt inner product tr(A^dag B).
inline complex hs_inner(const cmat& a, const cmat& b) {
    return (a.adjoint() * b).trace();
}

namespace detail {

/// Modified Gram-Schmidt over the HS inner product; keeps directions whose
/// residual after projection exceeds `tol`. Inputs are normalized first, and
/// candidates with norm below `drop` are treated as zero. Two projection
/// passes keep the basis orthonormal to machine precision.
inline void project_out(const std::vector<cmat>& basis, cmat& r) {
    for (int pass = 0; pass < 2; ++pass)
        for (const cmat& b : basis)
            r -= hs_inner(b, r) * b;
}

constexpr double kDropThreshold = 1e-9;

inline bool try_add(std::vector<cmat>& basis, cmat candidate, double tol) {
    const double nrm = candidate.norm();
    if (nrm < kDropThreshold)
        return false;
    candidate /= nrm;
    project_out(basis, candidate);
    const double res = candidate.norm();
    if (res <= tol)
        return false;
    basis.push_back(candidate / res);
    return true;
}

} // namespace detail

/// An orthonormalized spanning set of a finite-dimensional operator algebra
/// on a `dim`-dimensional Hilbert space.
struct AlgebraBasis {
    Eigen::Index dim = 0;
    std::vector<cmat> elements;
    bool contains_identity = false;

    Eigen::Index size() const { return static_cast<Eigen::Index>(elements.size()); }

    /// Orthonormalize a raw spanning set without closing it.
    static AlgebraBasis from_span(Eigen::Index dim, const std::vector<cmat>& mats,
                                  double tol = Tolerances{}.closure) {
        AlgebraBasis out;
        out.dim = dim;
        for (const cmat& m : mats) {
            if (m.rows() != dim || m.cols() != dim)
                throw DimensionMismatch("AlgebraBasis::from_span: element has wrong shape");
            detail::try_add(out.elements, m, tol);
        }
        out.contains_identity =
            out.projection_residual(cmat::Identity(dim, dim)) <= tol * std::sqrt(double(dim));
        return out;
    }

    /// Norm of the component of `a` outside the span (absolute).
    double projection_residual(const cmat& a) const {
        cmat r = a;
        detail::project_out(elements, r);
        return r.norm();
    }

    bool contains(const cmat& a, double tol) const {
        return projection_residual(a) <= tol * std::max(1.0, a.norm());
    }

    double adjoint_closure_residual() const {
        double worst = 0.0;
        for (const cmat& a : elements)
            worst = std::max(worst, projection_residual(a.adjoint()));
        return worst;
    }

    double product_closure_residual() const {
        double worst = 0.0;
        for (const cmat& a : elements)
            for (const cmat& b : elements)
                worst = std::max(worst, projection_residual(a * b));
        return worst;
    }
};

/// Span closure of all words in the generators, their adjoints and the
/// identity. Word length is capped; in finite dimensions the span stabilizes
/// long before the cap for any reasonable input.
inline AlgebraBasis generate_algebra(const std::vector<cmat>& generators, Eigen::Index dim,
                                     double tol = Tolerances{}.closure,
                                     int max_word_length = 8) {
    std::vector<cmat> letters;
    for (const cmat& g : generators) {
        if (g.rows() != dim || g.cols() != dim)
            throw DimensionMismatch("generate_algebra: generator has wrong shape");
        letters.push_back(g);
        letters.push_back(g.adjoint());
    }

    AlgebraBasis out;
    out.dim = dim;
    out.contains_identity = true;
    detail::try_add(out.elements, cmat::Identity(dim, dim), tol);

    std::vector<cmat> frontier;
    for (const cmat& l : letters)
        if (detail::try_add(out.elements, l, tol))
            frontier.push_back(out.elements.back());

    for (int len = 1; len < max_word_length && !frontier.empty(); ++len) {
        std::vector<cmat> next;
        for (const cmat& l : letters) {
            for (const cmat& f : frontier) {
                if (detail::try_add(out.elements, l * f, tol))
                    next.push_back(out.elements.back());
            }
        }
        frontier = std::move(next);
    }
    return out;
}

/// All operators commuting with every basis element, obtained as the null
/// space of the stacked equations [X, A_k] = 0. For an adjoint-closed input
/// the result is itself a von Neumann algebra.
inline AlgebraBasis commutant(const AlgebraBasis& basis, double rank_tol = Tolerances{}.rank) {
    const Eigen::Index n = basis.dim;
    const Eigen::Index d = basis.size();
    cmat k(d * n * n, n * n);
    const cmat id = cmat::Identity(n, n);
    for (Eigen::Index i = 0; i < d; ++i) {
        const cmat& a = basis.elements[static_cast<size_t>(i)];
        // column-major vec: vec([X, A]) = (A^T (x) I - I (x) A) vec(X)
        k.middleRows(i * n * n, n * n) = kron(a.transpose(), id) - kron(id, a);
    }
    Eigen::JacobiSVD<cmat> svd(k, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = rank_tol * std::max(sv.size() ? sv(0) : 0.0, 1.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff)
            ++rank;

    AlgebraBasis out;
    out.dim = n;
    for (Eigen::Index i = rank; i < n * n; ++i) {
        cvec v = svd.matrixV().col(i);
        out.elements.push_back(Eigen::Map<const cmat>(v.data(), n, n));
    }
    out.contains_identity =
        out.projection_residual(cmat::Identity(n, n)) <= rank_tol * std::sqrt(double(n));
    return out;
}

/// Double-commutant test. A valid von Neumann algebra basis must be a
/// *-algebra to begin with; spans that are not adjoint- and product-closed
/// are rejected outright, since the double-commutant characterization only
/// applies to unital *-algebras.
inline bool bicommutant_check(const AlgebraBasis& basis, double tol = Tolerances{}.closure) {
    if (!basis.contains_identity)
        return false;
    if (basis.adjoint_closure_residual() > tol * 10)
        return false;
    if (basis.product_closure_residual() > tol * 10)
        return false;
    AlgebraBasis cc = commutant(commutant(basis));
    if (cc.size() != basis.size())
        return false;
    for (const cmat& a : basis.elements)
        if (cc.projection_residual(a) > tol * 10)
            return false;
    for (const cmat& a : cc.elements)
        if (basis.projection_residual(a) > tol * 10)
            return false;
    return true;
}

/// Columns A_k |omega> for all basis elements.
inline cmat action_matrix(const AlgebraBasis& basis, const cvec& omega) {
    cmat x(basis.dim, basis.size());
    for (Eigen::Index k = 0; k < basis.size(); ++k)
        x.col(k) = basis.elements[static_cast<size_t>(k)] * omega;
    return x;
}

/// |omega> is cyclic when {A |omega>} spans the Hilbert space.
inline bool is_cyclic(const AlgebraBasis& basis, const cvec& omega,
                      double rank_tol = Tolerances{}.rank) {
    Eigen::JacobiSVD<cmat> svd(action_matrix(basis, omega));
    const auto& sv = svd.singularValues();
    if (sv.size() == 0)
        return false;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rank_tol * sv(0))
            ++rank;
    return rank == basis.dim;
}

/// |omega> is separating when A |omega> = 0 forces A = 0 on the span.
inline bool is_separating(const AlgebraBasis& basis, const cvec& omega,
                          double rank_tol = Tolerances{}.rank) {
    Eigen::JacobiSVD<cmat> svd(action_matrix(basis, omega));
    const auto& sv = svd.singularValues();
    if (sv.size() == 0)
        return false;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rank_tol * sv(0))
            ++rank;
    return rank == basis.size();
}

/// The triple (S, J, Delta) together with the cyclic separating vector it was
/// computed from.
struct ModularData {
    AntilinearOperator s;
    AntilinearOperator j;
    cmat delta;
    cvec omega;
};

/// Tomita construction: solve S A_k|omega> = A_k^* |omega> for the matrix of
/// the antilinear involution S, then split it with the antilinear polar
/// decomposition into J and Delta.
inline ModularData tomita(const AlgebraBasis& basis, const cvec& omega,
                          const Tolerances& tol = {}) {
    if (omega.size() != basis.dim)
        throw DimensionMismatch("tomita: omega does not match the algebra's Hilbert space");
    cvec w = omega / omega.norm();

    cmat x = action_matrix(basis, w);
    cmat y(basis.dim, basis.size());
    for (Eigen::Index k = 0; k < basis.size(); ++k)
        y.col(k) = basis.elements[static_cast<size_t>(k)].adjoint() * w;

    Eigen::JacobiSVD<cmat> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol.rank * sv(0))
            ++rank;
    if (rank < basis.dim)
        throw NotCyclic("tomita: omega is not cyclic for the algebra");
    if (rank < basis.size())
        throw NotSeparating("tomita: omega is not separating for the algebra");
    const double cond = sv(0) / sv(sv.size() - 1);
    if (cond > tol.cond_bound)
        throw IllConditioned("tomita: action matrix condition number " + std::to_string(cond) +
                             " exceeds bound");

    // M conj(X) = Y  =>  M = Y conj(pinv(X)), pinv via the SVD above
    cmat sigma_inv = cmat::Zero(rank, rank);
    for (Eigen::Index i = 0; i < rank; ++i)
        sigma_inv(i, i) = 1.0 / sv(i);
    cmat pinv = svd.matrixV().leftCols(rank) * sigma_inv * svd.matrixU().leftCols(rank).adjoint();
    AntilinearOperator s{y * pinv.conjugate()};

    auto [j, delta] = antilinear_polar(s, tol.cond_bound);
    return ModularData{std::move(s), std::move(j), std::move(delta), std::move(w)};
}

struct PropertyReport {
    struct Item {
        std::string name;
        double residual;
    };
    std::vector<Item> items;

    double max_residual() const {
        double worst = 0.0;
        for (const auto& it : items)
            worst = std::max(worst, it.residual);
        return worst;
    }

    bool all_below(double tol) const { return max_residual() <= tol; }
};

/// Residual checks for the defining relations of the modular data: the
/// involution and self-adjointness of J, invariance of omega, the inversion
/// J Delta^{1/2} J = Delta^{-1/2}, mapping of the algebra into its commutant,
/// and invariance under the modular flow Delta^{it}.
inline PropertyReport verify_modular_properties(const ModularData& md, const AlgebraBasis& basis,
                                                const Tolerances& tol = {}) {
    PropertyReport report;
    const Eigen::Index n = basis.dim;
    const cmat id = cmat::Identity(n, n);

    report.items.push_back({"J^2 = I", (md.j.squared() - id).norm()});
    report.items.push_back({"J = J*", (md.j.matrix() - md.j.matrix().transpose()).norm()});
    report.items.push_back({"J omega = omega", (md.j.apply(md.omega) - md.omega).norm()});
    report.items.push_back({"Delta omega = omega", (md.delta * md.omega - md.omega).norm()});

    Spectrum sp = hermitian_eig(md.delta, 1e-8 * std::max(1.0, md.delta.norm()));
    cmat sqrt_delta = spectral_function(sp, [](double l) { return std::sqrt(l); });
    cmat inv_sqrt_delta = spectral_function(sp, [](double l) { return 1.0 / std::sqrt(l); });
    report.items.push_back(
        {"J Delta^{1/2} J = Delta^{-1/2}", (md.j.sandwich(sqrt_delta) - inv_sqrt_delta).norm()});

    AlgebraBasis comm = commutant(basis);
    double worst = 0.0;
    for (const cmat& a : basis.elements)
        worst = std::max(worst, comm.projection_residual(md.j.sandwich(a)));
    report.items.push_back({"J A J in commutant", worst});

    worst = 0.0;
    for (double t : {0.3, 1.0, 2.7}) {
        cmat flow = spectral_function(sp, [t](double l) { return std::pow(complex(l, 0), complex(0, t)); });
        for (const cmat& a : basis.elements)
            worst = std::max(worst, basis.projection_residual(flow * a * flow.adjoint()));
    }
    report.items.push_back({"Delta^{it} A Delta^{-it} in algebra", worst});

    (void)tol;
    return report;
}

/// A randomly generated von Neumann algebra in standard form together with a
/// cyclic separating vector. The algebra is unitarily conjugated from a block
/// structure sum_i M_{d_i} (x) I_{d_i}, which admits cyclic separating
/// vectors exactly when each block multiplicity matches its size.
struct StandardFormInstance {
    AlgebraBasis algebra;
    cvec omega;
    std::vector<int> block_dims;
};

/// All multisets {d_i} with sum d_i^2 = n, d_i >= 1, in descending order.
inline std::vector<std::vector<int>> block_structures(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int remaining, int max_d) -> void {
        if (remaining == 0) {
            out.push_back(cur);
            return;
        }
        for (int d = std::min(max_d, static_cast<int>(std::sqrt(double(remaining)))); d >= 1; --d) {
            cur.push_back(d);
            self(self, remaining - d * d, d);
            cur.pop_back();
        }
    };
    rec(rec, n, n);
    return out;
}

inline StandardFormInstance random_standard_form_instance(int dim, Rng& rng,
                                                          double tol = Tolerances{}.closure) {
    auto structures = block_structures(dim);
    const auto& blocks =
        structures[static_cast<size_t>(rng.integer(0, static_cast<std::int64_t>(structures.size()) - 1))];

    Eigen::Index expected_size = 0;
    for (int d : blocks)
        expected_size += d * d;

    const cmat u = rng.unitary(dim);

    for (int attempt = 0; attempt < 8; ++attempt) {
        // two generic block elements generate the full block algebra
        std::vector<cmat> generators;
        for (int g = 0; g < 2; ++g) {
            cmat block = cmat::Zero(dim, dim);
            Eigen::Index off = 0;
            for (int d : blocks) {
                block.block(off, off, d * d, d * d) = kron(rng.matrix(d, d), cmat::Identity(d, d));
                off += d * d;
            }
            generators.push_back(u * block * u.adjoint());
        }
        AlgebraBasis algebra = generate_algebra(generators, dim, tol);
        if (algebra.size() != expected_size)
            continue;

        cvec omega = cvec::Zero(dim);
        Eigen::Index off = 0;
        for (int d : blocks) {
            cmat w = rng.invertible(d, 30.0);
            for (Eigen::Index p = 0; p < d; ++p)
                for (Eigen::Index q = 0; q < d; ++q)
                    omega[off + p * d + q] = w(p, q);
            off += d * d;
        }
        omega = u * omega;
        omega /= omega.norm();
        return StandardFormInstance{std::move(algebra), std::move(omega),
                                    std::vector<int>(blocks.begin(), blocks.end())};
    }
    throw Error("random_standard_form_instance: generator closure failed to reach full block algebra");
}

} // namespace qmod::modular
