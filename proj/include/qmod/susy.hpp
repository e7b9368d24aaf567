#pragma once

#include <cmath>
#include <string>

#include "qmod/entanglement.hpp"
#include "qmod/fock.hpp"
#include "qmod/linalg.hpp"
#include "qmod/modular.hpp"

namespace qmod::susy {

/// Two bosonic modes sharing one cutoff, tensored with a spin-1/2 factor:
/// H = F_a (x) F_b (x) C^2. Basis index (n_a L + n_b) * 2 + s with
/// L = n_max + 1 and s = 0 for spin-up (1,0), s = 1 for spin-down (0,1).
struct SusyModel {
    fock::FockCutoff cutoff;
    double hbar_omega = 1.0;

    Eigen::Index levels() const { return cutoff.n_max + 1; }
    Eigen::Index dimension() const { return 2 * levels() * levels(); }

    Eigen::Index index(int n_a, int n_b, int spin) const {
        return (n_a * levels() + n_b) * 2 + spin;
    }
};

/// A (x) B (x) S on F_a (x) F_b (x) C^2.
inline cmat embed(const SusyModel& model, const cmat& a, const cmat& b, const cmat& s) {
    return kron(kron(a, b), s);
}

struct SuperchargeSet {
    cmat q_a, q_a_dag, q_b, q_b_dag;
};

/// Q^a = a (x) I (x) sigma_-, Q^b = I (x) b (x) sigma_+, and their adjoints.
/// Nilpotency and the a/b commutativity survive truncation exactly.
inline SuperchargeSet build_supercharges(const SusyModel& model) {
    const cmat ladder = fock::single_mode_annihilation(model.levels());
    const cmat id = cmat::Identity(model.levels(), model.levels());
    SuperchargeSet set;
    set.q_a = embed(model, ladder, id, sigma_minus());
    set.q_a_dag = embed(model, ladder.adjoint(), id, sigma_plus());
    set.q_b = embed(model, id, ladder, sigma_plus());
    set.q_b_dag = embed(model, id, ladder.adjoint(), sigma_minus());
    return set;
}

enum class Sector { A, B };

/// H = hbar omega {Q, Q^dag} for the chosen sector.
inline cmat hamiltonian(const SusyModel& model, Sector which) {
    SuperchargeSet q = build_supercharges(model);
    const cmat& op = (which == Sector::A) ? q.q_a : q.q_b;
    const cmat& op_dag = (which == Sector::A) ? q.q_a_dag : q.q_b_dag;
    return model.hbar_omega * (op * op_dag + op_dag * op);
}

/// The mode-swap spin-flip conjugation,
/// J |n,m> (x) (alpha, beta) = |m,n> (x) (conj beta, conj alpha).
inline cmat j_susy_matrix(const SusyModel& model) {
    cmat m = cmat::Zero(model.dimension(), model.dimension());
    for (int na = 0; na <= model.cutoff.n_max; ++na)
        for (int nb = 0; nb <= model.cutoff.n_max; ++nb)
            for (int s = 0; s < 2; ++s)
                m(model.index(nb, na, 1 - s), model.index(na, nb, s)) = 1.0;
    return m;
}

inline AntilinearOperator j_susy(const SusyModel& model) {
    return AntilinearOperator{j_susy_matrix(model)};
}

inline cvec j_susy_apply(const SusyModel& model, const cvec& v) {
    if (v.size() != model.dimension())
        throw DimensionMismatch("j_susy_apply: vector does not match the model dimension");
    cvec out(v.size());
    for (int na = 0; na <= model.cutoff.n_max; ++na)
        for (int nb = 0; nb <= model.cutoff.n_max; ++nb)
            for (int s = 0; s < 2; ++s)
                out[model.index(nb, na, 1 - s)] = std::conj(v[model.index(na, nb, s)]);
    return out;
}

/// Projector onto occupations <= n_max - 1 in both modes, where the swapped
/// ladder identities are free of truncation artifacts.
inline cmat safe_projector(const SusyModel& model) {
    cmat p = cmat::Zero(model.dimension(), model.dimension());
    for (int na = 0; na < model.cutoff.n_max; ++na)
        for (int nb = 0; nb < model.cutoff.n_max; ++nb)
            for (int s = 0; s < 2; ++s) {
                const Eigen::Index i = model.index(na, nb, s);
                p(i, i) = 1.0;
            }
    return p;
}

/// Residuals of the conjugation identities J Q^a J = Q^b, J Q^a* J = Q^b*,
/// J H^a J = H^b on the truncation-safe subspace.
inline modular::PropertyReport verify_intertwining(const SusyModel& model) {
    SuperchargeSet q = build_supercharges(model);
    AntilinearOperator j = j_susy(model);
    cmat p = safe_projector(model);

    modular::PropertyReport report;
    report.items.push_back({"J Q^a J = Q^b", ((j.sandwich(q.q_a) - q.q_b) * p).norm()});
    report.items.push_back(
        {"J Q^a* J = Q^b*", ((j.sandwich(q.q_a_dag) - q.q_b_dag) * p).norm()});
    report.items.push_back({"J H^a J = H^b",
                            ((j.sandwich(hamiltonian(model, Sector::A)) -
                              hamiltonian(model, Sector::B)) *
                             p)
                                .norm()});
    return report;
}

/// |Phi> = alpha |k, l-1> (x) up + beta |l-1, k> (x) down, normalized.
inline cvec supermultiplet_state(const SusyModel& model, int k, int l, complex alpha,
                                 complex beta) {
    if (k < 0 || k > model.cutoff.n_max - 1 || l < 1 || l > model.cutoff.n_max - 1)
        throw InvalidQuantumNumbers("supermultiplet_state: (k, l) outside the truncation-safe range");
    const double nrm = std::sqrt(std::norm(alpha) + std::norm(beta));
    if (nrm == 0.0)
        throw InvalidQuantumNumbers("supermultiplet_state: amplitudes are both zero");
    cvec v = cvec::Zero(model.dimension());
    v[model.index(k, l - 1, 0)] = alpha / nrm;
    v[model.index(l - 1, k, 1)] += beta / nrm;
    return v;
}

/// |<Phi| J |Phi>| through the explicit conjugation; equals 2 |alpha beta|
/// for every supermultiplet state.
inline ent::ConcurrenceValue susy_concurrence(const SusyModel& model, const cvec& state) {
    return ent::modular_concurrence(state, j_susy(model));
}

} // namespace qmod::susy
