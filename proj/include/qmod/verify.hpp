#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmod/entanglement.hpp"
#include "qmod/fock.hpp"
#include "qmod/linalg.hpp"
#include "qmod/modular.hpp"
#include "qmod/random.hpp"
#include "qmod/susy.hpp"
#include "qmod/table.hpp"
#include "qmod/udw.hpp"

namespace qmod::verify {

struct CheckResult {
    std::string module;
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct SuiteConfig {
    std::uint64_t seed = 42;
    double tolerance_override = 0.0; // > 0 replaces every check tolerance
    int instances = 12;              // randomized modular instances
    int fock_n_max = 16;
    std::vector<int> weyl_cutoffs{8, 16, 24};
    double udw_r = 1.0;
    double udw_hh = 0.25;
    int udw_n_max = 16;
};

namespace detail {

inline void add(std::vector<CheckResult>& out, const SuiteConfig& cfg, std::string module,
                std::string name, double residual, double tolerance, std::string note = "") {
    if (cfg.tolerance_override > 0)
        tolerance = cfg.tolerance_override;
    out.push_back({std::move(module), std::move(name), residual, tolerance,
                   residual <= tolerance, std::move(note)});
}

inline double spectral_norm(const cmat& m) {
    Eigen::JacobiSVD<cmat> svd(m);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

inline void linalg_checks(std::vector<CheckResult>& out, const SuiteConfig& cfg, Rng& rng) {
    double worst = 0.0;
    for (int it = 0; it < 5; ++it) {
        cmat a = rng.matrix(2, 3), b = rng.matrix(3, 2), c = rng.matrix(2, 2);
        worst = std::max(worst, (kron(kron(a, b), c) - kron(a, kron(b, c))).norm());
        const complex lam = rng.cnormal();
        worst = std::max(worst, (kron(lam * a, b) - lam * kron(a, b)).norm());
    }
    add(out, cfg, "linalg", "kron associativity and bilinearity", worst, 1e-12);

    worst = 0.0;
    for (Eigen::Index n : {4, 7}) {
        cmat h = rng.hermitian(n);
        Spectrum s = hermitian_eig(h);
        worst = std::max(worst,
                         (s.eigenvectors.adjoint() * s.eigenvectors - cmat::Identity(n, n)).norm());
        cmat rec = s.eigenvectors * s.eigenvalues.asDiagonal().toDenseMatrix().cast<complex>() *
                   s.eigenvectors.adjoint();
        worst = std::max(worst, (rec - h).norm());
    }
    add(out, cfg, "linalg", "spectrum orthonormality and reconstruction", worst, 1e-12);

    worst = 0.0;
    for (Eigen::Index n : {3, 6}) {
        cmat p = rng.psd(n);
        cmat q = psd_sqrt(p);
        worst = std::max(worst, (q * q - p).norm());
    }
    add(out, cfg, "linalg", "psd square root squares back", worst, 1e-10);

    worst = 0.0;
    for (Eigen::Index n : {3, 5}) {
        AntilinearOperator s{rng.invertible(n)};
        auto [j, delta] = antilinear_polar(s);
        worst = std::max(worst, (j.matrix() * psd_sqrt(delta).conjugate() - s.matrix()).norm());
        worst = std::max(
            worst, (j.matrix().adjoint() * j.matrix() - cmat::Identity(n, n)).norm());
    }
    add(out, cfg, "linalg", "antilinear polar reconstruction", worst, 1e-10);

    worst = 0.0;
    for (Eigen::Index n : {3, 5}) {
        cmat a = rng.invertible(n, 50.0);
        AntilinearOperator s{a * a.conjugate().inverse()};
        auto [j, delta] = antilinear_polar(s);
        worst = std::max(worst, (j.squared() - cmat::Identity(n, n)).norm());
        Spectrum sp = hermitian_eig(delta);
        cmat inv_sqrt = spectral_function(sp, [](double l) { return 1.0 / std::sqrt(l); });
        worst = std::max(worst, (j.sandwich(psd_sqrt(delta)) - inv_sqrt).norm());
    }
    add(out, cfg, "linalg", "involutive polar class: J^2 = I and inversion", worst, 1e-10);
}

inline void fock_checks(std::vector<CheckResult>& out, const SuiteConfig& cfg) {
    fock::ModeSystem sys{2, fock::FockCutoff{6}};
    cmat a0 = fock::annihilation(sys, 0), a1 = fock::annihilation(sys, 1);
    double worst = (a0 * a1 - a1 * a0).norm();
    worst = std::max(worst, (a0 * a1.adjoint() - a1.adjoint() * a0).norm());
    add(out, cfg, "fock", "cross-mode CCR exact", worst, 1e-14);

    cmat p = fock::occupation_projector(sys, sys.cutoff.n_max - 1);
    cmat diag = a0 * a0.adjoint() - a0.adjoint() * a0;
    add(out, cfg, "fock", "number commutator on the safe subspace",
        ((diag - cmat::Identity(sys.dimension(), sys.dimension())) * p).norm(), 1e-12);

    // Weyl relation residual must fall strictly as the cutoff grows
    const complex c(0.7, 0.0), d(0.0, 0.7);
    std::vector<double> residuals;
    std::string note;
    for (int n_max : cfg.weyl_cutoffs) {
        fock::ModeSystem one{1, fock::FockCutoff{n_max}};
        cvec vc(1), vd(1), vsum(1);
        vc << c;
        vd << d;
        vsum << c + d;
        const double im = std::imag(std::conj(c) * d);
        cmat lhs = fock::weyl(one, vc) * fock::weyl(one, vd);
        cmat rhs = std::exp(complex(0, -im / 2.0)) * fock::weyl(one, vsum);
        cmat restricted = (lhs - rhs) * fock::occupation_projector(one, n_max / 2);
        residuals.push_back(spectral_norm(restricted));
        note += (note.empty() ? "" : " > ") + table::format_double(residuals.back());
    }
    bool monotone = true;
    for (size_t i = 0; i + 1 < residuals.size(); ++i)
        monotone = monotone && residuals[i] > residuals[i + 1];
    add(out, cfg, "fock", "Weyl relation residual decreases with cutoff", monotone ? 0.0 : 1.0,
        0.5, note);

    fock::ModeSystem big{1, fock::FockCutoff{cfg.fock_n_max}};
    worst = 0.0;
    for (double norm2 : {0.25, 1.0}) {
        cvec cv(1);
        cv << std::sqrt(norm2);
        cmat u = unitary_from_hermitian(fock::dephasing_field(big, cv), 1.0);
        worst = std::max(worst,
                         std::abs(fock::vacuum_expectation(big, u) - std::exp(-0.5 * norm2)));
    }
    add(out, cfg, "fock", "vacuum Gaussianity", worst, 1e-6);
}

inline void modular_checks(std::vector<CheckResult>& out, const SuiteConfig& cfg, Rng& rng) {
    std::vector<double> per_property(7, 0.0);
    std::vector<std::string> names;
    for (int it = 0; it < cfg.instances; ++it) {
        const int dim = 4 + it % 6;
        modular::StandardFormInstance inst = modular::random_standard_form_instance(dim, rng);
        modular::ModularData md = modular::tomita(inst.algebra, inst.omega);
        modular::PropertyReport rep = modular::verify_modular_properties(md, inst.algebra);
        if (names.empty())
            for (const auto& item : rep.items)
                names.push_back(item.name);
        for (size_t i = 0; i < rep.items.size(); ++i)
            per_property[i] = std::max(per_property[i], rep.items[i].residual);
    }
    for (size_t i = 0; i < names.size(); ++i)
        add(out, cfg, "modular", names[i], per_property[i], 1e-9);

    // cyclic-separating duality across a mix of vectors
    modular::AlgebraBasis alice = modular::generate_algebra(
        {kron(pauli_x(), cmat::Identity(2, 2)), kron(pauli_z(), cmat::Identity(2, 2))}, 4);
    modular::AlgebraBasis bob = modular::commutant(alice);
    bool duality = true;
    for (int it = 0; it < 8; ++it) {
        cvec v = (it % 2 == 0) ? rng.state(4) : cvec::Unit(4, it % 4);
        duality = duality && (modular::is_cyclic(alice, v) == modular::is_separating(bob, v));
    }
    add(out, cfg, "modular", "cyclic-separating duality", duality ? 0.0 : 1.0, 0.5);

    modular::StandardFormInstance inst = modular::random_standard_form_instance(6, rng);
    modular::AlgebraBasis cc = modular::commutant(modular::commutant(inst.algebra));
    double worst = (cc.size() == inst.algebra.size()) ? 0.0 : 1.0;
    for (const cmat& x : inst.algebra.elements)
        worst = std::max(worst, cc.projection_residual(x));
    add(out, cfg, "modular", "double commutant restores the algebra", worst, 1e-9);
}

inline void entanglement_checks(std::vector<CheckResult>& out, const SuiteConfig& cfg, Rng& rng) {
    double worst = 0.0;
    for (int it = 0; it < 50; ++it) {
        ent::TwoQubitState psi{rng.state(4)};
        worst = std::max(worst, std::abs(ent::wootters_concurrence(ent::TwoQubitDensity::pure(psi)).value -
                                         ent::concurrence_pure(psi).value));
    }
    add(out, cfg, "entanglement", "Wootters equals the pure formula on pure states", worst, 1e-9);

    worst = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double alpha = i / 10.0;
        const double beta = std::sqrt(1.0 - alpha * alpha);
        cvec v = cvec::Zero(4);
        v[0] = alpha;
        v[3] = beta;
        worst = std::max(worst, std::abs(ent::concurrence_pure(ent::TwoQubitState{v}).value -
                                         2.0 * alpha * beta));
    }
    add(out, cfg, "entanglement", "Schmidt-state concurrence is 2|alpha beta|", worst, 1e-12);

    worst = 0.0;
    for (int it = 0; it < 10; ++it) {
        cmat rho = rng.density(4);
        cmat local = kron(rng.unitary(2), rng.unitary(2));
        worst = std::max(worst, std::abs(ent::wootters_concurrence(ent::TwoQubitDensity{rho}).value -
                                         ent::wootters_concurrence(
                                             ent::TwoQubitDensity{local * rho * local.adjoint()})
                                             .value));
    }
    add(out, cfg, "entanglement", "local-unitary invariance", worst, 1e-9);

    worst = 0.0;
    const double tsirelson = 2.0 * std::sqrt(2.0);
    for (int it = 0; it < 50; ++it) {
        ent::BellSettings s{rng.uniform(0, 7), rng.uniform(0, 7), rng.uniform(0, 7),
                            rng.uniform(0, 7)};
        Spectrum sp = hermitian_eig(ent::chsh_operator(s));
        worst = std::max(worst, std::max(sp.eigenvalues.maxCoeff() - tsirelson,
                                         -tsirelson - sp.eigenvalues.minCoeff()));
    }
    add(out, cfg, "entanglement", "CHSH spectrum within the Tsirelson bound",
        std::max(worst, 0.0), 1e-9);

    cvec bell = cvec::Zero(4);
    bell[0] = bell[3] = 1 / std::sqrt(2.0);
    auto [sb, vb] = ent::maximize_chsh(ent::TwoQubitState{bell});
    add(out, cfg, "entanglement", "optimizer saturates 2 sqrt(2) on the Bell state",
        std::abs(vb - tsirelson), 1e-6);

    worst = 0.0;
    for (int it = 0; it < 5; ++it) {
        ent::TwoQubitState psi{rng.state(4)};
        auto [s, v] = ent::maximize_chsh(psi, 12, 40);
        worst = std::max(worst, v - ent::max_violation_from_concurrence(
                                        ent::concurrence_pure(psi)));
    }
    add(out, cfg, "entanglement", "maximized CHSH below the concurrence bound",
        std::max(worst, 0.0), 1e-6);
}

inline void susy_checks(std::vector<CheckResult>& out, const SuiteConfig& cfg) {
    susy::SusyModel model{fock::FockCutoff{8}};
    susy::SuperchargeSet q = susy::build_supercharges(model);
    double worst = (q.q_a * q.q_a).norm();
    worst = std::max(worst, (q.q_b * q.q_b).norm());
    worst = std::max(worst, (q.q_a * q.q_b_dag - q.q_b_dag * q.q_a).norm());
    worst = std::max(worst, (q.q_a_dag * q.q_b - q.q_b * q.q_a_dag).norm());
    add(out, cfg, "susy", "nilpotency and spin-matched cross commutators", worst, 1e-14);

    cmat ha = susy::hamiltonian(model, susy::Sector::A);
    worst = 0.0;
    for (int k = 1; k <= 6; ++k) {
        cvec up = cvec::Zero(model.dimension());
        up[model.index(k, 0, 0)] = 1.0;
        cvec down = cvec::Zero(model.dimension());
        down[model.index(k - 1, 0, 1)] = 1.0;
        worst = std::max(worst, (ha * up - double(k) * up).norm());
        worst = std::max(worst, (ha * down - double(k) * down).norm());
    }
    add(out, cfg, "susy", "supermultiplet degeneracy E = hbar omega k", worst, 1e-12);

    add(out, cfg, "susy", "conjugation intertwines the sectors",
        susy::verify_intertwining(model).max_residual(), 1e-12);

    susy::SusyModel small{fock::FockCutoff{4}};
    susy::SuperchargeSet qs = susy::build_supercharges(small);
    modular::AlgebraBasis b_algebra =
        modular::generate_algebra({qs.q_b, qs.q_b_dag}, small.dimension());
    const complex kappa(0.37, 0.21);
    cmat u = unitary_from_hermitian(kappa * qs.q_a + std::conj(kappa) * qs.q_a_dag, 1.0);
    cmat moved = susy::j_susy(small).sandwich(u);
    add(out, cfg, "susy", "conjugated charge exponentials join the dual algebra",
        b_algebra.projection_residual(moved) / moved.norm(), 1e-9);

    worst = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double alpha = i / 10.0;
        const double beta = std::sqrt(1.0 - alpha * alpha);
        cvec phi = susy::supermultiplet_state(model, 2, 3, alpha, beta);
        worst = std::max(worst,
                         std::abs(susy::susy_concurrence(model, phi).value - 2.0 * alpha * beta));
    }
    add(out, cfg, "susy", "supermultiplet concurrence 2|alpha beta|", worst, 1e-10);

    cvec omega = cvec::Zero(model.dimension());
    omega[model.index(0, 0, 0)] = omega[model.index(0, 0, 1)] = 1 / std::sqrt(2.0);
    add(out, cfg, "susy", "conjugation fixes the symmetric vacuum",
        (susy::j_susy_apply(model, omega) - omega).norm(), 1e-14);
}

inline void udw_checks(std::vector<CheckResult>& out, const SuiteConfig& cfg) {
    udw::FieldModel model;
    udw::GaussianTestFunction fa{0.25, 0.0, {-2.5, 0, 0}, 1.0, 1.0};
    udw::GaussianTestFunction fb{0.25, 0.0, {+2.5, 0, 0}, 1.0, 1.0};

    udw::QuadratureResult qr = udw::inner_product_detail(model, fa, fa);
    add(out, cfg, "udw", "quadrature refinement stability", qr.last_delta, 1e-8);
    add(out, cfg, "udw", "mirror-symmetric symplectic overlap",
        std::abs(udw::symplectic_overlap(model, fa, fb)), 1e-8);

    double worst = 0.0;
    bool warned = false;
    std::string note;
    for (double r : {0.0, 0.5, cfg.udw_r}) {
        for (double hh : {0.0, cfg.udw_hh / 2, cfg.udw_hh}) {
            udw::UdwScenario sc;
            sc.r = r;
            sc.hh_override = hh;
            sc.n_max = cfg.udw_n_max;
            udw::ConcurrenceComparison cmp = udw::compare_concurrence(sc);
            worst = std::max(worst, cmp.max_spread());
            warned = warned || cmp.truncation_warning;
        }
    }
    if (warned)
        note = "TruncationWarning";
    add(out, cfg, "udw", "three-way concurrence agreement", worst, 1e-6, note);

    bool monotone = true;
    double prev = 2.0;
    for (double hh : {0.0, 0.1, 0.2, 0.35, 0.5}) {
        const double c = udw::udw_concurrence(0.7, hh).value;
        monotone = monotone && c < prev;
        prev = c;
    }
    add(out, cfg, "udw", "field damping is strictly monotone", monotone ? 0.0 : 1.0, 0.5);

    worst = 0.0;
    double bound_excess = 0.0;
    for (double r : {0.5, 1.0}) {
        for (double hh : {0.0, 0.25}) {
            auto [s, v] = udw::maximize_chsh_udw(r, hh);
            const double c = udw::udw_concurrence(r, hh).value;
            worst = std::max(worst, std::abs(v - 2.0 * std::sqrt(2.0) * c));
            bound_excess = std::max(bound_excess, v - 2.0 * std::sqrt(1.0 + c * c));
        }
    }
    add(out, cfg, "udw", "maximized CHSH equals 2 sqrt(2) C", worst, 1e-4);
    add(out, cfg, "udw", "CHSH below the concurrence bound", std::max(bound_excess, 0.0), 1e-9);

    Rng rng(cfg.seed + 1);
    worst = 0.0;
    for (int it = 0; it < 20; ++it) {
        const double r = rng.uniform(0, 2), hh = rng.uniform(0, 1);
        ent::TwoQubitDensity rho =
            udw::reduced_detector_density(udw::evolved_state_analytic(r, hh));
        worst = std::max(worst, std::abs(ent::wootters_concurrence(rho).value -
                                         udw::udw_concurrence(r, hh).value));
    }
    add(out, cfg, "udw", "X-state Wootters oracle", worst, 1e-10);
}

} // namespace detail

/// Every module's invariant suite under one seed and one tolerance set.
inline std::vector<CheckResult> run_suite(const SuiteConfig& cfg) {
    std::vector<CheckResult> out;
    Rng rng(cfg.seed);
    detail::linalg_checks(out, cfg, rng);
    detail::fock_checks(out, cfg);
    detail::modular_checks(out, cfg, rng);
    detail::entanglement_checks(out, cfg, rng);
    detail::susy_checks(out, cfg);
    detail::udw_checks(out, cfg);
    return out;
}

inline bool all_pass(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass)
            return false;
    return true;
}

} // namespace qmod::verify
