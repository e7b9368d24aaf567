#include <catch2/catch_amalgamated.hpp>

#include "qmod/random.hpp"
#include "qmod/udw.hpp"

using namespace qmod;
using namespace qmod::udw;

namespace {

FieldModel default_model() { return FieldModel{}; }

GaussianTestFunction gauss(double amp, double t0, double x, double st = 1.0, double sx = 1.0) {
    return GaussianTestFunction{amp, t0, {x, 0.0, 0.0}, st, sx};
}

std::pair<GaussianTestFunction, GaussianTestFunction> mirror_pair(double separation = 5.0) {
    return {gauss(0.25, 0.0, -separation / 2), gauss(0.25, 0.0, separation / 2)};
}

UdwScenario abstract_scenario(double r, double hh, int n_max = 16) {
    UdwScenario sc;
    sc.r = r;
    sc.hh_override = hh;
    sc.n_max = n_max;
    return sc;
}

} // namespace

TEST_CASE("smearing inner product scales bilinearly in the amplitude", "[udw]") {
    FieldModel model = default_model();
    GaussianTestFunction f = gauss(0.5, 0.0, 0.0);
    GaussianTestFunction f2 = f;
    f2.amplitude *= 2.0;
    const complex base = inner_product(model, f, f);
    REQUIRE(base.real() > 0.0);
    REQUIRE(std::abs(base.imag()) < 1e-14 * base.real());
    REQUIRE(std::abs(inner_product(model, f2, f2) - 4.0 * base) < 1e-10 * std::abs(base));
}

TEST_CASE("smearing inner product is conjugate symmetric", "[udw]") {
    FieldModel model = default_model();
    Rng rng(3);
    for (int it = 0; it < 5; ++it) {
        GaussianTestFunction f = gauss(rng.uniform(0.1, 1.0), rng.uniform(-1, 1),
                                       rng.uniform(-3, 3), rng.uniform(0.5, 1.5),
                                       rng.uniform(0.5, 1.5));
        GaussianTestFunction g = gauss(rng.uniform(0.1, 1.0), rng.uniform(-1, 1),
                                       rng.uniform(-3, 3), rng.uniform(0.5, 1.5),
                                       rng.uniform(0.5, 1.5));
        const complex fg = inner_product(model, f, g);
        const complex gf = inner_product(model, g, f);
        REQUIRE(std::abs(fg - std::conj(gf)) < 1e-12);
    }
}

TEST_CASE("time-shifted overlap decays monotonically", "[udw]") {
    FieldModel model = default_model();
    GaussianTestFunction f = gauss(1.0, 0.0, 0.0);
    double prev = std::abs(inner_product(model, f, f));
    for (double tau : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        GaussianTestFunction g = f;
        g.t0 = tau;
        const double cur = std::abs(inner_product(model, f, g));
        REQUIRE(cur < prev);
        prev = cur;
    }
}

TEST_CASE("symplectic overlap vanishes for symmetric configurations", "[udw]") {
    FieldModel model = default_model();
    GaussianTestFunction f = gauss(0.7, 0.2, 1.3);
    REQUIRE(symplectic_overlap(model, f, f) == 0.0);

    auto [fa, fb] = mirror_pair();
    REQUIRE(std::abs(symplectic_overlap(model, fa, fb)) < 1e-10);
}

TEST_CASE("symplectic overlap decays with spacelike separation", "[udw]") {
    FieldModel model = default_model();
    auto commutator_scale = [&](double separation) {
        GaussianTestFunction fa = gauss(1.0, 0.0, -separation / 2);
        GaussianTestFunction fb = gauss(1.0, 0.6, separation / 2);
        return std::abs(symplectic_overlap(model, fa, fb));
    };
    const double near = commutator_scale(1.0);
    const double far = commutator_scale(10.0);
    REQUIRE(near > 0.0);
    REQUIRE(far <= 1e-3 * near);
}

TEST_CASE("one-dimensional kernel needs a mass", "[udw]") {
    FieldModel model;
    model.spatial_dim = 1;
    model.mass = 0.0;
    GaussianTestFunction f = gauss(1.0, 0.0, 0.0);
    REQUIRE_THROWS_AS(inner_product(model, f, f), Unsupported);

    model.mass = 1.0;
    const complex v = inner_product(model, f, f);
    REQUIRE(v.real() > 0.0);
}

TEST_CASE("quadrature refinement is stable for the default pair", "[udw]") {
    FieldModel model = default_model();
    auto [fa, fb] = mirror_pair();
    QuadratureResult res = inner_product_detail(model, fa, fa);
    REQUIRE(res.last_delta < 1e-8);

    const complex at256 = inner_product_fixed(model, fa, fb, 256);
    const complex at512 = inner_product_fixed(model, fa, fb, 512);
    REQUIRE(std::abs(at512 - at256) < 1e-8 * std::max(std::abs(at512), 1e-12));
}

TEST_CASE("initial detector states", "[udw]") {
    REQUIRE_THROWS_AS(initial_state(-0.1), NegativeParameter);

    cvec sep = detector_amplitudes(0.0);
    REQUIRE(std::abs(sep[3] - 1.0) < 1e-15); // |gg>
    REQUIRE(sep.segment(0, 3).norm() == 0.0);

    cvec bell = detector_amplitudes(1.0);
    REQUIRE(std::abs(bell[0] - 1 / std::sqrt(2.0)) < 1e-15);
    REQUIRE(std::abs(bell[3] - 1 / std::sqrt(2.0)) < 1e-15);

    REQUIRE(std::abs(detector_amplitudes(3.7).norm() - 1.0) < 1e-15);
}

TEST_CASE("two-qubit conjugation", "[udw]") {
    // |00> with a complex amplitude maps to |11> with it conjugated
    cvec v = cvec::Zero(4);
    v[0] = complex(0.6, 0.8);
    cvec out = j_ab_apply(v);
    REQUIRE(std::abs(out[3] - complex(0.6, -0.8)) < 1e-15);
    REQUIRE(std::abs(out[0]) + std::abs(out[1]) + std::abs(out[2]) == 0.0);

    AntilinearOperator j = j_ab();
    REQUIRE((j.sandwich(kron(pauli_y(), cmat::Identity(2, 2))) -
             kron(cmat::Identity(2, 2), pauli_y()))
                .norm() < 1e-15);

    Rng rng(7);
    for (int it = 0; it < 10; ++it) {
        cvec w = rng.vector(4);
        REQUIRE((j_ab_apply(j_ab_apply(w)) - w).norm() == 0.0);
    }

    fock::ModeSystem sys{2, fock::FockCutoff{3}};
    AntilinearOperator jl = j_ab(sys);
    cvec big = rng.vector(4 * sys.dimension());
    REQUIRE((jl.apply(jl.apply(big)) - big).norm() == 0.0);
    REQUIRE_THROWS_AS(j_ab_apply(sys, rng.vector(7)), DimensionMismatch);
}

TEST_CASE("closed-form concurrence values", "[udw]") {
    REQUIRE(udw_concurrence(1.0, 0.0).value == Catch::Approx(1.0));
    REQUIRE(udw_concurrence(0.0, 0.7).value == Catch::Approx(0.0));
    REQUIRE(udw_concurrence(1.0, 0.25).value == Catch::Approx(std::exp(-0.5)).epsilon(1e-12));

    REQUIRE(isolated_concurrence(1.0).value == Catch::Approx(1.0));
    REQUIRE(isolated_concurrence(0.5).value == Catch::Approx(0.8).epsilon(1e-12));

    double prev = -1.0;
    for (double r = 0.0; r <= 1.0; r += 0.1) {
        const double c = isolated_concurrence(r).value;
        REQUIRE(c > prev);
        prev = c;
    }

    // damping is strictly monotone in <h,h>
    prev = 2.0;
    for (double hh : {0.0, 0.1, 0.2, 0.35, 0.5}) {
        const double c = udw_concurrence(0.7, hh).value;
        REQUIRE(c < prev);
        prev = c;
    }

    REQUIRE_THROWS_AS(udw_concurrence(-1.0, 0.0), NegativeParameter);
    REQUIRE_THROWS_AS(evolved_state_analytic(1.0, -0.1), NegativeParameter);
}

TEST_CASE("reduced detector density", "[udw]") {
    // hh = 0, r = 1: the pure Bell-type density survives
    ent::TwoQubitDensity bell = reduced_detector_density(evolved_state_analytic(1.0, 0.0));
    cvec amp = detector_amplitudes(1.0);
    REQUIRE((bell.rho - amp * amp.adjoint()).norm() < 1e-14);

    // X-state oracle: Wootters of the reduced density equals the closed form
    Rng rng(11);
    for (int it = 0; it < 20; ++it) {
        const double r = rng.uniform(0.0, 2.0);
        const double hh = rng.uniform(0.0, 1.0);
        ent::TwoQubitDensity rho = reduced_detector_density(evolved_state_analytic(r, hh));
        REQUIRE(std::abs(rho.rho.trace().real() - 1.0) < 1e-12);
        REQUIRE(std::abs(ent::wootters_concurrence(rho).value - udw_concurrence(r, hh).value) <
                1e-10);
    }
}

TEST_CASE("numeric evolution preserves the state when the coupling vanishes", "[udw]") {
    UdwScenario sc;
    sc.r = 0.8;
    sc.smearing = std::make_pair(gauss(0.0, 0.0, -1.0), gauss(0.0, 0.0, 1.0));
    sc.n_max = 6;
    DetectorPairState state = evolved_state_numeric(sc);
    cvec expected = kron(detector_amplitudes(0.8), fock::vacuum(*state.field));
    REQUIRE((*state.joint - expected).norm() < 1e-12);
}

TEST_CASE("numeric evolution matches the analytic branch structure", "[udw]") {
    for (double hh : {0.1, 0.5}) {
        UdwScenario sc = abstract_scenario(0.9, hh);
        DetectorPairState state = evolved_state_numeric(sc);
        REQUIRE(std::abs(state.joint->norm() - 1.0) < 1e-10);
        REQUIRE(state.hh == Catch::Approx(hh).margin(1e-12));

        // reference: single exponentials of the summed smear on each branch
        fock::ModeSystem sys = *state.field;
        TwoModeEmbedding emb = embed_abstract(hh);
        cmat phi_h = fock::dephasing_field(sys, emb.coeff_a + emb.coeff_b);
        cvec det = detector_amplitudes(sc.r);
        cvec ref = cvec::Zero(4 * sys.dimension());
        ref.segment(0, sys.dimension()) =
            det[0] * (unitary_from_hermitian(phi_h, -1.0) * fock::vacuum(sys));
        ref.segment(3 * sys.dimension(), sys.dimension()) =
            det[3] * (unitary_from_hermitian(phi_h, +1.0) * fock::vacuum(sys));
        REQUIRE(std::abs(state.joint->dot(ref)) >= 1.0 - 1e-6);
    }
}

TEST_CASE("numeric and analytic reduced densities agree for the smeared pair", "[udw]") {
    UdwScenario sc;
    sc.r = 1.0;
    sc.smearing = mirror_pair();
    sc.n_max = 16;
    DetectorPairState state = evolved_state_numeric(sc);
    REQUIRE_FALSE(state.truncation_warning);

    ent::TwoQubitDensity numeric = reduced_detector_density(state);
    ent::TwoQubitDensity analytic =
        reduced_detector_density(evolved_state_analytic(sc.r, state.hh));
    REQUIRE((numeric.rho - analytic.rho).norm() < 1e-8);
}

TEST_CASE("three-way concurrence agreement", "[udw]") {
    for (double r : {0.0, 0.5, 1.0}) {
        for (double hh : {0.0, 0.25, 0.5}) {
            ConcurrenceComparison cmp = compare_concurrence(abstract_scenario(r, hh));
            INFO("r=" << r << " hh=" << hh << " spread " << cmp.max_spread());
            REQUIRE(cmp.max_spread() < 1e-6);
        }
    }

    // smeared route: <h,h> comes out of the quadrature instead
    UdwScenario sc;
    sc.r = 0.75;
    sc.smearing = mirror_pair();
    sc.n_max = 16;
    ConcurrenceComparison cmp = compare_concurrence(sc);
    REQUIRE(cmp.max_spread() < 1e-6);
    REQUIRE(cmp.hh > 0.0);
}

TEST_CASE("field commutator stays at the symplectic-overlap scale", "[udw]") {
    UdwScenario sc;
    sc.smearing = mirror_pair();
    FieldModel model = default_model();
    TwoModeEmbedding emb = embed_pair(model, sc.smearing->first, sc.smearing->second);

    fock::ModeSystem sys{2, fock::FockCutoff{10}};
    cmat phi_a = fock::dephasing_field(sys, emb.coeff_a);
    cmat phi_b = fock::dephasing_field(sys, emb.coeff_b);
    cmat p = fock::occupation_projector(sys, sys.cutoff.n_max - 2);
    const double comm = (p * (phi_a * phi_b - phi_b * phi_a) * p).norm();
    const double bound = 2.0 * std::abs(emb.gram(0, 1).imag()) * std::sqrt(double(sys.dimension()));
    REQUIRE(comm <= bound + 1e-10);
}

TEST_CASE("truncation warning fires when the cutoff is too small", "[udw]") {
    DetectorPairState tight = evolved_state_numeric(abstract_scenario(1.0, 2.0, 4));
    REQUIRE(tight.truncation_warning);
    REQUIRE(tight.boundary_probability > 1e-8);

    DetectorPairState roomy = evolved_state_numeric(abstract_scenario(1.0, 0.25, 16));
    REQUIRE_FALSE(roomy.truncation_warning);
}

TEST_CASE("scenario validation", "[udw]") {
    UdwScenario gap = abstract_scenario(1.0, 0.1);
    gap.detector_gap = 0.5;
    REQUIRE_THROWS_AS(gap.validate(), Unsupported);

    UdwScenario both = abstract_scenario(1.0, 0.1);
    both.smearing = mirror_pair();
    REQUIRE_THROWS_AS(both.validate(), ConfigError);

    UdwScenario neither;
    REQUIRE_THROWS_AS(neither.validate(), ConfigError);

    UdwScenario negative = abstract_scenario(-1.0, 0.1);
    REQUIRE_THROWS_AS(negative.validate(), NegativeParameter);
}

TEST_CASE("closed-form CHSH", "[udw]") {
    // the angular combination pins the optimum at 2 sqrt(2)
    ent::BellSettings opt{0.0, std::numbers::pi / 4, -std::numbers::pi / 2,
                          -std::numbers::pi / 4};
    REQUIRE(chsh_udw(1.0, 0.0, opt) == Catch::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));

    ent::BellSettings zero;
    Rng rng(13);
    for (int it = 0; it < 10; ++it) {
        const double r = rng.uniform(0, 2), hh = rng.uniform(0, 1);
        const double c = udw_concurrence(r, hh).value;
        REQUIRE(chsh_udw(r, hh, zero) == Catch::Approx(2.0 * c).margin(1e-14));
        ent::BellSettings s{rng.uniform(0, 7), rng.uniform(0, 7), rng.uniform(0, 7),
                            rng.uniform(0, 7)};
        REQUIRE(std::abs(chsh_udw(r, hh, s)) <=
                2.0 * std::sqrt(1.0 + c * c) + 1e-9);
    }
}

TEST_CASE("maximized CHSH equals 2 sqrt(2) times the concurrence", "[udw]") {
    auto [s0, v0] = maximize_chsh_udw(1.0, 0.0);
    REQUIRE(v0 == Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-6));

    for (double r : {0.25, 0.75}) {
        for (double hh : {0.1, 0.35}) {
            auto [s, v] = maximize_chsh_udw(r, hh);
            const double c = udw_concurrence(r, hh).value;
            REQUIRE(v == Catch::Approx(2.0 * std::sqrt(2.0) * c).margin(1e-4));
            REQUIRE(v <= 2.0 * std::sqrt(1.0 + c * c) + 1e-9);
        }
    }
}
