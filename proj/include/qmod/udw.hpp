#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "qmod/entanglement.hpp"
#include "qmod/fock.hpp"
#include "qmod/linalg.hpp"

namespace qmod::udw {

/// Spacetime Gaussian smearing, amplitude * exp(-(t-t0)^2 / 2 sigma_t^2)
/// * exp(-|x-x0|^2 / 2 sigma_x^2). Gaussians stand in for compactly
/// supported bumps: their Fourier transforms are closed-form, at the price
/// of causal commutativity holding only up to quantified Gaussian tails.
struct GaussianTestFunction {
    double amplitude = 1.0;
    double t0 = 0.0;
    std::array<double, 3> x0{0.0, 0.0, 0.0};
    double sigma_t = 1.0;
    double sigma_x = 1.0;
};

/// Klein-Gordon mass-shell kernel parameters. The smearing pairing is the
/// Wightman (positive frequency) two-point overlap
///   <f,g> = int d^dk / ((2 pi)^d 2 w_k) conj(fhat(w_k, k)) ghat(w_k, k),
/// whose imaginary part carries the commutator (Pauli-Jordan) content.
struct FieldModel {
    double mass = 1.0;
    int spatial_dim = 3;
    int base_nodes = 64;   ///< Gauss-Legendre nodes of the first attempt
    int max_nodes = 4096;  ///< refinement cap before giving up
    double rel_tol = 1e-8; ///< relative change demanded of one refinement
};

struct QuadratureResult {
    complex value;
    double abs_scale;     ///< integral of |integrand|, the comparison scale
    double last_delta;    ///< |I_2n - I_n| / abs_scale of the final refinement
    int nodes;
};

namespace detail {

struct GaussLegendre {
    std::vector<double> nodes, weights; // on [-1, 1]
};

inline GaussLegendre gauss_legendre(int n) {
    GaussLegendre out;
    out.nodes.resize(n);
    out.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double deriv = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            deriv = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / deriv;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        out.nodes[i] = -x;
        out.nodes[n - 1 - i] = x;
        out.weights[i] = out.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * deriv * deriv);
    }
    return out;
}

inline void validate(const FieldModel& model, const GaussianTestFunction& f) {
    if (model.spatial_dim != 1 && model.spatial_dim != 3)
        throw Unsupported("FieldModel: spatial_dim must be 1 or 3");
    if (model.mass < 0)
        throw NegativeParameter("FieldModel: negative mass");
    if (model.spatial_dim == 1 && model.mass <= 0)
        throw Unsupported("FieldModel: the 1+1-dimensional kernel needs m > 0");
    if (f.sigma_t <= 0 || f.sigma_x <= 0)
        throw NegativeParameter("GaussianTestFunction: widths must be positive");
}

/// Mass-shell overlap integral at a fixed node count (no refinement).
inline std::pair<complex, double> mass_shell_integral(const FieldModel& model,
                                                      const GaussianTestFunction& f,
                                                      const GaussianTestFunction& g, int nodes) {
    const int d = model.spatial_dim;
    const double st2 = f.sigma_t * f.sigma_t + g.sigma_t * g.sigma_t;
    const double sx2 = f.sigma_x * f.sigma_x + g.sigma_x * g.sigma_x;
    const double dt = g.t0 - f.t0;
    double sep2 = 0.0;
    for (int i = 0; i < d; ++i) {
        const double dx = f.x0[static_cast<size_t>(i)] - g.x0[static_cast<size_t>(i)];
        sep2 += dx * dx;
    }
    const double sep = std::sqrt(sep2);

    const double prefactor = 2.0 * std::numbers::pi * f.amplitude * g.amplitude * f.sigma_t *
                             g.sigma_t * std::pow(f.sigma_x * g.sigma_x, d);
    // Gaussian decay exp(-(st2 w^2 + sx2 k^2)/2) makes the tail negligible
    // beyond exp(-60)
    const double k_max = std::sqrt(120.0 / (st2 + sx2));

    const GaussLegendre gl = gauss_legendre(nodes);
    complex acc(0, 0);
    double abs_acc = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double k = 0.5 * k_max * (gl.nodes[static_cast<size_t>(i)] + 1.0);
        const double w = std::sqrt(k * k + model.mass * model.mass);
        const double gauss = std::exp(-0.5 * (st2 * w * w + sx2 * k * k));
        double radial, angular;
        if (d == 3) {
            radial = 4.0 * std::numbers::pi * k * k / (2.0 * w);
            angular = (k * sep > 1e-12) ? std::sin(k * sep) / (k * sep) : 1.0;
        } else {
            radial = 1.0 / w;
            angular = std::cos(k * sep);
        }
        const complex phase = std::exp(complex(0, w * dt));
        const complex val = prefactor * radial * angular * gauss * phase;
        const double weight = 0.5 * k_max * gl.weights[static_cast<size_t>(i)];
        acc += weight * val;
        abs_acc += weight * std::abs(val);
    }
    return {acc, abs_acc};
}

} // namespace detail

/// Smearing inner product with automatic node-doubling refinement. Throws
/// QuadratureNotConverged if one refinement step still moves the value by
/// more than rel_tol relative to the absolute-integral scale.
inline QuadratureResult inner_product_detail(const FieldModel& model,
                                             const GaussianTestFunction& f,
                                             const GaussianTestFunction& g) {
    detail::validate(model, f);
    detail::validate(model, g);
    auto [prev, prev_abs] = detail::mass_shell_integral(model, f, g, model.base_nodes);
    for (int n = 2 * model.base_nodes; n <= model.max_nodes; n *= 2) {
        auto [cur, cur_abs] = detail::mass_shell_integral(model, f, g, n);
        const double scale = std::max(cur_abs, 1e-300);
        const double delta = std::abs(cur - prev) / scale;
        if (delta <= model.rel_tol)
            return {cur, cur_abs, delta, n};
        prev = cur;
        prev_abs = cur_abs;
    }
    throw QuadratureNotConverged("inner_product: node doubling did not reach tolerance " +
                                 std::to_string(model.rel_tol));
}

inline complex inner_product(const FieldModel& model, const GaussianTestFunction& f,
                             const GaussianTestFunction& g) {
    return inner_product_detail(model, f, g).value;
}

/// Fixed-node evaluation, for convergence studies.
inline complex inner_product_fixed(const FieldModel& model, const GaussianTestFunction& f,
                                   const GaussianTestFunction& g, int nodes) {
    detail::validate(model, f);
    detail::validate(model, g);
    return detail::mass_shell_integral(model, f, g, nodes).first;
}

/// Im<f,g>: the commutator scale, [phi(f), phi(g)] = 2i Im<f,g>. Vanishes for
/// symplectically complementary smearings.
inline double symplectic_overlap(const FieldModel& model, const GaussianTestFunction& f,
                                 const GaussianTestFunction& g) {
    return inner_product(model, f, g).imag();
}

/// Orthonormal two-mode reduction of the pair {f_A, f_B}: coefficient vectors
/// with <coeff_x, coeff_y> equal to the smearing Gram matrix.
struct TwoModeEmbedding {
    cmat gram;    // 2x2 Hermitian PSD
    cvec coeff_a; // f_A in the orthonormal mode basis
    cvec coeff_b; // f_B in the orthonormal mode basis
    double hh;    // <f_A + f_B, f_A + f_B>
};

inline TwoModeEmbedding embed_pair(const FieldModel& model, const GaussianTestFunction& f_a,
                                   const GaussianTestFunction& f_b) {
    cmat gram(2, 2);
    gram(0, 0) = inner_product(model, f_a, f_a).real();
    gram(1, 1) = inner_product(model, f_b, f_b).real();
    const complex cross = inner_product(model, f_a, f_b);
    gram(0, 1) = cross;
    gram(1, 0) = std::conj(cross);
    cmat root = psd_sqrt(gram, 1e-6); // quadrature noise sets the PSD slack
    TwoModeEmbedding out{gram, root.col(0), root.col(1), 0.0};
    out.hh = (out.coeff_a + out.coeff_b).squaredNorm();
    return out;
}

/// Abstract-mode embedding: two orthogonal modes carrying the requested
/// total smearing norm <h,h>.
inline TwoModeEmbedding embed_abstract(double hh) {
    if (hh < 0)
        throw NegativeParameter("embed_abstract: <h,h> must be nonnegative");
    const double t = std::sqrt(hh / 2.0);
    cmat gram = cmat::Zero(2, 2);
    gram(0, 0) = gram(1, 1) = t * t;
    cvec a = cvec::Zero(2), b = cvec::Zero(2);
    a[0] = t;
    b[1] = t;
    return TwoModeEmbedding{gram, a, b, hh};
}

/// Full description of one detector-pair run.
struct UdwScenario {
    double r = 1.0;
    double detector_gap = 0.0; // only the gapless coupling is supported
    std::optional<std::pair<GaussianTestFunction, GaussianTestFunction>> smearing;
    std::optional<double> hh_override;
    FieldModel field{};
    ent::BellSettings settings{};
    int n_max = 16;

    void validate() const {
        if (r < 0)
            throw NegativeParameter("UdwScenario: r must be nonnegative");
        if (detector_gap != 0.0)
            throw Unsupported("UdwScenario: nonzero detector gap is not supported");
        if (smearing.has_value() == hh_override.has_value())
            throw ConfigError("UdwScenario: exactly one of smearing / hh_override must be set");
        if (hh_override && *hh_override < 0)
            throw NegativeParameter("UdwScenario: <h,h> must be nonnegative");
    }
};

/// Detector-pair state: either the symbolic (r, <h,h>) pair, or a joint
/// vector on C^2_A (x) C^2_B (x) Fock with the qubit index slow. The qubit
/// basis is |e> = (1,0), |g> = (0,1), so |ee> sits at joint index 0.
struct DetectorPairState {
    double r = 0.0;
    double hh = 0.0;
    std::optional<cvec> joint;
    std::optional<fock::ModeSystem> field;
    bool truncation_warning = false;
    double boundary_probability = 0.0;

    bool numeric() const { return joint.has_value(); }
};

/// Detector amplitudes of (|gg> + r|ee>) / sqrt(1 + r^2).
inline cvec detector_amplitudes(double r) {
    cvec v = cvec::Zero(4);
    const double norm = std::sqrt(1.0 + r * r);
    v[0] = r / norm; // |ee>
    v[3] = 1.0 / norm; // |gg>
    return v;
}

inline DetectorPairState initial_state(double r) {
    if (r < 0)
        throw NegativeParameter("initial_state: r must be nonnegative");
    return DetectorPairState{r, 0.0, std::nullopt, std::nullopt, false, 0.0};
}

/// Symbolic evolved state; downstream expectations only need (r, <h,h>)
/// through the Gaussian vacuum rule.
inline DetectorPairState evolved_state_analytic(double r, double hh) {
    if (r < 0)
        throw NegativeParameter("evolved_state_analytic: r must be nonnegative");
    if (hh < 0)
        throw NegativeParameter("evolved_state_analytic: <h,h> must be nonnegative");
    return DetectorPairState{r, hh, std::nullopt, std::nullopt, false, 0.0};
}

/// Exact dephasing evolution on the truncated two-mode representation:
/// U = e^{-i sigma^z_A phi(f_A)} e^{-i sigma^z_B phi(f_B)} applied to
/// (|gg> + r|ee>) (x) |0>.
inline DetectorPairState evolved_state_numeric(const UdwScenario& sc) {
    sc.validate();
    TwoModeEmbedding emb = sc.smearing
                               ? embed_pair(sc.field, sc.smearing->first, sc.smearing->second)
                               : embed_abstract(*sc.hh_override);

    fock::ModeSystem sys{2, fock::FockCutoff{sc.n_max}};
    const Eigen::Index df = sys.dimension();

    const cmat phi_a = fock::dephasing_field(sys, emb.coeff_a);
    const cmat phi_b = fock::dephasing_field(sys, emb.coeff_b);
    const std::array<cmat, 2> exp_a{unitary_from_hermitian(phi_a, -1.0),
                                    unitary_from_hermitian(phi_a, +1.0)};
    const std::array<cmat, 2> exp_b{unitary_from_hermitian(phi_b, -1.0),
                                    unitary_from_hermitian(phi_b, +1.0)};

    const cvec det = detector_amplitudes(sc.r);
    const cvec vac = fock::vacuum(sys);
    cvec joint = cvec::Zero(4 * df);
    for (int q = 0; q < 4; ++q) {
        if (det[q] == complex(0, 0))
            continue;
        const int spin_a = q / 2, spin_b = q % 2; // 0 = excited, 1 = ground
        joint.segment(q * df, df) = det[q] * (exp_a[spin_a] * (exp_b[spin_b] * vac));
    }

    DetectorPairState out{sc.r, emb.hh, std::move(joint), sys, false, 0.0};
    for (int q = 0; q < 4; ++q)
        out.boundary_probability +=
            fock::boundary_occupation_probability(sys, out.joint->segment(q * df, df));
    out.truncation_warning = out.boundary_probability > 1e-8;
    return out;
}

/// The two-qubit conjugation (alpha,beta)(x)(gamma,delta) ->
/// (conj delta, conj gamma)(x)(conj beta, conj alpha): basis kets map as
/// |ij> -> |(1-j)(1-i)|, amplitudes conjugate.
inline cmat j_ab_qubit_matrix() {
    cmat m = cmat::Zero(4, 4);
    m(3, 0) = m(1, 1) = m(2, 2) = m(0, 3) = 1.0;
    return m;
}

inline AntilinearOperator j_ab() {
    return AntilinearOperator{j_ab_qubit_matrix()};
}

/// Lift to the joint detector-field space. On the field factor the
/// conjugation acts as parity composed with componentwise conjugation, the
/// antiunitary implementing f -> -conj(f) on smearings. It therefore fixes
/// every branch e^{i phi(f)}|0> with real mode coefficients, which is what
/// the dephasing branches require of a conjugation between the two
/// detector algebras.
inline AntilinearOperator j_ab(const fock::ModeSystem& sys) {
    return AntilinearOperator{kron(j_ab_qubit_matrix(), fock::parity(sys))};
}

inline cvec j_ab_apply(const cvec& v) {
    if (v.size() != 4)
        throw DimensionMismatch("j_ab_apply: expected a two-qubit vector");
    return j_ab().apply(v);
}

inline cvec j_ab_apply(const fock::ModeSystem& sys, const cvec& v) {
    if (v.size() != 4 * sys.dimension())
        throw DimensionMismatch("j_ab_apply: vector does not match 4 x field dimension");
    return j_ab(sys).apply(v);
}

/// Closed-form dephased concurrence, C = (2r / (1 + r^2)) e^{-2 <h,h>}.
inline ent::ConcurrenceValue udw_concurrence(double r, double hh) {
    if (r < 0)
        throw NegativeParameter("udw_concurrence: r must be nonnegative");
    if (hh < 0)
        throw NegativeParameter("udw_concurrence: <h,h> must be nonnegative");
    const double c = 2.0 * r / (1.0 + r * r) * std::exp(-2.0 * hh);
    return {std::clamp(c, 0.0, 1.0)};
}

/// Field-free detector concurrence C_0 = 2r / (1 + r^2).
inline ent::ConcurrenceValue isolated_concurrence(double r) {
    return udw_concurrence(r, 0.0);
}

/// Partial trace over the field factor (numeric), or the closed-form
/// dephased density (analytic): diagonal (r^2, 0, 0, 1) / (1 + r^2) with
/// |ee><gg| coherence r e^{-2<h,h>} / (1 + r^2).
inline ent::TwoQubitDensity reduced_detector_density(const DetectorPairState& state) {
    if (state.numeric()) {
        const Eigen::Index df = state.field->dimension();
        cmat rho = cmat::Zero(4, 4);
        for (int q = 0; q < 4; ++q)
            for (int p = 0; p < 4; ++p)
                rho(q, p) = state.joint->segment(p * df, df).dot(state.joint->segment(q * df, df));
        return ent::TwoQubitDensity{rho};
    }
    const double n2 = 1.0 / (1.0 + state.r * state.r);
    cmat rho = cmat::Zero(4, 4);
    rho(0, 0) = state.r * state.r * n2;
    rho(3, 3) = n2;
    rho(0, 3) = rho(3, 0) = state.r * std::exp(-2.0 * state.hh) * n2;
    return ent::TwoQubitDensity{rho};
}

/// Closed-form CHSH expectation of the dephased pair,
/// C(r, <h,h>) [cos(a+b) + cos(a'+b) + cos(a+b') - cos(a'+b')].
inline double chsh_udw(double r, double hh, const ent::BellSettings& s) {
    const double angular = std::cos(s.alpha + s.beta) + std::cos(s.alpha_p + s.beta) +
                           std::cos(s.alpha + s.beta_p) - std::cos(s.alpha_p + s.beta_p);
    return udw_concurrence(r, hh).value * angular;
}

/// Maximized CHSH over the four angles; the angular part peaks at 2 sqrt(2).
inline std::pair<ent::BellSettings, double> maximize_chsh_udw(double r, double hh,
                                                              int coarse_grid_steps = 24,
                                                              int refine_iters = 60) {
    Eigen::Matrix2d t = Eigen::Matrix2d::Zero();
    const double c = udw_concurrence(r, hh).value;
    t(0, 0) = c;
    t(1, 1) = -c;
    return ent::detail::maximize_bilinear(t, coarse_grid_steps, refine_iters);
}

/// The three routes to the same number: the closed form, the conjugation
/// expectation on the numeric state, and Wootters on the traced-out
/// detector density.
struct ConcurrenceComparison {
    double hh = 0.0;
    double closed_form = 0.0;
    double j_expectation = 0.0;
    double wootters_reduced = 0.0;
    bool truncation_warning = false;

    double max_spread() const {
        const double lo = std::min({closed_form, j_expectation, wootters_reduced});
        const double hi = std::max({closed_form, j_expectation, wootters_reduced});
        return hi - lo;
    }
};

inline ConcurrenceComparison compare_concurrence(const UdwScenario& sc) {
    DetectorPairState state = evolved_state_numeric(sc);
    ConcurrenceComparison out;
    out.hh = state.hh;
    out.closed_form = udw_concurrence(sc.r, state.hh).value;
    out.j_expectation = ent::modular_concurrence(*state.joint, j_ab(*state.field)).value;
    out.wootters_reduced = ent::wootters_concurrence(reduced_detector_density(state)).value;
    out.truncation_warning = state.truncation_warning;
    return out;
}

} // namespace qmod::udw
