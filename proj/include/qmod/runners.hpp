#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmod/entanglement.hpp"
#include "qmod/modular.hpp"
#include "qmod/susy.hpp"
#include "qmod/table.hpp"
#include "qmod/udw.hpp"
#include "qmod/verify.hpp"

namespace qmod::runners {

using json = nlohmann::json;

inline json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config root must be an object: " + path);
    return j;
}

/// Unknown keys are hard errors: a typo in a tolerance name must not be able
/// to silently weaken a verification run.
inline void require_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& context) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed)
            ok = ok || (it.key() == k);
        if (!ok)
            throw ConfigError("unknown key \"" + it.key() + "\" in " + context);
    }
}

inline double get_number(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number())
        throw ConfigError("key \"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

inline std::vector<double> get_list(const json& j, const std::string& key,
                                    std::vector<double> fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_array())
        throw ConfigError("key \"" + key + "\" must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number())
            throw ConfigError("key \"" + key + "\" must contain numbers only");
        out.push_back(v.get<double>());
    }
    return out;
}

inline complex parse_complex(const json& j) {
    if (j.is_number())
        return complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return complex(j[0].get<double>(), j[1].get<double>());
    throw ConfigError("complex entries must be numbers or [re, im] pairs");
}

inline cmat parse_matrix(const json& j, const std::string& context) {
    if (!j.is_array() || j.empty())
        throw ConfigError(context + ": matrix must be a nonempty array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    cmat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[static_cast<size_t>(r)].size()) != cols)
            throw ConfigError(context + ": ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = parse_complex(j[static_cast<size_t>(r)][static_cast<size_t>(c)]);
    }
    return m;
}

inline cvec parse_vector(const json& j, const std::string& context) {
    if (!j.is_array() || j.empty())
        throw ConfigError(context + ": vector must be a nonempty array");
    cvec v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] = parse_complex(j[static_cast<size_t>(i)]);
    return v;
}

inline udw::GaussianTestFunction parse_gaussian(const json& j, const std::string& context) {
    require_keys(j, {"amplitude", "t0", "x0", "sigma_t", "sigma_x"}, context);
    udw::GaussianTestFunction f;
    f.amplitude = get_number(j, "amplitude", 1.0);
    f.t0 = get_number(j, "t0", 0.0);
    if (j.contains("x0")) {
        const auto& x = j.at("x0");
        if (!x.is_array() || x.size() > 3)
            throw ConfigError(context + ": x0 must be an array of up to 3 numbers");
        for (size_t i = 0; i < x.size(); ++i)
            f.x0[i] = x[i].get<double>();
    }
    f.sigma_t = get_number(j, "sigma_t", 1.0);
    f.sigma_x = get_number(j, "sigma_x", 1.0);
    return f;
}

inline udw::FieldModel parse_field(const json& j) {
    require_keys(j, {"mass", "spatial_dim", "base_nodes", "max_nodes", "rel_tol"}, "field");
    udw::FieldModel m;
    m.mass = get_number(j, "mass", m.mass);
    m.spatial_dim = static_cast<int>(get_number(j, "spatial_dim", m.spatial_dim));
    m.base_nodes = static_cast<int>(get_number(j, "base_nodes", m.base_nodes));
    m.max_nodes = static_cast<int>(get_number(j, "max_nodes", m.max_nodes));
    m.rel_tol = get_number(j, "rel_tol", m.rel_tol);
    if (m.rel_tol <= 0)
        throw ConfigError("field.rel_tol must be positive");
    return m;
}

inline int parse_cutoff(const json& j, const std::string& key, int fallback) {
    const int n = static_cast<int>(get_number(j, key, fallback));
    if (n != 0 && n < 4)
        throw ConfigError(key + " must be at least 4 (or 0 to disable numeric columns)");
    return n;
}

// ---------------------------------------------------------------------------
// modular subcommand

inline table::ResultTable run_modular(const json& cfg) {
    require_keys(cfg, {"case", "p", "dim", "generators", "omega", "seed"}, "modular config");

    modular::AlgebraBasis basis;
    cvec omega;
    std::string name;
    if (cfg.contains("case")) {
        name = cfg.at("case").get<std::string>();
        basis = modular::generate_algebra(
            {kron(pauli_x(), cmat::Identity(2, 2)), kron(pauli_z(), cmat::Identity(2, 2))}, 4);
        omega = cvec::Zero(4);
        if (name == "bell-phi-plus") {
            omega[0] = omega[3] = 1 / std::sqrt(2.0);
        } else if (name == "bell-psi-plus") {
            omega[1] = omega[2] = 1 / std::sqrt(2.0);
        } else if (name == "schmidt") {
            const double p = get_number(cfg, "p", 0.3);
            if (p <= 0 || p >= 1)
                throw ConfigError("schmidt case needs 0 < p < 1");
            omega[0] = std::sqrt(p);
            omega[3] = std::sqrt(1 - p);
        } else {
            throw ConfigError("unknown modular case \"" + name +
                              "\" (expected bell-phi-plus | bell-psi-plus | schmidt)");
        }
    } else {
        if (!cfg.contains("dim") || !cfg.contains("generators") || !cfg.contains("omega"))
            throw ConfigError("modular config needs either \"case\" or dim + generators + omega");
        const Eigen::Index dim = static_cast<Eigen::Index>(get_number(cfg, "dim", 0));
        std::vector<cmat> gens;
        for (const auto& g : cfg.at("generators"))
            gens.push_back(parse_matrix(g, "generators"));
        basis = modular::generate_algebra(gens, dim);
        omega = parse_vector(cfg.at("omega"), "omega");
        omega /= omega.norm();
        name = "custom";
    }

    modular::ModularData md = modular::tomita(basis, omega);
    modular::PropertyReport report = modular::verify_modular_properties(md, basis);

    table::ResultTable t;
    t.columns = {"case", "item", "value", "provenance"};
    for (const auto& item : report.items)
        t.add_row({name, "residual[" + item.name + "]", item.residual, std::string("numeric")});
    const cmat& jm = md.j.matrix();
    for (Eigen::Index r = 0; r < jm.rows(); ++r)
        for (Eigen::Index c = 0; c < jm.cols(); ++c) {
            std::ostringstream key;
            key << "J[" << r << "," << c << "]";
            t.add_row({name, key.str() + ".re", jm(r, c).real(), std::string("numeric")});
            t.add_row({name, key.str() + ".im", jm(r, c).imag(), std::string("numeric")});
        }
    return t;
}

// ---------------------------------------------------------------------------
// susy subcommand

inline table::ResultTable run_susy(const json& cfg) {
    require_keys(cfg, {"n_max", "hbar_omega", "k_list", "l_list", "alpha_list", "seed"},
                 "susy config");
    susy::SusyModel model{fock::FockCutoff{parse_cutoff(cfg, "n_max", 8)},
                          get_number(cfg, "hbar_omega", 1.0)};

    std::vector<double> alphas = get_list(cfg, "alpha_list",
                                          {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
    std::vector<double> ks = get_list(cfg, "k_list", {1});
    std::vector<double> ls = get_list(cfg, "l_list", {1});

    table::ResultTable t;
    t.columns = {"k", "l", "alpha", "beta", "c_modular", "c_closed_form", "residual",
                 "provenance"};
    for (double kd : ks)
        for (double ld : ls)
            for (double alpha : alphas) {
                const int k = static_cast<int>(kd), l = static_cast<int>(ld);
                const double beta = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
                cvec phi = susy::supermultiplet_state(model, k, l, alpha, beta);
                const double c = susy::susy_concurrence(model, phi).value;
                const double closed = 2.0 * alpha * beta;
                t.add_row({static_cast<std::int64_t>(k), static_cast<std::int64_t>(l), alpha,
                           beta, c, closed, std::abs(c - closed), std::string("numeric")});
            }
    return t;
}

// ---------------------------------------------------------------------------
// udw subcommand

inline table::ResultTable run_udw(const json& cfg) {
    require_keys(cfg,
                 {"r_list", "hh_list", "n_max", "field", "f_A", "f_B", "angles", "detector_gap",
                  "seed"},
                 "udw config");

    const bool smeared = cfg.contains("f_A") || cfg.contains("f_B");
    if (smeared && cfg.contains("hh_list"))
        throw ConfigError("udw config: give either hh_list or smearing functions, not both");
    if (smeared && !(cfg.contains("f_A") && cfg.contains("f_B")))
        throw ConfigError("udw config: both f_A and f_B are required in smeared mode");

    const double gap = get_number(cfg, "detector_gap", 0.0);
    if (gap != 0.0)
        throw Unsupported("udw config: nonzero detector gap is not supported");

    const int n_max = parse_cutoff(cfg, "n_max", 16);
    const bool numeric = n_max >= 4;

    std::optional<ent::BellSettings> angles;
    if (cfg.contains("angles")) {
        std::vector<double> a = get_list(cfg, "angles", {});
        if (a.size() != 4)
            throw ConfigError("udw config: angles must be [alpha, beta, alpha', beta']");
        angles = ent::BellSettings{a[0], a[1], a[2], a[3]};
    }

    udw::FieldModel field = cfg.contains("field") ? parse_field(cfg.at("field"))
                                                  : udw::FieldModel{};
    std::vector<double> rs = get_list(cfg, "r_list", {0.0, 0.25, 0.5, 0.75, 1.0});

    std::vector<double> hhs;
    std::optional<std::pair<udw::GaussianTestFunction, udw::GaussianTestFunction>> smearing;
    if (smeared) {
        smearing = std::make_pair(parse_gaussian(cfg.at("f_A"), "f_A"),
                                  parse_gaussian(cfg.at("f_B"), "f_B"));
        hhs = {udw::embed_pair(field, smearing->first, smearing->second).hh};
    } else {
        hhs = get_list(cfg, "hh_list", {0.0, 0.1, 0.2, 0.35, 0.5});
    }

    table::ResultTable t;
    t.columns = {"r", "hh", "c_formula"};
    if (numeric) {
        t.columns.push_back("c_j_numeric");
        t.columns.push_back("c_wootters_reduced");
    }
    t.columns.insert(t.columns.end(), {"chsh_max", "chsh_predicted", "chsh_bound"});
    if (angles)
        t.columns.push_back("chsh_at_angles");
    if (numeric)
        t.columns.push_back("truncation_warning");
    t.columns.push_back("provenance");

    for (double r : rs)
        for (double hh_req : hhs) {
            udw::UdwScenario sc;
            sc.r = r;
            sc.field = field;
            sc.n_max = numeric ? n_max : 16;
            if (smearing)
                sc.smearing = smearing;
            else
                sc.hh_override = hh_req;

            std::vector<table::Cell> row;
            double hh = hh_req;
            std::int64_t warned = 0;
            double c_j = 0, c_w = 0;
            if (numeric) {
                udw::ConcurrenceComparison cmp = udw::compare_concurrence(sc);
                hh = cmp.hh;
                c_j = cmp.j_expectation;
                c_w = cmp.wootters_reduced;
                warned = cmp.truncation_warning ? 1 : 0;
            } else if (smearing) {
                hh = udw::embed_pair(field, smearing->first, smearing->second).hh;
            }
            const double c = udw::udw_concurrence(r, hh).value;
            auto [s, chsh_max] = udw::maximize_chsh_udw(r, hh);

            row.push_back(r);
            row.push_back(hh);
            row.push_back(c);
            if (numeric) {
                row.push_back(c_j);
                row.push_back(c_w);
            }
            row.push_back(chsh_max);
            row.push_back(2.0 * std::sqrt(2.0) * c);
            row.push_back(2.0 * std::sqrt(1.0 + c * c));
            if (angles)
                row.push_back(udw::chsh_udw(r, hh, *angles));
            if (numeric)
                row.push_back(warned);
            row.push_back(std::string(numeric ? "numeric" : "analytic"));
            t.add_row(std::move(row));
        }
    return t;
}

// ---------------------------------------------------------------------------
// sweep subcommand

inline table::ResultTable run_sweep(const json& cfg) {
    if (!cfg.contains("module") || !cfg.at("module").is_string())
        throw ConfigError("sweep config: a module string is required");
    const std::string module = cfg.at("module").get<std::string>();
    json rest = cfg;
    rest.erase("module");

    if (module == "susy")
        return run_susy(rest);
    if (module == "udw")
        return run_udw(rest);

    if (module == "udw-separation") {
        require_keys(rest, {"separation_list", "r", "field", "f_A", "f_B", "seed"},
                     "sweep config (udw-separation)");
        udw::FieldModel field = rest.contains("field") ? parse_field(rest.at("field"))
                                                       : udw::FieldModel{};
        udw::GaussianTestFunction base_a =
            rest.contains("f_A") ? parse_gaussian(rest.at("f_A"), "f_A")
                                 : udw::GaussianTestFunction{0.25, 0.0, {0, 0, 0}, 1.0, 1.0};
        udw::GaussianTestFunction base_b =
            rest.contains("f_B") ? parse_gaussian(rest.at("f_B"), "f_B") : base_a;
        const double r = get_number(rest, "r", 1.0);
        std::vector<double> seps = get_list(rest, "separation_list", {1.0, 2.0, 5.0, 10.0});

        table::ResultTable t;
        t.columns = {"separation", "inner_aa",   "inner_ab_re", "inner_ab_im",
                     "hh",         "c_formula",  "provenance"};
        for (double s : seps) {
            udw::GaussianTestFunction fa = base_a, fb = base_b;
            fa.x0[0] = -s / 2;
            fb.x0[0] = +s / 2;
            udw::TwoModeEmbedding emb = udw::embed_pair(field, fa, fb);
            t.add_row({s, emb.gram(0, 0).real(), emb.gram(0, 1).real(), emb.gram(0, 1).imag(),
                       emb.hh, udw::udw_concurrence(r, emb.hh).value, std::string("numeric")});
        }
        return t;
    }
    if (module == "weyl-convergence") {
        require_keys(rest, {"n_max_list", "seed"}, "sweep config (weyl-convergence)");
        std::vector<double> cutoffs = get_list(rest, "n_max_list", {8, 16, 24});
        table::ResultTable t;
        t.columns = {"n_max", "weyl_residual", "provenance"};
        for (double nd : cutoffs) {
            const int n_max = static_cast<int>(nd);
            fock::ModeSystem one{1, fock::FockCutoff{n_max}};
            cvec vc(1), vd(1), vsum(1);
            vc << complex(0.7, 0.0);
            vd << complex(0.0, 0.7);
            vsum << vc[0] + vd[0];
            const double im = std::imag(std::conj(vc[0]) * vd[0]);
            cmat lhs = fock::weyl(one, vc) * fock::weyl(one, vd);
            cmat rhs = std::exp(complex(0, -im / 2.0)) * fock::weyl(one, vsum);
            cmat restricted = (lhs - rhs) * fock::occupation_projector(one, n_max / 2);
            Eigen::JacobiSVD<cmat> svd(restricted);
            t.add_row({static_cast<std::int64_t>(n_max), double(svd.singularValues()(0)),
                       std::string("numeric")});
        }
        return t;
    }
    throw ConfigError("sweep config: unknown module \"" + module +
                      "\" (expected susy | udw | udw-separation | weyl-convergence)");
}

// ---------------------------------------------------------------------------
// verify subcommand

inline verify::SuiteConfig parse_verify_config(const json& cfg,
                                               std::optional<std::uint64_t> seed_override) {
    require_keys(cfg,
                 {"seed", "instances", "fock_n_max", "weyl_cutoffs", "udw", "tolerance_override"},
                 "verify config");
    verify::SuiteConfig sc;
    sc.seed = static_cast<std::uint64_t>(get_number(cfg, "seed", 42));
    if (seed_override)
        sc.seed = *seed_override;
    sc.instances = static_cast<int>(get_number(cfg, "instances", sc.instances));
    if (sc.instances < 1)
        throw ConfigError("verify config: instances must be positive");
    sc.fock_n_max = parse_cutoff(cfg, "fock_n_max", sc.fock_n_max);
    if (cfg.contains("weyl_cutoffs")) {
        sc.weyl_cutoffs.clear();
        for (double v : get_list(cfg, "weyl_cutoffs", {}))
            sc.weyl_cutoffs.push_back(static_cast<int>(v));
        if (sc.weyl_cutoffs.size() < 2)
            throw ConfigError("verify config: weyl_cutoffs needs at least two entries");
    }
    if (cfg.contains("udw")) {
        const json& u = cfg.at("udw");
        require_keys(u, {"r", "hh", "n_max"}, "verify.udw");
        sc.udw_r = get_number(u, "r", sc.udw_r);
        sc.udw_hh = get_number(u, "hh", sc.udw_hh);
        sc.udw_n_max = parse_cutoff(u, "n_max", sc.udw_n_max);
    }
    sc.tolerance_override = get_number(cfg, "tolerance_override", 0.0);
    if (cfg.contains("tolerance_override") && sc.tolerance_override <= 0)
        throw ConfigError("verify config: tolerance_override must be positive");
    return sc;
}

inline table::ResultTable verify_table(const std::vector<verify::CheckResult>& results) {
    table::ResultTable t;
    t.columns = {"module", "check", "residual", "tolerance", "status", "note", "provenance"};
    for (const auto& r : results)
        t.add_row({r.module, r.name, r.residual, r.tolerance,
                   std::string(r.pass ? "pass" : "FAIL"), r.note, std::string("numeric")});
    return t;
}

} // namespace qmod::runners
