#include "cocycle_lab/cli.hpp"

#include "cocycle_lab/arithmetic.hpp"
#include "cocycle_lab/cocycle.hpp"
#include "cocycle_lab/duality.hpp"
#include "cocycle_lab/errors.hpp"
#include "cocycle_lab/growth.hpp"
#include "cocycle_lab/kam.hpp"
#include "cocycle_lab/spectrum.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace cocycle_lab::cli {

namespace {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string cell_text(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                return format_double(v);
            else if constexpr (std::is_same_v<T, bool>)
                return v ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>)
                return v;
            else
                return std::to_string(v);
        },
        c);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

nlohmann::ordered_json cell_json(const Cell& c) {
    return std::visit(
        [](const auto& v) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(format_double(v));
            else
                return nlohmann::ordered_json(v);
        },
        c);
}

}  // namespace

std::string to_csv(const Table& t) {
    std::ostringstream os;
    // CRLF line breaks throughout, as RFC 4180 asks
    os << "# cocycle-lab " << kVersion << "\r\n";
    os << "# command: " << t.command << "\r\n";
    for (const auto& [k, v] : t.config) os << "# config " << k << " = " << v << "\r\n";
    for (const auto& [k, v] : t.meta) os << "# " << k << " = " << cell_text(v) << "\r\n";
    os << "# partial = " << (t.partial ? "true" : "false") << "\r\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
    os << "\r\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(cell_text(row[i]));
        os << "\r\n";
    }
    return os.str();
}

std::string to_json(const Table& t) {
    nlohmann::ordered_json meta;
    meta["version"] = kVersion;
    meta["command"] = t.command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.config) config[k] = v;
    meta["config"] = config;
    for (const auto& [k, v] : t.meta) meta[k] = cell_json(v);
    meta["partial"] = t.partial;
    nlohmann::ordered_json data = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r;
        for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
        data.push_back(r);
    }
    nlohmann::ordered_json doc;
    doc["meta"] = meta;
    doc["data"] = data;
    return doc.dump(2) + "\n";
}

namespace {

struct Common {
    std::string format = "csv";
    std::string out = "-";
    std::string precision = "double";
    bool strict = false;
};

// Outcome of a command body beyond the table itself.
struct Verdict {
    int code = kOk;
    std::vector<std::string> warnings;
};

struct AmoArgs {
    double lambda = 0.0;
    std::string alpha = "golden";
};

void add_amo(CLI::App* sub, AmoArgs& a, bool lambda_required = true) {
    auto* o = sub->add_option("--lambda", a.lambda, "coupling lambda")->check(CLI::PositiveNumber);
    if (lambda_required) o->required();
    sub->add_option("--alpha", a.alpha, "frequency: golden, silver or cf:a1,a2,...");
}

std::string config_value(const CLI::Option* o) {
    if (o->get_expected_max() == 0) return o->count() > 0 ? "true" : "false";
    if (o->count() == 0) return o->get_default_str();
    std::string s;
    for (const auto& r : o->results()) s += (s.empty() ? "" : ",") + r;
    return s;
}

void echo_config(const CLI::App* sub, const CLI::App* app, Table& t) {
    for (const CLI::App* a : {app, sub})
        for (const CLI::Option* o : a->get_options()) {
            if (o->get_lnames().empty() || o->get_lnames().front() == "help" || o->get_lnames().front() == "version")
                continue;
            t.config.emplace_back(o->get_lnames().front(), config_value(o));
        }
}

void check_bounds(const std::vector<kam::BoundCheck>& checks, int step, bool strict, Verdict& v) {
    for (const auto& c : checks)
        if (c.asserted && !c.ok) {
            v.warnings.push_back("step " + std::to_string(step) + ": bound '" + c.name + "' violated (measured " +
                                 format_double(c.measured) + ", bound " + format_double(c.bound) + ")");
            if (strict) v.code = kStrict;
        }
}

std::string kind_text(const kam::Su11Constant& a) { return kam::to_string(a.kind); }

double signed_rotation(const kam::Su11Constant& a) {
    return a.kind == kam::ConstKind::Elliptic ? a.rotation() : std::nan("");
}

struct KamArgs {
    AmoArgs amo;
    double E = 0.0;
    double h = 0.25;
    double h_tilde = 0.05;
    int budget = 6;
    double resonance_exponent = 3.0;
    double D0 = 0.0;
    bool no_gate = false;
    std::vector<double> lc;  // gamma, delta
};

void add_kam(CLI::App* sub, KamArgs& k) {
    add_amo(sub, k.amo);
    sub->add_option("--E", k.E, "energy")->required();
    sub->add_option("--h", k.h, "initial strip width")->check(CLI::PositiveNumber);
    sub->add_option("--htilde", k.h_tilde, "final strip width")->check(CLI::PositiveNumber);
    sub->add_option("--budget", k.budget, "number of KAM steps")->check(CLI::Range(1, 64));
    sub->add_option("--resonance-exponent", k.resonance_exponent, "resonance threshold eps^x")
        ->check(CLI::PositiveNumber);
    sub->add_option("--D0", k.D0, "smallness gate constant (0: calibrated default)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--no-gate", k.no_gate, "skip the smallness gate");
    sub->add_option("--lc", k.lc, "rotation-backward scheme with certificate gamma,delta")
        ->expected(2)
        ->delimiter(',');
}

kam::KamTrace run_kam(const KamArgs& k, const arithmetic::Irrational& alpha) {
    if (!(k.h_tilde < k.h)) throw DomainError("--htilde must be smaller than --h");
    kam::KamConfig cfg;
    cfg.resonance_exponent = k.resonance_exponent;
    cfg.D0 = k.D0;
    cfg.check_gate = !k.no_gate;
    if (!k.lc.empty()) {
        if (!(k.lc[0] > 0.0) || !(k.lc[1] > 0.0)) throw DomainError("--lc: gamma and delta must be positive");
        // both signs of m are scanned, so the cocycle orientation of rho is immaterial
        const auto r = cocycle::rotation_number(cocycle::CocycleMap::amo(alpha, k.amo.lambda, k.E), 1000000, 0.0);
        cfg.lc = kam::LcCertificate{k.lc[0], k.lc[1], r.value};
    }
    const kam::LocalPair p = kam::amo_local_pair(k.amo.lambda, k.E, k.h);
    return kam::kam_iterate(p.A0, p.f0, alpha, k.h, k.h_tilde, k.budget, cfg);
}

void kam_meta(const kam::KamTrace& tr, Table& t) {
    t.meta.emplace_back("status", kam::to_string(tr.status));
    t.meta.emplace_back("eps0", tr.eps0);
    t.meta.emplace_back("log_eps_final", tr.log_eps_final);
    t.meta.emplace_back("gate", tr.gate);
    t.meta.emplace_back("degree", static_cast<std::int64_t>(tr.B.degree()));
    t.meta.emplace_back("final_kind", kind_text(tr.final_constant));
    t.meta.emplace_back("final_rotation", signed_rotation(tr.final_constant));
    if (!tr.note.empty()) t.meta.emplace_back("note", tr.note);
}

Verdict kam_verdict(const kam::KamTrace& tr, bool strict, Table& t) {
    Verdict v;
    for (const auto& s : tr.steps) check_bounds(s.checks, s.j, strict, v);
    if (tr.status != kam::KamStatus::ConvergedReducible) {
        t.partial = true;
        v.warnings.push_back("KAM run ended with status " + kam::to_string(tr.status));
        if (v.code == kOk) v.code = kBudget;
    }
    return v;
}

using Body = std::function<Verdict(Table&)>;

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"cocycle-lab: quasiperiodic cocycle experiments"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    // -h is taken by the strip width, so help is long-form only
    app.set_help_flag("--help", "print this help message and exit");
    Common common;
    app.add_option("--format", common.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", common.out, "output path, - for stdout");
    app.add_option("--precision", common.precision, "working precision (double; extended is not built)");
    app.add_flag("--strict", common.strict, "bound violations fail with exit 4");

    Body body;
    std::string command;
    auto sub = [&](const char* name, const char* desc) {
        CLI::App* s = app.add_subcommand(name, desc);
        s->set_help_flag("--help", "print this help message and exit");
        s->fallthrough();
        return s;
    };

    // gaps
    AmoArgs gaps_amo;
    std::int64_t qmax = 100;
    int kmax = 6;
    CLI::App* gaps = sub("gaps", "gap lengths and decay rates at a periodic approximant");
    add_amo(gaps, gaps_amo);
    gaps->add_option("--qmax", qmax, "largest approximant denominator")->check(CLI::Range(2, 2000));
    gaps->add_option("--kmax", kmax, "largest gap label")->check(CLI::Range(1, 100));
    gaps->callback([&] {
        body = [&](Table& t) {
            const auto alpha = arithmetic::parse_alpha(gaps_amo.alpha);
            const auto d = spectrum::gap_decay_experiment(gaps_amo.lambda, alpha, qmax, kmax);
            t.meta.emplace_back("primary", std::to_string(d.primary.p) + "/" + std::to_string(d.primary.q));
            t.meta.emplace_back("check", std::to_string(d.check.p) + "/" + std::to_string(d.check.q));
            t.meta.emplace_back("limit_rate", std::abs(std::log(gaps_amo.lambda)));
            t.columns = {"k", "left", "right", "length", "cross_length", "rate", "stable", "below_floor"};
            for (const auto& r : d.rows)
                t.rows.push_back({r.k, r.left, r.right, r.length, r.cross_length, r.rate, r.stable, r.below_floor});
            return Verdict{};
        };
    });

    // lyapunov
    AmoArgs ly_amo;
    std::vector<double> ly_E;
    std::int64_t ly_n = 10000;
    CLI::App* ly = sub("lyapunov", "Lyapunov exponent of the almost Mathieu cocycle");
    add_amo(ly, ly_amo);
    ly->add_option("--E", ly_E, "energies")->required();
    ly->add_option("--n", ly_n, "iterates per phase")->check(CLI::Range(std::int64_t{1000}, std::int64_t{100000000}));
    ly->callback([&] {
        body = [&](Table& t) {
            const auto alpha = arithmetic::parse_alpha(ly_amo.alpha);
            t.meta.emplace_back("formula", std::max(0.0, std::log(ly_amo.lambda)));
            t.columns = {"E", "lyapunov", "spread"};
            for (double E : ly_E) {
                const auto L = cocycle::lyapunov(cocycle::CocycleMap::amo(alpha, ly_amo.lambda, E), ly_n,
                                                 cocycle::default_phases());
                t.rows.push_back({E, L.value, L.spread});
            }
            return Verdict{};
        };
    });

    // rotation
    AmoArgs rot_amo;
    std::vector<double> rot_E;
    std::int64_t rot_n = 1000000;
    double rot_theta = 0.0;
    CLI::App* rot = sub("rotation", "fibered rotation number and integrated density of states");
    add_amo(rot, rot_amo);
    rot->add_option("--E", rot_E, "energies")->required();
    rot->add_option("--n", rot_n, "iterates")->check(CLI::Range(std::int64_t{10000}, std::int64_t{100000000}));
    rot->add_option("--theta", rot_theta, "initial phase");
    rot->callback([&] {
        body = [&](Table& t) {
            const auto alpha = arithmetic::parse_alpha(rot_amo.alpha);
            t.columns = {"E", "rho", "error", "ids"};
            for (double E : rot_E) {
                const auto r = cocycle::rotation_number(cocycle::CocycleMap::amo(alpha, rot_amo.lambda, E), rot_n,
                                                        rot_theta);
                double ids = 2.0 * r.value;
                ids -= std::floor(ids);
                t.rows.push_back({E, r.value, r.error, ids});
            }
            return Verdict{};
        };
    });

    // kam
    KamArgs kam_args;
    CLI::App* kamc = sub("kam", "KAM iteration for the perturbative almost Mathieu cocycle");
    add_kam(kamc, kam_args);
    kamc->callback([&] {
        body = [&](Table& t) {
            const auto alpha = arithmetic::parse_alpha(kam_args.amo.alpha);
            const kam::KamTrace tr = run_kam(kam_args, alpha);
            kam_meta(tr, t);
            t.columns = {"j",         "h",      "h_next",       "N",        "eps",     "log_eps",
                         "kind",      "rotation", "resonance",  "rotation_deg", "deg", "tildeB_norm",
                         "Y_norm",    "residual", "violations"};
            for (const auto& s : tr.steps) {
                std::int64_t viol = 0;
                for (const auto& c : s.checks) viol += (c.asserted && !c.ok) ? 1 : 0;
                t.rows.push_back({static_cast<std::int64_t>(s.j), s.h, s.h_next, static_cast<std::int64_t>(s.N),
                                  s.eps, s.log_eps, kind_text(s.constant), signed_rotation(s.constant),
                                  s.resonance ? Cell(static_cast<std::int64_t>(*s.resonance)) : Cell(std::string()),
                                  static_cast<std::int64_t>(s.rotation_deg), static_cast<std::int64_t>(s.deg),
                                  s.tildeB_norm, s.Y_norm, s.residual, viol});
            }
            return kam_verdict(tr, common.strict, t);
        };
    });

    // dual: finite-box localization of the long-range dual operator, or the
    // dual eigenfunction read off a KAM conjugacy when --E is given
    KamArgs dual_args;
    double dual_x = 0.0;
    int dual_N = 200;
    int dual_K = 48;
    CLI::App* dual = sub("dual", "dual operator: finite-box localization, or conjugacy rows with --E");
    add_amo(dual, dual_args.amo);
    CLI::Option* dual_E = dual->add_option("--E", dual_args.E, "energy of a perturbative KAM run (rows mode)");
    dual->add_option("--x", dual_x, "phase of the dual operator (box mode)");
    dual->add_option("--N", dual_N, "box radius (box mode)")->check(CLI::Range(1, 4000));
    dual->add_option("--h", dual_args.h, "initial strip width (rows mode)")->check(CLI::PositiveNumber);
    dual->add_option("--htilde", dual_args.h_tilde, "final strip width (rows mode)")->check(CLI::PositiveNumber);
    dual->add_option("--budget", dual_args.budget, "number of KAM steps (rows mode)")->check(CLI::Range(1, 64));
    dual->add_option("--K", dual_K, "Fourier modes of the conjugacy (rows mode)")->check(CLI::Range(4, 512));
    dual->callback([&] {
        body = [&, dual_E](Table& t) {
            const auto alpha = arithmetic::parse_alpha(dual_args.amo.alpha);
            if (dual_E->count() == 0) {
                const auto states =
                    duality::finite_localization({{1, 1.0}, {-1, 1.0}}, dual_args.amo.lambda, alpha, dual_x, dual_N);
                t.meta.emplace_back("median_bulk_rate", duality::median_bulk_rate(states, dual_N));
                t.columns = {"index", "E", "center", "rate"};
                for (std::size_t i = 0; i < states.size(); ++i)
                    t.rows.push_back({static_cast<std::int64_t>(i), states[i].E,
                                      static_cast<std::int64_t>(states[i].center), states[i].rate});
                return Verdict{};
            }
            const kam::KamTrace tr = run_kam(dual_args, alpha);
            kam_meta(tr, t);
            Verdict v = kam_verdict(tr, common.strict, t);
            if (tr.final_constant.kind != kam::ConstKind::Elliptic)
                throw PrecisionError("dual: final constant is not elliptic, no dual eigenfunction");
            kam::Conjugacy B = tr.B;
            const kam::Normalization nz = kam::normalize_elliptic(tr.final_constant);
            B.push_const(nz.U);
            const FourierMap Bf = B.to_fourier(dual_K, dual_args.h_tilde);
            const duality::DualSequence u = duality::dual_eigenfunction(Bf);
            const int deg = B.degree();
            const auto gp = duality::prop_shapes(deg, dual_args.h_tilde, 0.1);
            const auto g = duality::goodness_check(Bf, gp.C1, gp.C2, gp.gamma, gp.ell);
            t.meta.emplace_back("phase_x", nz.r);
            t.meta.emplace_back("parity", static_cast<std::int64_t>(u.parity));
            t.meta.emplace_back("dual_residual",
                                duality::dual_residual(u, dual_args.amo.lambda, alpha, dual_args.E, nz.r));
            t.meta.emplace_back("two_window_mass", u.two_window_fraction(0.5 * std::abs(deg), 0.0));
            t.meta.emplace_back("good_h1", g.h1);
            t.meta.emplace_back("good_h2", g.h2);
            t.meta.emplace_back("good_worst_ratio", g.worst_ratio);
            t.columns = {"site", "re", "im", "abs"};
            for (int j = -u.K; j <= u.K; ++j) {
                const cplx c = u.at(j);
                t.rows.push_back({u.site(j), c.real(), c.imag(), std::abs(c)});
            }
            return v;
        };
    });

    // growth
    AmoArgs gr_amo;
    double gr_E = 0.0, gr_theta = 0.0;
    std::int64_t gr_N = 100000;
    std::string gr_norm = "hs";
    CLI::App* gr = sub("growth", "growth exponent ln||U_E(n)|| / ln n of the fundamental solution");
    add_amo(gr, gr_amo);
    gr->add_option("--E", gr_E, "energy")->required();
    gr->add_option("--N", gr_N, "largest n")->check(CLI::Range(std::int64_t{2}, std::int64_t{10000000}));
    gr->add_option("--theta", gr_theta, "phase");
    gr->add_option("--norm", gr_norm, "norm")->check(CLI::IsMember({"hs", "op"}));
    gr->callback([&] {
        body = [&](Table& t) {
            const auto alpha = arithmetic::parse_alpha(gr_amo.alpha);
            growth::GrowthOptions opt;
            opt.theta = gr_theta;
            opt.norm = gr_norm == "hs" ? cocycle::NormKind::HilbertSchmidt : cocycle::NormKind::Operator;
            const auto rows = growth::exponent_profile(cocycle::CocycleMap::amo(alpha, gr_amo.lambda, gr_E), gr_N, opt);
            t.columns = {"n", "lognorm", "exponent"};
            for (const auto& r : rows)
                t.rows.push_back({r.n, r.exponent * std::log(static_cast<double>(r.n)), r.exponent});
            return Verdict{};
        };
    });

    // growth-envelope
    AmoArgs ge_amo;
    double ge_E = 0.0, ge_eps = 0.1, ge_eps0 = 0.05;
    std::int64_t ge_N = 100000;
    growth::GrowthOptions ge_opt;
    CLI::App* ge = sub("growth-envelope", "growth exponent against the resonance envelope f(n)");
    add_amo(ge, ge_amo);
    ge->add_option("--E", ge_E, "energy")->required();
    ge->add_option("--eps", ge_eps, "envelope epsilon")->check(CLI::PositiveNumber);
    ge->add_option("--eps0", ge_eps0, "resonance strength threshold")->check(CLI::PositiveNumber);
    ge->add_option("--N", ge_N, "largest n")->check(CLI::Range(std::int64_t{2}, std::int64_t{10000000}));
    ge->add_option("--eps-tol", ge_opt.eps_tol, "verdict band on the exponent")->check(CLI::PositiveNumber);
    ge->add_option("--rho-iterations", ge_opt.rho_iterations, "rotation-number iterates")
        ->check(CLI::Range(std::int64_t{10000}, std::int64_t{100000000}));
    ge->add_option("--tau", ge_opt.tau, "exponent of the polylog correction")->check(CLI::PositiveNumber);
    ge->add_option("--K", ge_opt.K, "resonance scan bound")->check(CLI::Range(std::int64_t{1}, std::int64_t{100000}));
    ge->callback([&] {
        body = [&](Table& t) {
            const auto alpha = arithmetic::parse_alpha(ge_amo.alpha);
            const auto rep = growth::growth_report(ge_amo.lambda, alpha, ge_E, ge_eps, ge_eps0, ge_N, ge_opt);
            t.meta.emplace_back("rho", rep.rho);
            t.meta.emplace_back("rho_error", rep.rho_error);
            std::string ells, etas;
            for (std::size_t j = 0; j < rep.spec.ell.size(); ++j) {
                ells += (j ? " " : "") + std::to_string(rep.spec.ell[j]);
                etas += (j ? " " : "") + format_double(rep.spec.eta[j]);
            }
            t.meta.emplace_back("resonances", ells);
            t.meta.emplace_back("eta", etas);
            t.meta.emplace_back("passes", static_cast<std::int64_t>(rep.passes));
            t.columns = {"n", "exponent", "f", "pass", "polylog_slack", "pass_polylog"};
            for (const auto& r : rep.rows)
                t.rows.push_back({r.n, r.exponent, r.f, r.pass, r.polylog_slack, r.pass_polylog});
            return Verdict{};
        };
    });

    // resonances
    std::string res_alpha = "golden";
    double res_rho = 0.0, res_eps0 = 0.05;
    std::int64_t res_K = 1000;
    CLI::App* res = sub("resonances", "rotation-number resonances ||2 rho - l alpha|| <= e^{-|l| eps0}");
    res->add_option("--alpha", res_alpha, "frequency: golden, silver or cf:a1,a2,...");
    res->add_option("--rho", res_rho, "rotation number")->required();
    res->add_option("--eps0", res_eps0, "strength threshold")->check(CLI::PositiveNumber);
    res->add_option("--K", res_K, "scan bound")->check(CLI::Range(std::int64_t{1}, std::int64_t{10000000}));
    res->callback([&] {
        body = [&](Table& t) {
            const auto alpha = arithmetic::parse_alpha(res_alpha);
            const auto seq = arithmetic::resonances(alpha, res_rho, res_eps0, res_K);
            t.columns = {"l", "norm", "log_norm"};
            for (std::size_t j = 0; j < seq.entries.size(); ++j)
                t.rows.push_back({seq.entries[j], seq.norms[j], seq.log_norms[j]});
            return Verdict{};
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }
    for (CLI::App* s : app.get_subcommands()) command = s->get_name();

    if (const char* env = std::getenv("COCYCLE_LAB_PRECISION")) common.precision = env;
    if (common.precision == "extended") {
        err << "error: precision 'extended' is not available in this build (double only)\n";
        return kValidation;
    }
    if (common.precision != "double") {
        err << "error: precision must be 'double' or 'extended', got '" << common.precision << "'\n";
        return kValidation;
    }

    Table t;
    t.command = command;
    echo_config(app.get_subcommand(command), &app, t);
    Verdict v;
    try {
        v = body(t);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const MisuseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const PrecisionError& e) {
        err << "error (precision): " << e.what() << "\n";
        return kBudget;
    } catch (const GateError& e) {
        err << "error (smallness gate): " << e.what() << "\n";
        return kBudget;
    } catch (const CertificateError& e) {
        err << "error (certificate): " << e.what() << "\n";
        return kBudget;
    } catch (const BoundViolation& e) {
        err << "error (bound): " << e.what() << "\n";
        return kStrict;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kFailure;
    }
    for (const auto& w : v.warnings) err << "warning: " << w << "\n";

    const std::string text = common.format == "json" ? to_json(t) : to_csv(t);
    if (common.out == "-") {
        out << text;
    } else {
        std::ofstream f(common.out, std::ios::binary);
        if (!f) {
            err << "error: cannot open " << common.out << " for writing\n";
            return kValidation;
        }
        f << text;
    }
    return v.code;
}

}  // namespace cocycle_lab::cli
