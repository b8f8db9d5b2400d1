#include "cocycle_lab/growth.hpp"

#include "cocycle_lab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cocycle_lab::growth {

namespace {

void fill_windows(EnvelopeSpec& s) {
    s.windows.clear();
    const double c = s.eps * s.h_lambda / 256.0;
    for (std::size_t j = 0; j < s.ell.size(); ++j) {
        double lo = c * std::abs(static_cast<double>(s.ell[j]));
        double hi = j + 1 < s.ell.size() ? c * std::abs(static_cast<double>(s.ell[j + 1]))
                                         : std::numeric_limits<double>::infinity();
        s.windows.emplace_back(lo, hi);
    }
}

void check_lambda(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("growth: need 0 < lambda < 1");
}

}  // namespace

EnvelopeSpec make_envelope_spec(const arithmetic::Irrational& alpha, std::vector<std::int64_t> ell,
                                std::vector<double> eta, double rho, double lambda, double eps, double eps0) {
    check_lambda(lambda);
    if (!(eps > 0.0) || !(eps0 > 0.0)) throw DomainError("envelope: eps and eps0 must be positive");
    if (ell.size() != eta.size()) throw DomainError("envelope: ell and eta differ in length");
    for (std::size_t j = 0; j < ell.size(); ++j) {
        if (ell[j] == 0) throw DomainError("envelope: resonance 0 is not allowed");
        if (j > 0 && std::abs(ell[j]) <= std::abs(ell[j - 1]))
            throw DomainError("envelope: |l_j| must increase strictly");
        if (!(eta[j] > 0.0)) throw DomainError("envelope: eta must be positive");
    }
    EnvelopeSpec s;
    s.alpha = alpha;
    s.ell = std::move(ell);
    s.eta = std::move(eta);
    s.rho = rho;
    s.h_lambda = -std::log(lambda);
    s.eps = eps;
    s.eps0 = eps0;
    fill_windows(s);
    return s;
}

EnvelopeSpec make_envelope_spec(const arithmetic::Irrational& alpha, double rho, double lambda, double eps,
                                double eps0, std::int64_t K) {
    check_lambda(lambda);
    if (!(eps0 < -std::log(lambda))) throw DomainError("envelope: need eps0 < h_lambda");
    const arithmetic::ResonanceSeq seq = arithmetic::resonances(alpha, rho, eps0, K);
    std::vector<double> eta;
    for (std::size_t j = 0; j < seq.entries.size(); ++j) {
        // |sin 2 pi x| = sin(pi ||2x||) near a resonance; log_norms survives underflow
        const double lnorm = seq.log_norms[j];
        const double s = std::sin(kPi * std::min(2.0 * seq.norms[j], 1.0));
        double ln_sin = s > 1e-300 ? std::log(s) : std::log(2.0 * kPi) + lnorm;
        eta.push_back(std::isfinite(lnorm) ? -ln_sin / std::abs(static_cast<double>(seq.entries[j]))
                                           : std::numeric_limits<double>::infinity());
    }
    return make_envelope_spec(alpha, seq.entries, std::move(eta), rho, lambda, eps, eps0);
}

int window_of(const EnvelopeSpec& spec, double n) {
    const double ln = std::log(std::abs(n));
    for (std::size_t j = spec.windows.size(); j-- > 0;)
        if (ln >= spec.windows[j].first) return static_cast<int>(j);
    return -1;
}

double envelope_f(const EnvelopeSpec& spec, double n) {
    if (!(std::abs(n) >= 1.0)) throw DomainError("envelope_f: need |n| >= 1");
    if (spec.ell.empty()) return 0.0;
    const int j = window_of(spec, n);
    if (j < 0)
        throw DomainError("envelope_f: n = " + std::to_string(n) + " lies below the first window (ln n < " +
                          std::to_string(spec.windows.front().first) + ")");
    const double ln = std::log(std::abs(n));
    if (ln == 0.0) return 0.0;
    const std::int64_t l = spec.ell[j];
    const double al = std::abs(static_cast<double>(l));
    const double eta = spec.eta[j];
    if (!std::isfinite(eta) || ln < eta * al) return std::max(1.0 - al * spec.h_lambda / ln, 0.0);
    // |sin 2 pi n (rho - l alpha/2)| = |sin pi (2 n rho - n l alpha)|
    const auto nn = static_cast<std::int64_t>(std::llround(n));
    arithmetic::Hp x = 2 * arithmetic::Hp(nn) * arithmetic::Hp(spec.rho) - arithmetic::frac_multiple(spec.alpha, nn * l);
    x -= boost::multiprecision::floor(x);
    const double s = std::abs(std::sin(kPi * static_cast<double>(x)));
    if (s == 0.0) return 0.0;
    return std::max((std::log(s) + al * (eta - spec.h_lambda)) / ln, 0.0);
}

std::vector<GrowthRow> exponent_profile(const cocycle::CocycleMap& c, std::int64_t N, const GrowthOptions& opt) {
    if (N < 2) throw DomainError("exponent_profile: need N >= 2");
    const cocycle::GrowthProfile g = cocycle::growth_profile(c, opt.theta, N, opt.norm);
    std::vector<GrowthRow> rows;
    for (std::size_t i = 0; i < g.ns.size(); ++i) {
        if (g.ns[i] < 2) continue;
        GrowthRow r;
        r.n = g.ns[i];
        r.exponent = g.lognorms[i] / std::log(static_cast<double>(r.n));
        rows.push_back(r);
    }
    return rows;
}

namespace {

GrowthReport compare(const cocycle::CocycleMap& c, EnvelopeSpec spec, std::int64_t N, const GrowthOptions& opt,
                     double rho, double rho_error) {
    GrowthReport rep;
    rep.rho = rho;
    rep.rho_error = rho_error;
    rep.spec = std::move(spec);
    for (GrowthRow r : exponent_profile(c, N, opt)) {
        if (!rep.spec.ell.empty() && window_of(rep.spec, static_cast<double>(r.n)) < 0) continue;
        r.f = envelope_f(rep.spec, static_cast<double>(r.n));
        r.pass = std::abs(r.exponent - r.f) <= opt.eps_tol;
        const double ln = std::log(static_cast<double>(r.n));
        r.polylog_slack = 4.0 * opt.tau * std::max(std::log(ln), 0.0) / ln;
        r.pass_polylog = std::abs(r.exponent - r.f) <= opt.eps_tol + r.polylog_slack;
        rep.passes += r.pass ? 1 : 0;
        rep.rows.push_back(r);
    }
    return rep;
}

}  // namespace

GrowthReport growth_report(double lambda, const arithmetic::Irrational& alpha, double E, double eps, double eps0,
                           std::int64_t N, const GrowthOptions& opt) {
    check_lambda(lambda);
    const auto c = cocycle::CocycleMap::amo(alpha, lambda, E);
    const cocycle::RotationEstimate rot = cocycle::rotation_number(c, opt.rho_iterations, opt.theta);
    EnvelopeSpec spec = make_envelope_spec(alpha, rot.value, lambda, eps, eps0, opt.K);
    // membership of every |l| <= K must survive the rotation-number uncertainty
    for (std::int64_t l = -opt.K; l <= opt.K; ++l) {
        if (l == 0) continue;
        arithmetic::Hp x = 2 * arithmetic::Hp(rot.value) - arithmetic::frac_multiple(alpha, l);
        const double d = static_cast<double>(arithmetic::torus_norm(x));
        const double thr = std::exp(-std::abs(static_cast<double>(l)) * eps0);
        if (std::abs(d - thr) <= 2.0 * rot.error)
            throw CertificateError("growth_report: resonance membership of l = " + std::to_string(l) +
                                   " is not resolved by the rotation number (error " + std::to_string(rot.error) +
                                   ")");
    }
    return compare(c, std::move(spec), N, opt, rot.value, rot.error);
}

GrowthReport growth_report(double lambda, const arithmetic::Irrational& alpha, double E, const EnvelopeSpec& spec,
                           std::int64_t N, const GrowthOptions& opt) {
    check_lambda(lambda);
    const auto c = cocycle::CocycleMap::amo(alpha, lambda, E);
    return compare(c, spec, N, opt, spec.rho, 0.0);
}

std::vector<ExponentWindow> exponent_windows(const cocycle::CocycleMap& c, std::int64_t N, double theta,
                                             int per_decade, std::int64_t n_min) {
    if (n_min < 2 || N < n_min) throw DomainError("exponent_windows: need 2 <= n_min <= N");
    if (N > 10'000'000) throw DomainError("exponent_windows: N must be <= 10^7");
    if (per_decade < 1) throw DomainError("exponent_windows: per_decade must be positive");
    const double step = std::pow(10.0, 1.0 / per_decade);
    std::vector<ExponentWindow> out;
    ExponentWindow w;
    w.n_lo = n_min;
    w.n_hi = std::min<std::int64_t>(N, std::max<std::int64_t>(n_min, std::llround(n_min * step) - 1));
    w.min_exponent = std::numeric_limits<double>::infinity();
    w.max_exponent = -std::numeric_limits<double>::infinity();
    Mat2 m = Mat2::Identity();
    double log_scale = 0.0;
    for (std::int64_t n = 1; n <= N; ++n) {
        m = c.eval(c.orbit(theta, n - 1)) * m;
        const double s = hs_norm(m);
        if (s > 1e3) {
            m /= s;
            log_scale += std::log(s);
        }
        if (n < n_min) continue;
        const double e = (log_scale + std::log(hs_norm(m))) / std::log(static_cast<double>(n));
        w.min_exponent = std::min(w.min_exponent, e);
        if (e > w.max_exponent) {
            w.max_exponent = e;
            w.argmax = n;
        }
        if (n == w.n_hi) {
            out.push_back(w);
            w.n_lo = n + 1;
            w.n_hi = std::min<std::int64_t>(N, std::max<std::int64_t>(n + 1, std::llround(w.n_lo * step) - 1));
            w.min_exponent = std::numeric_limits<double>::infinity();
            w.max_exponent = -std::numeric_limits<double>::infinity();
        }
    }
    return out;
}

PlantedResonance plant_resonance(const arithmetic::Irrational& alpha, double lambda, std::int64_t ell, double eta,
                                 int side, std::int64_t rho_iterations, int bisections) {
    if (!(lambda > 0.0)) throw DomainError("plant_resonance: lambda must be positive");
    if (ell == 0 || !(eta > 0.0)) throw DomainError("plant_resonance: need l != 0 and eta > 0");
    if (side != 1 && side != -1) throw DomainError("plant_resonance: side must be +1 or -1");
    const double d = std::asin(std::exp(-eta * std::abs(static_cast<double>(ell)))) / kTwoPi;
    const double la = static_cast<double>(arithmetic::frac_multiple(alpha, ell));
    double target = la + side * d;
    target -= std::floor(target);
    // 2 rho is the integrated density of states, increasing in E from 0 to 1 across the spectrum
    double lo = -2.0 - 2.0 * lambda, hi = 2.0 + 2.0 * lambda;
    for (int i = 0; i < bisections; ++i) {
        const double mid = 0.5 * (lo + hi);
        const auto r = cocycle::rotation_number(cocycle::CocycleMap::amo(alpha, lambda, mid), rho_iterations, 0.0);
        double ids = 2.0 * r.value;
        ids -= std::floor(ids);
        (ids < target ? lo : hi) = mid;
    }
    PlantedResonance p;
    p.E = 0.5 * (lo + hi);
    const auto r = cocycle::rotation_number(cocycle::CocycleMap::amo(alpha, lambda, p.E), rho_iterations, 0.0);
    p.rho = r.value;
    p.rho_error = r.error;
    p.offset = 2.0 * r.value - la;
    p.offset -= std::round(p.offset);
    const double s = std::abs(std::sin(kTwoPi * p.offset));
    p.eta_measured = s > 0.0 ? -std::log(s) / std::abs(static_cast<double>(ell)) : std::numeric_limits<double>::infinity();
    return p;
}

double constant_hs_sq(const kam::Su11Constant& a, std::int64_t n) {
    if (a.kind != kam::ConstKind::Elliptic) throw DomainError("constant_hs_sq: constant is not elliptic");
    const double s = std::sin(static_cast<double>(n) * a.xi);
    const double q = std::abs(a.nu) / a.xi;
    return 2.0 + 4.0 * s * s * q * q;
}

std::string to_string(GrowthRegime r) {
    switch (r) {
        case GrowthRegime::Flat: return "flat";
        case GrowthRegime::Linear: return "linear";
        case GrowthRegime::Oscillatory: return "oscillatory";
    }
    return "?";
}

RegimePrediction regime_predict(const kam::Su11Constant& a, std::int64_t n_low, std::int64_t n_high,
                                int per_decade) {
    if (a.kind != kam::ConstKind::Elliptic) throw DomainError("regime_predict: constant is not elliptic");
    if (n_low < 1 || n_high < n_low) throw DomainError("regime_predict: need 1 <= n_low <= n_high");
    if (per_decade < 1) throw DomainError("regime_predict: per_decade must be positive");
    RegimePrediction p;
    const double nu = std::abs(a.nu);
    p.ratio = nu / a.xi;
    p.turnover = 1.0 / a.xi;
    std::vector<std::int64_t> ns;
    const double step = std::pow(10.0, 1.0 / per_decade);
    for (double x = static_cast<double>(n_low); x < static_cast<double>(n_high) * (1.0 + 1e-12); x *= step) {
        const auto n = static_cast<std::int64_t>(std::llround(x));
        if (ns.empty() || n > ns.back()) ns.push_back(n);
    }
    if (ns.back() != n_high) ns.push_back(n_high);
    for (std::int64_t n : ns) {
        RegimeRow r;
        r.n = n;
        const double dn = static_cast<double>(n);
        r.shape = std::min(dn, p.turnover) * nu + 1.0;
        const double s = std::sin(dn * a.xi);
        r.exact = std::sqrt(1.0 + 2.0 * s * s * p.ratio * p.ratio);
        if (p.ratio < 0.5)
            r.regime = GrowthRegime::Flat;
        else if (dn < p.turnover)
            r.regime = GrowthRegime::Linear;
        else
            r.regime = GrowthRegime::Oscillatory;
        p.rows.push_back(r);
    }
    return p;
}

}  // namespace cocycle_lab::growth
