#include "cocycle_lab/arithmetic.hpp"

#include "cocycle_lab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cocycle_lab::arithmetic {

namespace {

Hp frac(const Hp& x) { return x - floor(x); }

// Anything at or below this distance from Z counts as an exact hit.
Hp exact_floor(const PrecisionBudget& b) {
    int d = std::clamp(b.digits, 20, 256);
    return pow(Hp(10), -(d - 10));
}

void require_resolvable(const Irrational& alpha, std::int64_t K) {
    if (BigInt(K) > alpha.max_resolvable()) {
        std::ostringstream os;
        os << "scan bound " << K << " exceeds the resolvable range |k| <= "
           << alpha.max_resolvable() << " of a depth-" << alpha.depth() << " CF";
        throw PrecisionError(os.str());
    }
}

double hp_log(const Hp& x) { return static_cast<double>(log(x)); }

}  // namespace

Hp Irrational::value_hp() const { return Hp(num()) / Hp(den()); }

BigInt Irrational::max_resolvable() const { return q[q.size() - 2] - 1; }

double torus_norm(double x) {
    if (!std::isfinite(x)) throw DomainError("torus_norm: non-finite input");
    double r = x - std::round(x);
    return std::abs(r);
}

Hp torus_norm(const Hp& x) {
    Hp f = frac(x);
    return f > Hp(0.5) ? Hp(1) - f : f;
}

Irrational from_cf(const std::vector<std::int64_t>& coeffs, PrecisionBudget budget) {
    if (coeffs.size() < 2) throw DomainError("cf needs at least 2 coefficients");
    for (auto a : coeffs)
        if (a < 1) throw DomainError("cf coefficients must be ≥ 1");
    if (static_cast<int>(coeffs.size()) > budget.max_terms) {
        std::ostringstream os;
        os << "cf length " << coeffs.size() << " exceeds the budget of " << budget.max_terms << " terms";
        throw PrecisionError(os.str());
    }

    Irrational a;
    a.cf = coeffs;
    a.budget = budget;
    // p_{-1}/q_{-1} = 1/0, p_0/q_0 = 0/1
    BigInt pm1 = 1, qm1 = 0, p0 = 0, q0 = 1;
    a.p.push_back(p0);
    a.q.push_back(q0);
    for (auto c : coeffs) {
        BigInt pn = c * p0 + pm1;
        BigInt qn = c * q0 + qm1;
        pm1 = p0; qm1 = q0;
        p0 = pn; q0 = qn;
        a.p.push_back(pn);
        a.q.push_back(qn);
    }

    int digits = std::max(50, std::min(budget.digits, 256));
    BigInt scaled = (a.num() * pow(BigInt(10), digits)) / a.den();
    std::string s = scaled.str();
    if (static_cast<int>(s.size()) < digits) s.insert(0, digits - s.size(), '0');
    a.approx = "0." + s;
    a.value = static_cast<double>(a.value_hp());
    return a;
}

Irrational golden(int terms) { return from_cf(std::vector<std::int64_t>(terms, 1)); }
Irrational silver(int terms) { return from_cf(std::vector<std::int64_t>(terms, 2)); }

Irrational parse_alpha(const std::string& spec, PrecisionBudget budget) {
    if (spec == "golden") return from_cf(std::vector<std::int64_t>(budget.max_terms, 1), budget);
    if (spec == "silver") return from_cf(std::vector<std::int64_t>(budget.max_terms, 2), budget);
    if (spec.rfind("cf:", 0) != 0)
        throw DomainError("alpha must be golden, silver or cf:a1,a2,...");
    std::vector<std::int64_t> cf;
    std::stringstream ss(spec.substr(3));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            cf.push_back(v);
        } catch (const std::logic_error&) {
            throw DomainError("cf coefficient '" + tok + "' is not an integer");
        }
    }
    return from_cf(cf, budget);
}

std::pair<std::int64_t, std::int64_t> convergent(const Irrational& alpha, int n) {
    if (n < 0 || n > alpha.depth()) throw DomainError("convergent index out of range");
    return {static_cast<std::int64_t>(alpha.p[n]), static_cast<std::int64_t>(alpha.q[n])};
}

Hp frac_multiple(const Irrational& alpha, std::int64_t k) {
    BigInt r = (BigInt(k) * alpha.num()) % alpha.den();
    if (r < 0) r += alpha.den();
    return Hp(r) / Hp(alpha.den());
}

double knorm(const Irrational& alpha, std::int64_t k) {
    if (k == 0) throw DomainError("knorm: k must be nonzero");
    BigInt ak = k < 0 ? BigInt(-k) : BigInt(k);
    if (ak > alpha.max_resolvable()) throw PrecisionError("knorm: |k| beyond the resolvable range of the CF");
    BigInt r = (ak * alpha.num()) % alpha.den();
    BigInt d = std::min(r, BigInt(alpha.den() - r));
    return static_cast<double>(Hp(d) / Hp(alpha.den()));
}

ResonanceEstimate beta_estimate(const Irrational& alpha, std::int64_t K) {
    if (K < 10) throw DomainError("beta_estimate: K must be >= 10");
    int m = 0;
    for (int n = 1; n + 1 < static_cast<int>(alpha.q.size()); ++n)
        if (alpha.q[n] <= K) m = n;
    if (m == 0 || alpha.q[m + 1] <= K)
        throw PrecisionError("beta_estimate: CF too short to cover the scan bound");
    auto qm = static_cast<std::int64_t>(alpha.q[m]);
    ResonanceEstimate e;
    e.value = -std::log(knorm(alpha, qm)) / static_cast<double>(qm);
    e.witness = qm;
    return e;
}

ResonanceEstimate delta_estimate(const Irrational& alpha, const Hp& rho, std::int64_t K) {
    if (K < 10) throw DomainError("delta_estimate: K must be >= 10");
    require_resolvable(alpha, K);
    const Hp floor_v = exact_floor(alpha.budget);
    const Hp a = alpha.value_hp();
    const Hp two_rho = frac(2 * rho);
    const std::int64_t tail = (K + 1) / 2;

    ResonanceEstimate e;
    e.value = 0.0;
    Hp xp = two_rho, xm = two_rho;  // 2 rho + k alpha, 2 rho - k alpha
    for (std::int64_t k = 1; k <= K; ++k) {
        xp = frac(xp + a);
        xm = frac(xm - a);
        for (int s = 0; s < 2; ++s) {
            Hp d = torus_norm(s == 0 ? xp : xm);
            std::int64_t kk = s == 0 ? k : -k;
            if (d <= floor_v) {
                e.kind = ResonanceEstimate::Kind::ExactResonance;
                e.value = std::numeric_limits<double>::infinity();
                e.witness = kk;
                return e;
            }
            if (k >= tail) {
                double v = -hp_log(d) / static_cast<double>(k);
                if (v > e.value) {
                    e.value = v;
                    e.witness = kk;
                }
            }
        }
    }
    return e;
}

ResonanceEstimate delta_estimate(const Irrational& alpha, double rho, std::int64_t K) {
    return delta_estimate(alpha, Hp(rho), K);
}

ResonanceSeq resonances(const Irrational& alpha, const Hp& rho, double eps0, std::int64_t K) {
    if (!(eps0 > 0)) throw DomainError("resonances: eps0 must be positive");
    if (K < 1) throw DomainError("resonances: K must be >= 1");
    require_resolvable(alpha, K);
    ResonanceSeq out;
    out.rho = rho;
    out.eps0 = eps0;

    const Hp a = alpha.value_hp();
    const Hp two_rho = frac(2 * rho);
    Hp running = torus_norm(two_rho);  // m = 0 term of the running minimum
    Hp xp = two_rho, xm = two_rho;     // 2 rho - l alpha for l = +k and l = -k
    for (std::int64_t k = 1; k <= K; ++k) {
        xp = frac(xp - a);
        xm = frac(xm + a);
        Hp dp = torus_norm(xp), dm = torus_norm(xm);
        running = std::min(running, std::min(dp, dm));
        // ln of the threshold e^{-k eps0}
        const double log_thr = -static_cast<double>(k) * eps0;
        for (int s = 0; s < 2; ++s) {
            const Hp& d = s == 0 ? dp : dm;
            if (d > running) continue;
            double ld = d > 0 ? hp_log(d) : -std::numeric_limits<double>::infinity();
            if (ld > log_thr) continue;
            out.entries.push_back(s == 0 ? k : -k);
            out.norms.push_back(static_cast<double>(d));
            out.log_norms.push_back(ld);
            break;  // at most one entry per |l|, positive preferred
        }
    }
    return out;
}

ResonanceSeq resonances(const Irrational& alpha, double rho, double eps0, std::int64_t K) {
    return resonances(alpha, Hp(rho), eps0, K);
}

}  // namespace cocycle_lab::arithmetic
