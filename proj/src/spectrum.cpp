#include "cocycle_lab/spectrum.hpp"

#include "cocycle_lab/errors.hpp"
#include "cocycle_lab/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cocycle_lab::spectrum {

namespace {

void check_rational(Rational pq) {
    if (pq.q < 1) throw DomainError("rational frequency needs q >= 1");
    if (std::gcd(pq.p, pq.q) != 1) throw DomainError("rational frequency needs gcd(p,q) = 1");
}

double site_phase(Rational pq, double theta, std::int64_t n) {
    std::int64_t r = (n * pq.p) % pq.q;
    if (r < 0) r += pq.q;
    double x = theta + static_cast<double>(r) / static_cast<double>(pq.q);
    return x - std::floor(x);
}

// Eigenvalues of the q-site operator with Floquet sign sigma at phase theta.
std::vector<double> floquet_eigs(double lambda, Rational pq, double theta, int sigma) {
    const auto q = static_cast<int>(pq.q);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(q, q);
    for (int n = 0; n < q; ++n) H(n, n) = 2.0 * lambda * std::cos(kTwoPi * site_phase(pq, theta, n));
    for (int n = 0; n + 1 < q; ++n) H(n, n + 1) = H(n + 1, n) = 1.0;
    if (q == 1) {
        H(0, 0) += 2.0 * sigma;
    } else {
        H(0, q - 1) += sigma;
        H(q - 1, 0) += sigma;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw InternalError("band_spectrum: Floquet eigensolve failed");
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + q);
    return v;
}

// Bisection on g(E) = Delta(E) - target around a seed; keeps the seed when
// no sign change is found (touching bands give a double root).
double polish(double lambda, Rational pq, double seed, double target, double resolution) {
    auto g = [&](double E) { return chambers_discriminant(lambda, pq, E) - target; };
    double w = 1e-11 * (1.0 + std::abs(seed));
    double lo = seed - w, hi = seed + w;
    double glo = g(lo), ghi = g(hi);
    while ((glo > 0) == (ghi > 0) && w < 1e-6) {
        w *= 4.0;
        lo = seed - w;
        hi = seed + w;
        glo = g(lo);
        ghi = g(hi);
    }
    if ((glo > 0) == (ghi > 0)) return seed;
    while (hi - lo > resolution) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double monodromy_trace(double lambda, Rational pq, double E, double theta) {
    check_rational(pq);
    // u(n+1) = (E - V_n) u(n) - u(n-1); track (u(n), u(n-1)) for two initial vectors
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;  // columns (a,b) and (c,d)
    double log_scale = 0.0;
    for (std::int64_t n = 0; n < pq.q; ++n) {
        double t = E - 2.0 * lambda * std::cos(kTwoPi * site_phase(pq, theta, n));
        double na = t * a - b, nc = t * c - d;
        b = a;
        d = c;
        a = na;
        c = nc;
        double m = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
        if (m > 1e150) {
            a /= m; b /= m; c /= m; d /= m;
            log_scale += std::log(m);
        }
    }
    return (a + d) * std::exp(log_scale);
}

double chambers_discriminant(double lambda, Rational pq, double E) {
    return monodromy_trace(lambda, pq, E, 0.25 / static_cast<double>(pq.q));
}

std::int64_t gap_label(std::int64_t p, std::int64_t q, std::int64_t m) {
    if (q == 1) return 0;
    // k0 = m p^{-1} mod q via the extended Euclid algorithm
    std::int64_t r0 = q, r1 = ((p % q) + q) % q, s0 = 0, s1 = 1;
    while (r1 != 0) {
        std::int64_t t = r0 / r1;
        std::int64_t r2 = r0 - t * r1, s2 = s0 - t * s1;
        r0 = r1; r1 = r2;
        s0 = s1; s1 = s2;
    }
    if (r0 != 1) throw DomainError("gap_label: p and q not coprime");
    std::int64_t inv = ((s0 % q) + q) % q;
    auto k0 = static_cast<std::int64_t>((static_cast<__int128>(m) * inv) % q);
    k0 = (k0 + q) % q;
    std::int64_t k1 = k0 - q;
    if (k0 < -k1) return k0;
    if (-k1 < k0) return k1;
    return k0;  // tie at q/2: positive representative
}

BandSpectrum band_spectrum(double lambda, Rational pq, double resolution) {
    check_rational(pq);
    if (!(lambda > 0.0)) throw DomainError("band_spectrum: coupling must be positive (free case has no gaps)");
    if (resolution > 1e-6) throw DomainError("band_spectrum: resolution must be <= 1e-6");
    const double c = 2.0 + 2.0 * std::pow(lambda, static_cast<double>(pq.q));
    const double q = static_cast<double>(pq.q);

    std::vector<double> edges;
    for (double e : floquet_eigs(lambda, pq, 0.0, +1)) edges.push_back(polish(lambda, pq, e, c, resolution));
    for (double e : floquet_eigs(lambda, pq, 0.5 / q, -1)) edges.push_back(polish(lambda, pq, e, -c, resolution));
    std::sort(edges.begin(), edges.end());

    BandSpectrum bs;
    bs.pq = pq;
    bs.lambda = lambda;
    for (std::size_t i = 0; i + 1 < edges.size(); i += 2) bs.bands.emplace_back(edges[i], edges[i + 1]);
    for (std::size_t i = 1; i < bs.bands.size(); ++i) {
        Gap g;
        g.m = static_cast<std::int64_t>(i);
        g.label = gap_label(pq.p, pq.q, g.m);
        g.left = bs.bands[i - 1].second;
        g.right = bs.bands[i].first;
        g.length = std::max(0.0, g.right - g.left);
        g.below_floor = g.length < kGapFloor;
        bs.gaps.push_back(g);
    }
    return bs;
}

double ids(const BandSpectrum& bs, double E) {
    const double q = static_cast<double>(bs.pq.q);
    const double c = 2.0 + 2.0 * std::pow(bs.lambda, q);
    for (std::size_t i = 0; i < bs.bands.size(); ++i) {
        const auto& [lo, hi] = bs.bands[i];
        if (E < lo) return static_cast<double>(i) / q;
        if (E <= hi) {
            double d_lo = chambers_discriminant(bs.lambda, bs.pq, lo);
            double s = d_lo > 0 ? 1.0 : -1.0;
            double x = std::clamp(s * chambers_discriminant(bs.lambda, bs.pq, E) / c, -1.0, 1.0);
            return (static_cast<double>(i) + std::acos(x) / kPi) / q;
        }
    }
    return 1.0;
}

double hausdorff(const std::vector<std::pair<double, double>>& a,
                 const std::vector<std::pair<double, double>>& b) {
    auto dist = [](double x, const std::vector<std::pair<double, double>>& s) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& [lo, hi] : s) {
            if (x >= lo && x <= hi) return 0.0;
            d = std::min(d, x < lo ? lo - x : x - hi);
        }
        return d;
    };
    // sup over a of dist(., b) is attained at an endpoint of a or at the
    // midpoint of a gap of b lying inside a
    auto one_sided = [&](const auto& s, const auto& t) {
        double m = 0.0;
        for (const auto& [lo, hi] : s) {
            m = std::max({m, dist(lo, t), dist(hi, t)});
            for (std::size_t j = 0; j + 1 < t.size(); ++j) {
                double mid = 0.5 * (t[j].second + t[j + 1].first);
                if (mid >= lo && mid <= hi) m = std::max(m, dist(mid, t));
            }
        }
        return m;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

DecayTable gap_decay_experiment(double lambda, const arithmetic::Irrational& alpha, std::int64_t q_max,
                                int k_max) {
    if (!(lambda > 0.0) || lambda == 1.0) throw DomainError("gap_decay_experiment: need 0 < lambda != 1");
    if (q_max < 50) throw DomainError("gap_decay_experiment: q_max must be >= 50");
    int n = 0;
    for (int j = 1; j <= alpha.depth(); ++j)
        if (alpha.q[j] <= q_max) n = j;
    if (n == 0 || n + 1 > alpha.depth()) throw PrecisionError("gap_decay_experiment: CF too short for q_max");

    DecayTable t;
    t.lambda = lambda;
    auto [p1, q1] = arithmetic::convergent(alpha, n);
    auto [p2, q2] = arithmetic::convergent(alpha, n + 1);
    t.primary = {p1, q1};
    t.check = {p2, q2};
    BandSpectrum a = band_spectrum(lambda, t.primary);
    BandSpectrum b = band_spectrum(lambda, t.check);
    auto find = [](const BandSpectrum& bs, std::int64_t k) -> const Gap* {
        for (const auto& g : bs.gaps)
            if (g.label == k) return &g;
        return nullptr;
    };
    for (int k = 1; k <= k_max; ++k) {
        if (k >= q1) break;  // labels only defined mod q
        const Gap* ga = find(a, k);
        const Gap* gb = find(b, k);
        if (!ga || !gb) continue;
        DecayRow r;
        r.k = k;
        r.left = ga->left;
        r.right = ga->right;
        r.length = ga->length;
        r.cross_length = gb->length;
        r.below_floor = ga->below_floor || gb->below_floor;
        r.rate = -std::log(std::max(r.length, kGapFloor)) / k;
        r.stable = !r.below_floor && std::abs(r.length - r.cross_length) <= 0.1 * r.cross_length;
        t.rows.push_back(r);
    }
    return t;
}

}  // namespace cocycle_lab::spectrum
