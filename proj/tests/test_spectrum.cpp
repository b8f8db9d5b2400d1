#include "cocycle_lab/errors.hpp"
#include "cocycle_lab/linalg.hpp"
#include "cocycle_lab/spectrum.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>

using namespace cocycle_lab;
using namespace cocycle_lab::spectrum;

namespace {

// Independent oracle: eigenvalues of the q x q Bloch Hamiltonian
// H(theta, k) psi_j = psi_{j+1} + psi_{j-1} + 2 lambda cos 2 pi (theta + j p / q) psi_j
// with psi_{j+q} = e^{ik} psi_j.
std::vector<double> bloch_eigs(double lambda, Rational pq, double theta, double k) {
    const int q = static_cast<int>(pq.q);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(q, q);
    for (int j = 0; j < q; ++j) H(j, j) = 2.0 * lambda * std::cos(kTwoPi * (theta + static_cast<double>(j * pq.p) / q));
    if (q == 1) {
        H(0, 0) += 2.0 * std::cos(k);
    } else {
        for (int j = 0; j + 1 < q; ++j) H(j, j + 1) = H(j + 1, j) = 1.0;
        H(q - 1, 0) += std::exp(cplx(0.0, k));
        H(0, q - 1) += std::exp(cplx(0.0, -k));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + q);
    return v;
}

// Band j spans the extremes of the j-th eigenvalue; the extremes sit at
// cos 2 pi q theta = +-1 and k in {0, pi}.
std::vector<std::pair<double, double>> oracle_bands(double lambda, Rational pq) {
    const int q = static_cast<int>(pq.q);
    std::vector<std::pair<double, double>> b(q, {1e300, -1e300});
    for (double th : {0.0, 0.5 / q})
        for (double k : {0.0, kPi}) {
            const auto e = bloch_eigs(lambda, pq, th, k);
            for (int j = 0; j < q; ++j) {
                b[j].first = std::min(b[j].first, e[j]);
                b[j].second = std::max(b[j].second, e[j]);
            }
        }
    return b;
}

std::int64_t brute_label(std::int64_t p, std::int64_t q, std::int64_t m) {
    for (std::int64_t k = 0; k <= q; ++k)
        for (std::int64_t s : {k, -k})
            if (((s * p - m) % q + q) % q == 0) return s;
    return 0;
}

}  // namespace

TEST_CASE("Chambers: q = 1 discriminant is E, theta enters only through cos 2 pi q theta") {
    CHECK(chambers_discriminant(0.7, {0, 1}, 1.3) == doctest::Approx(1.3).epsilon(1e-14));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Rational pq : {Rational{3, 5}, Rational{5, 8}, Rational{13, 21}}) {
        for (int i = 0; i < 10; ++i) {
            const double lambda = 0.2 + 2 * u(rng), E = -3 + 6 * u(rng), th = u(rng);
            const double expect = chambers_discriminant(lambda, pq, E) -
                                  2 * std::pow(lambda, static_cast<double>(pq.q)) * std::cos(kTwoPi * pq.q * th);
            CHECK(monodromy_trace(lambda, pq, E, th) ==
                  doctest::Approx(expect).epsilon(1e-9).scale(std::abs(chambers_discriminant(lambda, pq, E)) + 1));
        }
    }
}

TEST_CASE("Chambers discriminant is invariant under E -> -E up to the parity (-1)^q") {
    for (Rational pq : {Rational{3, 5}, Rational{5, 8}}) {
        for (double E : {0.3, 1.1, 2.4}) {
            const double sign = pq.q % 2 == 0 ? 1.0 : -1.0;
            CHECK(chambers_discriminant(0.8, pq, -E) == doctest::Approx(sign * chambers_discriminant(0.8, pq, E)));
        }
    }
}

TEST_CASE("band_spectrum matches Bloch diagonalization") {
    for (Rational pq : {Rational{1, 2}, Rational{2, 5}, Rational{5, 8}, Rational{21, 34}}) {
        for (double lambda : {0.3, 1.0, 2.0}) {
            const auto bs = band_spectrum(lambda, pq);
            const auto ob = oracle_bands(lambda, pq);
            REQUIRE(bs.bands.size() == ob.size());
            for (std::size_t j = 0; j < ob.size(); ++j) {
                CHECK(bs.bands[j].first == doctest::Approx(ob[j].first).epsilon(1e-9));
                CHECK(bs.bands[j].second == doctest::Approx(ob[j].second).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("band_spectrum at 1/2 has two bands symmetric about 0") {
    const auto bs = band_spectrum(1.0, {1, 2});
    REQUIRE(bs.bands.size() == 2);
    CHECK(bs.bands[0].first == doctest::Approx(-bs.bands[1].second));
    CHECK(bs.bands[0].second == doctest::Approx(-bs.bands[1].first));
    REQUIRE(bs.gaps.size() == 1);
    CHECK(bs.gaps[0].m == 1);
    CHECK(bs.gaps[0].label == 1);
}

TEST_CASE("gaps carry IDS m/q and signed label k with k p = m mod q") {
    const Rational pq{5, 8};
    const auto bs = band_spectrum(0.6, pq);
    REQUIRE(bs.gaps.size() == 7);
    for (const Gap& g : bs.gaps) {
        CHECK(g.label == brute_label(pq.p, pq.q, g.m));
        CHECK(g.length == doctest::Approx(g.right - g.left));
        const double mid = 0.5 * (g.left + g.right);
        CHECK(ids(bs, mid) == doctest::Approx(static_cast<double>(g.m) / pq.q).epsilon(1e-12));
    }
    for (std::int64_t m = 1; m < 34; ++m) CHECK(gap_label(21, 34, m) == brute_label(21, 34, m));
    CHECK_THROWS_AS(gap_label(4, 8, 1), DomainError);
}

TEST_CASE("ids is monotone from 0 to 1") {
    const auto bs = band_spectrum(0.9, {8, 13});
    const double lo = bs.bands.front().first, hi = bs.bands.back().second;
    CHECK(ids(bs, lo - 1) == 0.0);
    CHECK(ids(bs, hi + 1) == 1.0);
    double prev = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double v = ids(bs, lo + (hi - lo) * i / 2000.0);
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
}

TEST_CASE("bands and gaps tile the hull") {
    for (Rational pq : {Rational{3, 5}, Rational{13, 21}}) {
        const auto bs = band_spectrum(1.4, pq);
        double total = 0.0;
        for (auto [a, b] : bs.bands) total += b - a;
        for (const Gap& g : bs.gaps) total += g.length;
        CHECK(total == doctest::Approx(bs.bands.back().second - bs.bands.front().first).epsilon(1e-12));
    }
}

TEST_CASE("Aubry duality: gap lengths at 2 are twice those at 1/2") {
    for (Rational pq : {Rational{5, 8}, Rational{21, 34}}) {
        const auto a = band_spectrum(2.0, pq), b = band_spectrum(0.5, pq);
        REQUIRE(a.gaps.size() == b.gaps.size());
        for (std::size_t i = 0; i < a.gaps.size(); ++i) {
            CHECK(a.gaps[i].m == b.gaps[i].m);
            CHECK(std::abs(a.gaps[i].length - 2 * b.gaps[i].length) < 1e-6);
        }
        std::vector<std::pair<double, double>> scaled;
        for (auto [l, r] : b.bands) scaled.push_back({2 * l, 2 * r});
        CHECK(hausdorff(a.bands, scaled) < 1e-9);
    }
}

TEST_CASE("hausdorff on interval unions") {
    CHECK(hausdorff({{0, 1}}, {{0, 1}}) == 0.0);
    CHECK(hausdorff({{0, 1}}, {{0, 1.5}}) == doctest::Approx(0.5));
    CHECK(hausdorff({{0, 1}, {3, 4}}, {{0, 4}}) == doctest::Approx(1.0));
}

TEST_CASE("band_spectrum rejects the free case and bad rationals") {
    CHECK_THROWS_AS(band_spectrum(0.0, {1, 2}), DomainError);
    CHECK_THROWS_AS(band_spectrum(1.0, {2, 4}), DomainError);
    CHECK_THROWS_AS(band_spectrum(1.0, {1, 0}), DomainError);
}

TEST_CASE("gap_decay_experiment: golden, q <= 100, six labels") {
    const auto t = gap_decay_experiment(0.5, arithmetic::golden(), 100, 6);
    CHECK(t.primary.q == 89);
    CHECK(t.check.q == 144);
    REQUIRE(t.rows.size() == 6);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const DecayRow& r = t.rows[i];
        CHECK(r.k == static_cast<std::int64_t>(i + 1));
        CHECK(r.length > 0.0);
        CHECK(r.rate == doctest::Approx(-std::log(r.length) / r.k));
        if (r.stable) CHECK(std::abs(r.length - r.cross_length) <= 0.05 * r.length);
    }
    CHECK_THROWS_AS(gap_decay_experiment(1.0, arithmetic::golden(), 100, 6), DomainError);
    CHECK_THROWS_AS(gap_decay_experiment(0.5, arithmetic::from_cf({1, 1, 1}), 100, 6), PrecisionError);
}
