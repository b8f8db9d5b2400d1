#include "cocycle_lab/cocycle.hpp"
#include "cocycle_lab/errors.hpp"
#include "cocycle_lab/spectrum.hpp"

#include <doctest.h>

#include <random>

using namespace cocycle_lab;
using namespace cocycle_lab::cocycle;

namespace {

Mat2 amo_matrix(double lambda, double E, double theta) {
    Mat2 m;
    m << E - 2.0 * lambda * std::cos(kTwoPi * theta), -1.0, 1.0, 0.0;
    return m;
}

// Plain product in long double, no renormalization: the oracle for short orbits.
Eigen::Matrix<long double, 2, 2> naive_product(double lambda, double E, long double alpha, long double theta, int n) {
    Eigen::Matrix<long double, 2, 2> m = Eigen::Matrix<long double, 2, 2>::Identity();
    for (int k = 0; k < n; ++k) {
        const long double th = theta + k * alpha;
        Eigen::Matrix<long double, 2, 2> s;
        s << E - 2.0L * lambda * std::cos(2.0L * 3.14159265358979323846264L * th), -1.0L, 1.0L, 0.0L;
        m = s * m;
    }
    return m;
}

double band_center(double lambda, std::int64_t p, std::int64_t q, int band) {
    const auto bs = spectrum::band_spectrum(lambda, {p, q});
    return 0.5 * (bs.bands[band].first + bs.bands[band].second);
}

}  // namespace

TEST_CASE("iterate: identity, short products, inverse formula") {
    const auto a = arithmetic::golden();
    const auto c = CocycleMap::amo(a, 0.7, 0.3);
    CHECK((iterate(c, 0.2, 0).full() - Mat2::Identity()).norm() == 0.0);
    const long double al = (std::sqrt(5.0L) - 1.0L) / 2.0L;
    for (int n : {1, 2, 5, 17, 60}) {
        const Mat2 m = iterate(c, 0.2, n).full();
        const Mat2 o = naive_product(0.7, 0.3, al, 0.2L, n).cast<double>();
        CHECK((m - o).norm() <= 1e-11 * o.norm());
    }
    // A_{-n}(theta) = A_n(theta - n alpha)^{-1}
    const Mat2 neg = iterate(c, 0.2, -9).full();
    const Mat2 pos = iterate(c, c.orbit(0.2, -9), 9).full();
    CHECK((neg * pos - Mat2::Identity()).norm() < 1e-10);
}

TEST_CASE("iterate: cocycle identity at random triples") {
    const auto a = arithmetic::golden();
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> d(1, 3000);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double lambda : {0.5, 1.5}) {
        const auto c = CocycleMap::amo(a, lambda, 0.4);
        for (int i = 0; i < 20; ++i) {
            const int n = d(rng), m = d(rng);
            const double th = u(rng);
            const ScaledMatrix lhs = iterate(c, th, n + m);
            const ScaledMatrix r1 = iterate(c, c.orbit(th, m), n), r2 = iterate(c, th, m);
            const Mat2 rhs = r1.matrix * r2.matrix;
            const double shift = r1.log_scale + r2.log_scale - lhs.log_scale;
            const Mat2 diff = lhs.matrix - std::exp(shift) * rhs;
            CHECK(diff.norm() <= 1e-8 * lhs.matrix.norm());
        }
    }
}

TEST_CASE("iterate: determinant conservation over 10^6 iterates") {
    // non-growing regime: det of the full product is representable
    const auto c = CocycleMap::amo(arithmetic::golden(), 0.5, 0.0);
    CHECK(std::abs(iterate(c, 0.3, 1000000).det() - 1.0) < 1e-10 * 1e6);
    // growing regime: the rescaled product still tracks ln 3 per step
    const ScaledMatrix s = iterate(CocycleMap::amo(arithmetic::golden(), 3.0, 0.1), 0.3, 1000000);
    CHECK(s.log_norm() / 1e6 == doctest::Approx(std::log(3.0)).epsilon(0.05));
}

TEST_CASE("free cocycle at E = 1 stays bounded") {
    const auto c = CocycleMap::amo(arithmetic::golden(), 0.0, 1.0);
    // S = P R P^{-1}; ||S^n|| <= ||P|| ||P^{-1}|| where S has eigenvalues e^{+-i pi/3}
    Eigen::EigenSolver<Mat2> es(amo_matrix(0.0, 1.0, 0.0));
    const Eigen::Matrix2cd P = es.eigenvectors();
    const double bound = op_norm(CMat2(P)) * op_norm(CMat2(P.inverse()));
    double worst = 0.0;
    for (int n = 1; n <= 10000; n += 37) worst = std::max(worst, std::exp(iterate(c, 0.0, n).log_norm()));
    CHECK(worst <= bound * (1 + 1e-9));
}

TEST_CASE("lyapunov matches max(0, ln lambda) on spectral samples") {
    const auto a = arithmetic::golden();
    for (double lambda : {2.0, 3.0}) {
        const double E = band_center(lambda, 34, 55, 20);
        const auto L = lyapunov(CocycleMap::amo(a, lambda, E), 10000, default_phases());
        CHECK(L.value == doctest::Approx(std::log(lambda)).epsilon(0.05));
    }
    const double E = band_center(0.5, 34, 55, 20);
    CHECK(std::abs(lyapunov(CocycleMap::amo(a, 0.5, E), 10000, default_phases()).value) < 0.02);
    CHECK(default_phases().size() == 32);
    CHECK_THROWS_AS(lyapunov(CocycleMap::amo(a, 0.5, E), 100, default_phases()), DomainError);
}

TEST_CASE("rotation number anchors below and above the spectrum") {
    const auto a = arithmetic::golden();
    const double lambda = 0.8;
    CHECK(rotation_number(CocycleMap::amo(a, lambda, -2 * lambda - 3), 10000, 0.0).value < 1e-3);
    const double top = rotation_number(CocycleMap::amo(a, lambda, 2 * lambda + 3), 10000, 0.0).value;
    CHECK(std::abs(top - 0.5) < 1e-3);
}

TEST_CASE("rotation number: 2 rho agrees with the approximant IDS") {
    // independent oracle: band counting of the periodic approximant
    const auto a = arithmetic::golden();
    const auto bs = spectrum::band_spectrum(0.5, {233, 377});
    for (double E : {-1.7, -0.4, 0.0, 0.9, 2.1}) {
        double twice = 2.0 * rotation_number(CocycleMap::amo(a, 0.5, E), 1000000, 0.0).value;
        twice -= std::floor(twice);
        CHECK(std::abs(twice - spectrum::ids(bs, E)) < 5e-3);
    }
}

TEST_CASE("rotation number shifts by the degree under R_{m theta / 2} conjugation") {
    const auto a = arithmetic::golden();
    const int m = 2;
    const Mat2 A0 = amo_matrix(0.0, 0.7, 0.0);
    // B(theta) = R_{m theta / 2}; the conjugated map is B(theta + alpha)^{-1} A0 B(theta)
    auto conj = [&](double th) {
        return CMat2((rotation(m * (th + a.value) / 2).transpose() * A0 * rotation(m * th / 2)).cast<cplx>());
    };
    const FourierMap f = FourierMap::from_function(conj, 4, 0.1);
    const double r0 = rotation_number(CocycleMap::general(a, FourierMap::constant(A0, 0.1)), 200000, 0.0).value;
    const double r1 = rotation_number(CocycleMap::general(a, f), 200000, 0.0).value;
    const double shift = 2 * r1 - 2 * r0;
    const double d = std::min(static_cast<double>(arithmetic::torus_norm(shift - m * a.value)),
                              static_cast<double>(arithmetic::torus_norm(shift + m * a.value)));
    CHECK(d < 1e-3);
}

TEST_CASE("growth_profile: first entry, lambda = 2 rate, lambda = 0.5 boundedness") {
    const auto a = arithmetic::golden();
    const auto c = CocycleMap::amo(a, 0.5, 0.0);
    const auto g = growth_profile(c, 0.1, 1000, NormKind::Operator);
    REQUIRE(g.ns.front() == 1);
    CHECK(g.lognorms.front() == doctest::Approx(std::log(op_norm(amo_matrix(0.5, 0.0, 0.1)))).epsilon(1e-14));

    const double E2 = band_center(2.0, 34, 55, 20);
    const auto g2 = growth_profile(CocycleMap::amo(a, 2.0, E2), 0.0, 100000, NormKind::Operator);
    CHECK(g2.lognorms.back() / 1e5 == doctest::Approx(std::log(2.0)).epsilon(0.1));

    // central band of the q = 89 approximant (E = 0); small n excluded because
    // ||U||_HS >= sqrt 2 forces ln||U|| / ln n >= 0.35 / ln n
    const auto gh = growth_profile(c, 0.0, 100000, NormKind::HilbertSchmidt);
    for (std::size_t i = 0; i < gh.ns.size(); ++i)
        if (gh.ns[i] >= 1000) CHECK(gh.lognorms[i] / std::log(static_cast<double>(gh.ns[i])) < 0.15);
    CHECK_THROWS_AS(growth_profile(c, 0.0, 20000000, NormKind::Operator), DomainError);
}

TEST_CASE("geometric_points: dense start, increasing, ends at N") {
    const auto p = geometric_points(12345);
    for (int n = 1; n <= 10; ++n) CHECK(p[n - 1] == n);
    for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] > p[i - 1]);
    CHECK(p.back() == 12345);
}

TEST_CASE("uh_test heuristic") {
    const auto a = arithmetic::golden();
    CHECK(uh_test(CocycleMap::amo(a, 2.0, -2 * 2.0 - 3), 1000, 8));
    CHECK(uh_test(CocycleMap::amo(a, 0.5, 3.5), 1000, 8));
    CHECK_FALSE(uh_test(CocycleMap::amo(a, 0.5, band_center(0.5, 34, 55, 27)), 1000, 8));
    CHECK_THROWS_AS(uh_test(CocycleMap::amo(a, 0.5, 0.0), 50, 8), DomainError);
}

TEST_CASE("evaluated maps have unit determinant") {
    const auto c = CocycleMap::amo(arithmetic::golden(), 1.3, -0.4);
    for (int j = 0; j < 64; ++j) CHECK(std::abs(c.eval(j / 64.0).determinant() - 1.0) < 1e-12);
}
