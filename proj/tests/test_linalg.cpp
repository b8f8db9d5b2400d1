#include "cocycle_lab/errors.hpp"
#include "cocycle_lab/fourier_map.hpp"
#include "cocycle_lab/kam.hpp"
#include "cocycle_lab/linalg.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <random>

using namespace cocycle_lab;

namespace {

// Independent oracle: truncated Taylor series with scaling and squaring.
CMat2 exp_series(const CMat2& x) {
    int s = 0;
    double n = x.norm();
    while (n > 0.25) {
        n /= 2;
        ++s;
    }
    const CMat2 y = x / std::pow(2.0, s);
    CMat2 term = CMat2::Identity(), sum = CMat2::Identity();
    for (int k = 1; k < 30; ++k) {
        term = term * y / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < s; ++i) sum = sum * sum;
    return sum;
}

Mat2 random_sl2_traceless(std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> g;
    Mat2 x;
    x << g(rng), g(rng), g(rng), 0.0;
    x(1, 1) = -x(0, 0);
    return scale * x;
}

}  // namespace

TEST_CASE("rotation uses torus units") {
    const Mat2 r = rotation(0.25);
    CHECK(r(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r(1, 0) == doctest::Approx(1.0));
    CHECK((rotation(0.1) * rotation(0.2) - rotation(0.3)).norm() < 1e-14);
}

TEST_CASE("op_norm matches the largest singular value") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int i = 0; i < 50; ++i) {
        Mat2 a;
        a << g(rng), g(rng), g(rng), g(rng);
        Eigen::JacobiSVD<Mat2> svd(a);
        CHECK(op_norm(a) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-13));
    }
}

TEST_CASE("expm closed form agrees with the series, elliptic, hyperbolic and near-parabolic") {
    std::mt19937_64 rng(2);
    for (double scale : {1e-9, 1e-3, 0.3, 2.0}) {
        for (int i = 0; i < 20; ++i) {
            const Mat2 x = random_sl2_traceless(rng, scale);
            const Mat2 e = expm(x);
            CHECK((e - exp_series(x.cast<cplx>()).real()).norm() < 1e-12 * std::max(1.0, e.norm()));
            CHECK(e.determinant() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    Mat2 nil;
    nil << 0.0, 1.0, 0.0, 0.0;
    CHECK((expm(nil) - (Mat2::Identity() + nil)).norm() < 1e-15);
}

TEST_CASE("logm inverts expm on the principal branch") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const Mat2 x = random_sl2_traceless(rng, 0.4);
        CHECK((logm(expm(x)) - x).norm() < 1e-12);
    }
    // -I times a hyperbolic matrix has no real log
    Mat2 h;
    h << -2.0, 0.0, 0.0, -0.5;
    CHECK_THROWS_AS(logm(h), DomainError);
}

TEST_CASE("Cayley coordinates send sl(2,R) to su(1,1)") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
        const Mat2 x = random_sl2_traceless(rng, 1.0);
        const CMat2 w = to_su11(x);
        // su(1,1): [[i t, nu], [conj nu, -i t]]
        CHECK(std::abs(w(0, 0).real()) < 1e-14);
        CHECK(std::abs(w(0, 0) + w(1, 1)) < 1e-14);
        CHECK(std::abs(w(1, 0) - std::conj(w(0, 1))) < 1e-14);
        CHECK((from_su11(w) - x).norm() < 1e-14);
    }
    // M is sqrt(1/2) times a unitary, so conjugation preserves HS norms
    const CMat2 u = std::sqrt(2.0) * cayley();
    CHECK((u.adjoint() * u - CMat2::Identity()).norm() < 1e-14);
}

TEST_CASE("FourierMap: analytic norm examples") {
    const double h = 0.2;
    FourierMap zero(3, h);
    CHECK(zero.analytic_norm(h) == 0.0);

    FourierMap c(1, h);
    const double s = 0.3;
    c.coef_ref(1) = s * CMat2::Identity();
    c.coef_ref(-1) = s * CMat2::Identity();
    CHECK(c.analytic_norm(h) == doctest::Approx(2 * s * std::exp(kTwoPi * h)));

    // S_E^lambda - S_E^0 = [[-2 lambda cos 2 pi theta, 0], [0, 0]]
    const double lambda = 0.01;
    const FourierMap d = FourierMap::from_function(
        [&](double th) {
            CMat2 m = CMat2::Zero();
            m(0, 0) = -2.0 * lambda * std::cos(kTwoPi * th);
            return m;
        },
        4, h);
    CHECK(d.analytic_norm(h) == doctest::Approx(2 * lambda * std::exp(kTwoPi * h)).epsilon(1e-12));
    CHECK(kam::analytic_norm(d, 0.1) == doctest::Approx(2 * lambda * std::exp(kTwoPi * 0.1)).epsilon(1e-12));
    CHECK_THROWS_AS(kam::analytic_norm(d, 0.3), DomainError);
}

TEST_CASE("FourierMap: sampling round trip, shift and product") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    const int K = 6;
    FourierMap f(K, 0.1), q(K, 0.1);
    for (int k = -K; k <= K; ++k) {
        CMat2 a, b;
        a << cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
        b << cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
        f.coef_ref(k) = a * std::exp(-0.5 * std::abs(k));
        q.coef_ref(k) = b * std::exp(-0.5 * std::abs(k));
    }
    // direct evaluation oracle
    auto direct = [&](const FourierMap& m, double th) {
        CMat2 s = CMat2::Zero();
        for (int k = -m.K(); k <= m.K(); ++k) s += m.coef(k) * std::exp(cplx(0.0, kTwoPi * m.frequency(k) * th));
        return s;
    };
    const FourierMap back = FourierMap::from_function([&](double th) { return direct(f, th); }, K, 0.1);
    for (int k = -K; k <= K; ++k) CHECK((back.coef(k) - f.coef(k)).norm() < 1e-12);

    const double alpha = 0.3819660112501051;
    const FourierMap fs = f.shifted(alpha);
    const FourierMap pq = f * q;
    for (double th : {0.0, 0.123, 0.77}) {
        CHECK((fs.eval_c(th) - direct(f, th + alpha)).norm() < 1e-12);
        CHECK((pq.eval_c(th) - direct(f, th) * direct(q, th)).norm() < 1e-10);
    }
}

TEST_CASE("FourierMap: reality defect and trace defect of a real sl(2,R) map") {
    FourierMap f(2, 0.1);
    CMat2 c;
    c << cplx(0.1, 0.2), cplx(0.3, -0.1), cplx(-0.2, 0.05), cplx(-0.1, -0.2);
    f.coef_ref(1) = c;
    f.coef_ref(-1) = c.conjugate();
    CHECK(f.reality_defect() < 1e-15);
    CHECK(f.mean_trace_defect() < 1e-14);
    for (double th : {0.1, 0.4}) CHECK(f.eval_c(th).imag().norm() < 1e-15);
}
