#include "cocycle_lab/linalg.hpp"

#include "cocycle_lab/errors.hpp"

#include <cmath>

namespace cocycle_lab {

namespace {

// z / sinh z and sinh z / z as functions of w = z^2 (both even in z).
cplx z_over_sinhz(cplx w) {
    if (std::abs(w) < 1e-3) return 1.0 - w / 6.0 + 7.0 * w * w / 360.0 - 31.0 * w * w * w / 15120.0;
    cplx z = std::sqrt(w);
    return z / std::sinh(z);
}

cplx sinhz_over_z(cplx w) {
    if (std::abs(w) < 1e-3) return 1.0 + w / 6.0 + w * w / 120.0 + w * w * w / 5040.0;
    cplx z = std::sqrt(w);
    return std::sinh(z) / z;
}

// acosh(1 + d)^2, accurate for small d.
cplx acosh_sq(cplx c) {
    cplx d = c - 1.0;
    if (std::abs(d) < 1e-4) return 2.0 * d - d * d / 3.0 + 4.0 * d * d * d / 45.0;
    cplx z = std::acosh(c);
    return z * z;
}

}  // namespace

Mat2 rotation(double phi) {
    double c = std::cos(kTwoPi * phi), s = std::sin(kTwoPi * phi);
    Mat2 r;
    r << c, -s, s, c;
    return r;
}

double op_norm(const Mat2& a) {
    // scaled so that f2^2 cannot overflow
    double m = a.cwiseAbs().maxCoeff();
    if (m == 0.0 || !std::isfinite(m)) return m;
    Mat2 b = a / m;
    double f2 = b.squaredNorm();
    double d = b.determinant();
    double disc = std::max(0.0, f2 * f2 - 4.0 * d * d);
    return m * std::sqrt(0.5 * (f2 + std::sqrt(disc)));
}

double op_norm(const CMat2& a) {
    double m = a.cwiseAbs().maxCoeff();
    if (m == 0.0 || !std::isfinite(m)) return m;
    CMat2 b = a / m;
    double f2 = b.squaredNorm();
    double d = std::abs(b.determinant());
    double disc = std::max(0.0, f2 * f2 - 4.0 * d * d);
    return m * std::sqrt(0.5 * (f2 + std::sqrt(disc)));
}

CMat2 expm(const CMat2& x) {
    cplx half_tr = 0.5 * x.trace();
    CMat2 x0 = x - half_tr * CMat2::Identity();
    cplx w = -x0.determinant();  // x0^2 = w I
    cplx z = std::sqrt(w);
    CMat2 r = std::cosh(z) * CMat2::Identity() + sinhz_over_z(w) * x0;
    return std::exp(half_tr) * r;
}

Mat2 expm(const Mat2& x) { return expm(CMat2(x.cast<cplx>())).real(); }

CMat2 logm(const CMat2& g) {
    cplx det = g.determinant();
    if (std::abs(det) == 0.0) throw DomainError("logm: singular matrix");
    cplx s = std::sqrt(det);
    CMat2 u = g / s;  // det u = 1
    cplx c = 0.5 * u.trace();
    if (std::abs(c + 1.0) < 1e-12) throw DomainError("logm: eigenvalue -1, no principal log");
    cplx w = acosh_sq(c);
    CMat2 x = z_over_sinhz(w) * (u - c * CMat2::Identity());
    return x + std::log(s) * CMat2::Identity();
}

Mat2 logm(const Mat2& g) {
    CMat2 l = logm(CMat2(g.cast<cplx>()));
    if (l.imag().cwiseAbs().maxCoeff() > 1e-9 * (1.0 + l.real().cwiseAbs().maxCoeff()))
        throw DomainError("logm: no real logarithm (negative eigenvalues)");
    return l.real();
}

const CMat2& cayley() {
    static const CMat2 m = [] {
        const cplx i(0.0, 1.0);
        CMat2 r;
        r << 1.0, -i, 1.0, i;
        return CMat2(r / (2.0 * i));
    }();
    return m;
}

const CMat2& cayley_inv() {
    static const CMat2 m = cayley().inverse();
    return m;
}

CMat2 to_su11(const Mat2& x) { return cayley() * x.cast<cplx>() * cayley_inv(); }
CMat2 to_su11(const CMat2& x) { return cayley() * x * cayley_inv(); }
CMat2 from_su11_c(const CMat2& w) { return cayley_inv() * w * cayley(); }
Mat2 from_su11(const CMat2& w) { return from_su11_c(w).real(); }

}  // namespace cocycle_lab
