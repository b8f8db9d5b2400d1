#include "cocycle_lab/fourier_map.hpp"

#include "cocycle_lab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cocycle_lab {

namespace {

cplx phase(double x) { return {std::cos(kTwoPi * x), std::sin(kTwoPi * x)}; }

int common_denom(int a, int b) { return std::lcm(a, b); }

}  // namespace

FourierMap::FourierMap(int K, double radius, int denom)
    : K_(K), denom_(denom), radius_(radius), c_(2 * K + 1, CMat2::Zero()) {
    if (K < 0) throw DomainError("FourierMap: negative truncation");
    if (denom != 1 && denom != 2) throw DomainError("FourierMap: denom must be 1 or 2");
}

FourierMap FourierMap::constant(const Mat2& a, double radius) {
    return constant(CMat2(a.cast<cplx>()), radius);
}

FourierMap FourierMap::constant(const CMat2& a, double radius) {
    FourierMap f(0, radius);
    f.c_[0] = a;
    return f;
}

FourierMap FourierMap::from_function(const std::function<CMat2(double)>& f, int K, double radius,
                                     int denom) {
    const int L = 4 * K + 1;
    std::vector<CMat2> vals(L);
    for (int j = 0; j < L; ++j) vals[j] = f(static_cast<double>(denom) * j / L);
    return from_samples(vals, K, radius, denom);
}

FourierMap FourierMap::from_samples(const std::vector<CMat2>& vals, int K, double radius, int denom) {
    const int L = static_cast<int>(vals.size());
    if (L < 2 * K + 1) throw DomainError("FourierMap::from_samples: grid too coarse for K");
    FourierMap out(K, radius, denom);
    for (int k = -K; k <= K; ++k) {
        CMat2 acc = CMat2::Zero();
        for (int j = 0; j < L; ++j) {
            // e^{-2 pi i (k/denom) theta_j} with theta_j = denom j / L
            long long m = (static_cast<long long>(k) * j) % L;
            acc += vals[j] * std::conj(phase(static_cast<double>(m) / L));
        }
        out.c_[k + K] = acc / static_cast<double>(L);
    }
    return out;
}

CMat2 FourierMap::coef(int k) const {
    if (k < -K_ || k > K_) return CMat2::Zero();
    return c_[k + K_];
}

CMat2& FourierMap::coef_ref(int k) {
    if (k < -K_ || k > K_) throw DomainError("FourierMap::coef_ref: index outside band");
    return c_[k + K_];
}

CMat2 FourierMap::eval_c(double theta) const {
    CMat2 acc = CMat2::Zero();
    for (int k = -K_; k <= K_; ++k) acc += c_[k + K_] * phase(frequency(k) * theta);
    return acc;
}

std::vector<CMat2> FourierMap::sample(int L) const {
    std::vector<CMat2> out(L, CMat2::Zero());
    for (int j = 0; j < L; ++j)
        for (int k = -K_; k <= K_; ++k) {
            long long m = (static_cast<long long>(k) * j) % L;
            out[j] += c_[k + K_] * phase(static_cast<double>(m) / L);
        }
    return out;
}

double FourierMap::analytic_norm(double h) const {
    if (h > radius_ * (1.0 + 1e-12)) throw DomainError("analytic_norm: h exceeds the analyticity radius");
    double s = 0.0;
    for (int k = -K_; k <= K_; ++k) {
        const CMat2& c = c_[k + K_];
        if (c.isZero(0.0)) continue;
        s += op_norm(c) * std::exp(kTwoPi * std::abs(frequency(k)) * h);
    }
    return s;
}

double FourierMap::sup_norm_grid(int L) const {
    double m = 0.0;
    for (const auto& v : sample(L)) m = std::max(m, op_norm(v));
    return m;
}

double FourierMap::reality_defect() const {
    double d = 0.0;
    for (int k = 0; k <= K_; ++k)
        d = std::max(d, (c_[K_ - k] - c_[K_ + k].conjugate()).cwiseAbs().maxCoeff());
    return d;
}

double FourierMap::mean_trace_defect(int L) const {
    double d = 0.0;
    for (const auto& v : sample(L)) d = std::max(d, std::abs(v.trace()));
    return d;
}

FourierMap FourierMap::shifted(double alpha) const {
    FourierMap out = *this;
    for (int k = -K_; k <= K_; ++k) out.c_[k + K_] *= phase(frequency(k) * alpha);
    return out;
}

FourierMap FourierMap::conjugated(const CMat2& p) const {
    CMat2 pinv = p.inverse();
    FourierMap out = *this;
    for (auto& c : out.c_) c = pinv * c * p;
    return out;
}

FourierMap FourierMap::left_mul(const CMat2& a) const {
    FourierMap out = *this;
    for (auto& c : out.c_) c = a * c;
    return out;
}

FourierMap FourierMap::right_mul(const CMat2& a) const {
    FourierMap out = *this;
    for (auto& c : out.c_) c = c * a;
    return out;
}

FourierMap FourierMap::truncated(int K) const {
    FourierMap out(K, radius_, denom_);
    for (int k = -std::min(K, K_); k <= std::min(K, K_); ++k) out.c_[k + K] = c_[k + K_];
    return out;
}

FourierMap FourierMap::with_denom(int denom) const {
    if (denom == denom_) return *this;
    if (denom % denom_ != 0) throw DomainError("with_denom: can only refine the lattice");
    const int r = denom / denom_;
    FourierMap out(K_ * r, radius_, denom);
    for (int k = -K_; k <= K_; ++k) out.c_[k * r + out.K_] = c_[k + K_];
    return out;
}

FourierMap FourierMap::filtered(double threshold) const {
    FourierMap out = *this;
    for (auto& c : out.c_)
        if (op_norm(c) < threshold) c.setZero();
    return out;
}

FourierMap FourierMap::operator+(const FourierMap& o) const {
    const int d = common_denom(denom_, o.denom_);
    FourierMap a = with_denom(d), b = o.with_denom(d);
    FourierMap out(std::max(a.K_, b.K_), std::min(radius_, o.radius_), d);
    for (int k = -out.K_; k <= out.K_; ++k) out.c_[k + out.K_] = a.coef(k) + b.coef(k);
    return out;
}

FourierMap FourierMap::operator-(const FourierMap& o) const { return *this + o * -1.0; }

FourierMap FourierMap::operator*(double s) const {
    FourierMap out = *this;
    for (auto& c : out.c_) c *= s;
    return out;
}

FourierMap FourierMap::operator*(const FourierMap& o) const {
    const int d = common_denom(denom_, o.denom_);
    FourierMap a = with_denom(d), b = o.with_denom(d);
    FourierMap out(a.K_ + b.K_, std::min(radius_, o.radius_), d);
    for (int i = -a.K_; i <= a.K_; ++i) {
        const CMat2& ca = a.c_[i + a.K_];
        if (ca.isZero(0.0)) continue;
        for (int j = -b.K_; j <= b.K_; ++j) out.c_[i + j + out.K_] += ca * b.c_[j + b.K_];
    }
    return out;
}

}  // namespace cocycle_lab
