#include "cocycle_lab/duality.hpp"

#include "cocycle_lab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace cocycle_lab::duality {

namespace {

using cld = std::complex<long double>;

double site_phase(double x, double site, double alpha) {
    double t = x + site * alpha;
    return t - std::floor(t);
}

void check_invertible(const FourierMap& B) {
    const int L = 64 * B.denom();
    for (const auto& v : B.sample(L)) {
        double n = op_norm(v);
        if (!(n > 0.0) || std::abs(v.determinant()) < 1e-12 * n * n)
            throw DomainError("dual_rows: conjugacy is degenerate on the sample grid");
    }
}

// Maps the FourierMap index k onto (entry j, parity), rejecting mixed parity.
struct Layout {
    int K = 0;
    int parity = 0;
    int step = 1;  // k = step * j + parity
};

Layout layout(const FourierMap& B) {
    if (B.denom() == 1) return {B.K(), 0, 1};
    if (B.denom() != 2) throw DomainError("dual_rows: only 1- or 2-periodic conjugacies");
    double peak = 0.0;
    for (int k = -B.K(); k <= B.K(); ++k) peak = std::max(peak, op_norm(B.coef(k)));
    bool even = false, odd = false;
    for (int k = -B.K(); k <= B.K(); ++k)
        if (op_norm(B.coef(k)) > 1e-13 * peak) (k % 2 == 0 ? even : odd) = true;
    if (even && odd) throw DomainError("dual_rows: conjugacy mixes integer and half-integer modes");
    const int parity = odd ? 1 : 0;
    return {(B.K() + 1) / 2, parity, 2};
}

DualSequence row(const FourierMap& B, const Layout& lay, cplx w11, cplx w12, bool normalize) {
    std::vector<cplx> v(2 * lay.K + 1);
    for (int j = -lay.K; j <= lay.K; ++j) {
        CMat2 c = B.coef(lay.step * j + lay.parity);
        v[j + lay.K] = w11 * c(0, 0) + w12 * c(0, 1);
    }
    return DualSequence::from_values(lay.K, lay.parity, std::move(v), normalize);
}

}  // namespace

DualSequence DualSequence::from_values(int K, int parity, std::vector<cplx> values, bool normalize) {
    if (K < 0 || static_cast<int>(values.size()) != 2 * K + 1)
        throw DomainError("DualSequence: need 2K+1 values");
    DualSequence s;
    s.K = K;
    s.parity = parity;
    s.values = std::move(values);
    double n2 = 0.0, peak = 0.0;
    for (const auto& v : s.values) {
        n2 += std::norm(v);
        peak = std::max(peak, std::abs(v));
    }
    s.norm = std::sqrt(n2);
    if (normalize && s.norm > 0.0)
        for (auto& v : s.values) v /= s.norm;
    if (peak > 0.0) {
        const double scale = normalize && s.norm > 0.0 ? s.norm : 1.0;
        for (int j = -K; j <= K; ++j) {
            double a = std::abs(s.at(j));
            if (a * scale < 1e-3 * peak) continue;
            if (a >= std::abs(s.at(j - 1)) && a >= std::abs(s.at(j + 1))) s.center_candidates.push_back(j);
        }
    }
    return s;
}

cplx DualSequence::at(int j) const {
    if (j < -K || j > K) return 0.0;
    return values[j + K];
}

double DualSequence::l2() const {
    double n2 = 0.0;
    for (const auto& v : values) n2 += std::norm(v);
    return std::sqrt(n2);
}

double DualSequence::two_window_fraction(double c, double halfwidth) const {
    double in = 0.0, all = 0.0;
    for (int j = -K; j <= K; ++j) {
        double m = std::norm(at(j));
        all += m;
        double s = site(j);
        if (std::abs(s - c) <= halfwidth + 1e-12 || std::abs(s + c) <= halfwidth + 1e-12) in += m;
    }
    return all > 0.0 ? in / all : 0.0;
}

DualRows dual_rows(const FourierMap& B) {
    check_invertible(B);
    Layout lay = layout(B);
    return {row(B, lay, 1.0, 0.0, true), row(B, lay, 0.0, 1.0, true)};
}

DualSequence dual_eigenfunction(const FourierMap& B) {
    check_invertible(B);
    return row(B, layout(B), 1.0, cplx(0.0, -1.0), true);
}

Goodness goodness_check(const FourierMap& B, double C1, double C2, double gamma, int ell) {
    Goodness g;
    for (const auto& v : B.sample(256 * B.denom())) g.sup_norm = std::max(g.sup_norm, op_norm(v));
    g.h1 = g.sup_norm <= C1;
    for (int k = -B.K(); k <= B.K(); ++k) {
        const double n = B.frequency(k);
        const double bound =
            C2 * (std::exp(-gamma * std::abs(n + 0.5 * ell)) + std::exp(-gamma * std::abs(n - 0.5 * ell)));
        const CMat2 c = B.coef(k);
        const double r = std::max(std::abs(c(0, 0)), std::abs(c(0, 1))) / bound;
        if (r > g.worst_ratio) {
            g.worst_ratio = r;
            g.worst_n = static_cast<int>(std::lround(2.0 * n));
        }
    }
    g.h2 = g.worst_ratio <= 1.0;
    return g;
}

GoodnessParams prop_shapes(int n, double h, double eps, double C, double tau) {
    const double an = std::max(1, std::abs(n));
    GoodnessParams p;
    p.C1 = C * std::pow(an, 2.0 * tau);
    p.C2 = C * std::exp(eps * h * eps * h * an);
    p.gamma = kTwoPi * h * (1.0 - eps);
    p.ell = n;
    return p;
}

double dual_residual(const DualSequence& u, double lambda, const arithmetic::Irrational& alpha, double E,
                     double x) {
    if (lambda == 0.0) throw DomainError("dual_residual: lambda must be nonzero");
    double peak = 0.0;
    for (const auto& v : u.values) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0.0;
    double worst = 0.0;
    for (int j = -u.K + 1; j <= u.K - 1; ++j) {
        const double c = std::cos(kTwoPi * site_phase(x, u.site(j), alpha.value));
        cplx r = u.at(j + 1) + u.at(j - 1) + (2.0 * c - E) / lambda * u.at(j);
        worst = std::max(worst, std::abs(r));
    }
    return worst / peak;
}

WronskianSeries wronskian_series(const DualSequence& u1, const DualSequence& u2, const Recurrence& rec,
                                 const arithmetic::Irrational& alpha, long n0, long n_from, long n_to) {
    if (rec.lambda == 0.0) throw DomainError("wronskian_series: lambda must be nonzero");
    if (!(n_from <= n0 && n0 + 1 <= n_to)) throw DomainError("wronskian_series: need n_from <= n0 < n_to");
    const long len = n_to - n_from + 1;
    std::vector<cld> a(len), b(len);
    auto idx = [&](long n) { return n - n_from; };
    auto init = [&](const DualSequence& u, long n) {
        return cld(u.at(static_cast<int>(n)).real(), u.at(static_cast<int>(n)).imag());
    };
    a[idx(n0)] = init(u1, n0);
    a[idx(n0 + 1)] = init(u1, n0 + 1);
    b[idx(n0)] = init(u2, n0);
    b[idx(n0 + 1)] = init(u2, n0 + 1);
    const long double inv = 1.0L / rec.lambda;
    auto t = [&](long n) {
        long double ph = static_cast<long double>(rec.x) +
                         (static_cast<long double>(n) + 0.5L * rec.parity) * static_cast<long double>(alpha.value);
        ph -= std::floor(ph);
        return inv * (static_cast<long double>(rec.E) - 2.0L * std::cos(2.0L * static_cast<long double>(kPi) * ph));
    };
    // u(n+1) = t(n) u(n) - u(n-1) and backwards u(n-1) = t(n) u(n) - u(n+1)
    for (long n = n0 + 1; n < n_to; ++n) {
        a[idx(n + 1)] = t(n) * a[idx(n)] - a[idx(n - 1)];
        b[idx(n + 1)] = t(n) * b[idx(n)] - b[idx(n - 1)];
    }
    for (long n = n0; n > n_from; --n) {
        a[idx(n - 1)] = t(n) * a[idx(n)] - a[idx(n + 1)];
        b[idx(n - 1)] = t(n) * b[idx(n)] - b[idx(n + 1)];
    }
    WronskianSeries w;
    const cld D0 = a[idx(n0)] * b[idx(n0 + 1)] - a[idx(n0 + 1)] * b[idx(n0)];
    long double drift = 0.0L;
    for (long n = n_from; n < n_to; ++n) {
        cld D = a[idx(n)] * b[idx(n + 1)] - a[idx(n + 1)] * b[idx(n)];
        w.n.push_back(n);
        w.D.emplace_back(static_cast<double>(D.real()), static_cast<double>(D.imag()));
        drift = std::max(drift, std::abs(D - D0));
    }
    w.rel_drift = std::abs(D0) > 0.0L ? static_cast<double>(drift / std::abs(D0))
                                      : std::numeric_limits<double>::infinity();
    return w;
}

std::vector<cplx> direct_wronskian(const DualSequence& u1, const DualSequence& u2) {
    if (u1.parity != u2.parity) throw DomainError("direct_wronskian: sequences live on different lattices");
    const int K = std::min(u1.K, u2.K);
    std::vector<cplx> d;
    for (int j = -K; j < K; ++j) d.push_back(u1.at(j) * u2.at(j + 1) - u1.at(j + 1) * u2.at(j));
    return d;
}

DualSequence longrange_apply(const Coefficients& Vhat, double lambda, const arithmetic::Irrational& alpha,
                             double x, const DualSequence& u) {
    std::vector<cplx> out(2 * u.K + 1, 0.0);
    for (int j = -u.K; j <= u.K; ++j) {
        cplx s = 2.0 * lambda * std::cos(kTwoPi * site_phase(x, u.site(j), alpha.value)) * u.at(j);
        for (const auto& [k, v] : Vhat) s += v * u.at(j - k);
        out[j + u.K] = s;
    }
    return DualSequence::from_values(u.K, u.parity, std::move(out), false);
}

LocalizedState fit_decay(const std::vector<double>& psi, int N) {
    LocalizedState st;
    const int n = 2 * N + 1;
    if (static_cast<int>(psi.size()) != n) throw DomainError("fit_decay: need 2N+1 amplitudes");
    int c = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(psi[i]) > std::abs(psi[c])) c = i;
    st.center = c - N;
    const double lpeak = std::log(std::abs(psi[c]));
    const int R_box = std::max(c, n - 1 - c);

    // raw envelope: the larger side at each distance
    std::vector<double> raw(R_box + 1, -std::numeric_limits<double>::infinity());
    for (int i = 0; i < n; ++i) {
        double a = std::abs(psi[i]);
        double l = a > 0.0 ? std::log(a) : -745.0;
        raw[std::abs(i - c)] = std::max(raw[std::abs(i - c)], l);
    }
    // stop at the first drop below 1e-12 of the peak (double-precision noise floor)
    int R_floor = R_box;
    for (int r = 0; r <= R_box; ++r)
        if (raw[r] < lpeak - 27.6) {
            R_floor = r;
            break;
        }
    const int R = std::min(R_floor, static_cast<int>(0.85 * R_box));
    st.range = R;
    if (R < 10) {
        st.rate = std::numeric_limits<double>::quiet_NaN();
        return st;
    }

    const int w = std::max(1, R / 30);
    const int lo = static_cast<int>(std::ceil(0.2 * R)), hi = static_cast<int>(std::floor(0.8 * R));
    const int stride = std::max(1, (hi - lo) / 60);
    std::vector<std::pair<double, double>> pts;
    std::vector<double> win;
    for (int r = lo; r <= hi; r += stride) {
        win.clear();
        for (int q = std::max(0, r - w); q <= std::min(R, r + w); ++q) win.push_back(raw[q]);
        std::sort(win.begin(), win.end());
        double p90 = win[static_cast<std::size_t>(std::floor(0.9 * (win.size() - 1)))];
        pts.emplace_back(r, p90);
    }
    std::vector<double> slopes;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            slopes.push_back((pts[j].second - pts[i].second) / (pts[j].first - pts[i].first));
    std::nth_element(slopes.begin(), slopes.begin() + slopes.size() / 2, slopes.end());
    st.rate = -slopes[slopes.size() / 2];
    return st;
}

std::vector<LocalizedState> finite_localization(const Coefficients& Vhat, double lambda,
                                                const arithmetic::Irrational& alpha, double x, int N) {
    if (N < 1 || N > 4000) throw DomainError("finite_localization: need 1 <= N <= 4000");
    bool real = true;
    for (const auto& [k, v] : Vhat) {
        auto it = Vhat.find(-k);
        cplx partner = it == Vhat.end() ? 0.0 : it->second;
        if (std::abs(v - std::conj(partner)) > 1e-14 * (1.0 + std::abs(v)))
            throw DomainError("finite_localization: Vhat must satisfy Vhat_{-k} = conj(Vhat_k)");
        if (v.imag() != 0.0) real = false;
    }
    const int n = 2 * N + 1;
    std::vector<double> E(n);
    std::vector<std::vector<double>> psi(n, std::vector<double>(n));
    auto diag = [&](int i) { return 2.0 * lambda * std::cos(kTwoPi * site_phase(x, i - N, alpha.value)); };
    if (real) {
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            H(i, i) += diag(i);
            for (const auto& [k, v] : Vhat)
                if (i - k >= 0 && i - k < n) H(i, i - k) += v.real();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        if (es.info() != Eigen::Success) throw InternalError("finite_localization: eigensolver failed");
        for (int m = 0; m < n; ++m) {
            E[m] = es.eigenvalues()(m);
            for (int i = 0; i < n; ++i) psi[m][i] = std::abs(es.eigenvectors()(i, m));
        }
    } else {
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            H(i, i) += diag(i);
            for (const auto& [k, v] : Vhat)
                if (i - k >= 0 && i - k < n) H(i, i - k) += v;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        if (es.info() != Eigen::Success) throw InternalError("finite_localization: eigensolver failed");
        for (int m = 0; m < n; ++m) {
            E[m] = es.eigenvalues()(m);
            for (int i = 0; i < n; ++i) psi[m][i] = std::abs(es.eigenvectors()(i, m));
        }
    }
    std::vector<LocalizedState> out;
    out.reserve(n);
    for (int m = 0; m < n; ++m) {
        LocalizedState s = fit_decay(psi[m], N);
        s.E = E[m];
        out.push_back(s);
    }
    return out;
}

double median_bulk_rate(const std::vector<LocalizedState>& states, int N) {
    std::vector<double> r;
    for (const auto& s : states)
        if (std::abs(s.center) <= 0.7 * N && std::isfinite(s.rate)) r.push_back(s.rate);
    if (r.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::nth_element(r.begin(), r.begin() + r.size() / 2, r.end());
    return r[r.size() / 2];
}

}  // namespace cocycle_lab::duality
