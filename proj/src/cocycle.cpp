#include "cocycle_lab/cocycle.hpp"

#include "cocycle_lab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cocycle_lab::cocycle {

namespace {

double frac(double x) { return x - std::floor(x); }

// early rescale for strong coupling (lambda = 3 gains ~e^1100 per 1000 steps)
constexpr double kRescaleAt = 1e100;

// theta_k = theta + k alpha mod 1, stepping k by +-1 with exact residues.
class PhaseWalker {
public:
    PhaseWalker(const arithmetic::Irrational& a, double theta, std::int64_t k0) : theta_(theta) {
        if (a.den() < (arithmetic::BigInt(1) << 61)) {
            exact_ = true;
            p_ = static_cast<std::int64_t>(a.num());
            q_ = static_cast<std::int64_t>(a.den());
            __int128 r = (static_cast<__int128>(k0) * p_) % q_;
            if (r < 0) r += q_;
            r_ = static_cast<std::int64_t>(r);
        } else {
            alpha_ = a.value;
            k_ = k0;
        }
    }
    double value() const {
        if (exact_) return frac(theta_ + static_cast<double>(r_) / static_cast<double>(q_));
        return frac(theta_ + frac(static_cast<double>(k_) * alpha_));
    }
    void step(int dir) {
        if (exact_) {
            r_ += dir > 0 ? p_ : q_ - p_;
            if (r_ >= q_) r_ -= q_;
        } else {
            k_ += dir;
        }
    }

private:
    double theta_;
    bool exact_ = false;
    std::int64_t p_ = 0, q_ = 1, r_ = 0, k_ = 0;
    double alpha_ = 0.0;
};

// Lift increment of v -> a v. Schrodinger matrices never send a vector to the
// clockwise normal, so their continuous branch is (-pi/2, 3pi/2).
double lift_increment(const Eigen::Vector2d& v, const Eigen::Vector2d& w, bool schrodinger) {
    double cr = v.x() * w.y() - v.y() * w.x();
    double dt = v.dot(w);
    double d = std::atan2(cr, dt);
    if (schrodinger && d < -0.5 * kPi) d += kTwoPi;
    return d;
}

void renormalize(ScaledMatrix& s) {
    double nrm = op_norm(s.matrix);
    s.matrix /= nrm;
    s.log_scale += std::log(nrm);
}

}  // namespace

CocycleMap CocycleMap::amo(const arithmetic::Irrational& alpha, double lambda, double E) {
    if (!std::isfinite(lambda) || !std::isfinite(E)) throw DomainError("amo: non-finite parameter");
    CocycleMap c;
    c.alpha = alpha;
    c.kind = Kind::Amo;
    c.lambda = lambda;
    c.E = E;
    return c;
}

CocycleMap CocycleMap::general(const arithmetic::Irrational& alpha, const FourierMap& f) {
    if (f.denom() != 1) throw DomainError("general cocycle must be 1-periodic");
    CocycleMap c;
    c.alpha = alpha;
    c.kind = Kind::General;
    c.f = f;
    return c;
}

Mat2 CocycleMap::eval(double theta) const {
    if (kind == Kind::Amo) {
        Mat2 m;
        m << E - 2.0 * lambda * std::cos(kTwoPi * theta), -1.0, 1.0, 0.0;
        return m;
    }
    return f.eval(theta);
}

double CocycleMap::orbit(double theta, std::int64_t k) const {
    return PhaseWalker(alpha, theta, k).value();
}

ScaledMatrix iterate(const CocycleMap& c, double theta, std::int64_t n) {
    ScaledMatrix s;
    if (n == 0) return s;
    const std::int64_t m = n > 0 ? n : -n;
    // A_{-m}(theta) = A_m(theta - m alpha)^{-1}
    PhaseWalker w(c.alpha, theta, n > 0 ? 0 : -m);
    for (std::int64_t k = 0; k < m; ++k) {
        s.matrix = c.eval(w.value()) * s.matrix;
        w.step(+1);
        if ((k + 1) % kRenormEvery == 0 || s.matrix.cwiseAbs().maxCoeff() > kRescaleAt) renormalize(s);
    }
    renormalize(s);
    if (n < 0) {
        // inverse of e^{s} M with det(e^{s} M) = 1 is e^{s} adj(M)
        Mat2 adj;
        adj << s.matrix(1, 1), -s.matrix(0, 1), -s.matrix(1, 0), s.matrix(0, 0);
        s.matrix = adj;
    }
    return s;
}

std::vector<double> equidistributed_phases(int n) {
    std::vector<double> t(n);
    for (int j = 0; j < n; ++j) t[j] = (j + 0.5) / n;
    return t;
}

std::vector<double> default_phases() {
    std::vector<double> t = equidistributed_phases(16);
    const double g = std::sqrt(2.0) - 1.0;
    for (int j = 1; j <= 16; ++j) t.push_back(frac(0.5 + j * g));
    return t;
}

LyapunovEstimate lyapunov(const CocycleMap& c, std::int64_t n, const std::vector<double>& thetas) {
    if (n < 1000) throw DomainError("lyapunov: n must be >= 1000");
    if (thetas.size() < 8) throw DomainError("lyapunov: need at least 8 phases");
    std::vector<double> vals;
    vals.reserve(thetas.size());
    for (double t : thetas) vals.push_back(iterate(c, t, n).log_norm() / static_cast<double>(n));

    LyapunovEstimate est;
    est.value = std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
    std::mt19937_64 rng(20240917);
    std::uniform_int_distribution<std::size_t> pick(0, vals.size() - 1);
    const int B = 200;
    double s1 = 0.0, s2 = 0.0;
    for (int b = 0; b < B; ++b) {
        double m = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) m += vals[pick(rng)];
        m /= vals.size();
        s1 += m;
        s2 += m * m;
    }
    double mean = s1 / B;
    est.spread = std::sqrt(std::max(0.0, s2 / B - mean * mean));
    return est;
}

RotationEstimate rotation_number(const CocycleMap& c, std::int64_t n, double theta) {
    if (n < 10000) throw DomainError("rotation_number: n must be >= 10^4");
    const bool schrodinger = c.kind == CocycleMap::Kind::Amo;
    if (!schrodinger) {
        // homotopy to the identity is checked through the winding of the trace-free part
        const int L = 64;
        double wind = 0.0, prev = 0.0;
        for (int j = 0; j <= L; ++j) {
            Mat2 a = c.eval(static_cast<double>(j) / L);
            double ang = std::atan2(a(1, 0) - a(0, 1), a(0, 0) + a(1, 1));
            if (j > 0) {
                double d = ang - prev;
                while (d > kPi) d -= kTwoPi;
                while (d < -kPi) d += kTwoPi;
                wind += d;
            }
            prev = ang;
        }
        if (std::abs(wind) > kPi) throw DomainError("rotation_number: map is not homotopic to the identity");
    }
    PhaseWalker w(c.alpha, theta, 0);
    Eigen::Vector2d v(1.0, 0.0);
    double half[2] = {0.0, 0.0};
    const std::int64_t mid = n / 2;
    for (std::int64_t k = 0; k < n; ++k) {
        Eigen::Vector2d u = c.eval(w.value()) * v;
        half[k < mid ? 0 : 1] += lift_increment(v, u, schrodinger);
        v = u / u.norm();
        w.step(+1);
    }
    auto to_rho = [](double lift_avg) { return frac(0.5 - lift_avg / kTwoPi); };
    RotationEstimate r;
    r.value = to_rho((half[0] + half[1]) / static_cast<double>(n));
    double r1 = to_rho(half[0] / static_cast<double>(mid));
    double r2 = to_rho(half[1] / static_cast<double>(n - mid));
    r.error = arithmetic::torus_norm(r1 - r2);
    return r;
}

std::vector<std::int64_t> geometric_points(std::int64_t N, int per_decade) {
    std::vector<std::int64_t> ns;
    for (std::int64_t n = 1; n <= std::min<std::int64_t>(N, 10); ++n) ns.push_back(n);
    for (int j = per_decade + 1;; ++j) {
        auto n = static_cast<std::int64_t>(std::llround(std::pow(10.0, static_cast<double>(j) / per_decade)));
        if (n > N) break;
        if (n > ns.back()) ns.push_back(n);
    }
    if (ns.back() != N) ns.push_back(N);
    return ns;
}

GrowthProfile growth_profile(const CocycleMap& c, double theta, std::int64_t N, NormKind kind) {
    if (N < 1 || N > 10'000'000) throw DomainError("growth_profile: N must be in [1, 10^7]");
    GrowthProfile g;
    g.theta = theta;
    g.norm_kind = kind;
    g.ns = geometric_points(N);
    ScaledMatrix s;
    PhaseWalker w(c.alpha, theta, 0);
    std::size_t next = 0;
    for (std::int64_t k = 1; k <= N; ++k) {
        s.matrix = c.eval(w.value()) * s.matrix;
        w.step(+1);
        if (k % kRenormEvery == 0 || s.matrix.cwiseAbs().maxCoeff() > kRescaleAt) renormalize(s);
        if (next < g.ns.size() && g.ns[next] == k) {
            g.lognorms.push_back(kind == NormKind::Operator ? s.log_norm() : s.log_hs_norm());
            ++next;
        }
    }
    return g;
}

bool uh_test(const CocycleMap& c, std::int64_t N, int theta_grid, const UhOptions& opt) {
    if (N < 100) throw DomainError("uh_test: N must be >= 100");
    if (theta_grid < 1) throw DomainError("uh_test: empty phase grid");
    for (int j = 0; j < theta_grid; ++j) {
        const double t = (j + 0.5) / theta_grid;
        ScaledMatrix fwd = iterate(c, t, N);
        if (fwd.log_norm() / static_cast<double>(N) <= opt.margin) return false;
        ScaledMatrix past = iterate(c, c.orbit(t, -N), N);
        Eigen::JacobiSVD<Mat2> sf(fwd.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::JacobiSVD<Mat2> sp(past.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::Vector2d stable = sf.matrixV().col(1);
        Eigen::Vector2d unstable = sp.matrixU().col(0);
        double sin_angle = std::abs(stable.x() * unstable.y() - stable.y() * unstable.x());
        if (sin_angle < opt.min_transversality) return false;
    }
    return true;
}

}  // namespace cocycle_lab::cocycle
