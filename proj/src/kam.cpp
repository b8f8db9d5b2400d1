#include "cocycle_lab/kam.hpp"

#include "cocycle_lab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace cocycle_lab::kam {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon();

cplx phase(double x) { return {std::cos(kTwoPi * x), std::sin(kTwoPi * x)}; }

// R_{n theta / 2}; theta is not reduced, so odd n keep their sign.
Mat2 half_rotation(int n, double theta) { return rotation(0.5 * n * theta); }

const CMat2& rotation_eigvecs() {
    static const CMat2 q = [] {
        const double s = 1.0 / std::sqrt(2.0);
        CMat2 m;
        m << cplx(s, 0.0), cplx(s, 0.0), cplx(0.0, -s), cplx(0.0, s);
        return m;
    }();
    return q;
}

// Diagonalization A = Q diag(d) Q^{-1}. Elliptic constants use Q = U Q0 with
// U the positive normalization, so that Q diag(z, conj z) Q^{-1} is real.
struct EigenFrame {
    CMat2 Q;
    CMat2 Qi;
    cplx d[2];
};

EigenFrame eigen_frame(const Su11Constant& a) {
    EigenFrame e;
    if (a.kind == ConstKind::Elliptic) {
        Normalization nz = normalize_elliptic(a);
        e.Q = nz.U.cast<cplx>() * rotation_eigvecs();
        e.d[0] = phase(nz.r);
        e.d[1] = phase(-nz.r);
    } else if (a.kind == ConstKind::Hyperbolic) {
        Eigen::ComplexEigenSolver<CMat2> es(a.matrix.cast<cplx>());
        e.Q = es.eigenvectors();
        e.d[0] = es.eigenvalues()(0);
        e.d[1] = es.eigenvalues()(1);
    } else {
        throw DomainError("KAM step: parabolic constant has no eigenbasis");
    }
    e.Qi = e.Q.inverse();
    return e;
}

double roundoff_floor(const Mat2& a, const Mat2& b) { return 64.0 * kUnit * op_norm(a) * op_norm(b); }

// Fourier coefficients of log G(theta) on L = 4K+1 points, with coefficients
// under the roundoff floor removed.
FourierMap regrid(const std::function<Mat2(double)>& G, int K, double radius, double floor) {
    const int L = 4 * K + 1;
    std::vector<CMat2> vals(L);
    for (int j = 0; j < L; ++j) vals[j] = logm(G(static_cast<double>(j) / L)).cast<cplx>();
    FourierMap f = FourierMap::from_samples(vals, K, radius);
    f = f.filtered(floor);
    // exact reality: c(-k) = conj c(k)
    for (int k = 1; k <= K; ++k) {
        CMat2 avg = 0.5 * (f.coef(k) + f.coef(-k).conjugate());
        f.coef_ref(k) = avg;
        f.coef_ref(-k) = avg.conjugate();
    }
    f.coef_ref(0) = CMat2(f.coef(0).real().cast<cplx>());
    return f;
}

Mat2 expf(const FourierMap& f, double theta) { return expm(f.eval(theta)); }

struct Sweep {
    FourierMap Y;
    Su11Constant A_plus;
    FourierMap f_plus;
};

// One linearized homological solve: modes 0 < |k| <= N in the eigenframe of
// A, the mean absorbed into A_+, and (optionally) the resonant pair kept.
Sweep sweep(const Su11Constant& A, const FourierMap& f, double alpha, int N, int K_trunc, double h_plus,
            std::optional<int> keep_n) {
    EigenFrame e = eigen_frame(A);
    const double floor = roundoff_floor(A.matrix, A.matrix);
    FourierMap Y(N, h_plus);
    for (int k = -N; k <= N; ++k) {
        if (k == 0) continue;
        CMat2 c = f.coef(k);
        if (op_norm(c) < floor) continue;
        CMat2 F = e.Qi * c * e.Q;
        CMat2 Yt = CMat2::Zero();
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                if (keep_n && ((a == 0 && b == 1 && k == *keep_n) || (a == 1 && b == 0 && k == -*keep_n)))
                    continue;
                cplx div = e.d[b] / e.d[a] * phase(k * alpha) - 1.0;
                if (std::abs(div) < 1e-13)
                    throw InternalError("homological equation: divisor underflow at k = " + std::to_string(k));
                Yt(a, b) = F(a, b) / div;
            }
        Y.coef_ref(k) = e.Q * Yt * e.Qi;
    }
    for (int k = 1; k <= N; ++k) {
        CMat2 avg = 0.5 * (Y.coef(k) + Y.coef(-k).conjugate());
        Y.coef_ref(k) = avg;
        Y.coef_ref(-k) = avg.conjugate();
    }

    Sweep s;
    s.Y = Y;
    Mat2 Ap = A.matrix * expm(Mat2(f.coef(0).real()));
    s.A_plus = Su11Constant::from_matrix(Ap);
    Mat2 Api = Ap.inverse();
    const Mat2 Am = A.matrix;
    s.f_plus = regrid(
        [&](double th) {
            return Mat2(Api * expm(Mat2(-Y.eval(th + alpha))) * Am * expf(f, th) * expm(Y.eval(th)));
        },
        K_trunc, h_plus, roundoff_floor(Am, Ap));
    return s;
}

// ||f|| at h after removing the resonant pair in the eigenframe of A.
double nonresonant_part(const Su11Constant& A, const FourierMap& f, int n, double h) {
    EigenFrame e = eigen_frame(A);
    double s = 0.0;
    for (int k = -f.K(); k <= f.K(); ++k) {
        CMat2 F = e.Qi * f.coef(k) * e.Q;
        if (k == n) F(0, 1) = 0.0;
        if (k == -n) F(1, 0) = 0.0;
        if (k == 0) F(0, 0) = F(1, 1) = 0.0;
        s += op_norm(CMat2(e.Q * F * e.Qi)) * std::exp(kTwoPi * std::abs(k) * h);
    }
    return s;
}

BoundCheck check(const std::string& name, double measured, double bound, bool asserted = true) {
    BoundCheck c;
    c.name = name;
    c.measured = measured;
    c.bound = bound;
    c.ok = measured <= bound;
    c.asserted = asserted;
    return c;
}

int mode_cap(double eps, double dh, int K_trunc) {
    if (eps <= 0.0) return 1;
    double n = std::ceil(2.0 * std::abs(std::log(eps)) / dh);
    return static_cast<int>(std::clamp(n, 1.0, static_cast<double>(K_trunc)));
}

void check_step_args(const FourierMap& f, double h, double h_plus) {
    if (!(h > h_plus) || !(h_plus > 0.0)) throw DomainError("KAM step: need h > h_plus > 0");
    if (f.denom() != 1) throw DomainError("KAM step: perturbation must be 1-periodic");
}

double eps_of(const FourierMap& f, double h) { return f.analytic_norm(std::min(h, f.radius())); }

StepResult resonant_core(const Su11Constant& A, const FourierMap& f, double alpha, int n, double h,
                         double h_plus, const KamConfig& cfg, double eps) {
    if (A.kind != ConstKind::Elliptic) throw MisuseError("resonant_step: constant is not elliptic");
    const int N = std::max(mode_cap(eps, h - h_plus, cfg.K_trunc), std::abs(n));
    StepResult out;
    Su11Constant Ac = A;
    FourierMap fc = f;
    FourierMap Ysum(0, h_plus);
    double prev = std::numeric_limits<double>::infinity();
    for (int s = 0; s < cfg.inner_sweeps; ++s) {
        double nr = nonresonant_part(Ac, fc, n, h_plus);
        if (nr < 1e-15 || nr > 0.5 * prev) break;
        prev = nr;
        Sweep sw = sweep(Ac, fc, alpha, N, cfg.K_trunc, h_plus, n);
        out.B.push_exp(sw.Y);
        Ysum = Ysum + sw.Y;
        Ac = sw.A_plus;
        fc = sw.f_plus;
        if (Ac.kind != ConstKind::Elliptic) throw InternalError("resonant_step: constant left the elliptic regime");
    }
    Normalization nz = normalize_elliptic(Ac);
    out.P = nz.U;
    out.B.push_const(nz.U);
    out.B.push_rot(n);
    out.rotation_deg = n;

    const Mat2 U = nz.U, Ui = nz.U.inverse();
    // f'' = R_{-n theta/2} U^{-1} f U R_{n theta/2}; its mean joins the constant
    auto conj_log = [&](double th) {
        return Mat2(half_rotation(n, th).transpose() * Ui * fc.eval(th) * U * half_rotation(n, th));
    };
    const int L = 4 * cfg.K_trunc + 1;
    Mat2 mean = Mat2::Zero();
    for (int j = 0; j < L; ++j) mean += conj_log(static_cast<double>(j) / L);
    mean /= L;
    Mat2 Rs = rotation(nz.r - 0.5 * n * alpha);
    Mat2 Ap = Rs * expm(mean);
    Mat2 Api = Ap.inverse();
    out.A_plus = Su11Constant::from_matrix(Ap);
    out.f_plus = regrid(
        [&](double th) {
            return Mat2(Api * half_rotation(n, th + alpha).transpose() * Ui * Ac.matrix * expf(fc, th) * U *
                        half_rotation(n, th));
        },
        cfg.K_trunc, h_plus, roundoff_floor(Ac.matrix, Ap) * op_norm(U) * op_norm(Ui));
    out.Y = Ysum;
    return out;
}

}  // namespace

std::string to_string(ConstKind k) {
    switch (k) {
        case ConstKind::Elliptic: return "elliptic";
        case ConstKind::Parabolic: return "parabolic";
        case ConstKind::Hyperbolic: return "hyperbolic";
    }
    return "?";
}

std::string to_string(KamStatus s) {
    switch (s) {
        case KamStatus::ConvergedReducible: return "converged-reducible";
        case KamStatus::BudgetExhausted: return "almost-reducible-budget-exhausted";
        case KamStatus::Diverged: return "diverged";
    }
    return "?";
}

Su11Constant Su11Constant::from_matrix(const Mat2& a) {
    if (!a.allFinite()) throw DomainError("Su11Constant: non-finite matrix");
    if (std::abs(a.determinant() - 1.0) > 1e-8 * (1.0 + a.squaredNorm()))
        throw DomainError("Su11Constant: matrix is not in SL(2,R)");
    Su11Constant c;
    c.matrix = a;
    const double tr = a.trace();
    const double tol = 1e-13 * (1.0 + a.squaredNorm());
    if (std::abs(std::abs(tr) - 2.0) <= tol) {
        c.kind = ConstKind::Parabolic;
    } else if (std::abs(tr) < 2.0) {
        c.kind = ConstKind::Elliptic;
    } else {
        c.kind = ConstKind::Hyperbolic;
    }
    // the exponent lives in PSL: -A for negative trace keeps the log away from -I
    Mat2 x = logm(Mat2(tr < 0.0 ? Mat2(-a) : a));
    CMat2 w = to_su11(x);
    c.t = w(0, 0).imag();
    c.nu = w(0, 1);
    if (c.kind == ConstKind::Elliptic) c.xi = std::sqrt(std::max(0.0, c.t * c.t - std::norm(c.nu)));
    return c;
}

Su11Constant Su11Constant::from_su11(double t, cplx nu) {
    CMat2 w;
    w << cplx(0.0, t), nu, std::conj(nu), cplx(0.0, -t);
    return from_matrix(expm(cocycle_lab::from_su11(w)));
}

double Su11Constant::rotation() const {
    if (kind != ConstKind::Elliptic) throw DomainError("rotation: constant is " + to_string(kind));
    // A - cos I = sin(2 pi r) U J U^{-1} and (U J U^{-1})_{21} > 0
    double c = std::clamp(0.5 * matrix.trace(), -1.0, 1.0);
    double r = std::acos(c) / kTwoPi;
    return matrix(1, 0) >= 0.0 ? r : -r;
}

CMat2 Su11Constant::su11_exponent() const {
    CMat2 w;
    w << cplx(0.0, t), nu, std::conj(nu), cplx(0.0, -t);
    return w;
}

double analytic_norm(const FourierMap& f, double h) { return f.analytic_norm(h); }

Normalization normalize_elliptic(const Su11Constant& a) {
    if (a.kind != ConstKind::Elliptic)
        throw DomainError("normalize_elliptic: constant is " + to_string(a.kind));
    Normalization n;
    n.r = a.rotation();
    const double s = std::sin(kTwoPi * n.r);
    Mat2 K = (a.matrix - 0.5 * a.matrix.trace() * Mat2::Identity()) / s;
    // K = U J U^{-1} with S = U U^T = [[-K12, K11], [K11, K21]]
    Mat2 S;
    S << -K(0, 1), K(0, 0), K(0, 0), K(1, 0);
    S /= std::sqrt(std::max(S.determinant(), 1e-300));
    n.U = (S + Mat2::Identity()) / std::sqrt(S.trace() + 2.0);
    const double anu = std::abs(a.nu);
    n.ratio = a.xi > 0.0 ? 2.0 * anu / a.xi : std::numeric_limits<double>::infinity();
    if (n.ratio <= 1.0) {
        n.regime = Regime::NearDiagonal;
        n.bound = anu / a.xi;
        n.measured = op_norm(Mat2(n.U - Mat2::Identity()));
    } else {
        n.regime = Regime::Dominated;
        n.bound = 4.0 * anu / a.xi;
        n.measured = op_norm(n.U) * op_norm(n.U);
    }
    return n;
}

Triangular triangularize(const Su11Constant& a) {
    if (a.kind != ConstKind::Elliptic)
        throw DomainError("triangularize: constant is " + to_string(a.kind));
    CMat2 W = cayley() * a.matrix.cast<cplx>() * cayley_inv();
    Eigen::ComplexSchur<CMat2> cs(W);
    Triangular t;
    t.U = cs.matrixU();
    t.T = cs.matrixT();
    // order the diagonal as (e^{i xi}, e^{-i xi})
    if (std::arg(t.T(0, 0)) < 0.0 && std::abs(std::arg(t.T(0, 0))) > 1e-15) {
        // swap via the Givens rotation that exchanges the eigenvalues
        cplx a11 = t.T(0, 0), a22 = t.T(1, 1), b = t.T(0, 1);
        cplx x = a22 - a11;
        double nrm = std::sqrt(std::norm(b) + std::norm(x));
        CMat2 G;
        G << b / nrm, -std::conj(x) / nrm, x / nrm, std::conj(b) / nrm;
        t.U = t.U * G;
        t.T = t.U.adjoint() * W * t.U;
        t.T(1, 0) = 0.0;
    }
    t.nu = t.T(0, 1);
    return t;
}

std::optional<int> detect_resonance(double r, const arithmetic::Irrational& alpha, int N, double eps,
                                    double exponent) {
    if (N < 1) throw DomainError("detect_resonance: N must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("detect_resonance: need 0 < eps < 1");
    const double thr = std::pow(eps, exponent);
    for (int n = 1; n <= N; ++n)
        for (int s : {1, -1}) {
            double d = arithmetic::torus_norm(2.0 * r - s * n * alpha.value);
            if (d < thr) return s * n;
        }
    return std::nullopt;
}

double dc_kappa(const arithmetic::Irrational& alpha, double tau, int K) {
    double m = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= K; ++k)
        m = std::min(m, arithmetic::torus_norm(k * alpha.value) * std::pow(static_cast<double>(k), tau));
    return m;
}

void Conjugacy::push_exp(const FourierMap& y) {
    Factor f;
    f.kind = Factor::Kind::Exp;
    f.y = y;
    factors_.push_back(std::move(f));
}

void Conjugacy::push_const(const Mat2& c) {
    Factor f;
    f.kind = Factor::Kind::Const;
    f.c = c;
    factors_.push_back(std::move(f));
}

void Conjugacy::push_rot(int n) {
    Factor f;
    f.kind = Factor::Kind::Rot;
    f.n = n;
    factors_.push_back(std::move(f));
    degree_ += n;
}

void Conjugacy::append(const Conjugacy& o) {
    factors_.insert(factors_.end(), o.factors_.begin(), o.factors_.end());
    degree_ += o.degree_;
}

Mat2 Conjugacy::eval(double theta) const {
    Mat2 m = Mat2::Identity();
    for (const auto& f : factors_) {
        switch (f.kind) {
            case Factor::Kind::Exp: m = m * expm(f.y.eval(theta)); break;
            case Factor::Kind::Const: m = m * f.c; break;
            case Factor::Kind::Rot: m = m * half_rotation(f.n, theta); break;
        }
    }
    return m;
}

int Conjugacy::period() const { return degree_ % 2 == 0 ? 1 : 2; }

FourierMap Conjugacy::to_fourier(int K, double radius) const {
    return FourierMap::from_function([this](double th) { return CMat2(eval(th).cast<cplx>()); }, K, radius,
                                     period());
}

double gate_bound(const KamConfig& cfg, const Mat2& A, double h, double h_plus) {
    const double D0 = cfg.D0 > 0.0 ? cfg.D0 : kDefaultD0;
    return D0 / std::pow(op_norm(A), cfg.C0) * std::pow(h - h_plus, cfg.C0 * cfg.tau);
}

double conjugation_residual(const Conjugacy& B, const Mat2& A, const FourierMap& f, const Mat2& A_plus,
                            const FourierMap& f_plus, const arithmetic::Irrational& alpha, int L) {
    double worst = 0.0;
    for (int j = 0; j < L; ++j) {
        const double th = static_cast<double>(j) / L;
        Mat2 old_map = A * expf(f, th);
        Mat2 new_map = A_plus * expf(f_plus, th);
        Mat2 conj = B.eval(th + alpha.value).inverse() * old_map * B.eval(th);
        worst = std::max(worst, op_norm(Mat2(conj - new_map)) / op_norm(old_map));
    }
    return worst;
}

StepResult nonresonant_step(const Su11Constant& A, const FourierMap& f, const arithmetic::Irrational& alpha,
                            double h, double h_plus, const KamConfig& cfg) {
    check_step_args(f, h, h_plus);
    const double eps = eps_of(f, h);
    if (cfg.check_gate && eps > gate_bound(cfg, A.matrix, h, h_plus))
        throw GateError("nonresonant_step: eps = " + std::to_string(eps) + " exceeds the smallness gate");
    const int N = mode_cap(eps, h - h_plus, cfg.K_trunc);
    StepResult out;
    if (eps == 0.0) {
        out.A_plus = A;
        out.f_plus = FourierMap(0, h_plus);
        out.Y = FourierMap(0, h_plus);
        return out;
    }
    Sweep sw = sweep(A, f, alpha.value, N, cfg.K_trunc, h_plus, std::nullopt);
    out.B.push_exp(sw.Y);
    out.Y = sw.Y;
    out.A_plus = sw.A_plus;
    out.f_plus = sw.f_plus;
    out.residual = conjugation_residual(out.B, A.matrix, f, out.A_plus.matrix, out.f_plus, alpha);

    const double sl = cfg.slack;
    out.checks.push_back(check("Y_norm <= eps^(1/2)", sw.Y.analytic_norm(h_plus), sl * std::sqrt(eps)));
    out.checks.push_back(check("f_plus <= eps^(3/2)", out.f_plus.analytic_norm(h_plus), sl * std::pow(eps, 1.5)));
    out.checks.push_back(check("|A_plus - A| <= 2 eps", op_norm(Mat2(out.A_plus.matrix - A.matrix)), sl * 2.0 * eps));
    out.checks.push_back(check("conjugation residual", out.residual, 1e-10));
    return out;
}

StepResult resonant_step(const Su11Constant& A, const FourierMap& f, const arithmetic::Irrational& alpha,
                         int n_star, double h, double h_plus, const KamConfig& cfg) {
    check_step_args(f, h, h_plus);
    if (A.kind != ConstKind::Elliptic) throw MisuseError("resonant_step: constant is not elliptic");
    const double eps = eps_of(f, h);
    if (!(eps > 0.0 && eps < 1.0)) throw MisuseError("resonant_step: need 0 < eps < 1");
    const int N = mode_cap(eps, h - h_plus, cfg.K_trunc);
    const double gap = arithmetic::torus_norm(2.0 * A.rotation() - n_star * alpha.value);
    if (n_star == 0 || std::abs(n_star) > N || !(gap < std::pow(eps, cfg.resonance_exponent)))
        throw MisuseError("resonant_step: n = " + std::to_string(n_star) + " is not a resonance of this step");

    StepResult out = resonant_core(A, f, alpha.value, n_star, h, h_plus, cfg, eps);
    out.residual = conjugation_residual(out.B, A.matrix, f, out.A_plus.matrix, out.f_plus, alpha);

    const double sl = cfg.slack;
    const double kappa = cfg.kappa > 0.0 ? cfg.kappa : dc_kappa(alpha, cfg.tau);
    const double an = std::abs(n_star);
    out.checks.push_back(check("|nu_plus| <= eps^(15/16) e^(-2 pi |n| h)", std::abs(out.A_plus.nu),
                               sl * std::pow(eps, 15.0 / 16.0) * std::exp(-kTwoPi * an * h)));
    out.checks.push_back(check("Y_norm <= eps^(1/2)", out.Y.analytic_norm(h_plus), sl * std::sqrt(eps)));
    out.checks.push_back(check("|P| <= |n|^tau / kappa", op_norm(out.P), sl * std::pow(an, cfg.tau) / kappa));
    out.checks.push_back(check("f_plus <= eps e^(-h_plus eps^(-1/(18 tau)))", out.f_plus.analytic_norm(h_plus),
                               sl * eps * std::exp(-h_plus * std::pow(eps, -1.0 / (18.0 * cfg.tau))), false));
    out.checks.push_back(check("conjugation residual", out.residual, 1e-10));
    return out;
}

StepResult rotation_backward_step(const Su11Constant& A, const FourierMap& f,
                                  const arithmetic::Irrational& alpha, int n_star, double h, double h_plus,
                                  const LcCertificate& cert, const KamConfig& cfg) {
    check_step_args(f, h, h_plus);
    if (!(kTwoPi * h_plus > cert.delta))
        throw CertificateError("rotation_backward_step: need 2 pi h_plus > delta (h_plus = " +
                               std::to_string(h_plus) + ", delta = " + std::to_string(cert.delta) + ")");
    const double eps = eps_of(f, h);
    const int N = std::max(mode_cap(eps, h - h_plus, cfg.K_trunc), std::abs(n_star));
    for (int m = 1; m <= N; ++m)
        for (int s : {1, -1}) {
            double d = arithmetic::torus_norm(2.0 * cert.rho - s * m * alpha.value);
            if (d < cert.gamma * std::exp(-m * cert.delta))
                throw CertificateError("rotation_backward_step: rho violates LC(gamma, delta) at m = " +
                                       std::to_string(s * m));
        }

    StepResult res = resonant_step(A, f, alpha, n_star, h, h_plus, cfg);
    const Su11Constant& Ab = res.A_plus;
    if (Ab.kind != ConstKind::Elliptic)
        throw CertificateError("rotation_backward_step: normalized constant is " + to_string(Ab.kind));
    Normalization nz = normalize_elliptic(Ab);

    StepResult out;
    out.checks = res.checks;
    out.Y = res.Y;
    out.P = res.P;
    out.B = res.B;
    out.B.push_const(nz.U);
    out.B.push_rot(-n_star);
    out.rotation_deg = 0;
    Mat2 Ap = rotation(nz.r + 0.5 * n_star * alpha.value);
    out.A_plus = Su11Constant::from_matrix(Ap);
    const Mat2 U = nz.U, Ui = nz.U.inverse(), Api = Ap.inverse();
    const FourierMap& fb = res.f_plus;
    const double floor = roundoff_floor(Ab.matrix, Ap) * op_norm(U) * op_norm(Ui);
    out.f_plus = regrid(
        [&](double th) {
            return Mat2(Api * half_rotation(-n_star, th + alpha.value).transpose() * Ui * Ab.matrix *
                        expf(fb, th) * U * half_rotation(-n_star, th));
        },
        cfg.K_trunc, h_plus, floor);
    out.residual = conjugation_residual(out.B, A.matrix, f, out.A_plus.matrix, out.f_plus, alpha);

    const double sl = cfg.slack;
    const double an = std::abs(n_star);
    out.checks.push_back(check("|xi_bar| >= eps^(1/8) e^(-delta |n|) / 8", -Ab.xi,
                               -std::pow(eps, 0.125) * std::exp(-cert.delta * an) / (8.0 * sl)));
    const double hp = h_plus - cert.delta / kTwoPi;
    if (hp > 0.0) {
        FourierMap Bf = out.B.to_fourier(std::max(16, 2 * static_cast<int>(an) + 16), h_plus);
        double d = (Bf - FourierMap::constant(Mat2(Mat2::Identity()), h_plus)).analytic_norm(hp);
        out.checks.push_back(check("|B - id| at h_plus - delta/(2 pi) <= eps^(1/4)", d, sl * std::pow(eps, 0.25)));
    }
    out.checks.push_back(check("conjugation residual", out.residual, 1e-10));
    return out;
}

int KamTrace::violations() const {
    int v = 0;
    for (const auto& s : steps)
        for (const auto& c : s.checks)
            if (c.asserted && !c.ok) ++v;
    return v;
}

KamTrace kam_iterate(const Su11Constant& A0, const FourierMap& f0, const arithmetic::Irrational& alpha,
                     double h, double h_tilde, int budget, const KamConfig& cfg) {
    if (!(h > h_tilde) || !(h_tilde > 0.0)) throw DomainError("kam_iterate: need h > h_tilde > 0");
    if (budget < 0 || budget > 12) throw DomainError("kam_iterate: budget must be in [0, 12]");
    if (f0.denom() != 1) throw DomainError("kam_iterate: perturbation must be 1-periodic");
    if (f0.radius() < h * (1.0 - 1e-12)) throw DomainError("kam_iterate: f0 is not analytic on the strip h");

    KamTrace tr;
    tr.eps0 = f0.analytic_norm(h);
    const double h1 = h - (h - h_tilde) / 4.0;
    tr.gate = gate_bound(cfg, A0.matrix, h, h1);
    if (cfg.check_gate && tr.eps0 > tr.gate)
        throw GateError("kam_iterate: eps0 = " + std::to_string(tr.eps0) + " exceeds the smallness gate " +
                        std::to_string(tr.gate));
    KamConfig step_cfg = cfg;
    step_cfg.check_gate = false;  // the schedule only guarantees the gate at step 0

    Su11Constant A = A0;
    FourierMap f = f0;
    double hj = h;
    double eps = tr.eps0;
    std::optional<int> last_res;
    tr.status = KamStatus::BudgetExhausted;
    for (int j = 0; j < budget; ++j) {
        if (eps == 0.0) break;
        KamStep st;
        st.j = j;
        st.h = hj;
        const double dh = (h - h_tilde) / std::pow(4.0, j + 1);
        st.h_next = hj - dh;
        st.N = mode_cap(eps, dh, cfg.K_trunc);
        st.eps = eps;
        st.log_eps = std::log(eps);
        st.constant = A;
        if (A.kind == ConstKind::Parabolic) {
            tr.status = KamStatus::Diverged;
            tr.note = "parabolic constant at step " + std::to_string(j);
            break;
        }
        if (A.kind == ConstKind::Elliptic && eps < 1.0)
            st.resonance = detect_resonance(A.rotation(), alpha, st.N, eps, cfg.resonance_exponent);
        StepResult r;
        try {
            if (!st.resonance) {
                r = nonresonant_step(A, f, alpha, hj, st.h_next, step_cfg);
            } else if (cfg.lc) {
                r = rotation_backward_step(A, f, alpha, *st.resonance, hj, st.h_next, *cfg.lc, step_cfg);
            } else {
                r = resonant_step(A, f, alpha, *st.resonance, hj, st.h_next, step_cfg);
            }
        } catch (const InternalError& e) {
            tr.status = KamStatus::Diverged;
            tr.note = e.what();
            break;
        } catch (const DomainError& e) {
            tr.status = KamStatus::Diverged;
            tr.note = e.what();
            break;
        }
        const double eps_next = r.f_plus.analytic_norm(st.h_next);
        st.rotation_deg = r.rotation_deg;
        st.residual = r.residual;
        st.checks = r.checks;
        st.Y_norm = r.Y.analytic_norm(st.h_next);
        {
            FourierMap Bf = r.B.to_fourier(std::max(16, 2 * std::abs(r.B.degree()) + 16), st.h_next);
            st.tildeB_norm = (Bf - FourierMap::constant(Mat2(Mat2::Identity()), st.h_next)).analytic_norm(st.h_next);
        }
        if (!st.resonance) {
            st.checks.push_back(check("eps_next <= 4 eps^2", eps_next, 4.0 * eps * eps));
        } else {
            if (last_res)
                st.checks.push_back(check("resonance growth |n_next| > |n_prev|", -std::abs(*st.resonance),
                                          -std::abs(*last_res) - 1.0));
            last_res = st.resonance;
            tr.resonant_indices.push_back(*st.resonance);
        }
        tr.B.append(r.B);
        st.deg = tr.B.degree();
        tr.steps.push_back(st);

        A = r.A_plus;
        f = r.f_plus;
        hj = st.h_next;
        eps = eps_next;
        if (!std::isfinite(eps) || eps >= 1.0) {
            tr.status = KamStatus::Diverged;
            tr.note = "perturbation grew to " + std::to_string(eps);
            break;
        }
    }
    tr.final_constant = A;
    tr.final_f = f;
    tr.log_eps_final = eps > 0.0 ? std::log(eps) : -std::numeric_limits<double>::infinity();
    if (tr.status != KamStatus::Diverged && eps == 0.0) tr.status = KamStatus::ConvergedReducible;
    return tr;
}

LocalPair amo_local_pair(double lambda, double E, double h) {
    if (!(std::abs(lambda) <= 0.05)) throw DomainError("amo_local_pair: only the perturbative regime |lambda| <= 0.05");
    if (!(h > 0.0)) throw DomainError("amo_local_pair: need h > 0");
    Mat2 a;
    a << E, -1.0, 1.0, 0.0;
    LocalPair p;
    p.A0 = Su11Constant::from_matrix(a);
    p.f0 = FourierMap(1, h);
    CMat2 c = CMat2::Zero();
    c(1, 0) = lambda;
    p.f0.coef_ref(1) = c;
    p.f0.coef_ref(-1) = c;
    return p;
}

double composition_error_bound(const std::vector<Mat2>& M, const std::vector<double>& y_norms) {
    if (M.size() != y_norms.size()) throw DomainError("composition_error_bound: size mismatch");
    double s = 0.0;
    for (std::size_t l = 0; l < M.size(); ++l) {
        double m = op_norm(M[l]);
        s += m * m * y_norms[l];
    }
    return std::expm1(s);
}

CMat2 triangular_power(double xi, cplx c, long long n) {
    const double nd = static_cast<double>(n);
    CMat2 t;
    // sin(n xi)/sin(xi), with its limit n cos(n xi)/cos(xi) at xi in pi Z
    cplx off = std::abs(std::sin(xi)) < 1e-12 ? c * nd * std::cos(nd * xi) / std::cos(xi)
                                              : c * std::sin(nd * xi) / std::sin(xi);
    t << std::polar(1.0, nd * xi), off, 0.0, std::polar(1.0, -nd * xi);
    return t;
}

}  // namespace cocycle_lab::kam
