#pragma once

// Finite-truncation KAM engine for cocycles (alpha, A e^{f(theta)}) with A in
// SL(2,R) constant and f a real sl(2,R)-valued trigonometric polynomial.
//
// Rotations are in torus units throughout: R_r turns by 2 pi r, and the
// rotation of an elliptic constant is the signed r with A = U R_r U^{-1},
// det U = 1. Resonance tests compare 2r against n alpha mod 1.
//
// Every step recomputes the new perturbation exactly on a grid,
//   f_+ = log(A_+^{-1} B(theta+alpha)^{-1} A e^{f(theta)} B(theta)),
// so the conjugation identity holds up to the Fourier tail and roundoff.

#include "cocycle_lab/arithmetic.hpp"
#include "cocycle_lab/fourier_map.hpp"
#include "cocycle_lab/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cocycle_lab::kam {

enum class ConstKind { Elliptic, Parabolic, Hyperbolic };

std::string to_string(ConstKind k);

// +-A = M^{-1} exp([[i t, nu], [conj nu, -i t]]) M, sign chosen so that tr >= 0.
struct Su11Constant {
    Mat2 matrix = Mat2::Identity();
    ConstKind kind = ConstKind::Parabolic;
    double t = 0.0;
    cplx nu = 0.0;
    double xi = 0.0;  // sqrt(t^2 - |nu|^2) when elliptic, else 0

    static Su11Constant from_matrix(const Mat2& a);
    static Su11Constant from_su11(double t, cplx nu);
    // Signed rotation r (torus units) with A conjugate to R_r; elliptic only.
    double rotation() const;
    CMat2 su11_exponent() const;
};

double analytic_norm(const FourierMap& f, double h);

enum class Regime { NearDiagonal, Dominated };

struct Normalization {
    Mat2 U;  // symmetric positive definite, U^{-1} A U = R_r
    double r = 0.0;
    Regime regime = Regime::NearDiagonal;
    double ratio = 0.0;  // |2 nu / xi|
    double bound = 0.0;  // |nu/xi| (near-diagonal) or 4|nu|/xi (dominated)
    double measured = 0.0;  // ||U - id|| or ||U||^2 respectively
};

Normalization normalize_elliptic(const Su11Constant& a);

struct Triangular {
    CMat2 U;       // unitary; U^{-1} W U upper triangular, W the su(1,1) form of A
    CMat2 T;
    cplx nu = 0.0;  // T(0,1)
};

Triangular triangularize(const Su11Constant& a);

// Smallest |n| in 1..N with ||2 r - n alpha|| < eps^exponent; ties go to n > 0.
std::optional<int> detect_resonance(double r, const arithmetic::Irrational& alpha, int N, double eps,
                                    double exponent = 1.0 / 15.0);

// Kappa of DC(kappa, tau): min over 1 <= |k| <= K of ||k alpha|| |k|^tau.
double dc_kappa(const arithmetic::Irrational& alpha, double tau, int K = 1000);

// Conjugacy as an exact product of factors, evaluated pointwise.
// Rotation factors R_{n theta/2} make the product 2-periodic for odd n.
class Conjugacy {
public:
    struct Factor {
        enum class Kind { Exp, Const, Rot };
        Kind kind = Kind::Const;
        FourierMap y;               // Exp: e^{y(theta)}
        Mat2 c = Mat2::Identity();  // Const
        int n = 0;                  // Rot: R_{n theta / 2}
    };

    void push_exp(const FourierMap& y);
    void push_const(const Mat2& c);
    void push_rot(int n);
    void append(const Conjugacy& o);

    Mat2 eval(double theta) const;
    int degree() const { return degree_; }
    int period() const;  // 1 or 2
    bool empty() const { return factors_.empty(); }
    const std::vector<Factor>& factors() const { return factors_; }
    // Fourier expansion on the lattice Z/period with |k| <= K.
    FourierMap to_fourier(int K, double radius) const;

private:
    std::vector<Factor> factors_;
    int degree_ = 0;
};

struct LcCertificate {
    double gamma = 0.0;
    double delta = 0.0;
    double rho = 0.0;  // rotation of the original cocycle, torus units
};

struct KamConfig {
    double D0 = 0.0;  // 0 means the calibrated default kDefaultD0
    double C0 = 8.0;
    double tau = 2.0;
    double kappa = 0.0;  // 0 means dc_kappa(alpha, tau)
    double slack = 4.0;
    double resonance_exponent = 3.0;  // desk-scale threshold eps^3; see README
    int K_trunc = 64;
    int inner_sweeps = 8;
    bool check_gate = true;
    std::optional<LcCertificate> lc;  // set: rotation-backward scheme
};

// Output of tools/calibrate-gate (300 random instances, seed 20240611, h = 0.3,
// h_tilde in {0.1, 0.2, 0.25}): the largest D0 admitting no diverging instance.
inline constexpr double kDefaultD0 = 2.25e22;

double gate_bound(const KamConfig& cfg, const Mat2& A, double h, double h_plus);

struct BoundCheck {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    bool ok = true;
    bool asserted = true;  // false: logged only
};

struct StepResult {
    Conjugacy B;
    Su11Constant A_plus;
    FourierMap f_plus;
    FourierMap Y;           // union of the homological corrections
    Mat2 P = Mat2::Identity();
    int rotation_deg = 0;
    double residual = 0.0;  // conjugation identity on the 256-point grid, relative
    std::vector<BoundCheck> checks;
};

StepResult nonresonant_step(const Su11Constant& A, const FourierMap& f, const arithmetic::Irrational& alpha,
                            double h, double h_plus, const KamConfig& cfg = {});

StepResult resonant_step(const Su11Constant& A, const FourierMap& f, const arithmetic::Irrational& alpha,
                         int n_star, double h, double h_plus, const KamConfig& cfg = {});

StepResult rotation_backward_step(const Su11Constant& A, const FourierMap& f,
                                  const arithmetic::Irrational& alpha, int n_star, double h, double h_plus,
                                  const LcCertificate& cert, const KamConfig& cfg = {});

// max over theta of ||B(theta+alpha)^{-1} A e^{f} B(theta) - A_+ e^{f_+}|| / ||A e^f||.
double conjugation_residual(const Conjugacy& B, const Mat2& A, const FourierMap& f, const Mat2& A_plus,
                            const FourierMap& f_plus, const arithmetic::Irrational& alpha, int L = 256);

enum class KamStatus { ConvergedReducible, BudgetExhausted, Diverged };

std::string to_string(KamStatus s);

struct KamStep {
    int j = 0;
    double h = 0.0;
    double h_next = 0.0;
    int N = 0;
    double eps = 0.0;
    double log_eps = 0.0;  // -inf once the perturbation is below the roundoff floor
    Su11Constant constant;
    int deg = 0;  // cumulative degree after the step
    std::optional<int> resonance;
    int rotation_deg = 0;
    double tildeB_norm = 0.0;  // ||B_step - id|| at h_next
    double Y_norm = 0.0;
    double residual = 0.0;
    std::vector<BoundCheck> checks;
};

struct KamTrace {
    std::vector<KamStep> steps;
    std::vector<int> resonant_indices;
    KamStatus status = KamStatus::BudgetExhausted;
    double eps0 = 0.0;
    double log_eps_final = 0.0;
    double gate = 0.0;
    Su11Constant final_constant;
    FourierMap final_f;
    Conjugacy B;  // cumulative
    std::string note;

    int violations() const;
};

// Schedule h_j - h_{j+1} = (h - h_tilde)/4^{j+1}, N_j = min(2|ln eps_j|/(h_j - h_{j+1}), K_trunc).
KamTrace kam_iterate(const Su11Constant& A0, const FourierMap& f0, const arithmetic::Irrational& alpha,
                     double h, double h_tilde, int budget, const KamConfig& cfg = {});

// S_E^lambda = A0 e^{f0} with A0 = [[E, -1], [1, 0]] and f0 = [[0, 0], [2 lambda cos 2 pi theta, 0]].
// Only offered in the perturbative regime lambda <= 0.05.
struct LocalPair {
    Su11Constant A0;
    FourierMap f0;
};

LocalPair amo_local_pair(double lambda, double E, double h);

// exp(sum_l ||M_l||^2 ||y_l||) - 1: relative error of M_l(id+y_l)...M_0(id+y_0)
// against M^(l) = M_l...M_0.
double composition_error_bound(const std::vector<Mat2>& M, const std::vector<double>& y_norms);

// [[e^{i xi}, c], [0, e^{-i xi}]]^n in closed form.
CMat2 triangular_power(double xi, cplx c, long long n);

}  // namespace cocycle_lab::kam
