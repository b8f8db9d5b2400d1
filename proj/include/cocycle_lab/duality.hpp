#pragma once

// Aubry duality at finite truncation: Fourier rows of a conjugacy as dual
// eigenfunction candidates, goodness checks, the dual three-term recurrence,
// Wronskians, and finite-box localization of the long-range operator.
//
// If S_E(theta) B(theta) = B(theta + alpha) R_rho with S_E the AMO cocycle
// [[E - 2 lambda cos 2 pi theta, -1], [1, 0]], then w = b11 - i b12 solves
//   w^(n+1) + w^(n-1) + 2 lambda^{-1} cos 2 pi (rho + n alpha) w^(n) = lambda^{-1} E w^(n).
// Rows of a conjugacy with odd degree live on Z + 1/2 (parity = 1).

#include "cocycle_lab/arithmetic.hpp"
#include "cocycle_lab/fourier_map.hpp"

#include <map>
#include <utility>
#include <vector>

namespace cocycle_lab::duality {

struct DualSequence {
    int K = 0;       // entries for j in [-K, K]
    int parity = 0;  // site of entry j is j + parity/2; doubled-lattice index 2j + parity
    std::vector<cplx> values;
    std::vector<int> center_candidates;  // j at local maxima of |value| above 1e-3 of the peak
    double norm = 0.0;                   // l2 norm before normalization

    static DualSequence from_values(int K, int parity, std::vector<cplx> values, bool normalize = true);

    double site(int j) const { return j + 0.5 * parity; }
    int doubled(int j) const { return 2 * j + parity; }
    cplx at(int j) const;  // zero outside [-K, K]
    double l2() const;
    // l2 mass fraction in the windows |site - c| <= halfwidth and |site + c| <= halfwidth.
    double two_window_fraction(double c, double halfwidth) const;
};

struct DualRows {
    DualSequence row11;
    DualSequence row12;
};

// Coefficients of B_11 and B_12, each normalized; a zero row keeps norm 0.
DualRows dual_rows(const FourierMap& B);
// Coefficients of b11 - i b12, normalized.
DualSequence dual_eigenfunction(const FourierMap& B);

struct Goodness {
    bool h1 = false;
    bool h2 = false;
    int worst_n = 0;          // doubled-lattice index of the largest H2 ratio
    double sup_norm = 0.0;    // grid sup of ||B||
    double worst_ratio = 0.0; // max |b| / bound over both rows
};

// H1: sup ||B|| <= C1. H2: |b11(n)|, |b12(n)| <= C2 (e^{-gamma |n + ell/2|} + e^{-gamma |n - ell/2|}).
Goodness goodness_check(const FourierMap& B, double C1, double C2, double gamma, int ell);

struct GoodnessParams {
    double C1 = 0.0;
    double C2 = 0.0;
    double gamma = 0.0;
    int ell = 0;
};

// (C |n|^{2 tau}, C e^{(eps h)^2 |n|}, 2 pi h (1 - eps), n) for a degree-n conjugacy
// analytic on the strip h; |n| is read as max(|n|, 1).
GoodnessParams prop_shapes(int n, double h, double eps, double C = 4.0, double tau = 2.0);

// max over interior j of |u(j+1) + u(j-1) + 2 lambda^{-1} cos 2 pi (x + site(j) alpha) u(j)
// - lambda^{-1} E u(j)| / ||u||_inf.
double dual_residual(const DualSequence& u, double lambda, const arithmetic::Irrational& alpha, double E,
                     double x = 0.0);

struct Recurrence {
    double lambda = 1.0;
    double E = 0.0;
    double x = 0.0;
    int parity = 0;
};

struct WronskianSeries {
    std::vector<long> n;
    std::vector<cplx> D;     // D'_n = u1(n) u2(n+1) - u1(n+1) u2(n)
    double rel_drift = 0.0;      // max |D'_n - D'_{n0}| / |D'_{n0}|
};

// Extends u1, u2 from their values at n0, n0 + 1 by the exact dual recurrence
// (long double) over [n_from, n_to] and records D'_n.
WronskianSeries wronskian_series(const DualSequence& u1, const DualSequence& u2, const Recurrence& rec,
                                 const arithmetic::Irrational& alpha, long n0, long n_from, long n_to);

// D'_n read directly off two sequences, without extension.
std::vector<cplx> direct_wronskian(const DualSequence& u1, const DualSequence& u2);

using Coefficients = std::map<int, cplx>;

// (L u)_j = sum_k Vhat_k u_{j-k} + 2 lambda cos 2 pi (x + site(j) alpha) u_j on [-K, K], zero outside.
DualSequence longrange_apply(const Coefficients& Vhat, double lambda, const arithmetic::Irrational& alpha,
                             double x, const DualSequence& u);

struct LocalizedState {
    double E = 0.0;
    double rate = 0.0;  // NaN when the usable radial range is too short to fit
    int center = 0;
    int range = 0;      // usable radial range (box boundary or noise floor)
};

// Diagnostic only: dense eigensolve of the operator on [-N, N].
std::vector<LocalizedState> finite_localization(const Coefficients& Vhat, double lambda,
                                                const arithmetic::Irrational& alpha, double x, int N);

// Decay rate of one eigenvector: 90th-percentile envelope of ln|psi| against
// |j - center| in bins, Theil-Sen slope over the middle 60% of the usable range.
LocalizedState fit_decay(const std::vector<double>& psi, int N);

// Median rate over states centred in the middle 70% of the box.
double median_bulk_rate(const std::vector<LocalizedState>& states, int N);

}  // namespace cocycle_lab::duality
