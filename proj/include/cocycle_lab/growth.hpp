#pragma once

// Growth of the AMO fundamental solution U_E(n) against the resonance
// envelope f(n), and the exact growth law of constant elliptic cocycles.
//
// Sign convention: resonances satisfy ||2 rho - l alpha|| small, and eta is
// read from |sin 2 pi (2 rho - l alpha)| = e^{-eta |l|}; the oscillation
// branch uses sin 2 pi n (rho - l alpha / 2) to match.

#include "cocycle_lab/arithmetic.hpp"
#include "cocycle_lab/cocycle.hpp"
#include "cocycle_lab/kam.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace cocycle_lab::growth {

struct EnvelopeSpec {
    arithmetic::Irrational alpha;
    std::vector<std::int64_t> ell;
    std::vector<double> eta;  // +inf for an exact resonance
    double rho = 0.0;
    double h_lambda = 0.0;  // -ln lambda
    double eps = 0.0;
    double eps0 = 0.0;
    // windows in ln|n|: [eps h |l_j| / 256, eps h |l_{j+1}| / 256), the last one open
    std::vector<std::pair<double, double>> windows;
};

// Resonances of rho from arithmetic::resonances with |l| <= K.
EnvelopeSpec make_envelope_spec(const arithmetic::Irrational& alpha, double rho, double lambda, double eps,
                                double eps0, std::int64_t K);
// Explicit data, e.g. for a planted instance.
EnvelopeSpec make_envelope_spec(const arithmetic::Irrational& alpha, std::vector<std::int64_t> ell,
                                std::vector<double> eta, double rho, double lambda, double eps, double eps0);

// f(n); identically 0 without resonances. Throws DomainError below the first window.
// The oscillation branch reads |sin 2 pi n (rho - l alpha/2)| as |sin pi (2 n rho - n l alpha)|,
// which only needs n l alpha mod 1.
double envelope_f(const EnvelopeSpec& spec, double n);

// Index of the window containing n, or -1 below the first one.
int window_of(const EnvelopeSpec& spec, double n);

struct GrowthOptions {
    double eps_tol = 0.2;
    double theta = 0.0;
    std::int64_t rho_iterations = 1000000;
    std::int64_t K = 200;  // resonance scan bound
    double tau = 2.0;      // Diophantine exponent in the (ln n)^{4 tau} correction
    cocycle::NormKind norm = cocycle::NormKind::HilbertSchmidt;
};

struct GrowthRow {
    std::int64_t n = 0;
    double exponent = 0.0;  // ln ||U_E(n)|| / ln n
    double f = 0.0;
    bool pass = false;
    double polylog_slack = 0.0;  // 4 tau ln ln n / ln n, added to eps_tol for pass_polylog
    bool pass_polylog = false;
};

struct GrowthReport {
    double rho = 0.0;
    double rho_error = 0.0;
    EnvelopeSpec spec;
    std::vector<GrowthRow> rows;
    int passes = 0;
};

// ln ||U_E(n)|| / ln n on the geometric points 2 <= n <= N, with
// U_E(n) = S(theta + (n-1) alpha) ... S(theta) and f left at 0.
std::vector<GrowthRow> exponent_profile(const cocycle::CocycleMap& c, std::int64_t N, const GrowthOptions& opt);

GrowthReport growth_report(double lambda, const arithmetic::Irrational& alpha, double E, double eps, double eps0,
                           std::int64_t N, const GrowthOptions& opt = {});

// Same, with the resonance data supplied (planted instances).
GrowthReport growth_report(double lambda, const arithmetic::Irrational& alpha, double E, const EnvelopeSpec& spec,
                           std::int64_t N, const GrowthOptions& opt = {});

// Min and max of ln ||U_E(n)||_HS / ln n over every n in consecutive windows
// [n_k, n_{k+1}), n_0 = n_min, with `per_decade` windows per decade up to N.
struct ExponentWindow {
    std::int64_t n_lo = 0;
    std::int64_t n_hi = 0;  // inclusive
    double min_exponent = 0.0;
    double max_exponent = 0.0;
    std::int64_t argmax = 0;
};

std::vector<ExponentWindow> exponent_windows(const cocycle::CocycleMap& c, std::int64_t N, double theta = 0.0,
                                             int per_decade = 2, std::int64_t n_min = 10);

// An AMO energy whose rotation number sits at 2 rho = l alpha + side * d mod 1 with
// sin 2 pi d = e^{-eta |l|}, found by bisection on the integrated density of states.
struct PlantedResonance {
    double E = 0.0;
    double rho = 0.0;
    double rho_error = 0.0;
    double offset = 0.0;        // measured signed 2 rho - l alpha
    double eta_measured = 0.0;  // from the measured offset
};

PlantedResonance plant_resonance(const arithmetic::Irrational& alpha, double lambda, std::int64_t ell, double eta,
                                 int side, std::int64_t rho_iterations = 4000000, int bisections = 40);

// ||A^n||_HS^2 = 2 + 4 sin^2(n xi) |nu / xi|^2 for elliptic A.
double constant_hs_sq(const kam::Su11Constant& a, std::int64_t n);

enum class GrowthRegime { Flat, Linear, Oscillatory };

std::string to_string(GrowthRegime r);

struct RegimeRow {
    std::int64_t n = 0;
    GrowthRegime regime = GrowthRegime::Flat;
    double shape = 1.0;  // |n| |nu| + 1 up to n = 1/xi, frozen beyond
    double exact = 1.0;  // sqrt(1 + 2 sin^2(n xi) |nu / xi|^2) = ||A^n||_HS / sqrt 2
};

struct RegimePrediction {
    double ratio = 0.0;  // |nu / xi|
    double turnover = 0.0;  // 1 / xi
    std::vector<RegimeRow> rows;
};

RegimePrediction regime_predict(const kam::Su11Constant& a, std::int64_t n_low, std::int64_t n_high,
                                int per_decade = 20);

}  // namespace cocycle_lab::growth
