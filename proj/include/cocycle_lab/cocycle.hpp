#pragma once

// Quasiperiodic SL(2,R) cocycles over theta -> theta + alpha.
//
// Orientation: rho := 1/2 - rho_lift (mod 1), where rho_lift is the average
// counterclockwise lift increment over 2 pi. For Schrodinger cocycles this puts
// rho = 0 below the spectrum and rho = 1/2 above it, and the integrated density
// of states is N(E) = 2 rho. Only 2 rho mod 1 enters resonance conditions, and
// 2 rho = -2 rho_lift mod 1 for every map.

#include "cocycle_lab/arithmetic.hpp"
#include "cocycle_lab/fourier_map.hpp"
#include "cocycle_lab/linalg.hpp"

#include <cstdint>
#include <vector>

namespace cocycle_lab::cocycle {

struct CocycleMap {
    enum class Kind { Amo, General };

    arithmetic::Irrational alpha;
    Kind kind = Kind::Amo;
    double lambda = 0.0;
    double E = 0.0;
    FourierMap f;  // General: the SL(2,R)-valued map itself

    static CocycleMap amo(const arithmetic::Irrational& alpha, double lambda, double E);
    static CocycleMap general(const arithmetic::Irrational& alpha, const FourierMap& f);

    Mat2 eval(double theta) const;
    // theta + k alpha mod 1 with k alpha reduced exactly against p_N/q_N.
    double orbit(double theta, std::int64_t k) const;
    double alpha_value() const { return alpha.value; }
};

// A_n(theta) = exp(log_scale) * matrix; matrix has norm O(1).
struct ScaledMatrix {
    Mat2 matrix = Mat2::Identity();
    double log_scale = 0.0;
    double log_norm() const { return log_scale + std::log(op_norm(matrix)); }
    double log_hs_norm() const { return log_scale + std::log(hs_norm(matrix)); }
    double det() const { return std::exp(2.0 * log_scale) * matrix.determinant(); }
    Mat2 full() const { return std::exp(log_scale) * matrix; }
};

inline constexpr int kRenormEvery = 1000;

ScaledMatrix iterate(const CocycleMap& c, double theta, std::int64_t n);

// 16 midpoint-equidistributed phases followed by 16 Weyl-sequence phases.
std::vector<double> default_phases();
std::vector<double> equidistributed_phases(int n);

struct LyapunovEstimate {
    double value = 0.0;
    double spread = 0.0;  // bootstrap standard deviation of the phase mean
};

LyapunovEstimate lyapunov(const CocycleMap& c, std::int64_t n, const std::vector<double>& thetas);

struct RotationEstimate {
    double value = 0.0;  // in [0,1)
    double error = 0.0;  // torus distance between the two half-sample estimates
};

RotationEstimate rotation_number(const CocycleMap& c, std::int64_t n, double theta);

enum class NormKind { Operator, HilbertSchmidt };

struct GrowthProfile {
    std::vector<std::int64_t> ns;
    std::vector<double> lognorms;
    double theta = 0.0;
    NormKind norm_kind = NormKind::Operator;
};

// Geometric sample points: every n <= 10, then 20 per decade, always ending at N.
std::vector<std::int64_t> geometric_points(std::int64_t N, int per_decade = 20);
GrowthProfile growth_profile(const CocycleMap& c, double theta, std::int64_t N, NormKind kind);

struct UhOptions {
    double margin = 0.05;
    double min_transversality = 0.05;  // |sin| of the angle between stable and unstable directions
};

// Finite-N heuristic for uniform hyperbolicity, not a certificate.
bool uh_test(const CocycleMap& c, std::int64_t N, int theta_grid, const UhOptions& opt = {});

}  // namespace cocycle_lab::cocycle
