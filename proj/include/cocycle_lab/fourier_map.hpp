#pragma once

// Matrix-valued trigonometric polynomials on the torus.
//
// Frequencies are k/denom for |k| <= K, so denom = 2 carries the half-integer
// modes of R_{n theta/2} with odd n on an integer index. A real-valued map
// satisfies c(-k) = conj(c(k)).

#include "cocycle_lab/linalg.hpp"

#include <functional>
#include <vector>

namespace cocycle_lab {

class FourierMap {
public:
    FourierMap() = default;
    FourierMap(int K, double radius, int denom = 1);

    static FourierMap constant(const Mat2& a, double radius);
    static FourierMap constant(const CMat2& a, double radius);
    // Samples f on L = 4K+1 points of [0, denom) and keeps |k| <= K.
    static FourierMap from_function(const std::function<CMat2(double)>& f, int K, double radius,
                                    int denom = 1);
    // vals[j] = f(denom * j / L); requires L >= 2K+1.
    static FourierMap from_samples(const std::vector<CMat2>& vals, int K, double radius,
                                   int denom = 1);

    int K() const { return K_; }
    int denom() const { return denom_; }
    double radius() const { return radius_; }
    void set_radius(double h) { radius_ = h; }

    CMat2 coef(int k) const;  // zero outside the band
    CMat2& coef_ref(int k);
    double frequency(int k) const { return static_cast<double>(k) / denom_; }

    CMat2 eval_c(double theta) const;
    Mat2 eval(double theta) const { return eval_c(theta).real(); }
    // Values on theta_j = denom * j / L.
    std::vector<CMat2> sample(int L) const;

    // sum_k ||c(k)||_op e^{2 pi |k/denom| h}
    double analytic_norm(double h) const;
    double sup_norm_grid(int L = 256) const;
    // max_k ||c(-k) - conj c(k)||, zero for real maps
    double reality_defect() const;
    double mean_trace_defect(int L = 64) const;

    FourierMap shifted(double alpha) const;  // theta -> theta + alpha
    FourierMap conjugated(const CMat2& p) const;  // p^{-1} f p
    FourierMap left_mul(const CMat2& a) const;
    FourierMap right_mul(const CMat2& a) const;
    FourierMap truncated(int K) const;
    FourierMap with_denom(int denom) const;
    // Zeroes coefficients with operator norm below the threshold.
    FourierMap filtered(double threshold) const;

    FourierMap operator+(const FourierMap& o) const;
    FourierMap operator-(const FourierMap& o) const;
    FourierMap operator*(double s) const;
    // Pointwise product, computed as an exact convolution of coefficients.
    FourierMap operator*(const FourierMap& o) const;

private:
    int K_ = 0;
    int denom_ = 1;
    double radius_ = 0.0;
    std::vector<CMat2> c_;  // c_[k + K_]
};

}  // namespace cocycle_lab
