#pragma once

// 2x2 matrix kit: closed-form exp/log, norms, rotations and the
// sl(2,R) <-> su(1,1) change of coordinates.

#include <Eigen/Dense>

#include <complex>

namespace cocycle_lab {

using Mat2 = Eigen::Matrix2d;
using CMat2 = Eigen::Matrix2cd;
using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// R_phi with phi in torus units: [[cos 2 pi phi, -sin 2 pi phi], [sin 2 pi phi, cos 2 pi phi]].
Mat2 rotation(double phi);

double op_norm(const Mat2& a);
double op_norm(const CMat2& a);
inline double hs_norm(const Mat2& a) { return a.norm(); }

// exp and principal log through the Cayley-Hamilton identity X^2 = -det(X) I
// for traceless X; no series beyond the removable singularities.
CMat2 expm(const CMat2& x);
Mat2 expm(const Mat2& x);
CMat2 logm(const CMat2& g);
Mat2 logm(const Mat2& g);  // throws DomainError if the log is not real

// The Cayley map M = (1/2i)[[1,-i],[1,i]]; W = M X M^{-1} sends real sl(2,R)
// to su(1,1) and SL(2,R) to SU(1,1).
const CMat2& cayley();
const CMat2& cayley_inv();
CMat2 to_su11(const Mat2& x);
CMat2 to_su11(const CMat2& x);
CMat2 from_su11_c(const CMat2& w);
Mat2 from_su11(const CMat2& w);  // real part; callers check the imaginary residue

}  // namespace cocycle_lab
