#pragma once

// Continued-fraction frequencies and resonance exponents.
//
// A frequency is identified with its finite CF data: alpha := p_N/q_N for the
// last stored convergent. Every ||k alpha|| query is answered with exact
// integer arithmetic on that fraction; queries with |k| >= q_{N-1} cannot see
// the difference between alpha and a rational and raise PrecisionError.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace cocycle_lab::arithmetic {

using BigInt = boost::multiprecision::cpp_int;
using Hp = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256>>;

struct PrecisionBudget {
    int max_terms = 64;
    int digits = 256;  // effective digits, capped by the 256-digit working type
};

struct Irrational {
    std::vector<std::int64_t> cf;  // a_1, a_2, ..., a_N
    std::vector<BigInt> p, q;      // convergents, index 0..N with p_0/q_0 = 0/1
    std::string approx;            // decimal expansion of p_N/q_N
    double value = 0.0;
    PrecisionBudget budget;

    int depth() const { return static_cast<int>(cf.size()); }
    const BigInt& num() const { return p.back(); }
    const BigInt& den() const { return q.back(); }
    Hp value_hp() const;
    // Largest |k| for which ||k alpha|| is resolved (q_{N-1} - 1).
    BigInt max_resolvable() const;
};

double torus_norm(double x);
Hp torus_norm(const Hp& x);

Irrational from_cf(const std::vector<std::int64_t>& coeffs, PrecisionBudget budget = {});
Irrational golden(int terms = 64);
Irrational silver(int terms = 64);
// Accepts "golden", "silver" or "cf:a1,a2,...".
Irrational parse_alpha(const std::string& spec, PrecisionBudget budget = {});

// Convergent p_n/q_n as a double pair, for diagnostics and approximant work.
std::pair<std::int64_t, std::int64_t> convergent(const Irrational& alpha, int n);

double knorm(const Irrational& alpha, std::int64_t k);
// (k p_N mod q_N) / q_N in [0,1), i.e. frac(k alpha) exactly.
Hp frac_multiple(const Irrational& alpha, std::int64_t k);

// Running estimates. ExactResonance is the +infinity outcome and carries the
// witnessing integer.
struct ResonanceEstimate {
    enum class Kind { Finite, ExactResonance };
    Kind kind = Kind::Finite;
    double value = 0.0;
    std::int64_t witness = 0;
    bool exact() const { return kind == Kind::ExactResonance; }
};

// -ln||q_m alpha||/q_m at the largest convergent denominator q_m <= K.
// Equals max over q_m <= k <= K of -ln||k alpha||/k.
ResonanceEstimate beta_estimate(const Irrational& alpha, std::int64_t K);

// Tail estimate max over ceil(K/2) <= |k| <= K of -ln||2 rho + k alpha||/|k|.
// The exact-resonance scan covers the full range 1 <= |k| <= K.
ResonanceEstimate delta_estimate(const Irrational& alpha, const Hp& rho, std::int64_t K);
ResonanceEstimate delta_estimate(const Irrational& alpha, double rho, std::int64_t K);

struct ResonanceSeq {
    Hp rho;
    double eps0 = 0.0;
    std::vector<std::int64_t> entries;
    std::vector<double> norms;      // ||2 rho - l alpha||
    std::vector<double> log_norms;  // ln of the same, survives underflow
};

ResonanceSeq resonances(const Irrational& alpha, const Hp& rho, double eps0, std::int64_t K);
ResonanceSeq resonances(const Irrational& alpha, double rho, double eps0, std::int64_t K);

}  // namespace cocycle_lab::arithmetic
