#pragma once

// Almost Mathieu spectra at rational frequency p/q, gap labels, IDS and the
// gap-decay experiment.
//
// Chambers: tr M_q(E, theta) = Delta(E) - 2 lambda^q cos(2 pi q theta), so the
// union over theta of the periodic spectra is {|Delta(E)| <= 2 + 2 lambda^q}.

#include "cocycle_lab/arithmetic.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace cocycle_lab::spectrum {

struct Rational {
    std::int64_t p = 0;
    std::int64_t q = 1;
};

inline constexpr double kGapFloor = 1e-14;

// tr of S(theta + (q-1)p/q) ... S(theta) at the given phase.
double monodromy_trace(double lambda, Rational pq, double E, double theta);
// Delta(E) = monodromy_trace at theta0 = 1/(4q).
double chambers_discriminant(double lambda, Rational pq, double E);

struct Gap {
    std::int64_t m = 0;      // IDS on the gap is m/q
    std::int64_t label = 0;  // minimal |k| with k p = m mod q
    double left = 0.0;
    double right = 0.0;
    double length = 0.0;
    bool below_floor = false;
};

struct BandSpectrum {
    Rational pq;
    double lambda = 0.0;
    std::vector<std::pair<double, double>> bands;
    std::vector<Gap> gaps;
};

std::int64_t gap_label(std::int64_t p, std::int64_t q, std::int64_t m);

// Band edges are the periodic (theta = 0) and antiperiodic (theta = 1/(2q))
// Floquet eigenvalues, refined by bisection on Delta -/+ (2 + 2 lambda^q).
BandSpectrum band_spectrum(double lambda, Rational pq, double resolution = 1e-13);

double ids(const BandSpectrum& bs, double E);

// Hausdorff distance between two finite unions of closed intervals.
double hausdorff(const std::vector<std::pair<double, double>>& a,
                 const std::vector<std::pair<double, double>>& b);

struct DecayRow {
    std::int64_t k = 0;
    double left = 0.0;
    double right = 0.0;
    double length = 0.0;        // at the primary level
    double cross_length = 0.0;  // at the cross-check level
    double rate = 0.0;          // -ln(length)/|k|; a lower bound when below the floor
    bool stable = false;
    bool below_floor = false;
};

struct DecayTable {
    double lambda = 0.0;
    Rational primary;  // deepest convergent with q <= q_max
    Rational check;    // next convergent
    std::vector<DecayRow> rows;
};

DecayTable gap_decay_experiment(double lambda, const arithmetic::Irrational& alpha, std::int64_t q_max,
                                int k_max);

}  // namespace cocycle_lab::spectrum
