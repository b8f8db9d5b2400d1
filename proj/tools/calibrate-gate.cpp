// Scripted search for the smallness-gate constant D0.
//
// Runs random near-constant instances with the gate disabled and records, for
// each, the D0 that would just admit it: eps0 ||A||^C0 / (h - h_1)^(C0 tau).
// The calibrated D0 is the largest value that admits no failing instance.
// The result is hard-coded as kam::kDefaultD0; the instance count is per h_tilde.

#include "cocycle_lab/kam.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

using namespace cocycle_lab;

namespace {

struct Outcome {
    double required = 0.0;
    bool contracting = false;
    double eps0 = 0.0;
    double normA = 0.0;
    double dh = 0.0;
    std::string status;
};

Outcome run_instance(std::mt19937_64& rng, const arithmetic::Irrational& alpha, double h, double h_tilde,
                     const kam::KamConfig& base) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::normal_distribution<double> G;

    // A = P R_r P^{-1} with P = diag(s, 1/s) times a shear, det P = 1
    const double r = 0.49 * U(rng);
    const double s = std::exp(0.8 * U(rng));
    Mat2 P;
    P << s, 0.3 * U(rng) * s, 0.0, 1.0 / s;
    Mat2 A = P * rotation(r) * P.inverse();

    FourierMap f(4, h);
    for (int k = 0; k <= 4; ++k) {
        Mat2 re, im;
        re << G(rng), G(rng), G(rng), 0.0;
        im << G(rng), G(rng), G(rng), 0.0;
        re(1, 1) = -re(0, 0);
        im(1, 1) = -im(0, 0);
        CMat2 c = (re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>()) * std::exp(-kTwoPi * k * h);
        if (k == 0) c = re.cast<cplx>();
        f.coef_ref(k) = c;
        if (k > 0) f.coef_ref(-k) = c.conjugate();
    }
    const double eps0 = std::pow(10.0, -4.0 + 4.5 * (U(rng) + 1.0) / 2.0);
    f = f * (eps0 / f.analytic_norm(h));

    kam::KamConfig cfg = base;
    cfg.check_gate = false;
    Outcome o;
    o.eps0 = eps0;
    o.normA = op_norm(A);
    o.dh = (h - h_tilde) / 4.0;
    o.required = eps0 * std::pow(o.normA, cfg.C0) / std::pow(o.dh, cfg.C0 * cfg.tau);
    try {
        kam::KamTrace tr = kam::kam_iterate(kam::Su11Constant::from_matrix(A), f, alpha, h, h_tilde, 4, cfg);
        o.status = kam::to_string(tr.status);
        bool ok = tr.status != kam::KamStatus::Diverged;
        for (std::size_t j = 1; j < tr.steps.size(); ++j)
            if (!(tr.steps[j].eps < tr.steps[j - 1].eps)) ok = false;
        if (!tr.steps.empty() && !(tr.log_eps_final < tr.steps.back().log_eps)) ok = false;
        o.contracting = ok;
    } catch (const std::exception& e) {
        o.status = e.what();
        o.contracting = false;
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"calibrate the KAM smallness gate constant D0"};
    int instances = 100;  // per h_tilde
    std::uint64_t seed = 20240611;
    double h = 0.3;
    std::vector<double> h_tildes{0.1, 0.2, 0.25};
    bool verbose = false;
    app.add_option("--instances", instances, "random instances per h_tilde")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--strip", h, "initial strip width h");
    app.add_option("--h-tilde", h_tildes, "final strip widths (grid over h - h_tilde)");
    app.add_flag("-v,--verbose", verbose, "print every instance");
    CLI11_PARSE(app, argc, argv);

    const auto alpha = arithmetic::golden();
    kam::KamConfig base;
    std::mt19937_64 rng(seed);
    std::vector<Outcome> all;
    for (double ht : h_tildes)
        for (int i = 0; i < instances; ++i) {
            Outcome o = run_instance(rng, alpha, h, ht, base);
            if (verbose)
                std::printf("h_tilde=%.3f eps0=%.3e |A|=%.3f required D0=%.3e %s (%s)\n", ht, o.eps0, o.normA,
                            o.required, o.contracting ? "contracting" : "FAILED", o.status.c_str());
            all.push_back(o);
        }

    double first_failure = std::numeric_limits<double>::infinity();
    double largest_ok = 0.0;
    int failures = 0;
    for (const auto& o : all) {
        if (o.contracting) {
            largest_ok = std::max(largest_ok, o.required);
        } else {
            ++failures;
            first_failure = std::min(first_failure, o.required);
        }
    }
    // largest admitted instance that sits strictly below every failure
    double d0 = 0.0;
    for (const auto& o : all)
        if (o.contracting && o.required < first_failure) d0 = std::max(d0, o.required);
    std::printf("instances: %zu  failures: %d\n", all.size(), failures);
    std::printf("smallest failing D0: %.6e\n", first_failure);
    std::printf("largest contracting D0: %.6e\n", largest_ok);
    std::printf("calibrated D0: %.6e\n", d0);
    return 0;
}
