#pragma once

#include <cstdint>
#include <vector>

#include "decomp/grid.hpp"

namespace decomp {

/// Duality mapping u -> |u|^{p-2} u (0 -> 0), the subdifferential of
/// (1/p)||.||_p^p. Requires p > 1.
std::vector<double> duality_map(const std::vector<double>& u, double p);
GridField duality_map(const GridField& u, double p);

/// tau-exponent of the pair: 1/tau = 1/p + 1/d. tau < 1 is a quasi-norm but
/// every quantity used here is positively homogeneous, so it stays computable.
double sobolev_tau(double p, int dims);

/// (sum over cells |grad u|_2^tau h^d)^(1/tau), tau > 0.
double grad_lp_norm(const GridField& u, double tau);

/// Lower-bound estimate of ||s||_{G_tau} = sup { <s,v> : ||grad v||_tau <= 1 }
/// by normalized ascent over the quotient (v up to constants) plus random
/// probes. Monotone in `iters` for a fixed seed; never exceeds the true sup.
/// Rejects s whose mean is not ~0 (the functional lives on mean-zero data).
double g_tau_norm_estimate(const GridField& s, double tau, int iters,
                           std::uint64_t seed = 7);

struct SobolevCheckConfig {
    double tol = 0.02;        // relative slack on both optimality conditions
    int ascent_iters = 300;
    std::uint64_t seed = 99;
};

/// Report-only verification of the optimality conditions of the
/// (L_p, W^1(L_tau)) pair for an externally supplied candidate u.
struct SobolevCheckReport {
    double p = 0.0;
    double tau = 0.0;
    double t = 0.0;
    double g_tau_estimate = 0.0;  // || J_p(v) ||_{G_tau} (lower-bound estimate)
    double pairing = 0.0;         // integral of J_p(v) u
    double t_grad_norm = 0.0;     // t ||grad u||_{L_tau}
    double mean_s = 0.0;          // mean of J_p(v)
    bool u_constant = false;
    bool pass_norm = false;
    bool pass_pairing = false;
    bool pass_mean = false;
    bool pass() const { return pass_norm && pass_pairing && pass_mean; }
};

SobolevCheckReport check_lp_sobolev_optimality(const GridField& f, const GridField& u,
                                               double p, double t,
                                               const SobolevCheckConfig& cfg = {});

/// argmin over constants of ||f - c||_p, located by golden section.
double best_constant_fit(const GridField& f, double p);

}  // namespace decomp
