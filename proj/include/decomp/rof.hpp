#pragma once

#include <optional>

#include "decomp/grid.hpp"

namespace decomp {

/// Tolerances a certified solve must satisfy (dual feasibility, the pairing
/// identity <z,Du> = |u|_BV, and mean preservation).
inline constexpr double kCertSupTol = 1e-8;
inline constexpr double kCertPairingTol = 1e-4;
inline constexpr double kCertMeanTol = 1e-10;

struct SolverConfig {
    double tau = 0.0;      // dual step in grid units; 0 = default 0.9/(2d)
    int max_iters = 5000;
    double tol = 1e-6;     // stop when the max per-cell change of z drops below
    TvMode tv = TvMode::isotropic;
    bool coarse_init = true;  // warm-start from a recursively coarsened solve

    double effective_tau(int dims) const { return tau > 0.0 ? tau : 0.9 / (2.0 * dims); }
};

struct Certificate {
    double sup_norm_z = 0.0;
    double pairing_residual = 0.0;  // |<z, grad u> h^d - TV(u)|
    double mean_residual = 0.0;     // |mean(u) - mean(f)|
};

/// Minimizing pair for 1/2 ||f-u||^2 + t |u|_TV together with the dual field
/// that certifies optimality (f - u = -t div z, ||z||_inf <= 1, <z,Du> = TV(u)).
struct RofSolution {
    GridField u;
    GridField v;  // f - u
    DualField z;
    double t = 0.0;
    TvMode tv_mode = TvMode::isotropic;
    int iterations = 0;
    bool converged = false;
    bool certified = false;  // converged and certificate within tolerances
    Certificate certificate;
    double tv_u = 0.0;
    double energy = 0.0;  // 1/2 ||v||^2 + t TV(u)
};

struct KFunctionalValue {
    double k_direct = 0.0;      // 1/2 ||v||^2 + t TV(u)
    double k_projection = 0.0;  // <v, f> h^d - 1/2 ||v||^2
    bool certified = false;
};

struct StarNormEstimate {
    double value = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double constancy_threshold = 0.0;
    int solves = 0;
    // a deciding probe ran out of iterations: the bracket may be off by more
    // than the constancy threshold; raise max_iters to firm it up
    bool budget_limited = false;
};

/// Semi-implicit dual fixed-point iteration; optional warm start for the dual
/// variable. Non-convergence is reported in the result, not thrown.
RofSolution solve_rof(const GridField& f, double t, const SolverConfig& cfg = {},
                      const DualField* warm_start = nullptr);

/// v_t = pi_{tU2}(f), the L2 projection of f onto the dual ball of radius t.
GridField project_onto_tU2(const GridField& f, double t, const SolverConfig& cfg = {});

/// K(f,t) through both routes: the energy of the minimizing pair and the
/// projection identity. They agree at the exact optimum.
KFunctionalValue k_functional(const GridField& f, double t,
                              const SolverConfig& cfg = {});

/// Smallest t for which u_t collapses to the mean, located by bisection.
/// u is declared constant when ||u - mean(u)||_inf <= eps * (max f - min f).
StarNormEstimate estimate_star_norm(const GridField& f, double bisect_tol,
                                    const SolverConfig& cfg = {},
                                    double constancy_eps = 1e-3);

}  // namespace decomp
