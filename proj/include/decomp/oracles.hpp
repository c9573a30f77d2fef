#pragma once

#include <cstdint>

#include "decomp/grid.hpp"

namespace decomp::oracles {

/// Closed-form minimizing pairs for the two model problems: the radial
/// indicator f = chi_{B(0,r)} on the ball B(0,R), and the ramp f(x) = x on
/// [0,1]. Both switch to the constant regime at a threshold scale t*.
struct AnalyticSolution {
    enum class Kind { ramp, radial };
    Kind kind = Kind::ramp;
    double t = 0.0;
    double threshold = 0.0;     // t*: above it u_t is the mean
    bool constant_regime = false;

    // radial parameters (unused for the ramp)
    int d = 1;
    double r = 0.0;
    double R = 0.0;

    /// f, u_t, v_t as functions of position: x in [0,1] for the ramp,
    /// radius |x| in [0,R] for the radial example.
    double f_at(double x) const;
    double u_at(double x) const;
    double v_at(double x) const { return f_at(x) - u_at(x); }
};

/// Example on B(0,R) in dimension d in {1,2}, data chi_{B(0,r)}.
/// Threshold t* = 1 / (d/r + d r^{d-1}/(R^d - r^d)).
AnalyticSolution radial_example(int d, double r, double R, double t);

/// Example f(x) = x on [0,1]: u_t = clamp(x, sqrt(2t), 1 - sqrt(2t)) up to
/// t* = 1/8, then u_t = 1/2.
AnalyticSolution ramp_example(double t);

/// K(f,t) of the ramp from the integrated closed form.
double ramp_k_value(double t);

/// Ramp data sampled at cell centers (equals the dyadic projection exactly).
GridField ramp_field(int n);
/// The analytic minimizer sampled at cell centers.
GridField ramp_solution_field(const AnalyticSolution& ex, int n);

/// Disk-masked square sampling of the radial example. The grid covers
/// [-R,R]^d mapped onto the unit domain, so physical scales relate to grid
/// scales through `scale` = 2R: solving at t_grid = t_phys / scale
/// reproduces the physical pair, and grid star norms multiply by `scale`.
struct RadialGrid {
    GridField f;
    GridField u_exact;
    double scale = 1.0;
};
RadialGrid radial_grid(const AnalyticSolution& ex, int n);

/// Independent primal minimizer of 1/2||f-u||^2 + t TV(u) for tiny instances
/// (smoothed-gradient continuation, multiple starts, then random-direction
/// line searches until 10^4 probes find no decrease above 1e-9).
struct BruteForceResult {
    GridField u;
    double energy = 0.0;
    bool certified = false;          // final probe pass found no improvement
    double worst_probe_decrease = 0.0;
};
BruteForceResult brute_force_rof_small(const GridField& f, double t,
                                       TvMode mode = TvMode::isotropic,
                                       std::uint64_t seed = 1234,
                                       int probe_count = 10000);

/// Energy 1/2||f-u||^2 + t TV(u) evaluated with plain loops, independent of
/// the kernel layer.
double rof_energy_direct(const GridField& f, const GridField& u, double t,
                         TvMode mode);

}  // namespace decomp::oracles
