#pragma once

#include <string>
#include <vector>

#include "decomp/oracles.hpp"
#include "decomp/rof.hpp"

namespace decomp {

struct ConvergenceRow {
    int level = 0;
    double k_n = 0.0;
    double err_l2 = 0.0;   // ||u_n - u_ref||_L2 on the level-n grid
    double err_l1 = 0.0;
    bool certified = false;
    int iterations = 0;
};

struct ConvergenceReport {
    double t = 0.0;
    TvMode tv_mode = TvMode::anisotropic;
    std::string reference;  // "analytic" or "finest-grid"
    double k_reference = 0.0;
    double solver_tol = 0.0;
    int solver_max_iters = 0;
    std::vector<ConvergenceRow> rows;
};

/// K_n(f,t) across dyadic levels for an analytic example (reference values
/// come from the closed form). Levels must be increasing and within [3, 12].
ConvergenceReport kn_study(const oracles::AnalyticSolution& example,
                           const std::vector<int>& levels,
                           const SolverConfig& cfg = {});

/// Same study for arbitrary data given at a fine dyadic resolution; the
/// finest computed level serves as the reference (flagged in provenance).
ConvergenceReport kn_study(const GridField& f_fine, double t,
                           const std::vector<int>& levels,
                           const SolverConfig& cfg = {});

/// The discrete problem in sequence form: minimize ||b - x||^2 + t ||Mx||_1,
/// where M maps cell values to weighted edge differences (M kills constants).
/// Exact only in anisotropic mode; `energy_scale` times the grid energy
/// 1/2||f-u||^2 + t TV(u) equals the sequence objective.
struct L1FormProblem {
    std::vector<double> b;
    double t = 0.0;
    double energy_scale = 0.0;  // 2 / h^d
    int nx = 0;
    int ny = 1;
    int dims = 1;

    std::vector<double> apply_M(const std::vector<double>& x) const;
    double objective(const std::vector<double>& x) const;

    // edge list with weights (2 * n_axis each)
    std::vector<std::size_t> edge_from, edge_to;
    std::vector<double> edge_w;
};

L1FormProblem l1_minimization_form(const GridField& f_n, double t,
                                   TvMode mode = TvMode::anisotropic);

}  // namespace decomp
