#include "decomp/convergence.hpp"

#include <cmath>
#include <stdexcept>

#include "decomp/field_ops.hpp"

namespace decomp {

namespace {

void check_levels(const std::vector<int>& levels) {
    if (levels.empty()) throw std::invalid_argument("kn_study: no levels given");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 3 || levels[i] > 12)
            throw std::invalid_argument("kn_study: levels must lie in [3, 12]");
        if (i > 0 && levels[i] <= levels[i - 1])
            throw std::invalid_argument("kn_study: levels must be strictly increasing");
    }
}

// replicate a coarse dual field onto a grid `factor` times finer per axis;
// feasibility (|z| <= 1, zero boundary components) is preserved
DualField prolong_dual(const DualField& z, const GridField& fine, int factor) {
    DualField out(fine);
    const int cnx = z.nx();
    for (int iy = 0; iy < (fine.dims() == 2 ? fine.ny() : 1); ++iy) {
        for (int ix = 0; ix < fine.nx(); ++ix) {
            const std::size_t i = static_cast<std::size_t>(iy) * fine.nx() + ix;
            const std::size_t c =
                static_cast<std::size_t>(iy / factor) * cnx + ix / factor;
            out.x()[i] = z.x()[c];
            if (fine.dims() == 2) out.y()[i] = z.y()[c];
        }
    }
    out.zero_boundary_components();
    return out;
}

}  // namespace

ConvergenceReport kn_study(const oracles::AnalyticSolution& example,
                           const std::vector<int>& levels, const SolverConfig& cfg) {
    using oracles::AnalyticSolution;
    check_levels(levels);
    if (example.kind != AnalyticSolution::Kind::ramp)
        throw std::invalid_argument(
            "kn_study: analytic reference is available for the ramp example");
    ConvergenceReport rep;
    rep.t = example.t;
    rep.tv_mode = cfg.tv;
    rep.reference = "analytic";
    rep.k_reference = oracles::ramp_k_value(example.t);
    rep.solver_tol = cfg.tol;
    rep.solver_max_iters = cfg.max_iters;

    DualField warm;
    int prev_n = 0;
    for (int level : levels) {
        const int n = 1 << level;
        const GridField f_n = oracles::ramp_field(n);  // cell averages of x, exactly
        RofSolution sol;
        if (prev_n > 0 && n % prev_n == 0) {
            const DualField start = prolong_dual(warm, f_n, n / prev_n);
            sol = solve_rof(f_n, example.t, cfg, &start);
        } else {
            sol = solve_rof(f_n, example.t, cfg);
        }
        warm = sol.z;
        prev_n = n;

        const GridField u_ref = oracles::ramp_solution_field(example, n);
        ConvergenceRow row;
        row.level = level;
        row.k_n = sol.energy;
        row.err_l2 = l2_norm(sub(sol.u, u_ref));
        row.err_l1 = lp_norm(sub(sol.u, u_ref), 1.0);
        row.certified = sol.certified;
        row.iterations = sol.iterations;
        rep.rows.push_back(row);
    }
    return rep;
}

ConvergenceReport kn_study(const GridField& f_fine, double t,
                           const std::vector<int>& levels, const SolverConfig& cfg) {
    check_levels(levels);
    ConvergenceReport rep;
    rep.t = t;
    rep.tv_mode = cfg.tv;
    rep.reference = "finest-grid";
    rep.solver_tol = cfg.tol;
    rep.solver_max_iters = cfg.max_iters;

    // solve the finest level first: it provides u_ref for every row
    const int finest = levels.back();
    const GridField f_ref = project_Vn(f_fine, finest);
    const RofSolution ref_sol = solve_rof(f_ref, t, cfg);
    rep.k_reference = ref_sol.energy;

    for (int level : levels) {
        const GridField f_n = project_Vn(f_fine, level);
        const RofSolution sol = solve_rof(f_n, t, cfg);
        // compare on the level-n grid against the averaged reference
        const GridField u_ref = project_Vn(ref_sol.u, level);
        ConvergenceRow row;
        row.level = level;
        row.k_n = sol.energy;
        row.err_l2 = l2_norm(sub(sol.u, u_ref));
        row.err_l1 = lp_norm(sub(sol.u, u_ref), 1.0);
        row.certified = sol.certified;
        row.iterations = sol.iterations;
        rep.rows.push_back(row);
    }
    return rep;
}

std::vector<double> L1FormProblem::apply_M(const std::vector<double>& x) const {
    if (x.size() != b.size())
        throw std::invalid_argument("apply_M: size mismatch");
    std::vector<double> out(edge_from.size());
    for (std::size_t k = 0; k < edge_from.size(); ++k)
        out[k] = (x[edge_to[k]] - x[edge_from[k]]) * edge_w[k];
    return out;
}

double L1FormProblem::objective(const std::vector<double>& x) const {
    if (x.size() != b.size())
        throw std::invalid_argument("objective: size mismatch");
    long double fit = 0.0L;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double d = b[i] - x[i];
        fit += d * d;
    }
    long double reg = 0.0L;
    for (std::size_t k = 0; k < edge_from.size(); ++k)
        reg += std::abs((x[edge_to[k]] - x[edge_from[k]]) * edge_w[k]);
    return static_cast<double>(fit) + t * static_cast<double>(reg);
}

L1FormProblem l1_minimization_form(const GridField& f_n, double t, TvMode mode) {
    if (mode != TvMode::anisotropic)
        throw std::invalid_argument(
            "l1_minimization_form: only the anisotropic mode reduces exactly");
    if (t <= 0.0) throw std::invalid_argument("l1_minimization_form: t must be > 0");
    L1FormProblem prob;
    prob.b = f_n.values();
    prob.t = t;
    prob.energy_scale = 2.0 / f_n.cell_measure();
    prob.nx = f_n.nx();
    prob.ny = f_n.dims() == 2 ? f_n.ny() : 1;
    prob.dims = f_n.dims();
    for (int iy = 0; iy < prob.ny; ++iy) {
        for (int ix = 0; ix < prob.nx; ++ix) {
            const std::size_t i = static_cast<std::size_t>(iy) * prob.nx + ix;
            if (!f_n.active(i)) continue;
            if (ix + 1 < prob.nx && f_n.active(i + 1)) {
                prob.edge_from.push_back(i);
                prob.edge_to.push_back(i + 1);
                prob.edge_w.push_back(2.0 * f_n.nx());
            }
            if (prob.dims == 2 && iy + 1 < prob.ny && f_n.active(i + prob.nx)) {
                prob.edge_from.push_back(i);
                prob.edge_to.push_back(i + prob.nx);
                prob.edge_w.push_back(2.0 * f_n.ny());
            }
        }
    }
    return prob;
}

}  // namespace decomp
