#include "decomp/rof.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "decomp/field_ops.hpp"
#include "decomp/kernels.hpp"

namespace decomp {

namespace {

// The iteration runs in grid units: differences are scaled per axis by
// rho_a = h_min/h_a (so the stiffest axis has unit spacing) and the
// regularization weight becomes lambda = t/h_min. The fixed point gives the
// physical pair through u = f + lambda div(z), which equals f + t div_phys(z).
struct GridUnits {
    kernels::GridSpec spec;
    double lambda = 0.0;
};

GridUnits grid_units(const GridField& f, double t) {
    GridUnits gu;
    gu.spec.nx = f.nx();
    gu.spec.ny = f.dims() == 2 ? f.ny() : 1;
    gu.spec.mask = f.masked() ? f.mask().data() : nullptr;
    const int nmax = std::max(f.nx(), f.dims() == 2 ? f.ny() : 1);
    gu.spec.sx = static_cast<double>(f.nx()) / nmax;
    gu.spec.sy = f.dims() == 2 ? static_cast<double>(f.ny()) / nmax : 1.0;
    gu.lambda = t * nmax;
    return gu;
}

// --- cascadic initialization ------------------------------------------------
// The fixed-point iteration moves dual information one cell per sweep, so a
// cold start on a fine grid is slow. Solving a 2x-coarsened problem first and
// replicating its dual field gives a feasible start with the right large-scale
// structure; the iteration itself is unchanged.

bool can_coarsen(const GridField& f) {
    if (f.size() <= 64) return false;
    if (f.nx() % 2 != 0 || f.nx() < 4) return false;
    if (f.dims() == 2 && (f.ny() % 2 != 0 || f.ny() < 4)) return false;
    return true;
}

GridField coarsen_field(const GridField& f) {
    const int cnx = f.nx() / 2;
    const int cny = f.dims() == 2 ? f.ny() / 2 : 1;
    std::vector<double> vals(static_cast<std::size_t>(cnx) * cny, 0.0);
    std::vector<std::uint8_t> cmask;
    if (f.masked()) cmask.assign(vals.size(), 0);
    for (int cy = 0; cy < cny; ++cy) {
        for (int cx = 0; cx < cnx; ++cx) {
            const std::size_t ci = static_cast<std::size_t>(cy) * cnx + cx;
            double acc = 0.0;
            bool all_active = true;
            const int span_y = f.dims() == 2 ? 2 : 1;
            for (int jy = 0; jy < span_y; ++jy) {
                for (int jx = 0; jx < 2; ++jx) {
                    const std::size_t i = f.idx(2 * cx + jx, span_y * cy + jy);
                    acc += f[i];
                    all_active = all_active && f.active(i);
                }
            }
            if (f.masked() && !all_active) continue;  // coarse cell stays inactive
            vals[ci] = acc / (2.0 * span_y);
            if (f.masked()) cmask[ci] = 1;
        }
    }
    GridField out = f.dims() == 1 ? GridField(cnx, std::move(vals))
                                  : GridField(cnx, cny, std::move(vals));
    if (f.masked()) out.set_mask(std::move(cmask));
    return out;
}

DualField prolong_dual(const DualField& coarse, const GridField& fine) {
    DualField out(fine);
    const int fac_y = fine.dims() == 2 ? 2 : 1;
    for (int iy = 0; iy < (fine.dims() == 2 ? fine.ny() : 1); ++iy) {
        for (int ix = 0; ix < fine.nx(); ++ix) {
            const std::size_t i = static_cast<std::size_t>(iy) * fine.nx() + ix;
            const std::size_t c =
                static_cast<std::size_t>(iy / fac_y) * coarse.nx() + ix / 2;
            out.x()[i] = coarse.x()[c];
            if (fine.dims() == 2) out.y()[i] = coarse.y()[c];
        }
    }
    out.zero_boundary_components();
    return out;
}

}  // namespace

RofSolution solve_rof(const GridField& f, double t, const SolverConfig& cfg,
                      const DualField* warm_start) {
    if (t <= 0.0) throw std::invalid_argument("solve_rof: t must be > 0");
    if (cfg.max_iters < 1) throw std::invalid_argument("solve_rof: max_iters must be >= 1");
    if (cfg.tol < 0.0) throw std::invalid_argument("solve_rof: tol must be >= 0");
    const double tau = cfg.effective_tau(f.dims());
    if (tau <= 0.0 || tau > 1.0 / (2.0 * f.dims()))
        throw std::invalid_argument("solve_rof: tau outside (0, 1/(2d)]");
    f.check_finite("solve_rof: f");

    const GridUnits gu = grid_units(f, t);
    const std::size_t n = f.size();

    RofSolution sol;
    sol.t = t;
    sol.tv_mode = cfg.tv;
    sol.z = DualField(f);
    if (warm_start != nullptr) {
        if (warm_start->nx() != sol.z.nx() || warm_start->ny() != sol.z.ny() ||
            warm_start->dims() != sol.z.dims())
            throw std::invalid_argument("solve_rof: warm start shape mismatch");
        sol.z = *warm_start;
        sol.z.zero_boundary_components();
    } else if (cfg.coarse_init && can_coarsen(f)) {
        const GridField fc = coarsen_field(f);
        if (fc.active_count() > 0) {
            const RofSolution coarse = solve_rof(fc, t, cfg);
            sol.z = prolong_dual(coarse.z, f);
        }
    }

    double* zx = sol.z.x().data();
    double* zy = f.dims() == 2 ? sol.z.y().data() : nullptr;
    std::vector<double> work(n, 0.0);   // div z, then div z + f/lambda
    std::vector<double> gx(n, 0.0), gy(f.dims() == 2 ? n : 0, 0.0);
    double* gyp = f.dims() == 2 ? gy.data() : nullptr;
    const double* fv = f.values().data();

    for (int it = 0; it < cfg.max_iters; ++it) {
        kernels::div(gu.spec, zx, zy, work.data());
        kernels::add_scaled(gu.spec, work.data(), fv, 1.0 / gu.lambda, work.data());
        kernels::grad(gu.spec, work.data(), gx.data(), gyp);
        const double change =
            kernels::dual_step(gu.spec, zx, zy, gx.data(), gyp, tau, cfg.tv);
        sol.iterations = it + 1;
        if (change <= cfg.tol) {
            sol.converged = true;
            break;
        }
    }

    kernels::div(gu.spec, zx, zy, work.data());
    std::vector<double> uv(n, 0.0);
    kernels::add_scaled(gu.spec, fv, work.data(), gu.lambda, uv.data());
    sol.u = f.dims() == 1 ? GridField(f.nx(), std::move(uv))
                          : GridField(f.nx(), f.ny(), std::move(uv));
    if (f.masked()) sol.u.set_mask(f.mask());
    sol.v = sub(f, sol.u);

    sol.tv_u = discrete_tv(sol.u, cfg.tv);
    sol.certificate.sup_norm_z = sol.z.sup_norm(cfg.tv);
    sol.certificate.pairing_residual = std::abs(pairing(sol.z, sol.u) - sol.tv_u);
    const double mf = mean(f);
    sol.certificate.mean_residual = std::abs(mean(sol.u) - mf);
    const double vsq = l2_norm(sol.v);
    sol.energy = 0.5 * vsq * vsq + t * sol.tv_u;

    sol.certified =
        sol.converged && sol.certificate.sup_norm_z <= 1.0 + kCertSupTol &&
        sol.certificate.pairing_residual <= kCertPairingTol * (1.0 + sol.tv_u) &&
        sol.certificate.mean_residual <= kCertMeanTol * (1.0 + std::abs(mf));
    return sol;
}

GridField project_onto_tU2(const GridField& f, double t, const SolverConfig& cfg) {
    return solve_rof(f, t, cfg).v;
}

KFunctionalValue k_functional(const GridField& f, double t, const SolverConfig& cfg) {
    const RofSolution sol = solve_rof(f, t, cfg);
    KFunctionalValue k;
    k.k_direct = sol.energy;
    const double vsq = l2_norm(sol.v);
    k.k_projection = inner(sol.v, f) - 0.5 * vsq * vsq;
    k.certified = sol.certified;
    return k;
}

StarNormEstimate estimate_star_norm(const GridField& f, double bisect_tol,
                                    const SolverConfig& cfg, double constancy_eps) {
    if (bisect_tol <= 0.0)
        throw std::invalid_argument("estimate_star_norm: tolerance must be > 0");
    StarNormEstimate est;
    est.constancy_threshold = constancy_eps;

    double fmin = f[0], fmax = f[0];
    bool any = false;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f.active(i)) continue;
        fmin = any ? std::min(fmin, f[i]) : f[i];
        fmax = any ? std::max(fmax, f[i]) : f[i];
        any = true;
    }
    const double range = fmax - fmin;
    if (range == 0.0) return est;  // constant input: star norm 0
    const double dev_tol = constancy_eps * range;

    const double mf = mean(f);
    const int nmax = std::max(f.nx(), f.dims() == 2 ? f.ny() : 1);
    DualField warm(f);
    // u = f + t*div(z) amplifies dual error by t/h, and the change-based stop
    // underestimates the remaining error by the contraction tail. The probe
    // therefore tightens the dual tolerance adaptively: while the measured
    // deviation keeps dropping in proportion to tol the solve is the limit,
    // not the solution; once it stalls the deviation is genuine.
    // Ambiguity after the refinement cap is classified as non-constant; the
    // misclassification window in t is a few constancy-thresholds wide and
    // sits inside the requested bracket tolerance.
    auto constant_at = [&](double t) {
        SolverConfig probe = cfg;
        probe.tol = std::min(cfg.tol, dev_tol / (20.0 * std::max(1.0, t * nmax)));
        double prev_dev = -1.0;
        for (int attempt = 0; attempt < 5; ++attempt) {
            const RofSolution sol = solve_rof(f, t, probe, &warm);
            warm = sol.z;
            ++est.solves;
            double dev = 0.0;
            const double mu = mean(sol.u);
            for (std::size_t i = 0; i < sol.u.size(); ++i)
                if (sol.u.active(i)) dev = std::max(dev, std::abs(sol.u[i] - mu));
            if (dev <= dev_tol) return true;
            if (prev_dev >= 0.0 && dev > 0.6 * prev_dev) return false;
            if (!sol.converged) {
                // budget exhausted mid-refinement: classify by whether the
                // deviation still tracked the tolerance (solver-limited) and
                // flag the estimate as unreliable at this budget
                est.budget_limited = true;
                return prev_dev >= 0.0 && dev <= 0.6 * prev_dev;
            }
            prev_dev = dev;
            // first a cheap quarter-step: a genuine deviation survives it and
            // is caught by the stall test above, so only solver-limited
            // probes pay for the aggressive tolerance jump
            if (attempt == 0)
                probe.tol *= 0.25;
            else
                probe.tol *= dev_tol / (4.0 * dev);
        }
        return false;
    };

    double t_hi = l2_norm(add_constant(f, -mf));
    if (t_hi <= 0.0) t_hi = 1.0;
    int guard = 0;
    while (!constant_at(t_hi)) {
        t_hi *= 2.0;
        if (++guard > 200)
            throw std::runtime_error("estimate_star_norm: no constant bracket found");
    }
    double t_lo = 0.5 * t_hi;
    guard = 0;
    while (constant_at(t_lo)) {
        t_hi = t_lo;
        t_lo *= 0.5;
        if (++guard > 2000 || t_lo < 1e-300) {
            // u collapses at every probed t: report the tiny bracket as is
            t_lo = 0.0;
            break;
        }
    }
    while (t_hi - t_lo > bisect_tol) {
        const double mid = 0.5 * (t_lo + t_hi);
        if (constant_at(mid))
            t_hi = mid;
        else
            t_lo = mid;
    }
    est.t_lo = t_lo;
    est.t_hi = t_hi;
    est.value = 0.5 * (t_lo + t_hi);
    return est;
}

}  // namespace decomp
