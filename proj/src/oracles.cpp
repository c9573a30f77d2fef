#include "decomp/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace decomp::oracles {

namespace {

double clamp01_band(double x, double lo, double hi) {
    return std::min(std::max(x, lo), hi);
}

}  // namespace

double AnalyticSolution::f_at(double x) const {
    if (kind == Kind::ramp) return x;
    return x <= r ? 1.0 : 0.0;
}

double AnalyticSolution::u_at(double x) const {
    if (kind == Kind::ramp) {
        if (constant_regime) return 0.5;
        const double h0 = std::sqrt(2.0 * t);
        return clamp01_band(x, h0, 1.0 - h0);
    }
    if (constant_regime) return std::pow(r, d) / std::pow(R, d);
    const double inner = 1.0 - t * d / r;
    const double outer = t * d * std::pow(r, d - 1) / (std::pow(R, d) - std::pow(r, d));
    return x <= r ? inner : outer;
}

AnalyticSolution radial_example(int d, double r, double R, double t) {
    if (d != 1 && d != 2) throw std::invalid_argument("radial_example: d must be 1 or 2");
    if (!(0.0 < r && r < R)) throw std::invalid_argument("radial_example: need 0 < r < R");
    if (t <= 0.0) throw std::invalid_argument("radial_example: t must be > 0");
    AnalyticSolution ex;
    ex.kind = AnalyticSolution::Kind::radial;
    ex.d = d;
    ex.r = r;
    ex.R = R;
    ex.t = t;
    ex.threshold =
        1.0 / (d / r + d * std::pow(r, d - 1) / (std::pow(R, d) - std::pow(r, d)));
    ex.constant_regime = t > ex.threshold;
    return ex;
}

AnalyticSolution ramp_example(double t) {
    if (t <= 0.0) throw std::invalid_argument("ramp_example: t must be > 0");
    AnalyticSolution ex;
    ex.kind = AnalyticSolution::Kind::ramp;
    ex.t = t;
    ex.threshold = 0.125;
    ex.constant_regime = t > ex.threshold;
    return ex;
}

double ramp_k_value(double t) {
    if (t <= 0.0) throw std::invalid_argument("ramp_k_value: t must be > 0");
    if (t > 0.125) return 1.0 / 24.0;
    const double h0 = std::sqrt(2.0 * t);
    return h0 * h0 * h0 / 3.0 + t * (1.0 - 2.0 * h0);
}

GridField ramp_field(int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = (i + 0.5) / n;
    return GridField(n, std::move(v));
}

GridField ramp_solution_field(const AnalyticSolution& ex, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = ex.u_at((i + 0.5) / n);
    return GridField(n, std::move(v));
}

RadialGrid radial_grid(const AnalyticSolution& ex, int n) {
    if (ex.kind != AnalyticSolution::Kind::radial)
        throw std::invalid_argument("radial_grid: not a radial example");
    RadialGrid out;
    out.scale = 2.0 * ex.R;
    if (ex.d == 1) {
        std::vector<double> f(n), u(n);
        for (int i = 0; i < n; ++i) {
            const double x = std::abs(-ex.R + (i + 0.5) * out.scale / n);
            f[i] = ex.f_at(x);
            u[i] = ex.u_at(x);
        }
        out.f = GridField(n, std::move(f));
        out.u_exact = GridField(n, std::move(u));
        return out;
    }
    std::vector<double> f(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> u(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const double cx = -ex.R + (ix + 0.5) * out.scale / n;
            const double cy = -ex.R + (iy + 0.5) * out.scale / n;
            const double rad = std::hypot(cx, cy);
            const std::size_t i = static_cast<std::size_t>(iy) * n + ix;
            if (rad <= ex.R) {
                mask[i] = 1;
                f[i] = ex.f_at(rad);
                u[i] = ex.u_at(rad);
            }
        }
    }
    out.f = GridField(n, n, std::move(f));
    out.f.set_mask(mask);
    out.u_exact = GridField(n, n, std::move(u));
    out.u_exact.set_mask(mask);
    return out;
}

// --- independent tiny-instance minimizer -----------------------------------
// Everything below works on plain loops over the field values so that the
// oracle never routes through the kernel layer it is meant to validate.

namespace {

struct Edges {
    // forward-difference edge list: (from, to, scale)
    std::vector<std::size_t> a, b;
    std::vector<double> s;
    // cells grouped per "from" cell for the isotropic magnitude
    int nx = 0, ny = 1;
};

Edges build_edges(const GridField& f) {
    Edges e;
    e.nx = f.nx();
    e.ny = f.dims() == 2 ? f.ny() : 1;
    for (int iy = 0; iy < e.ny; ++iy) {
        for (int ix = 0; ix < e.nx; ++ix) {
            const std::size_t i = static_cast<std::size_t>(iy) * e.nx + ix;
            if (!f.active(i)) continue;
            if (ix + 1 < e.nx && f.active(i + 1)) {
                e.a.push_back(i);
                e.b.push_back(i + 1);
                e.s.push_back(static_cast<double>(f.nx()));
            }
            if (f.dims() == 2 && iy + 1 < e.ny && f.active(i + e.nx)) {
                e.a.push_back(i);
                e.b.push_back(i + e.nx);
                e.s.push_back(static_cast<double>(f.ny()));
            }
        }
    }
    return e;
}

double tv_direct(const GridField& f, const std::vector<double>& u, const Edges& e,
                 TvMode mode, double eps) {
    const std::size_t n = u.size();
    long double tv = 0.0L;
    if (mode == TvMode::anisotropic) {
        for (std::size_t k = 0; k < e.a.size(); ++k) {
            const double g = (u[e.b[k]] - u[e.a[k]]) * e.s[k];
            tv += std::sqrt(g * g + eps * eps) - eps;
        }
    } else {
        std::vector<double> gx(n, 0.0), gy(n, 0.0);
        for (std::size_t k = 0; k < e.a.size(); ++k) {
            const double g = (u[e.b[k]] - u[e.a[k]]) * e.s[k];
            if (e.b[k] == e.a[k] + 1)
                gx[e.a[k]] = g;
            else
                gy[e.a[k]] = g;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double m2 = gx[i] * gx[i] + gy[i] * gy[i];
            if (m2 > 0.0 || eps > 0.0) tv += std::sqrt(m2 + eps * eps) - eps;
        }
    }
    return static_cast<double>(tv) * f.cell_measure();
}

double energy_eps(const GridField& f, const std::vector<double>& u, const Edges& e,
                  double t, TvMode mode, double eps) {
    long double fid = 0.0L;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!f.active(i)) continue;
        const double d = f[i] - u[i];
        fid += d * d;
    }
    return 0.5 * static_cast<double>(fid) * f.cell_measure() +
           t * tv_direct(f, u, e, mode, eps);
}

void energy_eps_grad(const GridField& f, const std::vector<double>& u,
                     const Edges& e, double t, TvMode mode, double eps,
                     std::vector<double>& g) {
    const std::size_t n = u.size();
    const double meas = f.cell_measure();
    g.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (f.active(i)) g[i] = (u[i] - f[i]) * meas;
    if (mode == TvMode::anisotropic) {
        for (std::size_t k = 0; k < e.a.size(); ++k) {
            const double gv = (u[e.b[k]] - u[e.a[k]]) * e.s[k];
            const double w = t * meas * gv / std::sqrt(gv * gv + eps * eps) * e.s[k];
            g[e.b[k]] += w;
            g[e.a[k]] -= w;
        }
    } else {
        std::vector<double> gx(n, 0.0), gy(n, 0.0);
        for (std::size_t k = 0; k < e.a.size(); ++k) {
            const double gv = (u[e.b[k]] - u[e.a[k]]) * e.s[k];
            if (e.b[k] == e.a[k] + 1)
                gx[e.a[k]] = gv;
            else
                gy[e.a[k]] = gv;
        }
        std::vector<double> inv(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double m = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i] + eps * eps);
            inv[i] = m > 0.0 ? 1.0 / m : 0.0;
        }
        for (std::size_t k = 0; k < e.a.size(); ++k) {
            const double gv = (u[e.b[k]] - u[e.a[k]]) * e.s[k];
            const double w = t * meas * gv * inv[e.a[k]] * e.s[k];
            g[e.b[k]] += w;
            g[e.a[k]] -= w;
        }
    }
}

// golden-section minimization of a convex slice
template <class Fn>
double golden_min(Fn fn, double a, double b, int iters = 80) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = fn(c), fd = fn(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = fn(d);
        }
    }
    return fc < fd ? c : d;
}

void descend(const GridField& f, std::vector<double>& u, const Edges& e, double t,
             TvMode mode) {
    std::vector<double> g, trial(u.size());
    for (double eps : {1e-3, 1e-5, 1e-7, 1e-9}) {
        double step = 1.0;
        for (int it = 0; it < 4000; ++it) {
            energy_eps_grad(f, u, e, t, mode, eps, g);
            long double gn2l = 0.0L;
            for (double gi : g) gn2l += gi * gi;
            const double gn2 = static_cast<double>(gn2l);
            if (gn2 < 1e-30) break;
            const double e0 = energy_eps(f, u, e, t, mode, eps);
            bool moved = false;
            for (int h = 0; h < 60; ++h) {
                for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] - step * g[i];
                if (energy_eps(f, trial, e, t, mode, eps) <= e0 - 0.5 * step * gn2) {
                    u = trial;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
            step *= 1.6;
        }
    }
}

// Directions that move contiguous blocks of cells together. Minimizers of TV
// energies are piecewise constant, and the flat valleys of the objective run
// exactly along such block moves, where plain gradient probing stalls.
std::vector<std::vector<double>> block_directions(const GridField& f) {
    std::vector<std::vector<double>> dirs;
    const std::size_t n = f.size();
    const int nx = f.nx();
    const int ny = f.dims() == 2 ? f.ny() : 1;
    auto push = [&](int x0, int x1, int y0, int y1) {
        std::vector<double> d(n, 0.0);
        bool any = false;
        for (int iy = y0; iy <= y1; ++iy) {
            for (int ix = x0; ix <= x1; ++ix) {
                const std::size_t i = static_cast<std::size_t>(iy) * nx + ix;
                if (!f.active(i)) continue;
                d[i] = 1.0;
                any = true;
            }
        }
        if (any) dirs.push_back(std::move(d));
    };
    for (int x0 = 0; x0 < nx; ++x0)
        for (int x1 = x0; x1 < nx; ++x1)
            for (int y0 = 0; y0 < ny; ++y0)
                for (int y1 = y0; y1 < ny; ++y1) push(x0, x1, y0, y1);
    return dirs;
}

// Exact line searches along every block direction, cycled to convergence.
double block_polish(const GridField& f, std::vector<double>& u, const Edges& e,
                    double t, TvMode mode, double span) {
    const auto dirs = block_directions(f);
    std::vector<double> trial(u.size());
    double energy = energy_eps(f, u, e, t, mode, 0.0);
    for (int pass = 0; pass < 400; ++pass) {
        bool improved = false;
        for (const auto& d : dirs) {
            auto slice = [&](double s) {
                for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] + s * d[i];
                return energy_eps(f, trial, e, t, mode, 0.0);
            };
            const double smin = golden_min(slice, -span, span, 90);
            const double en = slice(smin);
            if (en < energy - 1e-15) {
                for (std::size_t i = 0; i < u.size(); ++i) u[i] += smin * d[i];
                energy = energy_eps(f, u, e, t, mode, 0.0);
                improved = true;
            }
        }
        if (!improved) break;
    }
    return energy;
}

}  // namespace

double rof_energy_direct(const GridField& f, const GridField& u, double t,
                         TvMode mode) {
    if (!f.same_grid(u))
        throw std::invalid_argument("rof_energy_direct: grid mismatch");
    const Edges e = build_edges(f);
    return energy_eps(f, u.values(), e, t, mode, 0.0);
}

BruteForceResult brute_force_rof_small(const GridField& f, double t, TvMode mode,
                                       std::uint64_t seed, int probe_count) {
    if (f.active_count() > 8)
        throw std::invalid_argument("brute_force_rof_small: instance too large");
    if (t <= 0.0) throw std::invalid_argument("brute_force_rof_small: t must be > 0");
    const Edges e = build_edges(f);
    const std::size_t n = f.size();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double fsum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (f.active(i)) fsum += f[i];
    const double fmean = fsum / static_cast<double>(f.active_count());

    auto masked_fill = [&](std::vector<double> v) {
        for (std::size_t i = 0; i < n; ++i)
            if (!f.active(i)) v[i] = 0.0;
        return v;
    };

    std::vector<std::vector<double>> starts;
    starts.push_back(f.values());
    starts.push_back(masked_fill(std::vector<double>(n, fmean)));
    starts.push_back(std::vector<double>(n, 0.0));
    for (int s = 0; s < 2; ++s) {
        std::vector<double> r(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            if (f.active(i)) r[i] = fmean + gauss(rng);
        starts.push_back(std::move(r));
    }

    double span = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        if (f.active(i)) span = std::max(span, std::abs(f[i]));

    std::vector<double> best;
    double ebest = 0.0;
    for (auto& u : starts) {
        descend(f, u, e, t, mode);
        const double en = block_polish(f, u, e, t, mode, span);
        if (best.empty() || en < ebest) {
            best = u;
            ebest = en;
        }
    }

    // random-direction line searches; the final clean pass certifies the point
    BruteForceResult res;
    std::vector<double> trial(n);
    bool certified = false;
    double worst = 0.0;
    for (int pass = 0; pass < 25 && !certified; ++pass) {
        ebest = block_polish(f, best, e, t, mode, span);
        double pass_worst = 0.0;
        for (int k = 0; k < probe_count; ++k) {
            std::vector<double> dir(n, 0.0);
            double norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!f.active(i)) continue;
                dir[i] = gauss(rng);
                norm += dir[i] * dir[i];
            }
            norm = std::sqrt(norm);
            if (norm == 0.0) continue;
            for (auto& d : dir) d /= norm;
            auto slice = [&](double s) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = best[i] + s * dir[i];
                return energy_eps(f, trial, e, t, mode, 0.0);
            };
            const double smin = golden_min(slice, -0.5 * span, 0.5 * span);
            const double en = slice(smin);
            if (en < ebest) {
                pass_worst = std::max(pass_worst, ebest - en);
                if (ebest - en > 1e-15) {
                    for (std::size_t i = 0; i < n; ++i) best[i] += smin * dir[i];
                    ebest = energy_eps(f, best, e, t, mode, 0.0);
                }
            }
        }
        worst = pass_worst;
        certified = pass_worst <= 1e-9;
    }

    res.u = f.dims() == 1 ? GridField(f.nx(), std::move(best))
                          : GridField(f.nx(), f.ny(), std::move(best));
    if (f.masked()) res.u.set_mask(f.mask());
    res.energy = ebest;
    res.certified = certified;
    res.worst_probe_decrease = worst;
    return res;
}

}  // namespace decomp::oracles
