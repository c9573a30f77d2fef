#include "decomp/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace decomp::kernels {

namespace {

std::atomic<bool> g_parallel{true};
std::atomic<int> g_max_threads{0};

bool use_par(std::size_t n) {
#ifdef _OPENMP
    if (!g_parallel.load(std::memory_order_relaxed)) return false;
    if (omp_in_parallel()) return false;  // no nested parallelism
    return n >= kReduceBlock;
#else
    (void)n;
    return false;
#endif
}

// --- edge activity -------------------------------------------------------
// Component a of a dual field lives on the edge (cell, cell + e_a); the edge
// carries variation only when it stays inside the grid and the active mask.

inline bool edge_x(const GridSpec& g, std::size_t i, int ix) {
    if (ix >= g.nx - 1) return false;
    return g.mask == nullptr || (g.mask[i] != 0 && g.mask[i + 1] != 0);
}

inline bool edge_y(const GridSpec& g, std::size_t i, int iy) {
    if (iy >= g.ny - 1) return false;
    return g.mask == nullptr || (g.mask[i] != 0 && g.mask[i + g.nx] != 0);
}

// --- span bodies (shared verbatim by the serial and parallel drivers) ----

void grad_span(const GridSpec& g, const double* u, double* gx, double* gy,
               int iy, int ix0, int ix1) {
    const std::size_t row = static_cast<std::size_t>(iy) * g.nx;
    for (int ix = ix0; ix < ix1; ++ix) {
        const std::size_t i = row + ix;
        gx[i] = edge_x(g, i, ix) ? (u[i + 1] - u[i]) * g.sx : 0.0;
        if (gy != nullptr)
            gy[i] = edge_y(g, i, iy) ? (u[i + g.nx] - u[i]) * g.sy : 0.0;
    }
}

void div_span(const GridSpec& g, const double* zx, const double* zy,
              double* out, int iy, int ix0, int ix1) {
    const std::size_t row = static_cast<std::size_t>(iy) * g.nx;
    for (int ix = ix0; ix < ix1; ++ix) {
        const std::size_t i = row + ix;
        double d = 0.0;
        if (edge_x(g, i, ix)) d += g.sx * zx[i];
        if (ix > 0 && edge_x(g, i - 1, ix - 1)) d -= g.sx * zx[i - 1];
        if (zy != nullptr) {
            if (edge_y(g, i, iy)) d += g.sy * zy[i];
            if (iy > 0 && edge_y(g, i - g.nx, iy - 1)) d -= g.sy * zy[i - g.nx];
        }
        out[i] = d;
    }
}

double dual_step_span(const GridSpec& g, double* zx, double* zy,
                      const double* wx, const double* wy, double tau,
                      TvMode mode, int iy, int ix0, int ix1) {
    const std::size_t row = static_cast<std::size_t>(iy) * g.nx;
    double mx = 0.0;
    for (int ix = ix0; ix < ix1; ++ix) {
        const std::size_t i = row + ix;
        const bool ex = edge_x(g, i, ix);
        const bool ey = zy != nullptr && edge_y(g, i, iy);
        if (mode == TvMode::isotropic) {
            const double ax = ex ? wx[i] : 0.0;
            const double ay = ey ? wy[i] : 0.0;
            const double mag = std::sqrt(ax * ax + ay * ay);
            const double den = 1.0 + tau * mag;
            if (ex) {
                const double zn = (zx[i] + tau * ax) / den;
                mx = std::max(mx, std::abs(zn - zx[i]));
                zx[i] = zn;
            }
            if (ey) {
                const double zn = (zy[i] + tau * ay) / den;
                mx = std::max(mx, std::abs(zn - zy[i]));
                zy[i] = zn;
            }
        } else {
            if (ex) {
                const double zn = (zx[i] + tau * wx[i]) / (1.0 + tau * std::abs(wx[i]));
                mx = std::max(mx, std::abs(zn - zx[i]));
                zx[i] = zn;
            }
            if (ey) {
                const double zn = (zy[i] + tau * wy[i]) / (1.0 + tau * std::abs(wy[i]));
                mx = std::max(mx, std::abs(zn - zy[i]));
                zy[i] = zn;
            }
        }
    }
    return mx;
}

void add_scaled_span(const GridSpec& g, const double* f, const double* s,
                     double lambda, double* out, int iy, int ix0, int ix1) {
    const std::size_t row = static_cast<std::size_t>(iy) * g.nx;
    for (int ix = ix0; ix < ix1; ++ix) {
        const std::size_t i = row + ix;
        out[i] = g.active(i) ? f[i] + lambda * s[i] : 0.0;
    }
}

// --- block reduction engine ----------------------------------------------
// Fixed-size blocks, extended-precision partials, in-order combine: the
// parallel result is bitwise identical to the serial one.

template <class Term>
double block_sum_serial(std::size_t n, Term term) {
    const std::size_t nb = (n + kReduceBlock - 1) / kReduceBlock;
    long double total = 0.0L;
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t lo = b * kReduceBlock;
        const std::size_t hi = std::min(n, lo + kReduceBlock);
        long double acc = 0.0L;
        for (std::size_t i = lo; i < hi; ++i) acc += static_cast<long double>(term(i));
        total += acc;
    }
    return static_cast<double>(total);
}

template <class Term>
double block_sum_par(std::size_t n, Term term) {
    const std::size_t nb = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<long double> part(nb, 0.0L);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
        const std::size_t hi = std::min(n, lo + kReduceBlock);
        long double acc = 0.0L;
        for (std::size_t i = lo; i < hi; ++i) acc += static_cast<long double>(term(i));
        part[b] = acc;
    }
    long double total = 0.0L;
    for (std::size_t b = 0; b < nb; ++b) total += part[b];
    return static_cast<double>(total);
}

template <class Term>
double block_max_serial(std::size_t n, Term term) {
    double mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, term(i));
    return mx;
}

template <class Term>
double block_max_par(std::size_t n, Term term) {
    double mx = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : mx)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        mx = std::max(mx, term(static_cast<std::size_t>(i)));
    return mx;
}

inline double masked(const std::uint8_t* mask, std::size_t i, double v) {
    return (mask == nullptr || mask[i] != 0) ? v : 0.0;
}

inline double tv_cell(const double* gx, const double* gy, TvMode mode,
                      std::size_t i) {
    const double ax = gx[i];
    const double ay = gy != nullptr ? gy[i] : 0.0;
    return mode == TvMode::isotropic ? std::sqrt(ax * ax + ay * ay)
                                     : std::abs(ax) + std::abs(ay);
}

}  // namespace

void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }
bool parallel_enabled() {
#ifdef _OPENMP
    return g_parallel.load(std::memory_order_relaxed);
#else
    return false;
#endif
}

void set_max_threads(int n) {
    g_max_threads.store(n, std::memory_order_relaxed);
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#endif
}

int max_threads() { return g_max_threads.load(std::memory_order_relaxed); }

GridSpec physical_spec(const GridField& f) {
    GridSpec g;
    g.nx = f.nx();
    g.ny = f.dims() == 2 ? f.ny() : 1;
    g.sx = static_cast<double>(f.nx());
    g.sy = f.dims() == 2 ? static_cast<double>(f.ny()) : 1.0;
    g.mask = f.masked() ? f.mask().data() : nullptr;
    return g;
}

// --- serial drivers -------------------------------------------------------

namespace serial {

void grad(const GridSpec& g, const double* u, double* gx, double* gy) {
    for (int iy = 0; iy < g.ny; ++iy) grad_span(g, u, gx, gy, iy, 0, g.nx);
}

void div(const GridSpec& g, const double* zx, const double* zy, double* out) {
    for (int iy = 0; iy < g.ny; ++iy) div_span(g, zx, zy, out, iy, 0, g.nx);
}

double dual_step(const GridSpec& g, double* zx, double* zy, const double* wx,
                 const double* wy, double tau, TvMode mode) {
    double mx = 0.0;
    for (int iy = 0; iy < g.ny; ++iy)
        mx = std::max(mx, dual_step_span(g, zx, zy, wx, wy, tau, mode, iy, 0, g.nx));
    return mx;
}

void add_scaled(const GridSpec& g, const double* f, const double* s,
                double lambda, double* out) {
    for (int iy = 0; iy < g.ny; ++iy)
        add_scaled_span(g, f, s, lambda, out, iy, 0, g.nx);
}

double sum(const double* v, std::size_t n, const std::uint8_t* mask) {
    return block_sum_serial(n, [&](std::size_t i) { return masked(mask, i, v[i]); });
}

double sumsq(const double* v, std::size_t n, const std::uint8_t* mask) {
    return block_sum_serial(n, [&](std::size_t i) { return masked(mask, i, v[i] * v[i]); });
}

double dot(const double* a, const double* b, std::size_t n, const std::uint8_t* mask) {
    return block_sum_serial(n, [&](std::size_t i) { return masked(mask, i, a[i] * b[i]); });
}

double sum_abs_pow(const double* v, double p, std::size_t n, const std::uint8_t* mask) {
    if (p == 1.0)
        return block_sum_serial(n, [&](std::size_t i) { return masked(mask, i, std::abs(v[i])); });
    if (p == 2.0) return sumsq(v, n, mask);
    return block_sum_serial(
        n, [&](std::size_t i) { return masked(mask, i, std::pow(std::abs(v[i]), p)); });
}

double max_abs(const double* v, std::size_t n, const std::uint8_t* mask) {
    return block_max_serial(n, [&](std::size_t i) { return masked(mask, i, std::abs(v[i])); });
}

double tv_sum(const GridSpec& g, const double* gx, const double* gy, TvMode mode) {
    return block_sum_serial(g.size(),
                            [&](std::size_t i) { return tv_cell(gx, gy, mode, i); });
}

double dual_dot(const GridSpec& g, const double* gx, const double* gy,
                const double* ax, const double* ay) {
    return block_sum_serial(g.size(), [&](std::size_t i) {
        double v = gx[i] * ax[i];
        if (gy != nullptr) v += gy[i] * ay[i];
        return v;
    });
}

}  // namespace serial

// --- parallel drivers -----------------------------------------------------

namespace par {

namespace {

// Rows carry the parallelism in 2D; a single 1D row is split into chunks.
template <class RowFn>
void for_rows(const GridSpec& g, RowFn fn) {
    if (g.ny > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int iy = 0; iy < g.ny; ++iy) fn(iy, 0, g.nx);
    } else {
        const int chunk = static_cast<int>(kReduceBlock);
        const int nchunks = (g.nx + chunk - 1) / chunk;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int c = 0; c < nchunks; ++c)
            fn(0, c * chunk, std::min(g.nx, (c + 1) * chunk));
    }
}

}  // namespace

void grad(const GridSpec& g, const double* u, double* gx, double* gy) {
    for_rows(g, [&](int iy, int ix0, int ix1) { grad_span(g, u, gx, gy, iy, ix0, ix1); });
}

void div(const GridSpec& g, const double* zx, const double* zy, double* out) {
    for_rows(g, [&](int iy, int ix0, int ix1) { div_span(g, zx, zy, out, iy, ix0, ix1); });
}

double dual_step(const GridSpec& g, double* zx, double* zy, const double* wx,
                 const double* wy, double tau, TvMode mode) {
    double mx = 0.0;
#ifdef _OPENMP
    if (g.ny > 1) {
#pragma omp parallel for schedule(static) reduction(max : mx)
        for (int iy = 0; iy < g.ny; ++iy)
            mx = std::max(mx, dual_step_span(g, zx, zy, wx, wy, tau, mode, iy, 0, g.nx));
        return mx;
    }
    const int chunk = static_cast<int>(kReduceBlock);
    const int nchunks = (g.nx + chunk - 1) / chunk;
#pragma omp parallel for schedule(static) reduction(max : mx)
    for (int c = 0; c < nchunks; ++c)
        mx = std::max(mx, dual_step_span(g, zx, zy, wx, wy, tau, mode, 0, c * chunk,
                                         std::min(g.nx, (c + 1) * chunk)));
    return mx;
#else
    for (int iy = 0; iy < g.ny; ++iy)
        mx = std::max(mx, dual_step_span(g, zx, zy, wx, wy, tau, mode, iy, 0, g.nx));
    return mx;
#endif
}

void add_scaled(const GridSpec& g, const double* f, const double* s,
                double lambda, double* out) {
    for_rows(g, [&](int iy, int ix0, int ix1) {
        add_scaled_span(g, f, s, lambda, out, iy, ix0, ix1);
    });
}

double sum(const double* v, std::size_t n, const std::uint8_t* mask) {
    return block_sum_par(n, [&](std::size_t i) { return masked(mask, i, v[i]); });
}

double sumsq(const double* v, std::size_t n, const std::uint8_t* mask) {
    return block_sum_par(n, [&](std::size_t i) { return masked(mask, i, v[i] * v[i]); });
}

double dot(const double* a, const double* b, std::size_t n, const std::uint8_t* mask) {
    return block_sum_par(n, [&](std::size_t i) { return masked(mask, i, a[i] * b[i]); });
}

double sum_abs_pow(const double* v, double p, std::size_t n, const std::uint8_t* mask) {
    if (p == 1.0)
        return block_sum_par(n, [&](std::size_t i) { return masked(mask, i, std::abs(v[i])); });
    if (p == 2.0) return sumsq(v, n, mask);
    return block_sum_par(
        n, [&](std::size_t i) { return masked(mask, i, std::pow(std::abs(v[i]), p)); });
}

double max_abs(const double* v, std::size_t n, const std::uint8_t* mask) {
    return block_max_par(n, [&](std::size_t i) { return masked(mask, i, std::abs(v[i])); });
}

double tv_sum(const GridSpec& g, const double* gx, const double* gy, TvMode mode) {
    return block_sum_par(g.size(),
                         [&](std::size_t i) { return tv_cell(gx, gy, mode, i); });
}

double dual_dot(const GridSpec& g, const double* gx, const double* gy,
                const double* ax, const double* ay) {
    return block_sum_par(g.size(), [&](std::size_t i) {
        double v = gx[i] * ax[i];
        if (gy != nullptr) v += gy[i] * ay[i];
        return v;
    });
}

}  // namespace par

// --- dispatch --------------------------------------------------------------

void grad(const GridSpec& g, const double* u, double* gx, double* gy) {
    use_par(g.size()) ? par::grad(g, u, gx, gy) : serial::grad(g, u, gx, gy);
}

void div(const GridSpec& g, const double* zx, const double* zy, double* out) {
    use_par(g.size()) ? par::div(g, zx, zy, out) : serial::div(g, zx, zy, out);
}

double dual_step(const GridSpec& g, double* zx, double* zy, const double* wx,
                 const double* wy, double tau, TvMode mode) {
    return use_par(g.size()) ? par::dual_step(g, zx, zy, wx, wy, tau, mode)
                             : serial::dual_step(g, zx, zy, wx, wy, tau, mode);
}

void add_scaled(const GridSpec& g, const double* f, const double* s,
                double lambda, double* out) {
    use_par(g.size()) ? par::add_scaled(g, f, s, lambda, out)
                      : serial::add_scaled(g, f, s, lambda, out);
}

double sum(const double* v, std::size_t n, const std::uint8_t* mask) {
    return use_par(n) ? par::sum(v, n, mask) : serial::sum(v, n, mask);
}

double sumsq(const double* v, std::size_t n, const std::uint8_t* mask) {
    return use_par(n) ? par::sumsq(v, n, mask) : serial::sumsq(v, n, mask);
}

double dot(const double* a, const double* b, std::size_t n, const std::uint8_t* mask) {
    return use_par(n) ? par::dot(a, b, n, mask) : serial::dot(a, b, n, mask);
}

double sum_abs_pow(const double* v, double p, std::size_t n, const std::uint8_t* mask) {
    return use_par(n) ? par::sum_abs_pow(v, p, n, mask)
                      : serial::sum_abs_pow(v, p, n, mask);
}

double max_abs(const double* v, std::size_t n, const std::uint8_t* mask) {
    return use_par(n) ? par::max_abs(v, n, mask) : serial::max_abs(v, n, mask);
}

double tv_sum(const GridSpec& g, const double* gx, const double* gy, TvMode mode) {
    return use_par(g.size()) ? par::tv_sum(g, gx, gy, mode)
                             : serial::tv_sum(g, gx, gy, mode);
}

double dual_dot(const GridSpec& g, const double* gx, const double* gy,
                const double* ax, const double* ay) {
    return use_par(g.size()) ? par::dual_dot(g, gx, gy, ax, ay)
                             : serial::dual_dot(g, gx, gy, ax, ay);
}

}  // namespace decomp::kernels
