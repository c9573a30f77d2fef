#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "decomp/grid.hpp"

// Data-parallel grid kernels. Every kernel exists twice: a plain serial
// reference in kernels::serial and an OpenMP version in kernels::par.
// The two are arithmetic-identical: reductions accumulate per fixed-size
// block in extended precision and combine block partials in index order,
// so serial and parallel results match bit for bit. The unprefixed
// functions dispatch at runtime (see parallel_enabled / set_parallel).

namespace decomp::kernels {

inline constexpr std::size_t kReduceBlock = 4096;

/// Runtime switch for the parallel path (default: on when compiled with
/// OpenMP). Kernels fall back to serial inside an enclosing parallel region.
void set_parallel(bool on);
bool parallel_enabled();
/// Cap OpenMP worker count (0 = library default).
void set_max_threads(int n);
int max_threads();

struct GridSpec {
    int nx = 0;
    int ny = 1;                         // 1 for 1D
    double sx = 1.0;                    // gradient scale along x (1/h or rho)
    double sy = 1.0;
    const std::uint8_t* mask = nullptr; // optional, size nx*ny, nonzero = active
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    bool active(std::size_t i) const { return mask == nullptr || mask[i] != 0; }
};

namespace serial {

void grad(const GridSpec& g, const double* u, double* gx, double* gy);
void div(const GridSpec& g, const double* zx, const double* zy, double* out);

/// One semi-implicit dual step: z <- (z + tau*w) / (1 + tau*|w|) per cell,
/// where (wx, wy) is the scaled gradient of the current primal estimate and
/// |w| is taken per the TV mode. Returns the max absolute change of z.
double dual_step(const GridSpec& g, double* zx, double* zy,
                 const double* wx, const double* wy, double tau, TvMode mode);

/// out[i] = f[i] + lambda * s[i] on active cells, 0 elsewhere.
void add_scaled(const GridSpec& g, const double* f, const double* s,
                double lambda, double* out);

double sum(const double* v, std::size_t n, const std::uint8_t* mask = nullptr);
double sumsq(const double* v, std::size_t n, const std::uint8_t* mask = nullptr);
double dot(const double* a, const double* b, std::size_t n,
           const std::uint8_t* mask = nullptr);
double sum_abs_pow(const double* v, double p, std::size_t n,
                   const std::uint8_t* mask = nullptr);
double max_abs(const double* v, std::size_t n, const std::uint8_t* mask = nullptr);
/// Sum over cells of the per-cell magnitude of (gx, gy) under the TV mode.
double tv_sum(const GridSpec& g, const double* gx, const double* gy, TvMode mode);
/// Dot product of a dual-shaped pair: sum gx.ax + gy.ay (gy/ay may be null).
double dual_dot(const GridSpec& g, const double* gx, const double* gy,
                const double* ax, const double* ay);

}  // namespace serial

namespace par {

void grad(const GridSpec& g, const double* u, double* gx, double* gy);
void div(const GridSpec& g, const double* zx, const double* zy, double* out);
double dual_step(const GridSpec& g, double* zx, double* zy,
                 const double* wx, const double* wy, double tau, TvMode mode);
void add_scaled(const GridSpec& g, const double* f, const double* s,
                double lambda, double* out);

double sum(const double* v, std::size_t n, const std::uint8_t* mask = nullptr);
double sumsq(const double* v, std::size_t n, const std::uint8_t* mask = nullptr);
double dot(const double* a, const double* b, std::size_t n,
           const std::uint8_t* mask = nullptr);
double sum_abs_pow(const double* v, double p, std::size_t n,
                   const std::uint8_t* mask = nullptr);
double max_abs(const double* v, std::size_t n, const std::uint8_t* mask = nullptr);
double tv_sum(const GridSpec& g, const double* gx, const double* gy, TvMode mode);
double dual_dot(const GridSpec& g, const double* gx, const double* gy,
                const double* ax, const double* ay);

}  // namespace par

// Dispatching entry points.
void grad(const GridSpec& g, const double* u, double* gx, double* gy);
void div(const GridSpec& g, const double* zx, const double* zy, double* out);
double dual_step(const GridSpec& g, double* zx, double* zy,
                 const double* wx, const double* wy, double tau, TvMode mode);
void add_scaled(const GridSpec& g, const double* f, const double* s,
                double lambda, double* out);
double sum(const double* v, std::size_t n, const std::uint8_t* mask = nullptr);
double sumsq(const double* v, std::size_t n, const std::uint8_t* mask = nullptr);
double dot(const double* a, const double* b, std::size_t n,
           const std::uint8_t* mask = nullptr);
double sum_abs_pow(const double* v, double p, std::size_t n,
                   const std::uint8_t* mask = nullptr);
double max_abs(const double* v, std::size_t n, const std::uint8_t* mask = nullptr);
double tv_sum(const GridSpec& g, const double* gx, const double* gy, TvMode mode);
double dual_dot(const GridSpec& g, const double* gx, const double* gy,
                const double* ax, const double* ay);

/// GridSpec with physical gradient scales (1/h per axis) for a field.
GridSpec physical_spec(const GridField& f);

}  // namespace decomp::kernels
