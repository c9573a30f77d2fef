#pragma once

// Shared helpers for the test suites: seeded random fields and dual fields,
// plus small numeric utilities.

#include <cmath>
#include <random>
#include <vector>

#include "decomp/field_ops.hpp"
#include "decomp/grid.hpp"

namespace testsupport {

inline decomp::GridField random_field_1d(int n, std::mt19937_64& rng,
                                         double amp = 1.0) {
    std::uniform_real_distribution<double> uni(-amp, amp);
    std::vector<double> v(n);
    for (auto& x : v) x = uni(rng);
    return decomp::GridField(n, std::move(v));
}

inline decomp::GridField random_field_2d(int nx, int ny, std::mt19937_64& rng,
                                         double amp = 1.0) {
    std::uniform_real_distribution<double> uni(-amp, amp);
    std::vector<double> v(static_cast<std::size_t>(nx) * ny);
    for (auto& x : v) x = uni(rng);
    return decomp::GridField(nx, ny, std::move(v));
}

/// Piecewise-smooth 1D test signal: ramps plus a jump.
inline decomp::GridField smooth_field_1d(int n, double jump_at = 0.4,
                                         double jump = 0.7) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) / n;
        v[i] = std::sin(3.0 * x) + (x > jump_at ? jump : 0.0);
    }
    return decomp::GridField(n, std::move(v));
}

/// Admissible dual field (zero boundary components, |z| bounded by 1).
inline decomp::DualField random_dual(const decomp::GridField& like,
                                     std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    decomp::DualField z(like);
    for (auto& v : z.x()) v = uni(rng);
    if (like.dims() == 2)
        for (auto& v : z.y()) v = uni(rng);
    if (like.dims() == 2) {
        const double s = std::sqrt(0.5);
        for (auto& v : z.x()) v *= s;
        for (auto& v : z.y()) v *= s;
    }
    z.zero_boundary_components();
    return z;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace testsupport
