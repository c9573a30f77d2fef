#include "decomp/field_ops.hpp"

#include <cmath>
#include <stdexcept>

#include "decomp/kernels.hpp"

namespace decomp {

namespace {

GridField like(const GridField& a, std::vector<double> v) {
    GridField out = a.dims() == 1 ? GridField(a.nx(), std::move(v))
                                  : GridField(a.nx(), a.ny(), std::move(v));
    if (a.masked()) out.set_mask(a.mask());
    return out;
}

}  // namespace

DualField grad(const GridField& u) {
    u.check_finite("grad: input");
    DualField z(u);
    const kernels::GridSpec g = kernels::physical_spec(u);
    kernels::grad(g, u.values().data(), z.x().data(),
                  u.dims() == 2 ? z.y().data() : nullptr);
    return z;
}

GridField div(const DualField& z) {
    if (!z.boundary_components_zero())
        throw std::invalid_argument("div: nonzero boundary-edge component");
    GridField out = z.dims() == 1 ? GridField::zeros(z.nx())
                                  : GridField::zeros(z.nx(), z.ny());
    if (z.masked()) out.set_mask(z.mask());
    kernels::GridSpec g;
    g.nx = z.nx();
    g.ny = z.ny();
    g.sx = static_cast<double>(z.nx());
    g.sy = z.dims() == 2 ? static_cast<double>(z.ny()) : 1.0;
    g.mask = z.masked() ? z.mask().data() : nullptr;
    kernels::div(g, z.x().data(), z.dims() == 2 ? z.y().data() : nullptr,
                 out.values().data());
    return out;
}

double discrete_tv(const GridField& u, TvMode mode) {
    const DualField g = grad(u);
    const kernels::GridSpec spec = kernels::physical_spec(u);
    return kernels::tv_sum(spec, g.x().data(),
                           u.dims() == 2 ? g.y().data() : nullptr, mode) *
           u.cell_measure();
}

GridField project_Vn(const GridField& u, int level) {
    if (u.masked())
        throw std::invalid_argument("project_Vn: masked fields are not supported");
    if (level < 0) throw std::invalid_argument("project_Vn: level must be >= 0");
    const int target = 1 << level;
    if (u.nx() % target != 0 || (u.dims() == 2 && u.ny() % target != 0))
        throw std::invalid_argument("project_Vn: 2^level must divide the shape");
    const int bx = u.nx() / target;
    const int by = u.dims() == 2 ? u.ny() / target : 1;
    if (bx == 1 && by == 1) return u;

    const int onx = target;
    const int ony = u.dims() == 2 ? target : 1;
    std::vector<double> out(static_cast<std::size_t>(onx) * ony, 0.0);
    for (int oy = 0; oy < ony; ++oy) {
        for (int ox = 0; ox < onx; ++ox) {
            long double acc = 0.0L;
            for (int jy = 0; jy < by; ++jy)
                for (int jx = 0; jx < bx; ++jx)
                    acc += u.at(ox * bx + jx, oy * by + jy);
            out[static_cast<std::size_t>(oy) * onx + ox] =
                static_cast<double>(acc / (static_cast<long double>(bx) * by));
        }
    }
    return u.dims() == 1 ? GridField(onx, std::move(out))
                         : GridField(onx, ony, std::move(out));
}

double l2_norm(const GridField& u) {
    const double s = kernels::sumsq(u.values().data(), u.size(),
                                    u.masked() ? u.mask().data() : nullptr);
    return std::sqrt(s * u.cell_measure());
}

double lp_norm(const GridField& u, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    const double s = kernels::sum_abs_pow(u.values().data(), p, u.size(),
                                          u.masked() ? u.mask().data() : nullptr);
    return std::pow(s * u.cell_measure(), 1.0 / p);
}

double mean(const GridField& u) {
    const double s = kernels::sum(u.values().data(), u.size(),
                                  u.masked() ? u.mask().data() : nullptr);
    return s / static_cast<double>(u.active_count());
}

double inner(const GridField& a, const GridField& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("inner: grid mismatch");
    return kernels::dot(a.values().data(), b.values().data(), a.size(),
                        a.masked() ? a.mask().data() : nullptr) *
           a.cell_measure();
}

double pairing(const DualField& z, const GridField& u) {
    const DualField g = grad(u);
    const kernels::GridSpec spec = kernels::physical_spec(u);
    return kernels::dual_dot(spec, g.x().data(),
                             u.dims() == 2 ? g.y().data() : nullptr, z.x().data(),
                             z.dims() == 2 ? z.y().data() : nullptr) *
           u.cell_measure();
}

GridField add(const GridField& a, const GridField& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("add: grid mismatch");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i] + b[i];
    return like(a, std::move(v));
}

GridField sub(const GridField& a, const GridField& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("sub: grid mismatch");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i] - b[i];
    return like(a, std::move(v));
}

GridField scale(const GridField& a, double c) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = c * a[i];
    return like(a, std::move(v));
}

GridField add_constant(const GridField& a, double c) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = a.active(i) ? a[i] + c : 0.0;
    return like(a, std::move(v));
}

}  // namespace decomp
