#pragma once

#include "decomp/grid.hpp"

namespace decomp {

/// Forward differences divided by the spacing per axis; the component on the
/// last cell along each axis (and on mask boundaries) is 0.
DualField grad(const GridField& u);

/// Discrete negative adjoint of grad: <grad u, z> + <u, div z> = 0 for all u.
/// Rejects z with nonzero boundary-edge components.
GridField div(const DualField& z);

/// sum over cells of |grad u| h^d with |.| per the mode.
double discrete_tv(const GridField& u, TvMode mode = TvMode::isotropic);

/// L2 projection onto the dyadic space V_n (cell averages over blocks).
/// Requires 2^n to divide the shape along every axis.
GridField project_Vn(const GridField& u, int level);

double l2_norm(const GridField& u);
double lp_norm(const GridField& u, double p);  // p >= 1
double mean(const GridField& u);

double inner(const GridField& a, const GridField& b);  // sum a.b h^d

/// <z, grad u> h^d: the discrete pairing of a dual field with Du.
double pairing(const DualField& z, const GridField& u);

GridField add(const GridField& a, const GridField& b);
GridField sub(const GridField& a, const GridField& b);
GridField scale(const GridField& a, double c);
GridField add_constant(const GridField& a, double c);

}  // namespace decomp
