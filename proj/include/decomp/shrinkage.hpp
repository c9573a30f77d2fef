#pragma once

#include <vector>

namespace decomp {

/// Minimizing pair of 1/2||y||_2^2 + t||x||_p over x + y = b, together with
/// the quantities entering the optimality conditions (||y||_q = t and
/// y.x = t||x||_p whenever ||b||_q >= t, q the dual index of p).
struct ShrinkagePair {
    std::vector<double> b;
    std::vector<double> x;
    std::vector<double> y;
    double p = 1.0;
    double q = 0.0;  // dual index, infinity() when p = 1
    double t = 0.0;
    double y_norm_q = 0.0;
    double xy_dot = 0.0;
    double t_x_norm_p = 0.0;
};

double lp_seq_norm(const std::vector<double>& v, double p);  // p in [1, inf]
double dual_index(double p);

/// p = 1 closed form: y = clamp(b, -t, t), x = b - y.
ShrinkagePair soft_threshold(const std::vector<double>& b, double t);

/// Euclidean projection onto { ||y||_q <= radius }, q in (1, inf].
/// Componentwise clamp for q = inf, radial rescale for q = 2, otherwise a
/// scalar root-find on the Lagrange multiplier (bisection + safeguarded
/// Newton, multiplier resolved to 1e-12).
std::vector<double> project_lq_ball(const std::vector<double>& b, double radius,
                                    double q);

/// General solve through the projection characterization
/// (x_t, y_t) = (b - pi_{tU_q}(b), pi_{tU_q}(b)); p = 1 uses the closed form.
ShrinkagePair solve_l2_lp(const std::vector<double>& b, double t, double p);

}  // namespace decomp
