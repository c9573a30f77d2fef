#include "decomp/shrinkage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace decomp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void fill_diagnostics(ShrinkagePair& pair) {
    pair.y_norm_q = lp_seq_norm(pair.y, pair.q);
    long double dot = 0.0L;
    for (std::size_t i = 0; i < pair.b.size(); ++i) dot += pair.x[i] * pair.y[i];
    pair.xy_dot = static_cast<double>(dot);
    pair.t_x_norm_p = pair.t * lp_seq_norm(pair.x, pair.p);
}

// solve m + mu * m^(q-1) = beta for m in [0, beta]; monotone in m
double resolvent_scalar(double beta, double mu, double q) {
    if (beta == 0.0) return 0.0;
    double lo = 0.0, hi = beta;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double val = mid + mu * std::pow(mid, q - 1.0);
        if (val < beta)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-17 * beta) break;
    }
    return 0.5 * (lo + hi);
}

double shrink_norm_q(const std::vector<double>& b, double mu, double q,
                     std::vector<double>* out = nullptr) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double m = resolvent_scalar(std::abs(b[i]), mu, q);
        if (out != nullptr) (*out)[i] = std::copysign(m, b[i]);
        acc += std::pow(m, q);
    }
    return std::pow(static_cast<double>(acc), 1.0 / q);
}

}  // namespace

double lp_seq_norm(const std::vector<double>& v, double p) {
    if (std::isinf(p)) {
        double mx = 0.0;
        for (double x : v) mx = std::max(mx, std::abs(x));
        return mx;
    }
    if (p < 1.0) throw std::invalid_argument("lp_seq_norm: p must be >= 1");
    long double acc = 0.0L;
    if (p == 1.0) {
        for (double x : v) acc += std::abs(x);
        return static_cast<double>(acc);
    }
    if (p == 2.0) {
        for (double x : v) acc += static_cast<long double>(x) * x;
        return std::sqrt(static_cast<double>(acc));
    }
    for (double x : v) acc += std::pow(std::abs(x), p);
    return std::pow(static_cast<double>(acc), 1.0 / p);
}

double dual_index(double p) {
    if (p < 1.0) throw std::invalid_argument("dual_index: p must be >= 1");
    if (p == 1.0) return kInf;
    return p / (p - 1.0);
}

ShrinkagePair soft_threshold(const std::vector<double>& b, double t) {
    if (t <= 0.0) throw std::invalid_argument("soft_threshold: t must be > 0");
    ShrinkagePair pair;
    pair.b = b;
    pair.p = 1.0;
    pair.q = kInf;
    pair.t = t;
    pair.x.resize(b.size());
    pair.y.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        pair.x[i] = b[i] - std::clamp(b[i], -t, t);
        // store y as the numerical complement so x + y reassembles b exactly
        pair.y[i] = b[i] - pair.x[i];
    }
    fill_diagnostics(pair);
    return pair;
}

std::vector<double> project_lq_ball(const std::vector<double>& b, double radius,
                                    double q) {
    if (radius <= 0.0) throw std::invalid_argument("project_lq_ball: radius must be > 0");
    if (!(q > 1.0)) throw std::invalid_argument("project_lq_ball: q must be in (1, inf]");
    const double nq = lp_seq_norm(b, q);
    if (nq <= radius) return b;

    if (std::isinf(q)) {
        std::vector<double> y(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) y[i] = std::clamp(b[i], -radius, radius);
        return y;
    }
    if (q == 2.0) {
        std::vector<double> y(b.size());
        const double s = radius / nq;
        for (std::size_t i = 0; i < b.size(); ++i) y[i] = s * b[i];
        return y;
    }

    // g(mu) = ||shrink_q(b, mu)||_q - radius is strictly decreasing from
    // ||b||_q - radius > 0; bracket, then bisect with a Newton-style
    // secant acceleration kept inside the bracket
    double lo = 0.0, g_lo = nq - radius;
    double hi = 1.0;
    std::vector<double> scratch(b.size());
    double g_hi = shrink_norm_q(b, hi, q) - radius;
    int guard = 0;
    while (g_hi > 0.0) {
        lo = hi;
        g_lo = g_hi;
        hi *= 4.0;
        g_hi = shrink_norm_q(b, hi, q) - radius;
        if (++guard > 500)
            throw std::logic_error("project_lq_ball: multiplier bracket not found");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
        double mid;
        const double denom = g_lo - g_hi;
        if (denom > 0.0) {
            mid = lo + (hi - lo) * g_lo / denom;  // secant guess
            const double margin = 0.01 * (hi - lo);
            mid = std::clamp(mid, lo + margin, hi - margin);
        } else {
            mid = 0.5 * (lo + hi);
        }
        const double g_mid = shrink_norm_q(b, mid, q) - radius;
        if (g_mid > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    std::vector<double> y(b.size());
    shrink_norm_q(b, 0.5 * (lo + hi), q, &y);
    // exact feasibility at the reported multiplier: rescale the residual bias
    const double ny = lp_seq_norm(y, q);
    if (ny > 0.0) {
        const double s = radius / ny;
        for (auto& v : y) v *= s;
    }
    return y;
}

ShrinkagePair solve_l2_lp(const std::vector<double>& b, double t, double p) {
    if (t <= 0.0) throw std::invalid_argument("solve_l2_lp: t must be > 0");
    if (p < 1.0) throw std::invalid_argument("solve_l2_lp: p must be in [1, inf)");
    if (p == 1.0) return soft_threshold(b, t);

    ShrinkagePair pair;
    pair.b = b;
    pair.p = p;
    pair.q = dual_index(p);
    pair.t = t;
    if (lp_seq_norm(b, pair.q) <= t) {
        pair.x.assign(b.size(), 0.0);
        pair.y = b;
    } else {
        const std::vector<double> proj = project_lq_ball(b, t, pair.q);
        pair.x.resize(b.size());
        pair.y.resize(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) {
            pair.x[i] = b[i] - proj[i];
            pair.y[i] = b[i] - pair.x[i];
        }
    }
    fill_diagnostics(pair);
    return pair;
}

}  // namespace decomp
