#pragma once

#include <vector>

#include "decomp/rof.hpp"

namespace decomp {

/// Geometric scale schedule t_k = t0 * ratio^k, k = 0..levels-1.
struct ScaleSchedule {
    double t0 = 0.1;
    double ratio = 0.5;
    int levels = 1;

    double t_at(int k) const;
    void validate() const;
};

struct LevelRow {
    double t = 0.0;
    double tv_w = 0.0;       // TV(w_{k+1})
    double w_sq = 0.0;       // ||w_{k+1}||^2
    double v_sq = 0.0;       // ||v_{k+1}||^2
    bool certified = false;
    bool pure_mean = false;  // TV(w) ~ 0: the level only extracted a constant
    Certificate certificate;
    int iterations = 0;
};

/// Hierarchical decomposition f = u0 + sum_k w_k + v_N obtained by repeated
/// minimization on the residuals with decreasing scales.
struct MultiscaleDecomposition {
    ScaleSchedule schedule;
    TvMode tv_mode = TvMode::isotropic;
    GridField u0;                    // initial guess (zero or the mean of f)
    std::vector<GridField> details;  // w_1 .. w_N
    std::vector<GridField> residuals;  // v_0 .. v_N (v_0 = f - u0)
    std::vector<LevelRow> ledger;
    double f_sq = 0.0;  // ||v_0||^2, the right-hand side base of the ledger
};

struct EnergyLedgerCheck {
    std::vector<double> lhs_partial_sums;  // per n: sum_{k<=n} 2 t_k TV(w) + ||w||^2
    std::vector<double> rhs;               // per n: ||v_0||^2 - ||v_{n+1}||^2
    double max_relative_gap = 0.0;
};

enum class InitialGuess { zero, mean };

MultiscaleDecomposition decompose(const GridField& f, const ScaleSchedule& schedule,
                                  const SolverConfig& cfg = {},
                                  InitialGuess init = InitialGuess::zero);

/// Verifies the telescoping energy identity of the hierarchical scheme.
EnergyLedgerCheck energy_ledger_check(const MultiscaleDecomposition& d);

/// u_k = u0 + sum_{j<=k} w_j; k = 0 returns u0.
GridField reconstruct(const MultiscaleDecomposition& d, int k);

}  // namespace decomp
