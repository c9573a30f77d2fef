#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "decomp/cli_commands.hpp"
#include "decomp/io.hpp"

// Exit codes: 0 success (certified or flagged), 1 usage error, 2 I/O error,
// 3 internal invariant violation.

int main(int argc, char** argv) {
    using namespace decomp::cli;

    CLI::App app{"Tikhonov decomposition toolbox: (L2,BV) pairs, hierarchical "
                 "multiscale decomposition, K-functionals and (l2,lp) shrinkage"};
    app.require_subcommand(1);

    RofOpts rof;
    auto* c_rof = app.add_subcommand("rof", "solve the (L2,BV) pair at one scale t");
    c_rof->add_option("input", rof.input, "input field (.csv or .pgm)")->required();
    c_rof->add_option("-t,--t", rof.t, "scale parameter t > 0")->required();
    c_rof->add_option("--tv", rof.solver.tv, "TV mode: iso|aniso");
    c_rof->add_option("--tol", rof.solver.tol, "dual stopping tolerance");
    c_rof->add_option("--max-iters", rof.solver.max_iters, "iteration cap");
    c_rof->add_option("--out", rof.out_u, "output path for u");
    c_rof->add_option("--out-v", rof.out_v, "output path for v");
    c_rof->add_option("--report", rof.report, "JSON run report path");

    MultiscaleOpts ms;
    auto* c_ms = app.add_subcommand("multiscale", "hierarchical (L2,BV) decomposition");
    c_ms->add_option("input", ms.input)->required();
    c_ms->add_option("--t0", ms.t0, "initial scale");
    c_ms->add_option("--ratio", ms.ratio, "geometric ratio in (0,1)");
    c_ms->add_option("--levels", ms.levels, "number of levels");
    c_ms->add_flag("--init-mean", ms.init_mean, "start from the mean instead of 0");
    c_ms->add_option("--tv", ms.solver.tv);
    c_ms->add_option("--tol", ms.solver.tol);
    c_ms->add_option("--max-iters", ms.solver.max_iters);
    c_ms->add_option("--out-dir", ms.out_dir, "directory for details and residual");
    c_ms->add_option("--report", ms.report);

    KfunOpts kf;
    auto* c_kf = app.add_subcommand("kfun", "K(f,t) over a log-spaced t grid");
    c_kf->add_option("input", kf.input)->required();
    c_kf->add_option("--t-grid", kf.t_grid, "a:b:n log-spaced scales");
    c_kf->add_option("--tv", kf.solver.tv);
    c_kf->add_option("--tol", kf.solver.tol);
    c_kf->add_option("--max-iters", kf.solver.max_iters);
    c_kf->add_option("--out", kf.out_csv, "CSV table path");
    c_kf->add_option("--report", kf.report);

    StarnormOpts sn;
    auto* c_sn = app.add_subcommand("starnorm", "bisection estimate of ||f-mean||_Y2");
    c_sn->add_option("input", sn.input)->required();
    c_sn->add_option("--tol", sn.tol, "bracket width tolerance");
    c_sn->add_option("--tv", sn.solver.tv);
    c_sn->add_option("--solver-tol", sn.solver.tol);
    c_sn->add_option("--max-iters", sn.solver.max_iters);
    c_sn->add_option("--report", sn.report);

    ShrinkOpts sh;
    auto* c_sh = app.add_subcommand("shrink", "(l2,lp) minimizing pair of a sequence");
    c_sh->add_option("input", sh.input, "CSV file or inline comma-separated values")
        ->required();
    c_sh->add_option("-p,--p", sh.p, "exponent p in [1, inf)");
    c_sh->add_option("-t,--t", sh.t, "scale t > 0");
    c_sh->add_option("--out", sh.out, "optional CSV for x_t");
    c_sh->add_option("--report", sh.report);

    StudyOpts st;
    auto* c_st = app.add_subcommand("study", "dyadic discretization convergence study");
    c_st->add_option("--example", st.example, "ramp|radial");
    c_st->add_option("-t,--t", st.t, "scale t > 0");
    c_st->add_option("--levels", st.levels, "dyadic level range a..b");
    c_st->add_option("--tv", st.solver.tv);
    c_st->add_option("--tol", st.solver.tol);
    c_st->add_option("--max-iters", st.solver.max_iters);
    c_st->add_option("--out", st.out_csv, "CSV table path");
    c_st->add_option("--report", st.report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    apply_thread_env();
    try {
        if (c_rof->parsed()) cmd_rof(rof);
        if (c_ms->parsed()) cmd_multiscale(ms);
        if (c_kf->parsed()) cmd_kfun(kf);
        if (c_sn->parsed()) cmd_starnorm(sn);
        if (c_sh->parsed()) cmd_shrink(sh);
        if (c_st->parsed()) cmd_study(st);
    } catch (const decomp::io::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
