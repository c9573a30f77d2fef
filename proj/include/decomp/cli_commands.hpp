#pragma once

#include <string>
#include <vector>

namespace decomp::cli {

// Subcommand option structs are filled by the flag parser in the tool entry
// point; the command bodies below do the work and write data files plus a
// JSON run report. I/O problems throw io::IoError (exit 2), internal
// invariant violations surface as std::logic_error (exit 3).

struct SolverFlags {
    std::string tv = "iso";
    double tol = 1e-6;
    int max_iters = 5000;
};

struct RofOpts {
    std::string input;
    double t = 0.0;
    SolverFlags solver;
    std::string out_u = "u.csv";
    std::string out_v = "v.csv";
    std::string report = "rof_report.json";
};

struct MultiscaleOpts {
    std::string input;
    double t0 = 0.1;
    double ratio = 0.5;
    int levels = 5;
    bool init_mean = false;
    SolverFlags solver;
    std::string out_dir = "multiscale_out";
    std::string report;  // default: <out_dir>/multiscale_report.json
};

struct KfunOpts {
    std::string input;
    std::string t_grid = "0.001:1:10";  // a:b:n, n log-spaced points in [a,b]
    SolverFlags solver;
    std::string out_csv = "kfun.csv";
    std::string report = "kfun_report.json";
};

struct StarnormOpts {
    std::string input;
    double tol = 1e-3;
    SolverFlags solver;
    std::string report = "starnorm_report.json";
};

struct ShrinkOpts {
    std::string input;  // file or inline comma-separated values
    double p = 1.0;
    double t = 1.0;
    std::string out;  // optional CSV for x_t
    std::string report = "shrink_report.json";
};

struct StudyOpts {
    std::string example = "ramp";  // ramp | radial
    double t = 0.02;
    std::string levels = "4..8";   // dyadic level range a..b
    SolverFlags solver;
    std::string out_csv = "study.csv";
    std::string report = "study_report.json";
};

void cmd_rof(const RofOpts& opt);
void cmd_multiscale(const MultiscaleOpts& opt);
void cmd_kfun(const KfunOpts& opt);
void cmd_starnorm(const StarnormOpts& opt);
void cmd_shrink(const ShrinkOpts& opt);
void cmd_study(const StudyOpts& opt);

/// Parse "a:b:n" into n log-spaced values in [a, b].
std::vector<double> parse_t_grid(const std::string& spec);

/// Parse "a..b" into the integer range [a, b].
std::vector<int> parse_level_range(const std::string& spec);

/// Apply the DECOMP_THREADS cap if the environment sets it.
void apply_thread_env();

}  // namespace decomp::cli
