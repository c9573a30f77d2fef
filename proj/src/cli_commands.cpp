#include "decomp/cli_commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "decomp/convergence.hpp"
#include "decomp/field_ops.hpp"
#include "decomp/io.hpp"
#include "decomp/kernels.hpp"
#include "decomp/multiscale.hpp"
#include "decomp/oracles.hpp"
#include "decomp/rof.hpp"
#include "decomp/shrinkage.hpp"

namespace decomp::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

SolverConfig make_config(const SolverFlags& flags) {
    SolverConfig cfg;
    cfg.tv = tv_mode_from_string(flags.tv);
    cfg.tol = flags.tol;
    cfg.max_iters = flags.max_iters;
    return cfg;
}

json solver_json(const SolverFlags& flags) {
    return json{{"tv", flags.tv}, {"tol", flags.tol}, {"max_iters", flags.max_iters}};
}

json certificate_json(const RofSolution& sol) {
    return json{{"certified", sol.certified},
                {"converged", sol.converged},
                {"iterations", sol.iterations},
                {"sup_norm_z", sol.certificate.sup_norm_z},
                {"pairing_residual", sol.certificate.pairing_residual},
                {"mean_residual", sol.certificate.mean_residual}};
}

json file_entry(const std::string& path) {
    return json{{"path", path}, {"digest", io::digest_file(path)}};
}

void write_report(const std::string& path, const std::string& command,
                  const json& config, const std::vector<std::string>& inputs,
                  const std::vector<std::string>& outputs, const json& payload,
                  double elapsed_ms) {
    json rep;
    rep["schema_version"] = 1;
    rep["command"] = command;
    rep["config"] = config;
    rep["inputs"] = json::array();
    for (const auto& p : inputs) rep["inputs"].push_back(file_entry(p));
    rep["outputs"] = json::array();
    for (const auto& p : outputs) rep["outputs"].push_back(file_entry(p));
    for (auto it = payload.begin(); it != payload.end(); ++it) rep[it.key()] = *it;
    rep["timings_ms"] = json{{"total", elapsed_ms}};
    std::ofstream out(path);
    if (!out) throw io::IoError("cannot write " + path);
    out << rep.dump(2) << '\n';
}

// K(f,t) of the radial example from the closed-form pair, in physical units
double radial_k_value(const oracles::AnalyticSolution& ex) {
    const double omega = ex.d == 1 ? 2.0 : 3.14159265358979323846;
    const double ball_r = omega * std::pow(ex.r, ex.d);
    const double ball_R = omega * std::pow(ex.R, ex.d);
    if (!ex.constant_regime) {
        const double a = ex.t * ex.d / ex.r;
        const double b =
            ex.t * ex.d * std::pow(ex.r, ex.d - 1) / (std::pow(ex.R, ex.d) - std::pow(ex.r, ex.d));
        const double vsq = a * a * ball_r + b * b * (ball_R - ball_r);
        const double jump = ex.u_at(0.0) - ex.u_at(ex.R);
        const double perimeter = ex.d * omega * std::pow(ex.r, ex.d - 1);
        return 0.5 * vsq + ex.t * jump * perimeter;
    }
    const double m = std::pow(ex.r, ex.d) / std::pow(ex.R, ex.d);
    const double vsq = (1.0 - m) * (1.0 - m) * ball_r + m * m * (ball_R - ball_r);
    return 0.5 * vsq;
}

}  // namespace

std::vector<double> parse_t_grid(const std::string& spec) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.rfind(':');
    if (c1 == std::string::npos || c2 == c1)
        throw std::invalid_argument("t-grid must be a:b:n");
    const double a = std::stod(spec.substr(0, c1));
    const double b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    const int n = std::stoi(spec.substr(c2 + 1));
    if (a <= 0.0 || b < a || n < 1)
        throw std::invalid_argument("t-grid needs 0 < a <= b and n >= 1");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i)
        out[i] = std::exp(la + (lb - la) * i / (n - 1));
    return out;
}

std::vector<int> parse_level_range(const std::string& spec) {
    const auto pos = spec.find("..");
    if (pos == std::string::npos)
        throw std::invalid_argument("level range must be a..b");
    const int lo = std::stoi(spec.substr(0, pos));
    const int hi = std::stoi(spec.substr(pos + 2));
    if (lo > hi) throw std::invalid_argument("level range is empty");
    std::vector<int> out;
    for (int l = lo; l <= hi; ++l) out.push_back(l);
    return out;
}

void apply_thread_env() {
    if (const char* env = std::getenv("DECOMP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) kernels::set_max_threads(n);
    }
}

void cmd_rof(const RofOpts& opt) {
    const auto start = Clock::now();
    const GridField f = io::read_field(opt.input);
    if (opt.t <= 0.0) throw std::invalid_argument("rof: t must be > 0");
    const SolverConfig cfg = make_config(opt.solver);
    const RofSolution sol = solve_rof(f, opt.t, cfg);
    io::write_field(opt.out_u, sol.u);
    io::write_field(opt.out_v, sol.v);

    const double vsq = l2_norm(sol.v);
    json payload;
    payload["t"] = opt.t;
    payload["certificate"] = certificate_json(sol);
    payload["energy"] = sol.energy;
    payload["tv_u"] = sol.tv_u;
    payload["k_direct"] = sol.energy;
    payload["k_projection"] = inner(sol.v, f) - 0.5 * vsq * vsq;
    write_report(opt.report, "rof",
                 json{{"t", opt.t}, {"solver", solver_json(opt.solver)}},
                 {opt.input}, {opt.out_u, opt.out_v}, payload, ms_since(start));
    std::cout << "rof: energy=" << sol.energy
              << " certified=" << (sol.certified ? "true" : "false") << "\n";
}

void cmd_multiscale(const MultiscaleOpts& opt) {
    const auto start = Clock::now();
    const GridField f = io::read_field(opt.input);
    ScaleSchedule schedule{opt.t0, opt.ratio, opt.levels};
    const SolverConfig cfg = make_config(opt.solver);
    const MultiscaleDecomposition d =
        decompose(f, schedule, cfg,
                  opt.init_mean ? InitialGuess::mean : InitialGuess::zero);
    const EnergyLedgerCheck chk = energy_ledger_check(d);

    fs::create_directories(opt.out_dir);
    const std::string ext = opt.input.size() > 4 &&
                                    opt.input.substr(opt.input.size() - 4) == ".pgm"
                                ? ".pgm"
                                : ".csv";
    std::vector<std::string> outputs;
    for (std::size_t k = 0; k < d.details.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof(name), "w_%02zu%s", k + 1, ext.c_str());
        const std::string path = (fs::path(opt.out_dir) / name).string();
        io::write_field(path, d.details[k]);
        outputs.push_back(path);
    }
    const std::string vpath = (fs::path(opt.out_dir) / ("residual" + ext)).string();
    io::write_field(vpath, d.residuals.back());
    outputs.push_back(vpath);

    json ledger = json::array();
    for (std::size_t k = 0; k < d.ledger.size(); ++k) {
        const LevelRow& row = d.ledger[k];
        ledger.push_back(json{{"level", k + 1},
                              {"t", row.t},
                              {"tv_w", row.tv_w},
                              {"w_sq", row.w_sq},
                              {"v_sq", row.v_sq},
                              {"certified", row.certified},
                              {"pure_mean", row.pure_mean},
                              {"iterations", row.iterations}});
    }
    json payload;
    payload["ledger"] = ledger;
    payload["energy_identity"] = json{{"max_relative_gap", chk.max_relative_gap},
                                      {"lhs_partial_sums", chk.lhs_partial_sums},
                                      {"rhs", chk.rhs}};
    const std::string report =
        opt.report.empty() ? (fs::path(opt.out_dir) / "multiscale_report.json").string()
                           : opt.report;
    write_report(report, "multiscale",
                 json{{"t0", opt.t0},
                      {"ratio", opt.ratio},
                      {"levels", opt.levels},
                      {"init", opt.init_mean ? "mean" : "zero"},
                      {"solver", solver_json(opt.solver)}},
                 {opt.input}, outputs, payload, ms_since(start));
    std::cout << "multiscale: levels=" << opt.levels
              << " max_relative_gap=" << chk.max_relative_gap << "\n";
}

void cmd_kfun(const KfunOpts& opt) {
    const auto start = Clock::now();
    const GridField f = io::read_field(opt.input);
    const std::vector<double> ts = parse_t_grid(opt.t_grid);
    const SolverConfig cfg = make_config(opt.solver);

    std::vector<KFunctionalValue> rows(ts.size());
    // independent solves; kernels stay serial inside the worker loop
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(ts.size()); ++i)
        rows[i] = k_functional(f, ts[i], cfg);

    std::ofstream csv(opt.out_csv);
    if (!csv) throw io::IoError("cannot write " + opt.out_csv);
    csv << "t,k_direct,k_projection,certified\n";
    for (std::size_t i = 0; i < ts.size(); ++i)
        csv << io::format_value(ts[i]) << ',' << io::format_value(rows[i].k_direct)
            << ',' << io::format_value(rows[i].k_projection) << ','
            << (rows[i].certified ? 1 : 0) << '\n';
    csv.close();

    json table = json::array();
    for (std::size_t i = 0; i < ts.size(); ++i)
        table.push_back(json{{"t", ts[i]},
                             {"k_direct", rows[i].k_direct},
                             {"k_projection", rows[i].k_projection},
                             {"certified", rows[i].certified}});
    write_report(opt.report, "kfun",
                 json{{"t_grid", opt.t_grid}, {"solver", solver_json(opt.solver)}},
                 {opt.input}, {opt.out_csv}, json{{"table", table}}, ms_since(start));
    std::cout << "kfun: " << ts.size() << " scales written to " << opt.out_csv << "\n";
}

void cmd_starnorm(const StarnormOpts& opt) {
    const auto start = Clock::now();
    const GridField f = io::read_field(opt.input);
    const SolverConfig cfg = make_config(opt.solver);
    const StarNormEstimate est = estimate_star_norm(f, opt.tol, cfg);
    json payload;
    payload["star_norm"] = json{{"value", est.value},
                                {"t_lo", est.t_lo},
                                {"t_hi", est.t_hi},
                                {"constancy_threshold", est.constancy_threshold},
                                {"solves", est.solves},
                                {"budget_limited", est.budget_limited}};
    write_report(opt.report, "starnorm",
                 json{{"tol", opt.tol}, {"solver", solver_json(opt.solver)}},
                 {opt.input}, {}, payload, ms_since(start));
    std::cout << "starnorm: " << est.value << " (bracket [" << est.t_lo << ", "
              << est.t_hi << "])"
              << (est.budget_limited ? " [budget-limited: raise --max-iters]" : "")
              << "\n";
}

void cmd_shrink(const ShrinkOpts& opt) {
    const auto start = Clock::now();
    const std::vector<double> b = io::read_sequence(opt.input);
    const ShrinkagePair pair = solve_l2_lp(b, opt.t, opt.p);

    std::string xs;
    for (std::size_t i = 0; i < pair.x.size(); ++i) {
        if (i) xs += ',';
        xs += io::format_value(pair.x[i]);
    }
    std::cout << xs << "\n";

    std::vector<std::string> outputs;
    if (!opt.out.empty()) {
        std::ofstream out(opt.out);
        if (!out) throw io::IoError("cannot write " + opt.out);
        for (double v : pair.x) out << io::format_value(v) << '\n';
        outputs.push_back(opt.out);
    }
    json payload;
    payload["shrinkage"] = json{{"p", pair.p},
                                {"q", std::isinf(pair.q) ? json("inf") : json(pair.q)},
                                {"t", pair.t},
                                {"x", pair.x},
                                {"y", pair.y},
                                {"y_norm_q", pair.y_norm_q},
                                {"xy_dot", pair.xy_dot},
                                {"t_x_norm_p", pair.t_x_norm_p}};
    const bool inline_input = !fs::exists(opt.input);
    write_report(opt.report, "shrink",
                 json{{"p", opt.p}, {"t", opt.t}, {"input_inline", inline_input}},
                 inline_input ? std::vector<std::string>{} : std::vector<std::string>{opt.input},
                 outputs, payload, ms_since(start));
}

void cmd_study(const StudyOpts& opt) {
    const auto start = Clock::now();
    const std::vector<int> levels = parse_level_range(opt.levels);
    SolverConfig cfg = make_config(opt.solver);

    ConvergenceReport rep;
    if (opt.example == "ramp") {
        rep = kn_study(oracles::ramp_example(opt.t), levels, cfg);
    } else if (opt.example == "radial") {
        // disk-masked grids per level; physical quantities recover through the
        // domain scale L: t_grid = t/L, K_phys = L^d * K_grid
        const auto ex = oracles::radial_example(2, 0.5, 1.0, opt.t);
        rep.t = opt.t;
        rep.tv_mode = cfg.tv;
        rep.reference = "analytic";
        rep.k_reference = radial_k_value(ex);
        rep.solver_tol = cfg.tol;
        rep.solver_max_iters = cfg.max_iters;
        for (int level : levels) {
            const int n = 1 << level;
            const oracles::RadialGrid grid = oracles::radial_grid(ex, n);
            const double L = grid.scale;
            const RofSolution sol = solve_rof(grid.f, opt.t / L, cfg);
            ConvergenceRow row;
            row.level = level;
            row.k_n = sol.energy * std::pow(L, ex.d);
            row.err_l2 = l2_norm(sub(sol.u, grid.u_exact));
            row.err_l1 = lp_norm(sub(sol.u, grid.u_exact), 1.0);
            row.certified = sol.certified;
            row.iterations = sol.iterations;
            rep.rows.push_back(row);
        }
    } else {
        throw std::invalid_argument("study: example must be ramp or radial");
    }

    std::ofstream csv(opt.out_csv);
    if (!csv) throw io::IoError("cannot write " + opt.out_csv);
    csv << "level,k_n,k_gap,err_l2,err_l1,certified\n";
    for (const auto& row : rep.rows)
        csv << row.level << ',' << io::format_value(row.k_n) << ','
            << io::format_value(std::abs(row.k_n - rep.k_reference)) << ','
            << io::format_value(row.err_l2) << ',' << io::format_value(row.err_l1)
            << ',' << (row.certified ? 1 : 0) << '\n';
    csv.close();

    json table = json::array();
    for (const auto& row : rep.rows)
        table.push_back(json{{"level", row.level},
                             {"k_n", row.k_n},
                             {"err_l2", row.err_l2},
                             {"err_l1", row.err_l1},
                             {"certified", row.certified},
                             {"iterations", row.iterations}});
    json payload;
    payload["study"] = json{{"reference", rep.reference},
                            {"k_reference", rep.k_reference},
                            {"tv_mode", to_string(rep.tv_mode)},
                            {"table", table}};
    write_report(opt.report, "study",
                 json{{"example", opt.example},
                      {"t", opt.t},
                      {"levels", opt.levels},
                      {"solver", solver_json(opt.solver)}},
                 {}, {opt.out_csv}, payload, ms_since(start));
    std::cout << "study: K reference " << rep.k_reference << ", final gap "
              << std::abs(rep.rows.back().k_n - rep.k_reference) << "\n";
}

}  // namespace decomp::cli
