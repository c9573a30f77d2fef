#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "decomp/cli_commands.hpp"
#include "decomp/field_ops.hpp"
#include "decomp/io.hpp"
#include "decomp/oracles.hpp"
#include "support.hpp"

using namespace decomp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("decomp_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CLI_BINARY) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    json j;
    in >> j;
    return j;
}

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("csv round trip 1D and 2D") {
    TempDir tmp;
    std::mt19937_64 rng(71);
    const GridField a = testsupport::random_field_1d(37, rng, 4.0);
    io::write_csv(tmp.file("a.csv"), a);
    const GridField a2 = io::read_csv(tmp.file("a.csv"));
    REQUIRE(a2.dims() == 1);
    REQUIRE(a2.nx() == 37);
    for (int i = 0; i < 37; ++i)
        CHECK(a2[i] == doctest::Approx(a[i]).epsilon(1e-11));

    const GridField b = testsupport::random_field_2d(9, 5, rng, 2.0);
    io::write_csv(tmp.file("b.csv"), b);
    const GridField b2 = io::read_csv(tmp.file("b.csv"));
    REQUIRE(b2.dims() == 2);
    REQUIRE(b2.nx() == 9);
    REQUIRE(b2.ny() == 5);
    for (std::size_t i = 0; i < b.size(); ++i)
        CHECK(b2[i] == doctest::Approx(b[i]).epsilon(1e-11));

    // a second trip through text is value-exact at printed precision
    io::write_csv(tmp.file("a3.csv"), a2);
    CHECK(file_bytes(tmp.file("a3.csv")) == file_bytes(tmp.file("a.csv")));
}

TEST_CASE("pgm 16-bit round trip is stable after one quantization") {
    TempDir tmp;
    std::mt19937_64 rng(72);
    const GridField f = testsupport::random_field_2d(23, 11, rng, 3.0);
    io::write_pgm(tmp.file("f.pgm"), f, 16);
    const GridField g1 = io::read_pgm(tmp.file("f.pgm"));
    REQUIRE(g1.nx() == 23);
    REQUIRE(g1.ny() == 11);

    // quantization error bounded by half a level of the recorded range
    double lo = f[0], hi = f[0];
    for (std::size_t i = 0; i < f.size(); ++i) {
        lo = std::min(lo, f[i]);
        hi = std::max(hi, f[i]);
    }
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(std::abs(g1[i] - f[i]) <= 0.5 * (hi - lo) / 65535.0 + 1e-12);
    // range endpoints survive exactly
    CHECK(*std::min_element(g1.values().begin(), g1.values().end()) == lo);
    CHECK(*std::max_element(g1.values().begin(), g1.values().end()) == hi);

    // second trip: identical bytes and identical values
    io::write_pgm(tmp.file("g1.pgm"), g1, 16);
    const GridField g2 = io::read_pgm(tmp.file("g1.pgm"));
    CHECK(file_bytes(tmp.file("g1.pgm")) == file_bytes(tmp.file("f.pgm")));
    CHECK(g2.values() == g1.values());
}

TEST_CASE("pgm ascii and 8-bit variants read back") {
    TempDir tmp;
    const GridField f(4, 2, {0.0, 0.25, 0.5, 0.75, 1.0, 0.1, 0.9, 0.3});
    io::write_pgm(tmp.file("a.pgm"), f, 8, /*binary=*/false);
    const GridField g = io::read_pgm(tmp.file("a.pgm"));
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(std::abs(g[i] - f[i]) <= 0.5 / 255.0 + 1e-12);
}

TEST_CASE("constant pgm keeps its value") {
    TempDir tmp;
    const GridField f = GridField::constant(6, 3, 2.5);
    io::write_pgm(tmp.file("c.pgm"), f);
    const GridField g = io::read_pgm(tmp.file("c.pgm"));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == 2.5);
}

TEST_CASE("read_sequence accepts files and inline lists") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("seq.csv"));
        out << "1.5\n-2\n0.25\n";
    }
    CHECK(io::read_sequence(tmp.file("seq.csv")) ==
          std::vector<double>{1.5, -2.0, 0.25});
    CHECK(io::read_sequence("3,-1,0.5") == std::vector<double>{3.0, -1.0, 0.5});
    CHECK_THROWS_AS(io::read_sequence("not-a-number"), io::IoError);
}

TEST_CASE("t-grid parsing is log spaced") {
    const auto g = cli::parse_t_grid("0.01:1:3");
    REQUIRE(g.size() == 3);
    CHECK(g[0] == doctest::Approx(0.01));
    CHECK(g[1] == doctest::Approx(0.1));
    CHECK(g[2] == doctest::Approx(1.0));
    CHECK_THROWS_AS(cli::parse_t_grid("1:2"), std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_t_grid("-1:2:4"), std::invalid_argument);
}

TEST_CASE("cmd_rof writes the pair, a certificate and the K identity") {
    TempDir tmp;
    io::write_csv(tmp.file("ramp.csv"), oracles::ramp_field(512));

    cli::RofOpts opt;
    opt.input = tmp.file("ramp.csv");
    opt.t = 0.02;
    opt.solver.tol = 1e-8;
    opt.solver.max_iters = 200000;
    opt.out_u = tmp.file("u.csv");
    opt.out_v = tmp.file("v.csv");
    opt.report = tmp.file("report.json");
    cli::cmd_rof(opt);

    const GridField u = io::read_csv(opt.out_u);
    const GridField expect = oracles::ramp_solution_field(oracles::ramp_example(0.02), 512);
    CHECK(l2_norm(sub(u, expect)) / l2_norm(expect) <= 0.02);

    const json rep = load_json(opt.report);
    CHECK(rep["schema_version"] == 1);
    CHECK(rep["certificate"]["certified"].get<bool>());
    const double kd = rep["k_direct"].get<double>();
    const double kp = rep["k_projection"].get<double>();
    CHECK(std::abs(kd - kp) <= 1e-5 * (1.0 + std::abs(kd)));
    CHECK(rep["inputs"][0]["digest"] == io::digest_file(opt.input));
}

TEST_CASE("cmd_rof on constant pgm yields an all-zero v") {
    TempDir tmp;
    io::write_pgm(tmp.file("const.pgm"), GridField::constant(16, 16, 0.5));
    cli::RofOpts opt;
    opt.input = tmp.file("const.pgm");
    opt.t = 0.7;
    opt.out_u = tmp.file("u.pgm");
    opt.out_v = tmp.file("v.csv");
    opt.report = tmp.file("report.json");
    cli::cmd_rof(opt);
    const GridField v = io::read_csv(opt.out_v);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == 0.0);
}

TEST_CASE("identical config and input produce identical outputs") {
    TempDir tmp;
    io::write_csv(tmp.file("f.csv"), testsupport::smooth_field_1d(128));
    for (int run = 0; run < 2; ++run) {
        cli::RofOpts opt;
        opt.input = tmp.file("f.csv");
        opt.t = 0.05;
        opt.out_u = tmp.file("u" + std::to_string(run) + ".csv");
        opt.out_v = tmp.file("v" + std::to_string(run) + ".csv");
        opt.report = tmp.file("rep" + std::to_string(run) + ".json");
        cli::cmd_rof(opt);
    }
    CHECK(file_bytes(tmp.file("u0.csv")) == file_bytes(tmp.file("u1.csv")));
    CHECK(file_bytes(tmp.file("v0.csv")) == file_bytes(tmp.file("v1.csv")));
    json r0 = load_json(tmp.file("rep0.json"));
    json r1 = load_json(tmp.file("rep1.json"));
    r0.erase("timings_ms");
    r1.erase("timings_ms");
    // output paths differ by construction; digests must not
    CHECK(r0["outputs"][0]["digest"] == r1["outputs"][0]["digest"]);
    r0.erase("outputs");
    r1.erase("outputs");
    CHECK(r0 == r1);
}

TEST_CASE("cmd_shrink soft thresholding through the interface") {
    TempDir tmp;
    cli::ShrinkOpts opt;
    opt.input = "3,-1,0.5";
    opt.p = 1.0;
    opt.t = 1.0;
    opt.out = tmp.file("x.csv");
    opt.report = tmp.file("shrink.json");
    cli::cmd_shrink(opt);
    CHECK(io::read_sequence(opt.out) == std::vector<double>{2.0, 0.0, 0.0});
    const json rep = load_json(opt.report);
    CHECK(rep["shrinkage"]["y_norm_q"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("cmd_starnorm brackets the ramp threshold") {
    TempDir tmp;
    io::write_csv(tmp.file("ramp.csv"), oracles::ramp_field(128));
    cli::StarnormOpts opt;
    opt.input = tmp.file("ramp.csv");
    opt.tol = 0.002;
    opt.solver.max_iters = 300000;
    opt.report = tmp.file("sn.json");
    cli::cmd_starnorm(opt);
    const json rep = load_json(opt.report);
    const double value = rep["star_norm"]["value"].get<double>();
    CHECK(std::abs(value - 0.125) <= 0.008);
}

TEST_CASE("cmd_multiscale writes details and the ledger") {
    TempDir tmp;
    io::write_csv(tmp.file("f.csv"), oracles::ramp_field(128));
    cli::MultiscaleOpts opt;
    opt.input = tmp.file("f.csv");
    opt.t0 = 0.1;
    opt.ratio = 0.5;
    opt.levels = 3;
    opt.solver.tol = 1e-7;
    opt.solver.max_iters = 100000;
    opt.out_dir = tmp.file("ms");
    cli::cmd_multiscale(opt);
    const json rep = load_json((fs::path(opt.out_dir) / "multiscale_report.json").string());
    CHECK(rep["ledger"].size() == 3);
    CHECK(rep["energy_identity"]["max_relative_gap"].get<double>() <= 1e-3);
    // reconstruct f from the parts on disk
    GridField sum = io::read_csv((fs::path(opt.out_dir) / "w_01.csv").string());
    sum = add(sum, io::read_csv((fs::path(opt.out_dir) / "w_02.csv").string()));
    sum = add(sum, io::read_csv((fs::path(opt.out_dir) / "w_03.csv").string()));
    sum = add(sum, io::read_csv((fs::path(opt.out_dir) / "residual.csv").string()));
    CHECK(l2_norm(sub(sum, oracles::ramp_field(128))) <= 1e-9);
}

TEST_CASE("cmd_kfun sweeps a grid of scales") {
    TempDir tmp;
    io::write_csv(tmp.file("f.csv"), testsupport::smooth_field_1d(64));
    cli::KfunOpts opt;
    opt.input = tmp.file("f.csv");
    opt.t_grid = "0.01:0.16:5";
    opt.solver.tol = 1e-8;
    opt.solver.max_iters = 200000;
    opt.out_csv = tmp.file("k.csv");
    opt.report = tmp.file("k.json");
    cli::cmd_kfun(opt);
    const json rep = load_json(opt.report);
    REQUIRE(rep["table"].size() == 5);
    double prev = 0.0;
    for (const auto& row : rep["table"]) {
        const double kd = row["k_direct"].get<double>();
        CHECK(kd >= prev - 1e-9);  // K(f,t) grows with t
        prev = kd;
        CHECK(std::abs(kd - row["k_projection"].get<double>()) <=
              1e-6 * (1.0 + kd));
    }
}

TEST_CASE("cmd_study emits a decreasing K gap table") {
    TempDir tmp;
    cli::StudyOpts opt;
    opt.example = "ramp";
    opt.t = 0.02;
    opt.levels = "4..7";
    opt.solver.tol = 1e-9;
    opt.solver.max_iters = 300000;
    opt.out_csv = tmp.file("study.csv");
    opt.report = tmp.file("study.json");
    cli::cmd_study(opt);
    const json rep = load_json(opt.report);
    REQUIRE(rep["study"]["table"].size() == 4);
    const double kref = rep["study"]["k_reference"].get<double>();
    double prev = 1e300;
    for (const auto& row : rep["study"]["table"]) {
        const double gap = std::abs(row["k_n"].get<double>() - kref);
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(cli::parse_level_range("3..5") == std::vector<int>{3, 4, 5});
    CHECK_THROWS_AS(cli::parse_level_range("5"), std::invalid_argument);
}

TEST_CASE("cli binary: exit codes follow the contract") {
    TempDir tmp;
    CHECK(run_cli("--badflag") == 1);
    CHECK(run_cli("rof missing_file.csv -t 0.1") == 2);
    CHECK(run_cli("rof") == 1);  // missing required argument

    io::write_csv(tmp.file("f.csv"), oracles::ramp_field(64));
    const std::string out = " --out " + tmp.file("u.csv") + " --out-v " +
                            tmp.file("v.csv") + " --report " + tmp.file("r.json");
    CHECK(run_cli("rof " + tmp.file("f.csv") + " -t 0.05" + out) == 0);
    CHECK(run_cli("shrink 1,2,3 -p 1 -t 0.5 --report " + tmp.file("s.json")) == 0);
}

TEST_CASE("cli binary: outputs do not depend on the thread cap") {
    TempDir tmp;
    io::write_csv(tmp.file("f.csv"), testsupport::smooth_field_1d(4096 * 2));
    for (int threads : {1, 2}) {
        const std::string tag = std::to_string(threads);
        const std::string cmd =
            "DECOMP_THREADS=" + tag + " " + std::string(CLI_BINARY) + " rof " +
            tmp.file("f.csv") + " -t 0.03 --out " + tmp.file("u" + tag + ".csv") +
            " --out-v " + tmp.file("v" + tag + ".csv") + " --report " +
            tmp.file("r" + tag + ".json") + " >/dev/null 2>&1";
        REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    }
    CHECK(file_bytes(tmp.file("u1.csv")) == file_bytes(tmp.file("u2.csv")));
    CHECK(file_bytes(tmp.file("v1.csv")) == file_bytes(tmp.file("v2.csv")));
}
