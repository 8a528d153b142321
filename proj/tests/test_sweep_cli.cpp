#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pv/config.hpp"
#include "pv/errors.hpp"
#include "pv/runner.hpp"
#include "pv/sweep.hpp"

using namespace pv;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("parse_config: flags, overrides and unknown keys") {
    RunConfig cfg = parse_config("solve", "", {{"domain", "disk"}, {"n", "256"}, {"mu", "50"}});
    CHECK(cfg.command == "solve");
    CHECK(cfg.n == 256);
    CHECK(cfg.mu == 50.0);
    CHECK(!cfg.x0_point());  // argmin-H default

    auto dir = temp_dir("pv_cfg_test");
    {
        std::ofstream f(dir / "run.cfg");
        f << "# comment line\n"
          << "domain = \"disk\"\n"
          << "n = 128\n"
          << "mu = 25\n"
          << "x0 = \"0.25, -0.1\"\n";
    }
    RunConfig file_cfg = parse_config("solve", (dir / "run.cfg").string(), {});
    CHECK(file_cfg.n == 128);
    REQUIRE(file_cfg.x0_point());
    CHECK(file_cfg.x0_point()->x() == doctest::Approx(0.25));

    // flag overrides the file value
    RunConfig both = parse_config("solve", (dir / "run.cfg").string(), {{"n", "256"}});
    CHECK(both.n == 256);
    CHECK(both.mu == 25.0);

    {
        std::ofstream f(dir / "bad.cfg");
        f << "nn = 128\n";
    }
    CHECK_THROWS_WITH_AS(parse_config("solve", (dir / "bad.cfg").string(), {}),
                         doctest::Contains("unknown key 'nn'"), ConfigError);

    CHECK_THROWS_AS(parse_config("solve", "", {{"n", "8"}, {"mu", "50"}}), ConfigError);
    CHECK_THROWS_AS(parse_config("fly", "", {}), ConfigError);
    CHECK_THROWS_AS(parse_config("verify", "", {{"mu", "50"}}), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("config echo: version line and round-trip stability") {
    RunConfig cfg = parse_config("solve", "", {{"domain", "disk"}, {"n", "64"}, {"mu", "20"}});
    std::string text = cfg.to_text();
    CHECK(text.find("# patchvortex") == 0);
    CHECK(text.find("command = \"solve\"") != std::string::npos);
    // the echo parses back to the same resolved config
    auto kv = parse_flat_text(text);
    CHECK(kv.at("n") == "64");
    CHECK(kv.at("mu") == "20");
}

TEST_CASE("mu below the existence hypothesis fails with the named bound") {
    RunConfig cfg = parse_config("solve", "",
                                 {{"domain", "disk"}, {"n", "64"}, {"mu", "0.1"},
                                  {"out", (fs::temp_directory_path() / "pv_lowmu").string()}});
    CHECK_THROWS_WITH_AS(run(cfg), doctest::Contains("mu > 1/|D|"), ConfigError);
}

TEST_CASE("emit_report: header, row count, determinism, empty table") {
    auto grid = build_grid(Domain::unit_disk(), 64);
    SolverConfig base;
    base.n = 64;
    base.mu = 10.0;
    SweepTable t = mu_sweep(grid, base, {10.0, 20.0, 40.0, 80.0});
    REQUIRE(t.rows.size() == 4);

    auto dir = temp_dir("pv_emit_test");
    emit_report(t, (dir / "sweep.csv").string());
    std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind("param,x1,x2,dist_xstar,mass_sqrt_s,diam,threshold,energy,"
                    "energy_plus_logterm,l1_to_mu_solution,iters,converged\n",
                    0) == 0);
    int lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 5);  // header + 4 rows

    // byte-identical rerun
    emit_report(t, (dir / "sweep2.csv").string());
    CHECK(slurp(dir / "sweep2.csv") == csv);
    CHECK(slurp(dir / "sweep2.json") == slurp(dir / "sweep.json"));

    SweepTable empty;
    empty.kind = "sweep-mu";
    CHECK_THROWS_AS(emit_report(empty, (dir / "x.csv").string()), ContractError);
    CHECK_THROWS_AS(emit_report(t, (dir / "no/such/dir/x.csv").string()), IoError);
    fs::remove_all(dir);
}

TEST_CASE("mu_sweep: concentration trends at coarse resolution") {
    auto grid = build_grid(Domain::unit_disk(), 96);
    SolverConfig base;
    base.n = 96;
    base.mu = 10.0;
    SweepTable t = mu_sweep(grid, base, {10.0, 40.0, 160.0});
    REQUIRE(t.rows.size() == 3);
    for (const auto& r : t.rows) {
        CHECK(r.converged);
        CHECK(r.dist_ref <= 2.0 * grid->spacing());
        CHECK(r.threshold > 0.0);
    }
    for (std::size_t i = 1; i < t.rows.size(); ++i)
        CHECK(t.rows[i].mass_sqrt_scale >= t.rows[i - 1].mass_sqrt_scale - 1e-12);

    // infeasible parameter rows are reported, not thrown
    SweepTable inf = mu_sweep(grid, base, {10.0, 1e7});
    CHECK(inf.rows.size() == 2);
    CHECK(inf.rows[0].converged);
    CHECK(!inf.rows[1].converged);
    CHECK(!inf.pass);
}

TEST_CASE("lambda_sweep: desingularization trends at coarse resolution") {
    auto grid = build_grid(Domain::unit_disk(), 96);
    SolverConfig base;
    base.n = 96;
    base.mu = 20.0;
    SweepTable t = lambda_sweep(grid, base, {100.0, 400.0});
    REQUIRE(t.rows.size() == 2);
    for (const auto& r : t.rows) {
        CHECK(r.converged);
        CHECK(r.threshold > 0.0);  // c^lambda > 0
        REQUIRE(r.l1_to_mu_solution);
    }
    CHECK(*t.rows[1].l1_to_mu_solution < *t.rows[0].l1_to_mu_solution);
    CHECK_THROWS_AS(lambda_sweep(grid, base, {10.0, 400.0}), ContractError);
}

#ifdef PATCHVORTEX_BIN
TEST_CASE("cli: deterministic artifacts and exit codes end to end") {
    auto dir = temp_dir("pv_cli_test");
    std::string bin = PATCHVORTEX_BIN;
    auto run_cli = [&](const std::string& args) {
        std::string cmd = bin + " " + args + " > /dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        return WEXITSTATUS(rc);
    };

    std::string out1 = (dir / "a").string(), out2 = (dir / "b").string();
    std::string common = "solve --domain disk --n 64 --mu 20 --out ";
    CHECK(run_cli(common + out1) == 0);
    CHECK(run_cli(common + out2) == 0);

    for (const char* f : {"solution.csv", "boundary.csv", "verification.json",
                          "config.resolved"}) {
        CAPTURE(f);
        CHECK(fs::exists(fs::path(out1) / f));
        CHECK(slurp(fs::path(out1) / f) == slurp(fs::path(out2) / f));
    }

    // verify the solve output through the CLI (x near the disk center)
    int rc = run_cli("verify --domain disk --n 64 --mu 20 --x0 0,0 --field " + out1 +
                     "/solution.csv --out " + (dir / "v").string());
    CHECK(rc == 0);

    // corrupt the dump: scale omega to mass 0.9
    {
        std::ifstream in(fs::path(out1) / "solution.csv");
        std::ofstream out(dir / "corrupt.csv");
        std::string line;
        std::getline(in, line);
        out << line << "\n";
        while (std::getline(in, line)) {
            int i, j;
            double x, y, om, ps;
            REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf,%lf", &i, &j, &x, &y, &om,
                                &ps) == 6);
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%.17g\n", i, j, x, y,
                          0.9 * om, ps);
            out << buf;
        }
    }
    CHECK(run_cli("verify --domain disk --n 64 --mu 20 --x0 0,0 --field " +
                  (dir / "corrupt.csv").string() + " --out " + (dir / "vc").string()) == 1);

    // unconverged run exits with 2
    CHECK(run_cli("solve --domain disk --n 64 --mu 20 --max-iters 1 --tol-patch 0 "
                  "--tol-x 1e-14 --out " +
                  (dir / "u").string()) == 2);
    fs::remove_all(dir);
}
#endif
