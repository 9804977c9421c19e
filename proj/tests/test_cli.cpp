#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ehdet/config_io.hpp"
#include "test_helpers.hpp"

#ifndef EHDET_CLI_PATH
#define EHDET_CLI_PATH "ehdet"
#endif

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(EHDET_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("ehdet_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// First data row of a CSV (skips # comments and the column header).
std::string first_data_row(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool header_skipped = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!header_skipped) {
            header_skipped = true;
            continue;
        }
        return line;
    }
    return {};
}

}  // namespace

TEST_CASE("missing config exits with the config error code") {
    CHECK(run_cli("steady-state /nonexistent/config.json") == 2);
}

TEST_CASE("steady-state emits the worked-example transition row") {
    const auto dir = fresh_dir("steady");
    auto cfg = ehdet_test::example_chain_config();
    const auto cfg_path = dir / "config.json";
    ehdet::save_config(cfg, cfg_path.string());

    CHECK(run_cli("steady-state " + cfg_path.string() + " --out-dir " + dir.string()) == 0);
    const std::string psi = slurp(dir / "psi_s0.csv");

    std::istringstream in(psi);
    std::string line;
    while (std::getline(in, line) && (line.empty() || line[0] == '#')) {
    }
    std::stringstream row(line);
    std::string cell;
    const double expected[4] = {0.0183, 0.0733, 0.1465, 0.7619};
    int j = 0;
    while (std::getline(row, cell, ',')) {
        CHECK(std::abs(std::stod(cell) - expected[j]) < 5e-4);
        ++j;
    }
    CHECK(j == 4);
    CHECK(fs::exists(dir / "phi_s0.csv"));
    CHECK(fs::exists(dir / "summary.csv"));
}

TEST_CASE("invalid config exits with the config error code") {
    const auto dir = fresh_dir("invalid");
    auto cfg = ehdet_test::example_chain_config();
    cfg.policy.coeffs = {0.9, 0.5};
    const auto cfg_path = dir / "config.json";
    std::ofstream(cfg_path) << ehdet::serialize_config(cfg);
    CHECK(run_cli("steady-state " + cfg_path.string() + " --out-dir " + dir.string()) == 2);
}

TEST_CASE("simulate is bit-reproducible and honors the silent design") {
    const auto dir = fresh_dir("simulate");
    auto cfg = ehdet_test::homogeneous_config(3, 2.0, 2.0);
    cfg.priors = ehdet::Priors::from_pi0(0.6);
    cfg.trials = 4000;
    for (auto& d : *cfg.design) {
        d.theta = 50.0;
    }
    const auto cfg_path = dir / "config.json";
    ehdet::save_config(cfg, cfg_path.string());

    const std::string out1 = (dir / "pe1.csv").string();
    const std::string out2 = (dir / "pe2.csv").string();
    CHECK(run_cli("simulate " + cfg_path.string() + " --out " + out1) == 0);
    CHECK(run_cli("simulate " + cfg_path.string() + " --out " + out2) == 0);

    std::string a = slurp(out1);
    std::string b = slurp(out2);
    // the two files differ only in their recorded output path argument
    const std::string row_a = first_data_row(a);
    CHECK(row_a == first_data_row(b));
    const double pe = std::stod(row_a.substr(0, row_a.find(',')));
    CHECK(std::abs(pe - 0.4) < 0.03);
}

TEST_CASE("optimize writes a design and reports infeasible floors") {
    const auto dir = fresh_dir("optimize");
    auto cfg = ehdet_test::homogeneous_config(1, 2.0, 2.0);
    const auto cfg_path = dir / "config.json";
    ehdet::save_config(cfg, cfg_path.string());

    const std::string design = (dir / "design.json").string();
    const std::string report = (dir / "report.csv").string();
    CHECK(run_cli("optimize " + cfg_path.string() + " --problem p1 --budget 2 --out " + design +
                  " --report " + report) == 0);
    CHECK(slurp(report).find("# status = converged") != std::string::npos);
    CHECK(fs::exists(design));

    CHECK(run_cli("optimize " + cfg_path.string() + " --problem p2 --floor 1e9 --out " + design +
                  " --report " + report) == 3);

    // simulate with the optimized design file
    CHECK(run_cli("optimize " + cfg_path.string() + " --problem p1 --budget 2 --out " + design +
                  " --report " + report) == 0);
    const std::string pe_out = (dir / "pe.csv").string();
    CHECK(run_cli("simulate " + cfg_path.string() + " --design " + design + " --trials 500 --out " +
                  pe_out) == 0);
}

TEST_CASE("sweep validates its axis and grid") {
    const auto dir = fresh_dir("sweep");
    auto cfg = ehdet_test::homogeneous_config(1, 2.0, 2.0);
    cfg.trials = 500;
    const auto cfg_path = dir / "config.json";
    ehdet::save_config(cfg, cfg_path.string());

    const std::string out = (dir / "sweep.csv").string();
    CHECK(run_cli("sweep " + cfg_path.string() + " --axis bogus --grid 1,2 --out " + out) == 2);
    CHECK(run_cli("sweep " + cfg_path.string() + " --axis rho --out " + out) == 2);  // empty grid

    CHECK(run_cli("sweep " + cfg_path.string() + " --axis rho --grid 1,2,4 --out " + out) == 0);
    const std::string text = slurp(out);
    int rows = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#' && line.rfind("axis,", 0) != 0) {
            ++rows;
        }
    }
    CHECK(rows == 3);
    CHECK(text.find("# config = ") != std::string::npos);
    CHECK(text.find("# seed = ") != std::string::npos);
}

TEST_CASE("sweep rows do not depend on the worker count") {
    const auto dir = fresh_dir("workers");
    auto cfg = ehdet_test::homogeneous_config(2, 2.0, 2.0);
    cfg.trials = 400;
    const auto cfg_path = dir / "config.json";
    ehdet::save_config(cfg, cfg_path.string());

    const std::string out1 = (dir / "sweep1.csv").string();
    const std::string out2 = (dir / "sweep2.csv").string();
    const std::string base = "sweep " + cfg_path.string() + " --axis rho --grid 1,2,3,4";
    CHECK(std::system(("EHDET_WORKERS=1 " EHDET_CLI_PATH " " + base + " --out " + out1 +
                       " >/dev/null 2>&1")
                          .c_str()) == 0);
    CHECK(std::system(("EHDET_WORKERS=3 " EHDET_CLI_PATH " " + base + " --out " + out2 +
                       " >/dev/null 2>&1")
                          .c_str()) == 0);
    // identical apart from the recorded output path
    std::istringstream a(slurp(out1)), b(slurp(out2));
    std::string la, lb;
    while (std::getline(a, la) && std::getline(b, lb)) {
        if (la.rfind("# command", 0) == 0) {
            continue;
        }
        CHECK(la == lb);
    }
}
