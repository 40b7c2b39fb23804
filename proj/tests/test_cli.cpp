// End-to-end command-line checks: exit codes, CSV schema, determinism

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef QMET_CLI_PATH
#error "QMET_CLI_PATH must point at the qmet binary"
#endif

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(QMET_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

bool exists(const std::string& path) { return std::ifstream(path).good(); }

} // namespace

TEST_CASE("exit codes") {
    SECTION("invariant suite passes") {
        CHECK(run("check --t-max 2") == 0);
    }
    SECTION("missing subcommand is a configuration error") {
        CHECK(run("") == 1);
    }
    SECTION("invalid parameters are configuration errors") {
        CHECK(run("gamma --lambda -1 -o cli_bad.csv") == 1);
        CHECK(run("gamma --t-min 2 --t-max 1 -o cli_bad.csv") == 1);
        CHECK(run("parity --n 0 -o cli_bad.csv") == 1);
    }
    SECTION("missing config file is a configuration error") {
        CHECK(run("gamma --config does_not_exist.conf -o cli_bad.csv") == 1);
    }
}

TEST_CASE("CSV outputs") {
    SECTION("gamma trajectory") {
        REQUIRE(run("gamma --t-points 16 --t-max 2 -o cli_gamma.csv") == 0);
        const std::string body = slurp("cli_gamma.csv");
        CHECK(body.rfind("# qmet-csv v1", 0) == 0);
        CHECK(body.find("re_gamma_0") != std::string::npos);
        CHECK(exists("cli_gamma.plot.py"));
    }
    SECTION("map trajectory") {
        REQUIRE(run("map --t-points 8 --t-max 1 -o cli_map.csv") == 0);
        CHECK(slurp("cli_map.csv").rfind("# qmet-csv v1", 0) == 0);
    }
    SECTION("single-probe QFI curves") {
        REQUIRE(run("qfi-single --t-points 8 --t-max 1 -o cli_qfi.csv") == 0);
        CHECK(slurp("cli_qfi.csv").rfind("# qmet-csv v1", 0) == 0);
    }
    SECTION("bound and parity at fixed N") {
        REQUIRE(run("bound --n 5 --t-points 6 --t-min 0.1 --t-max 1 -o cli_bound.csv") == 0);
        REQUIRE(run("parity --n 5 --t-points 6 --t-min 0.1 --t-max 1 -o cli_parity.csv") == 0);
        CHECK(slurp("cli_bound.csv").rfind("# qmet-csv v1", 0) == 0);
        CHECK(slurp("cli_parity.csv").rfind("# qmet-csv v1", 0) == 0);
    }
    SECTION("configuration file round trip") {
        {
            std::ofstream conf("cli_test.conf");
            conf << "# test configuration\n"
                 << "bath.lambda = 0.4\n"
                 << "t.points = 12\n"
                 << "t.max = 2.0\n"
                 << "output = cli_conf_out.csv\n";
        }
        REQUIRE(run("gamma --config cli_test.conf") == 0);
        CHECK(exists("cli_conf_out.csv"));
    }
}

TEST_CASE("scaling determinism") {
    const std::string common =
        "scaling --n-lo 10 --n-hi 40 --per-decade 8 --t-points 50 "
        "--t-min 0.01 --t-max 3 --seed 7 ";
    REQUIRE(run(common + "-o cli_scale_a.csv") == 0);
    REQUIRE(run(common + "-o cli_scale_b.csv") == 0);
    CHECK(slurp("cli_scale_a.csv") == slurp("cli_scale_b.csv"));
}
