// Exit-code matrix for the command-line tool: 0 satisfied/verified,
// 1 violation/witness found, 2 unknown/resolution exhausted, 3 input error.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <string>

namespace {

const std::string bin = VERSHIK_LAB_BIN;
const std::string dir = VERSHIK_TMP_DIR;

int run(const std::string& args) {
    std::string cmd = bin + " " + args + " > " + dir + "/cli_out.txt 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string last_output() {
    std::ifstream in(dir + "/cli_out.txt");
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return all;
}

}  // namespace

TEST_CASE("emit and validate built-ins") {
    CHECK(run("examples list") == 0);
    CHECK(run("--depth 8 examples emit dyadic_diagram --out " + dir + "/d.bd") == 0);
    CHECK(run("validate-diagram --diagram " + dir + "/d.bd --depth 8") == 0);
    CHECK(run("--depth 8 examples emit odometer_system --out " + dir + "/o.sys") == 0);
    CHECK(run("--depth 8 examples emit dh_nested --base 0 --out " + dir + "/dh.ns") == 0);
    CHECK(run("--depth 8 examples emit nonsemisat_nested --out " + dir + "/ns.ns") == 0);
    CHECK(run("--depth 8 examples emit nonsemisat_bratteli --out " + dir + "/nsb.sys") == 0);
    CHECK(run("examples emit no_such_example") == 3);
}

TEST_CASE("successor and orbit") {
    REQUIRE(run("--depth 8 examples emit dyadic_diagram --out " + dir + "/d.bd") == 0);
    CHECK(run("successor --diagram " + dir + "/d.bd --path 1,1,0 --depth 8") == 0);
    CHECK(last_output().find("0,0,1") != std::string::npos);
    // the all-maximal path needs more depth
    CHECK(run("successor --diagram " + dir + "/d.bd --path 1,1,1,1,1,1,1,1 --depth 8") == 2);
    CHECK(run("orbit --diagram " + dir + "/d.bd --path 0,0 --steps 3 --depth 8") == 0);
    CHECK(run("successor --diagram " + dir + "/d.bd --path 7 --depth 8") == 3);
}

TEST_CASE("telescope then equiv round-trips; unknown and inequivalent cases") {
    REQUIRE(run("--depth 8 examples emit dyadic_diagram --out " + dir + "/d.bd") == 0);
    CHECK(run("telescope --diagram " + dir + "/d.bd --cuts 2,4,6,8 --out " + dir +
              "/dt.bd --depth 8") == 0);
    CHECK(run("equiv --diagram " + dir + "/d.bd --other " + dir + "/dt.bd --bound 4 --depth 8 "
              "--format json") == 0);
    // replay the reported witness
    {
        std::string cmd = bin + " equiv --diagram " + dir + "/d.bd --other " + dir +
                          "/dt.bd --bound 4 --depth 8 --format json > " + dir + "/equiv.json";
        REQUIRE(std::system(cmd.c_str()) == 0);
    }
    CHECK(run("replay --report " + dir + "/equiv.json --diagram " + dir + "/d.bd --other " + dir +
              "/dt.bd --depth 8") == 0);
}

TEST_CASE("system checks") {
    REQUIRE(run("--depth 8 examples emit odometer_system --out " + dir + "/o.sys") == 0);
    CHECK(run("check-bs --system " + dir + "/o.sys --depth 8") == 0);
    CHECK(run("extract-diagram --system " + dir + "/o.sys --stages 4 --depth 8 --out " + dir +
              "/ext.bd") == 0);
    CHECK(run("validate-diagram --diagram " + dir + "/ext.bd --depth 8") == 0);
    CHECK(run("verify-conjugacy --system " + dir + "/o.sys --stages 4 --depth 8") == 0);
}

TEST_CASE("nested diagnostics and replays") {
    REQUIRE(run("--depth 8 examples emit dh_nested --base 0 --out " + dir + "/dh.ns") == 0);
    REQUIRE(run("--depth 8 examples emit nonsemisat_nested --out " + dir + "/ns.ns") == 0);
    CHECK(run("check-afnest --nested " + dir + "/dh.ns --ulevel 3 --search-depth 4 --depth 8") == 0);
    CHECK(run("diagnose-cocycle --nested " + dir + "/dh.ns --depth 8") == 1);
    {
        std::string cmd = bin + " diagnose-cocycle --nested " + dir +
                          "/dh.ns --depth 8 --format json > " + dir + "/cocycle.json";
        int rc = std::system(cmd.c_str());
        REQUIRE(WEXITSTATUS(rc) == 1);
    }
    CHECK(run("replay --report " + dir + "/cocycle.json --nested " + dir + "/dh.ns --depth 8") == 0);
    CHECK(run("check-semisat --nested " + dir + "/dh.ns --depth 8") == 0);
    CHECK(run("check-semisat --nested " + dir + "/ns.ns --depth 8") == 1);
    {
        std::string cmd = bin + " check-semisat --nested " + dir +
                          "/ns.ns --depth 8 --format json > " + dir + "/semisat.json";
        int rc = std::system(cmd.c_str());
        REQUIRE(WEXITSTATUS(rc) == 1);
    }
    CHECK(run("replay --report " + dir + "/semisat.json --nested " + dir + "/ns.ns --depth 8") == 0);
}

TEST_CASE("input errors exit with 3") {
    std::ofstream bad(dir + "/bad.bd");
    bad << "not a diagram\n";
    bad.close();
    CHECK(run("validate-diagram --diagram " + dir + "/bad.bd") == 3);
    CHECK(run("validate-diagram --diagram " + dir + "/missing-file.bd") == 3);
}

TEST_CASE("export-dot writes a digraph") {
    REQUIRE(run("--depth 6 examples emit dyadic_diagram --out " + dir + "/d6.bd") == 0);
    CHECK(run("export-dot --diagram " + dir + "/d6.bd --out " + dir + "/d6.dot") == 0);
    std::ifstream in(dir + "/d6.dot");
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(all.find("digraph") != std::string::npos);
}
