// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the kvwave binary: exit codes, artifact files,
// verdict lines, determinism. The binary path comes from the build system.
#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(KVWAVE_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 512> buf{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) output += buf.data();
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

fs::path make_workdir() {
    const fs::path dir = fs::temp_directory_path() / "kvwave_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string small_c1_config(const fs::path& outdir) {
    return R"([system]
case = C1

[damping_b]
value = 1.0
left = 0.1
right = 0.2

[coupling_c]
value = 2.0
left = 0.4
right = 0.6

[damping_d]
value = 1.0
left = 0.7
right = 0.9

[numerics]
n = 60
T = 150
sample_every = 5

[resolvent]
lambda_lo = 1
points = 12

[initial]
kind = gaussian

[output]
dir = )" + outdir.string() + "\n";
}

} // namespace

TEST_CASE("simulate writes the energy trace and decay fit") {
    const fs::path dir = make_workdir();
    write_file(dir / "c1.ini", small_c1_config(dir / "out"));
    const RunResult r = run("simulate --config " + (dir / "c1.ini").string());
    INFO(r.output);
    CHECK(r.exit_code == 0);
    const std::string energy = read_file(dir / "out" / "energy.csv");
    CHECK(energy.rfind("t,E,dE\n", 0) == 0);
    const std::string fit = read_file(dir / "out" / "decay_fit.txt");
    CHECK(fit.find("alpha = ") != std::string::npos);
    CHECK(fit.find("domain_norm_sq = ") != std::string::npos);
}

TEST_CASE("spectrum verdict: PASS on a damped config, FAIL on the undamped one") {
    const fs::path dir = make_workdir();
    write_file(dir / "c1.ini", small_c1_config(dir / "out"));
    const RunResult pass = run("spectrum --config " + (dir / "c1.ini").string());
    INFO(pass.output);
    CHECK(pass.exit_code == 0);
    CHECK(pass.output.find("verdict: strong stability: PASS") != std::string::npos);
    CHECK(read_file(dir / "out" / "spectrum.csv").rfind("re,im\n", 0) == 0);

    write_file(dir / "undamped.ini", R"([system]
case = C1

[numerics]
n = 40

[output]
dir = )" + (dir / "out2").string() + "\n");
    const RunResult fail = run("spectrum --config " + (dir / "undamped.ini").string());
    INFO(fail.output);
    CHECK(fail.exit_code == 1);
    CHECK(fail.output.find("verdict: strong stability: FAIL") != std::string::npos);
    // max Re lambda reported near zero
    const auto pos = fail.output.find("max Re lambda = ");
    REQUIRE(pos != std::string::npos);
    const double max_re = std::strtod(fail.output.c_str() + pos + 16, nullptr);
    CHECK(std::abs(max_re) < 1e-9);
}

TEST_CASE("resolvent writes the profile and the exponent line") {
    const fs::path dir = make_workdir();
    write_file(dir / "c1.ini", small_c1_config(dir / "out"));
    const RunResult r = run("resolvent --config " + (dir / "c1.ini").string());
    INFO(r.output);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("ell_est = ") != std::string::npos);
    CHECK(r.output.find("theory: 0.5 for C1") != std::string::npos);
    const std::string csv = read_file(dir / "out" / "resolvent.csv");
    CHECK(csv.rfind("lambda,norm,flag\n", 0) == 0);
    CHECK(csv.find(",ok") != std::string::npos);
}

TEST_CASE("sweep reports the smallness threshold crossing") {
    const fs::path dir = make_workdir();
    write_file(dir / "sweep.ini", R"([system]
case = C1

[damping_b]
value = 1.0
left = 0.1
right = 0.2

[coupling_c]
value = 2.0
left = 0.4
right = 0.6

[damping_d]
value = 1.0
left = 0.7
right = 0.9

[sweep]
parameter = c0
values = 2.5, 4.5, 7.5

[output]
dir = )" + (dir / "out").string() + "\n");
    const RunResult r = run("sweep --config " + (dir / "sweep.ini").string());
    INFO(r.output);
    CHECK(r.exit_code == 0);
    const std::string csv = read_file(dir / "out" / "sweep.csv");
    CHECK(csv == "value,ssc_satisfied\n2.5,true\n4.5,true\n7.5,false\n");
}

TEST_CASE("identical configs produce byte-identical artifacts") {
    const fs::path dir = make_workdir();
    write_file(dir / "c1.ini", small_c1_config(dir / "ignored"));
    const std::string base = (dir / "c1.ini").string();
    REQUIRE(run("simulate --config " + base + " --out " + (dir / "a").string()).exit_code == 0);
    REQUIRE(run("simulate --config " + base + " --out " + (dir / "b").string()).exit_code == 0);
    CHECK(read_file(dir / "a" / "energy.csv") == read_file(dir / "b" / "energy.csv"));
    CHECK(read_file(dir / "a" / "decay_fit.txt") == read_file(dir / "b" / "decay_fit.txt"));
}

TEST_CASE("usage and config errors exit with code 2") {
    const fs::path dir = make_workdir();
    CHECK(run("simulate --config /nonexistent.ini").exit_code == 2);
    write_file(dir / "bad.ini", "[system]\ncase = C9\n");
    CHECK(run("simulate --config " + (dir / "bad.ini").string()).exit_code == 2);
    // sweep without [sweep] section
    write_file(dir / "nosweep.ini", small_c1_config(dir / "out"));
    CHECK(run("sweep --config " + (dir / "nosweep.ini").string()).exit_code == 2);
}

TEST_CASE("--quiet suppresses informational lines but not verdicts") {
    const fs::path dir = make_workdir();
    write_file(dir / "c1.ini", small_c1_config(dir / "out"));
    const RunResult r =
        run("spectrum --quiet --config " + (dir / "c1.ini").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("verdict: strong stability: PASS") != std::string::npos);
    CHECK(r.output.find("note:") == std::string::npos);
}
