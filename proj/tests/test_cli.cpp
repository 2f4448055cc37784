#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "despeckle/io.hpp"
#include "despeckle/speckle.hpp"
#include "test_util.hpp"

using namespace despeckle;
namespace fs = std::filesystem;

namespace {

struct Cmd {
    int code = -1;
    std::string out;
    std::string err;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Cmd cli(const std::string& args) {
    const char* bin = std::getenv("DESPECKLE_CLI");
    REQUIRE(bin != nullptr);
    static int counter = 0;
    std::string so = "cli_tmp/out_" + std::to_string(counter);
    std::string se = "cli_tmp/err_" + std::to_string(counter);
    ++counter;
    std::string cmd = std::string("\"") + bin + "\" " + args + " > " + so + " 2> " + se;
    int rc = std::system(cmd.c_str());
    Cmd r;
    if (WIFEXITED(rc)) r.code = WEXITSTATUS(rc);
    r.out = read_file(so);
    r.err = read_file(se);
    return r;
}

// Shared on-disk inputs, built once per binary invocation.
struct Fixture {
    Field clean_gray = testutil::smooth_scene(24, 24);
    Field noisy_gray = apply_noise(clean_gray, SpeckleSpec{1, 3});

    Fixture() {
        fs::remove_all("cli_tmp");
        fs::create_directories("cli_tmp");
        write_netpbm("cli_tmp/clean.pgm", from_unit({clean_gray}, 255));
        write_netpbm("cli_tmp/noisy.pgm", from_unit({noisy_gray}, 255));

        std::vector<Field> rgb{testutil::smooth_scene(16, 16),
                               testutil::cartoon_scene(16, 16),
                               testutil::smooth_scene(16, 16, 0.3, 0.8)};
        write_netpbm("cli_tmp/clean.ppm", from_unit(rgb, 255));
        std::vector<Field> rgbn;
        for (size_t c = 0; c < rgb.size(); ++c)
            rgbn.push_back(apply_noise(rgb[c], SpeckleSpec{2, channel_seed(5, int(c))}));
        write_netpbm("cli_tmp/noisy.ppm", from_unit(rgbn, 255));
    }
};

const Fixture& fx() {
    static Fixture f;
    return f;
}

double metric_line(const std::string& out, const std::string& name) {
    auto pos = out.find(name + " ");
    REQUIRE(pos != std::string::npos);
    return std::strtod(out.c_str() + pos + name.size() + 1, nullptr);
}

int csv_data_rows(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    int rows = -1;  // skip header
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    return rows;
}

}  // namespace

TEST_CASE("noise subcommand: statistics, determinism, ascii") {
    fx();
    Image flat;
    flat.width = 16;
    flat.height = 16;
    flat.maxval = 255;
    flat.ch.push_back(Field(16, 16, 100.0));
    write_netpbm("cli_tmp/flat.pgm", flat);

    Cmd a = cli("noise -i cli_tmp/flat.pgm -o cli_tmp/n1.pgm -L 4 --seed 9");
    CHECK(a.code == 0);
    double si = metric_line(a.out, "speckle_index");
    CHECK(si > 0.35);
    CHECK(si < 0.65);

    Cmd b = cli("noise -i cli_tmp/flat.pgm -o cli_tmp/n2.pgm -L 4 --seed 9");
    CHECK(b.code == 0);
    CHECK(b.out == a.out);
    CHECK(read_file("cli_tmp/n1.pgm") == read_file("cli_tmp/n2.pgm"));

    Cmd c = cli("noise -i cli_tmp/flat.pgm -o cli_tmp/n3.pgm -L 4 --seed 10");
    CHECK(c.code == 0);
    CHECK(read_file("cli_tmp/n3.pgm") != read_file("cli_tmp/n1.pgm"));

    Cmd d = cli("noise -i cli_tmp/flat.pgm -o cli_tmp/na.pgm -L 4 --seed 9 --ascii");
    CHECK(d.code == 0);
    CHECK(read_file("cli_tmp/na.pgm").rfind("P2", 0) == 0);

    CHECK(cli("noise -i cli_tmp/nowhere.pgm -o cli_tmp/x.pgm").code == 2);
    CHECK(cli("noise -i cli_tmp/flat.pgm").code == 1);  // missing -o
    CHECK(cli("noise -i cli_tmp/flat.pgm -o cli_tmp/x.pgm -L 0").code == 1);
}

TEST_CASE("eval subcommand") {
    fx();
    Cmd a = cli("eval --reference cli_tmp/clean.pgm --test cli_tmp/clean.pgm");
    CHECK(a.code == 0);
    CHECK(a.out.find("psnr inf\n") != std::string::npos);
    CHECK(a.out.find("ssim 1\n") != std::string::npos);

    Cmd j = cli("eval --reference cli_tmp/clean.pgm --test cli_tmp/noisy.pgm --json");
    CHECK(j.code == 0);
    auto parsed = nlohmann::json::parse(j.out);
    CHECK(parsed["psnr"].is_number());
    CHECK(parsed["psnr"].get<double>() > 0.0);
    CHECK(parsed["ssim"].get<double>() < 1.0);
    CHECK(parsed["si_test"].get<double>() > parsed["si_ref"].get<double>());

    // channel count mismatch is a usage error
    CHECK(cli("eval --reference cli_tmp/clean.pgm --test cli_tmp/noisy.ppm").code == 1);
}

TEST_CASE("denoise run: artifacts, stdout, determinism") {
    fx();
    std::string flags =
        " -i cli_tmp/noisy.pgm --reference cli_tmp/clean.pgm --max-iters 8 --quiet";
    Cmd a = cli("denoise -o cli_tmp/d1" + flags);
    CHECK(a.code == 0);
    for (const char* k : {"iterations ", "best_iter ", "psnr ", "mssim ", "si ", "rel_change "})
        CHECK(a.out.find(k) != std::string::npos);

    for (const char* f : {"restored.pgm", "trace.csv", "summary.json", "resolved_config.json"})
        CHECK(fs::exists(fs::path("cli_tmp/d1") / f));

    auto summary = nlohmann::json::parse(read_file("cli_tmp/d1/summary.json"));
    CHECK(summary["model"] == "proposed");
    CHECK(summary["stop"]["mode"] == "best-psnr");  // reference implies psnr tracking
    CHECK(summary["run"]["metrics"]["psnr"].is_number());
    CHECK(summary["run"]["metrics"]["psnr"].get<double>() >
          summary["run"]["metrics"]["psnr_input"].get<double>());
    CHECK(summary["run"]["monitors"]["coeff_violations"] == 0);

    Cmd b = cli("denoise -o cli_tmp/d2" + flags);
    CHECK(b.code == 0);
    CHECK(b.out == a.out);
    CHECK(read_file("cli_tmp/d2/restored.pgm") == read_file("cli_tmp/d1/restored.pgm"));
    CHECK(read_file("cli_tmp/d2/trace.csv") == read_file("cli_tmp/d1/trace.csv"));
}

TEST_CASE("denoise: config file with flag overrides and contour export") {
    fx();
    std::ofstream("cli_tmp/run.json") << R"({
        "input": "cli_tmp/noisy.pgm",
        "output_dir": "cli_tmp/d3",
        "stop": {"mode": "max-iters", "max_iters": 6}
    })";
    Cmd a = cli("denoise --config cli_tmp/run.json --max-iters 3 --contour-stride 6 --quiet");
    CHECK(a.code == 0);
    CHECK(csv_data_rows("cli_tmp/d3/trace.csv") == 3);
    CHECK(csv_data_rows("cli_tmp/d3/contour.csv") == 16);  // 24/6 on both axes

    auto resolved = nlohmann::json::parse(read_file("cli_tmp/d3/resolved_config.json"));
    CHECK(resolved["stop"]["mode"] == "max-iters");
    CHECK(resolved["stop"]["max_iters"] == 3);
    CHECK(resolved["contour_stride"] == 6);
}

TEST_CASE("denoise: stop mode defaults to relative-change without a reference") {
    fx();
    Cmd a = cli("denoise -i cli_tmp/noisy.pgm -o cli_tmp/d4 --max-iters 5 --quiet");
    CHECK(a.code == 0);
    auto resolved = nlohmann::json::parse(read_file("cli_tmp/d4/resolved_config.json"));
    CHECK(resolved["stop"]["mode"] == "relative-change");
    auto summary = nlohmann::json::parse(read_file("cli_tmp/d4/summary.json"));
    CHECK(summary["run"]["metrics"]["psnr"].is_null());
    CHECK(summary["run"]["metrics"]["si"].is_number());
}

TEST_CASE("denoise: color pipeline") {
    fx();
    Cmd a = cli("denoise -i cli_tmp/noisy.ppm --reference cli_tmp/clean.ppm -o cli_tmp/dc"
                " --stop-mode max-iters --max-iters 2 --quiet");
    CHECK(a.code == 0);
    for (const char* f : {"restored.ppm", "trace_0.csv", "trace_1.csv", "trace_2.csv",
                          "summary.json"})
        CHECK(fs::exists(fs::path("cli_tmp/dc") / f));
    auto summary = nlohmann::json::parse(read_file("cli_tmp/dc/summary.json"));
    CHECK(summary["aggregate"]["psnr"].is_number());
    CHECK(summary["channels"].size() == 3);

    Image restored = read_netpbm("cli_tmp/dc/restored.ppm");
    CHECK(restored.color());
    CHECK(restored.width == 16);
}

TEST_CASE("exit codes") {
    fx();
    CHECK(cli("denoise -i cli_tmp/nowhere.pgm -o cli_tmp/dx --quiet").code == 2);
    CHECK(cli("denoise --model bogus -i cli_tmp/noisy.pgm --quiet").code == 1);
    CHECK(cli("denoise --quiet").code == 1);  // neither --input nor --config
    CHECK(cli("").code == 1);                 // a subcommand is required
    CHECK(cli("--help").code == 0);
    CHECK(cli("denoise --preset nope -i cli_tmp/noisy.pgm --quiet").code == 1);

    std::ofstream("cli_tmp/bad.json") << R"({"input": "cli_tmp/noisy.pgm", "speed": 11})";
    CHECK(cli("denoise --config cli_tmp/bad.json --quiet").code == 1);

    // negative damping makes the implicit system lose positivity
    CHECK(cli("denoise -i cli_tmp/noisy.pgm -o cli_tmp/dz --gamma -10 --tau 1 --theta1 1e-9"
              " --stop-mode max-iters --max-iters 2 --quiet").code == 3);
}

TEST_CASE("bench subcommand") {
    fx();
    std::ofstream("cli_tmp/suite.json") << R"({
        "name": "smoke", "seed": 5, "repetitions": 2,
        "cells": [
            {"name": "cell-a", "image": "clean.pgm", "looks": 1,
             "stop": {"mode": "max-iters", "max_iters": 2}}
        ]
    })";
    Cmd a = cli("bench --suite cli_tmp/suite.json -o cli_tmp/bench");
    CHECK(a.code == 0);
    CHECK(a.out.find("cells 1 failures 0") != std::string::npos);
    CHECK(a.out.find("cell-a: psnr") != std::string::npos);

    std::string table = read_file("cli_tmp/bench/table.csv");
    CHECK(table.rfind("cell,reps,psnr_in,psnr,psnr_sd,mssim,mssim_sd,si_in,si,si_sd,iters,status",
                      0) == 0);
    CHECK(table.find("cell-a,2,") != std::string::npos);
    CHECK(table.find(",ok") != std::string::npos);
    for (const char* f : {"restored.pgm", "trace.csv", "summary.json"})
        CHECK(fs::exists(fs::path("cli_tmp/bench/cell-a") / f));

    std::ofstream("cli_tmp/suite_bad.json") << R"({
        "name": "broken", "repetitions": 1,
        "cells": [{"name": "gone", "image": "missing.pgm", "looks": 1,
                   "stop": {"mode": "max-iters", "max_iters": 1}}]
    })";
    Cmd b = cli("bench --suite cli_tmp/suite_bad.json -o cli_tmp/bench_bad");
    CHECK(b.code == 3);
    CHECK(read_file("cli_tmp/bench_bad/table.csv").find("failed") != std::string::npos);
}
