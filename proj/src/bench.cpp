#include "despeckle/bench.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "despeckle/speckle.hpp"

namespace despeckle {

using json = nlohmann::json;

BenchSuite load_suite(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("suite is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("suite root must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "name" && it.key() != "seed" && it.key() != "repetitions" &&
            it.key() != "cells")
            throw ConfigError("unknown suite key '" + it.key() + "'");

    BenchSuite suite;
    if (j.contains("name")) j.at("name").get_to(suite.name);
    if (j.contains("seed")) j.at("seed").get_to(suite.seed);
    if (j.contains("repetitions")) j.at("repetitions").get_to(suite.repetitions);
    if (suite.repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (!j.contains("cells") || !j.at("cells").is_array() || j.at("cells").empty())
        throw ConfigError("suite needs a non-empty 'cells' array");

    const auto base = std::filesystem::path(path).parent_path();
    for (const json& c : j.at("cells")) {
        if (!c.is_object()) throw ConfigError("cell entries must be objects");
        for (auto it = c.begin(); it != c.end(); ++it) {
            const std::string& k = it.key();
            if (k != "name" && k != "image" && k != "model" && k != "preset" && k != "looks" &&
                k != "params" && k != "weights" && k != "stop" && k != "gauss_seidel")
                throw ConfigError("unknown cell key '" + k + "'");
        }
        if (!c.contains("name") || !c.contains("image"))
            throw ConfigError("cells need 'name' and 'image'");

        // Route the shared keys through the strict run-config parser.
        json sub = c;
        sub.erase("name");
        sub.erase("image");
        bool explicit_looks = sub.contains("looks");
        int looks_raw = explicit_looks ? sub.at("looks").get<int>() : -1;
        sub.erase("looks");
        sub["input"] = c.at("image").get<std::string>();
        RunConfig rc = parse_config_json(sub.dump());

        BenchCell cell;
        cell.name = c.at("name").get<std::string>();
        if (cell.name.empty() || cell.name.find('/') != std::string::npos)
            throw ConfigError("cell name must be non-empty and slash-free");
        cell.image = (base / rc.input).string();
        cell.preset = rc.preset;
        cell.params = rc.params;
        cell.weights = rc.weights;
        cell.stop = rc.stop;
        cell.gs = rc.gs;
        cell.looks = explicit_looks ? looks_raw : rc.looks;
        if (cell.looks < 0) throw ConfigError("cell looks must be >= 0");
        // Pre-speckled scenes have no reference; stop on relative change.
        if (cell.looks == 0 && !rc.stop_mode_explicit) cell.stop.mode = StopMode::relative_change;
        for (const BenchCell& prev : suite.cells)
            if (prev.name == cell.name) throw ConfigError("duplicate cell name '" + cell.name + "'");
        suite.cells.push_back(std::move(cell));
    }
    return suite;
}

namespace {

struct Accum {
    std::vector<double> xs;
    void add(double x) { xs.push_back(x); }
    double mean() const {
        if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
        double a = 0.0;
        for (double x : xs) a += x;
        return a / double(xs.size());
    }
    double sd() const {
        if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
        if (xs.size() < 2) return 0.0;
        double m = mean(), a = 0.0;
        for (double x : xs) a += (x - m) * (x - m);
        return std::sqrt(a / double(xs.size() - 1));
    }
};

}  // namespace

BenchResult run_bench(const BenchSuite& suite, const std::string& out_dir, std::ostream& log) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    BenchResult result;
    for (const BenchCell& cell : suite.cells) {
        CellOutcome out;
        out.name = cell.name;
        try {
            const Image img = read_netpbm(cell.image);
            const std::vector<Field> base = to_unit(img);
            const bool color = img.color();
            const SsimParams sp{1.5, 5, 0.01, 0.03, 1.0};

            Accum psnr_in, psnr_a, mssim_a, si_in, si_a, iters_a;
            const fs::path cell_dir = fs::path(out_dir) / cell.name;
            fs::create_directories(cell_dir);

            for (int rep = 0; rep < suite.repetitions; ++rep) {
                const uint64_t rep_seed = suite.seed + uint64_t(rep);
                std::vector<Field> noisy;
                const std::vector<Field>* ref = nullptr;
                if (cell.looks >= 1) {
                    for (size_t c = 0; c < base.size(); ++c) {
                        uint64_t s = color ? channel_seed(rep_seed, int(c)) : rep_seed;
                        noisy.push_back(apply_noise(base[c], SpeckleSpec{cell.looks, s}));
                    }
                    ref = &base;
                } else {
                    noisy = base;
                }

                if (color) {
                    ColorResult cr = run_color(noisy, ref, cell.params, cell.weights,
                                               cell.stop, cell.gs, sp);
                    if (ref) {
                        psnr_in.add(cr.summary.psnr_input);
                        psnr_a.add(cr.summary.psnr);
                        mssim_a.add(cr.summary.ssim_final);
                    }
                    si_in.add(cr.summary.si_input);
                    si_a.add(cr.summary.si);
                    double it = 0.0;
                    for (const RunReport& r : cr.channels) it += r.iterations;
                    iters_a.add(it / double(cr.channels.size()));
                    if (rep == 0) {
                        write_netpbm((cell_dir / "restored.ppm").string(),
                                     from_unit(cr.restored, img.maxval));
                        for (size_t c = 0; c < cr.channels.size(); ++c) {
                            std::ofstream tr(cell_dir / ("trace_" + std::to_string(c) + ".csv"));
                            write_trace_csv(tr, cr.channels[c]);
                        }
                        RunConfig echo;
                        echo.input = cell.image;
                        echo.preset = cell.preset;
                        echo.looks = cell.looks;
                        echo.seed = rep_seed;
                        echo.params = cell.params;
                        echo.weights = cell.weights;
                        echo.stop = cell.stop;
                        echo.gs = cell.gs;
                        echo.output_dir = cell_dir.string();
                        std::ofstream js(cell_dir / "summary.json");
                        js << color_summary_to_json(echo, cr);
                    }
                } else {
                    RunResult rr = run_model(noisy[0], ref ? &(*ref)[0] : nullptr, cell.params,
                                             cell.weights, cell.stop, cell.gs, sp);
                    if (ref) {
                        psnr_in.add(rr.report.psnr_input);
                        psnr_a.add(rr.report.psnr);
                        mssim_a.add(rr.report.ssim_final);
                    }
                    si_in.add(rr.report.si_input);
                    si_a.add(rr.report.si);
                    iters_a.add(double(rr.report.iterations));
                    if (rep == 0) {
                        write_netpbm((cell_dir / "restored.pgm").string(),
                                     from_unit({rr.restored}, img.maxval));
                        std::ofstream tr(cell_dir / "trace.csv");
                        write_trace_csv(tr, rr.report);
                        RunConfig echo;
                        echo.input = cell.image;
                        echo.preset = cell.preset;
                        echo.looks = cell.looks;
                        echo.seed = rep_seed;
                        echo.params = cell.params;
                        echo.weights = cell.weights;
                        echo.stop = cell.stop;
                        echo.gs = cell.gs;
                        echo.output_dir = cell_dir.string();
                        std::ofstream js(cell_dir / "summary.json");
                        js << summary_to_json(echo, rr.report);
                    }
                }
                ++out.reps;
            }
            out.psnr_in_mean = psnr_in.mean();
            out.psnr_mean = psnr_a.mean();
            out.psnr_sd = psnr_a.sd();
            out.mssim_mean = mssim_a.mean();
            out.mssim_sd = mssim_a.sd();
            out.si_in_mean = si_in.mean();
            out.si_mean = si_a.mean();
            out.si_sd = si_a.sd();
            out.iters_mean = iters_a.mean();
            log << cell.name << ": psnr " << out.psnr_in_mean << " -> " << out.psnr_mean
                << "  mssim " << out.mssim_mean << "  si " << out.si_in_mean << " -> "
                << out.si_mean << "  iters " << out.iters_mean << "\n";
        } catch (const std::exception& e) {
            out.failed = true;
            out.error = e.what();
            ++result.failures;
            log << cell.name << ": FAILED: " << e.what() << "\n";
        }
        result.cells.push_back(std::move(out));

        // Keep the table current even if a later cell fails.
        std::ofstream tbl(fs::path(out_dir) / "table.csv");
        write_bench_table(tbl, result);
    }
    return result;
}

static void num(std::ostream& os, double x) {
    if (std::isnan(x)) return;
    if (std::isinf(x)) {
        os << (x > 0 ? "inf" : "-inf");
        return;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    os << buf;
}

void write_bench_table(std::ostream& os, const BenchResult& res) {
    os << "cell,reps,psnr_in,psnr,psnr_sd,mssim,mssim_sd,si_in,si,si_sd,iters,status\n";
    for (const CellOutcome& c : res.cells) {
        os << c.name << ',' << c.reps << ',';
        num(os, c.psnr_in_mean);
        os << ',';
        num(os, c.psnr_mean);
        os << ',';
        num(os, c.psnr_sd);
        os << ',';
        num(os, c.mssim_mean);
        os << ',';
        num(os, c.mssim_sd);
        os << ',';
        num(os, c.si_in_mean);
        os << ',';
        num(os, c.si_mean);
        os << ',';
        num(os, c.si_sd);
        os << ',';
        num(os, c.iters_mean);
        std::string status = c.failed ? "failed: " + c.error : "ok";
        for (char& ch : status)
            if (ch == ',' || ch == '\n') ch = ';';
        os << ',' << status << '\n';
    }
}

}  // namespace despeckle
