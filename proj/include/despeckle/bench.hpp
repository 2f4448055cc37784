#pragma once

// Benchmark suites: grids of (image, model, looks) cells, each run over
// several noise seeds, with per-cell artifacts and an aggregate CSV table.

#include <iosfwd>
#include <string>
#include <vector>

#include "despeckle/io.hpp"
#include "despeckle/solver.hpp"

namespace despeckle {

struct BenchCell {
    std::string name;        // directory-safe cell id
    std::string image;       // clean input (or pre-speckled scene when looks == 0)
    std::string preset;      // optional
    ModelParams params;
    int looks = 1;           // 0 = image is already speckled; no synthetic noise
    SchemeWeights weights;
    StopRule stop;
    GsSettings gs;
};

struct BenchSuite {
    std::string name = "suite";
    uint64_t seed = 1;
    int repetitions = 5;
    std::vector<BenchCell> cells;
};

BenchSuite load_suite(const std::string& path);

struct CellOutcome {
    std::string name;
    bool failed = false;
    std::string error;
    int reps = 0;
    double psnr_in_mean = 0.0;
    double psnr_mean = 0.0, psnr_sd = 0.0;
    double mssim_mean = 0.0, mssim_sd = 0.0;
    double si_in_mean = 0.0;
    double si_mean = 0.0, si_sd = 0.0;
    double iters_mean = 0.0;
};

struct BenchResult {
    std::vector<CellOutcome> cells;
    int failures = 0;
};

// Runs the whole suite. Per cell: <out_dir>/<cell>/restored.(pgm|ppm),
// trace.csv, summary.json (first repetition's run artifacts, metrics across
// all repetitions); plus <out_dir>/table.csv. `log` gets one line per cell.
BenchResult run_bench(const BenchSuite& suite, const std::string& out_dir, std::ostream& log);

void write_bench_table(std::ostream& os, const BenchResult& res);

}  // namespace despeckle
