#pragma once

// Netpbm image I/O, strict JSON run configuration, and report writers.

#include <iosfwd>
#include <string>
#include <vector>

#include "despeckle/solver.hpp"

namespace despeckle {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One or three channels of double samples in [0, maxval].
struct Image {
    int width = 0;
    int height = 0;
    int maxval = 255;
    std::vector<Field> ch;

    bool color() const { return ch.size() == 3; }
};

// P2/P5 (gray) and P3/P6 (color), maxval up to 65535, header comments allowed.
Image read_netpbm(const std::string& path);

// Format chosen by channel count; binary P5/P6 by default. Samples are
// rounded half away from zero and clamped to [0, maxval].
void write_netpbm(const std::string& path, const Image& img, bool binary = true);

// Solver ingest scale: samples floored at 1.0 (keeps inf I > 0), then divided
// by maxval. All model dynamics run on this unit scale; metrics computed with
// SsimParams.range = 1 equal the conventional 255-scale values.
std::vector<Field> to_unit(const Image& img);

// Rescale unit-scale channels back to [0, maxval] for writing.
Image from_unit(const std::vector<Field>& ch, int maxval);

// Full run configuration with strict key checking (unknown keys are errors).
struct RunConfig {
    std::string input;
    std::string reference;       // optional
    std::string output_dir = "out";
    std::string preset;          // optional, resolved before explicit params
    int looks = 1;
    uint64_t seed = 1;
    ModelParams params;
    SchemeWeights weights;
    StopRule stop;
    bool stop_mode_explicit = false;  // stop.mode named in the config
    GsSettings gs;
    int contour_stride = 0;      // 0 = no contour export
};

RunConfig load_config(const std::string& path);
RunConfig parse_config_json(const std::string& text);  // same contract, from memory

// Resolved-config echo, deterministic key order.
std::string config_to_json(const RunConfig& cfg);

// trace.csv: iter,psnr_db,ssim,mssim_paper,rel_change,speckle_index,gs_sweeps,min_I,max_I
void write_trace_csv(std::ostream& os, const RunReport& rep);

// summary.json for one run (gray) or one per-channel set (color).
std::string summary_to_json(const RunConfig& cfg, const RunReport& rep);
std::string color_summary_to_json(const RunConfig& cfg, const ColorResult& cr);

// x,y,value rows at the given stride (both axes), %.17g so a stride-1 export
// reconstructs the field exactly.
void export_contour_grid(const Field& f, int stride, std::ostream& os);

}  // namespace despeckle
