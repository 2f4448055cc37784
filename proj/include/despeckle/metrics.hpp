#pragma once

// Quality metrics. PSNR peaks on the reference maximum; SSIM uses the
// standard 11x11 Gaussian window (sigma 1.5) with reflected borders.

#include <limits>
#include <vector>

#include "despeckle/field.hpp"

namespace despeckle {

struct SsimParams {
    double sigma = 1.5;
    int radius = 5;          // 11x11 window
    double k1 = 0.01;
    double k2 = 0.03;
    double range = 255.0;    // dynamic range R; c1=(k1*R)^2, c2=(k2*R)^2
};

// 10*log10(max(ref)^2 / MSE); +infinity when MSE == 0.
double psnr(const Field& ref, const Field& test);

// Joint PSNR across channels: one peak, one MSE over all samples.
double psnr_multi(const std::vector<Field>& ref, const std::vector<Field>& test);

Field ssim_map(const Field& ref, const Field& test, const SsimParams& p = {});
double ssim(const Field& ref, const Field& test, const SsimParams& p = {});

// Mean of per-iteration mean-SSIM values (iteration-averaged MSSIM mode).
double mssim_paper(const std::vector<double>& ssim_trace);

// Population standard deviation / mean. Mean must be nonzero.
double speckle_index(const Field& f);
double speckle_index_multi(const std::vector<Field>& ch);

// ||cur - prev||_2^2 / ||prev||_2^2; 0 if both vanish.
double relative_change(const Field& cur, const Field& prev);

inline double psnr_infinity() { return std::numeric_limits<double>::infinity(); }

}  // namespace despeckle
