#include "despeckle/speckle.hpp"

#include <cmath>
#include <stdexcept>

namespace despeckle {

uint64_t mix64(uint64_t seed, uint64_t counter) {
    uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform_open(uint64_t seed, uint64_t counter) {
    // 53-bit mantissa, shifted to the cell centers of (0,1): never 0, never 1.
    return (double(mix64(seed, counter) >> 11) + 0.5) * 0x1.0p-53;
}

double sample_gamma_looks(uint64_t seed, uint64_t cell, int looks) {
    double acc = 0.0;
    for (int m = 0; m < looks; ++m)
        acc += -std::log(uniform_open(seed, cell * uint64_t(looks) + uint64_t(m)));
    return acc / double(looks);
}

Field sample_speckle_field(int rows, int cols, const SpeckleSpec& spec) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("sample_speckle_field: empty shape");
    if (spec.looks < 1) throw std::invalid_argument("sample_speckle_field: looks must be >= 1");
    Field out(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            out(i, j) = sample_gamma_looks(spec.seed, uint64_t(i) * uint64_t(cols) + uint64_t(j), spec.looks);
    return out;
}

Field apply_noise(const Field& clean, const SpeckleSpec& spec) {
    Field eta = sample_speckle_field(clean.rows, clean.cols, spec);
    Field out(clean.rows, clean.cols);
    for (size_t n = 0; n < clean.size(); ++n) {
        if (clean.v[n] < 0.0) throw std::invalid_argument("apply_noise: negative intensity");
        out.v[n] = clean.v[n] * eta.v[n];
    }
    return out;
}

uint64_t channel_seed(uint64_t seed, int channel) {
    return mix64(seed ^ 0x636F6C6F72ULL, uint64_t(channel));  // "color"
}

}  // namespace despeckle
