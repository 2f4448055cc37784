#pragma once

// Multiplicative speckle: eta ~ Gamma(shape L, mean 1), sampled per cell from
// a counter-based SplitMix64 stream so any cell can be generated independently
// of order. Identical (seed, looks, shape) always yields identical fields.

#include <cstdint>

#include "despeckle/field.hpp"

namespace despeckle {

struct SpeckleSpec {
    int looks = 1;         // number of looks L >= 1
    uint64_t seed = 1;
};

// SplitMix64 finalizer over seed and a 64-bit counter; the whole suite's
// only source of randomness.
uint64_t mix64(uint64_t seed, uint64_t counter);

// Uniform draw on the open interval (0,1) from mix64(seed, counter).
double uniform_open(uint64_t seed, uint64_t counter);

// One Gamma(L, 1/L) variate: mean over L unit exponentials.
double sample_gamma_looks(uint64_t seed, uint64_t cell, int looks);

// rows x cols field of i.i.d. Gamma(L, 1/L) noise (mean 1, variance 1/L).
Field sample_speckle_field(int rows, int cols, const SpeckleSpec& spec);

// clean .* noise, cellwise. clean must be nonnegative.
Field apply_noise(const Field& clean, const SpeckleSpec& spec);

// Decorrelated per-channel seed for color pipelines.
uint64_t channel_seed(uint64_t seed, int channel);

}  // namespace despeckle
