#pragma once

// Dense 2D double grid plus the small set of stencil operators the solvers
// are built from. Unit spacing, reflective (zero normal flux) boundaries.

#include <cstddef>
#include <vector>

namespace despeckle {

struct Field {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Field() = default;
    Field(int r, int c, double fill = 0.0) : rows(r), cols(c), v(size_t(r) * size_t(c), fill) {}

    double& operator()(int i, int j) { return v[size_t(i) * cols + j]; }
    double operator()(int i, int j) const { return v[size_t(i) * cols + j]; }

    size_t size() const { return v.size(); }
    bool same_shape(const Field& o) const { return rows == o.rows && cols == o.cols; }
};

// Half-sample mirror: -1 -> 0, n -> n-1, -2 -> 1, ... Folds repeatedly for
// offsets beyond one width, so any integer maps into [0, n).
int reflect_index(int i, int n);

// 1D Gaussian taps, radius = ceil(3*sigma), normalized to sum 1.
struct GaussianKernel {
    double sigma = 0.0;
    std::vector<double> taps;  // taps[radius + k] for k in [-radius, radius]

    int radius() const { return int(taps.size() / 2); }
    static GaussianKernel make(double sigma);
};

// 5-point Laplacian. Accumulates the four face differences in E,W,N,S order;
// a reflected face contributes exactly zero.
Field laplacian(const Field& f);

// |grad f|^2 from central differences (reflected at the borders).
Field gradient_magnitude_sq(const Field& f);

// div(c grad f) in conservative form: half-point coefficients (c_a+c_b)/2 on
// interior faces, zero flux through the boundary. With c == 1 this reproduces
// laplacian() bitwise (same accumulation order).
Field divergence_flux(const Field& c, const Field& f);

// Separable Gaussian smoothing with mirror reflection; sigma == 0 is identity.
Field gaussian_convolve(const Field& f, double sigma);

double max_abs(const Field& f);
double min_value(const Field& f);
double max_value(const Field& f);

}  // namespace despeckle
