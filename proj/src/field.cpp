#include "despeckle/field.hpp"

#include <cmath>
#include <stdexcept>

namespace despeckle {

int reflect_index(int i, int n) {
    if (n < 1) throw std::invalid_argument("reflect_index: n must be >= 1");
    while (i < 0 || i >= n) {
        if (i < 0) i = -1 - i;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

GaussianKernel GaussianKernel::make(double sigma) {
    if (sigma < 0.0 || !std::isfinite(sigma))
        throw std::invalid_argument("GaussianKernel: sigma must be finite and >= 0");
    GaussianKernel k;
    k.sigma = sigma;
    if (sigma == 0.0) {
        k.taps = {1.0};
        return k;
    }
    const int r = int(std::ceil(3.0 * sigma));
    k.taps.resize(size_t(2 * r + 1));
    double sum = 0.0;
    for (int t = -r; t <= r; ++t) {
        double w = std::exp(-0.5 * double(t) * double(t) / (sigma * sigma));
        k.taps[size_t(t + r)] = w;
        sum += w;
    }
    for (double& w : k.taps) w /= sum;
    return k;
}

static void check_nonempty(const Field& f, const char* op) {
    if (f.rows < 1 || f.cols < 1) throw std::invalid_argument(std::string(op) + ": empty field");
}

Field laplacian(const Field& f) {
    check_nonempty(f, "laplacian");
    const int R = f.rows, C = f.cols;
    Field out(R, C);
    for (int i = 0; i < R; ++i) {
        for (int j = 0; j < C; ++j) {
            const double c = f(i, j);
            double acc = 0.0;
            if (j + 1 < C) acc += f(i, j + 1) - c;
            if (j - 1 >= 0) acc += f(i, j - 1) - c;
            if (i + 1 < R) acc += f(i + 1, j) - c;
            if (i - 1 >= 0) acc += f(i - 1, j) - c;
            out(i, j) = acc;
        }
    }
    return out;
}

Field gradient_magnitude_sq(const Field& f) {
    check_nonempty(f, "gradient_magnitude_sq");
    const int R = f.rows, C = f.cols;
    Field out(R, C);
    for (int i = 0; i < R; ++i) {
        for (int j = 0; j < C; ++j) {
            double gx = 0.5 * (f(i, reflect_index(j + 1, C)) - f(i, reflect_index(j - 1, C)));
            double gy = 0.5 * (f(reflect_index(i + 1, R), j) - f(reflect_index(i - 1, R), j));
            out(i, j) = gx * gx + gy * gy;
        }
    }
    return out;
}

Field divergence_flux(const Field& c, const Field& f) {
    check_nonempty(f, "divergence_flux");
    if (!c.same_shape(f)) throw std::invalid_argument("divergence_flux: shape mismatch");
    const int R = f.rows, C = f.cols;
    Field out(R, C);
    for (int i = 0; i < R; ++i) {
        for (int j = 0; j < C; ++j) {
            const double fc = f(i, j), cc = c(i, j);
            double acc = 0.0;
            if (j + 1 < C) acc += 0.5 * (cc + c(i, j + 1)) * (f(i, j + 1) - fc);
            if (j - 1 >= 0) acc += 0.5 * (cc + c(i, j - 1)) * (f(i, j - 1) - fc);
            if (i + 1 < R) acc += 0.5 * (cc + c(i + 1, j)) * (f(i + 1, j) - fc);
            if (i - 1 >= 0) acc += 0.5 * (cc + c(i - 1, j)) * (f(i - 1, j) - fc);
            out(i, j) = acc;
        }
    }
    return out;
}

Field gaussian_convolve(const Field& f, double sigma) {
    check_nonempty(f, "gaussian_convolve");
    if (sigma == 0.0) return f;
    const GaussianKernel k = GaussianKernel::make(sigma);
    const int r = k.radius();
    const int R = f.rows, C = f.cols;

    Field tmp(R, C);
    for (int i = 0; i < R; ++i) {
        for (int j = 0; j < C; ++j) {
            double acc = 0.0;
            for (int t = -r; t <= r; ++t)
                acc += k.taps[size_t(t + r)] * f(i, reflect_index(j + t, C));
            tmp(i, j) = acc;
        }
    }
    Field out(R, C);
    for (int i = 0; i < R; ++i) {
        for (int j = 0; j < C; ++j) {
            double acc = 0.0;
            for (int t = -r; t <= r; ++t)
                acc += k.taps[size_t(t + r)] * tmp(reflect_index(i + t, R), j);
            out(i, j) = acc;
        }
    }
    return out;
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::fabs(x));
    return m;
}

double min_value(const Field& f) {
    check_nonempty(f, "min_value");
    double m = f.v[0];
    for (double x : f.v) m = std::min(m, x);
    return m;
}

double max_value(const Field& f) {
    check_nonempty(f, "max_value");
    double m = f.v[0];
    for (double x : f.v) m = std::max(m, x);
    return m;
}

}  // namespace despeckle
