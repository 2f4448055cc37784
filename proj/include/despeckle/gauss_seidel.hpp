#pragma once

// Pointwise Gauss-Seidel for the frozen-coefficient implicit systems.
// An operator exposes apply_at (one output cell, reads the current iterate)
// and diag_at (coefficient of the center cell); sweeps are lexicographic and
// in place, so the solve is deterministic.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "despeckle/field.hpp"

namespace despeckle {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GsResult {
    int sweeps = 0;
    double final_residual = 0.0;
    bool converged = true;
    std::vector<double> residuals;  // max-norm residual after each sweep
};

// A v = a*v - s*lap(v).
struct HelmholtzOp {
    int rows, cols;
    double a, s;

    double lap_at(const Field& x, int i, int j) const {
        const double c = x(i, j);
        double acc = 0.0;
        if (j + 1 < cols) acc += x(i, j + 1) - c;
        if (j - 1 >= 0) acc += x(i, j - 1) - c;
        if (i + 1 < rows) acc += x(i + 1, j) - c;
        if (i - 1 >= 0) acc += x(i - 1, j) - c;
        return acc;
    }
    double apply_at(const Field& x, int i, int j) const {
        return a * x(i, j) - s * lap_at(x, i, j);
    }
    double diag_at(int i, int j) const {
        int nb = (j + 1 < cols) + (j - 1 >= 0) + (i + 1 < rows) + (i - 1 >= 0);
        return a + s * double(nb);
    }
};

// A v = a*v - s*div(c grad v), half-point face coefficients, zero normal flux.
struct DivFluxOp {
    const Field* c;
    double a, s;

    double apply_at(const Field& x, int i, int j) const {
        const Field& cf = *c;
        const int R = x.rows, C = x.cols;
        const double xc = x(i, j), cc = cf(i, j);
        double acc = 0.0;
        if (j + 1 < C) acc += 0.5 * (cc + cf(i, j + 1)) * (x(i, j + 1) - xc);
        if (j - 1 >= 0) acc += 0.5 * (cc + cf(i, j - 1)) * (x(i, j - 1) - xc);
        if (i + 1 < R) acc += 0.5 * (cc + cf(i + 1, j)) * (x(i + 1, j) - xc);
        if (i - 1 >= 0) acc += 0.5 * (cc + cf(i - 1, j)) * (x(i - 1, j) - xc);
        return a * xc - s * acc;
    }
    double diag_at(int i, int j) const {
        const Field& cf = *c;
        const int R = cf.rows, C = cf.cols;
        const double cc = cf(i, j);
        double faces = 0.0;
        if (j + 1 < C) faces += 0.5 * (cc + cf(i, j + 1));
        if (j - 1 >= 0) faces += 0.5 * (cc + cf(i, j - 1));
        if (i + 1 < R) faces += 0.5 * (cc + cf(i + 1, j));
        if (i - 1 >= 0) faces += 0.5 * (cc + cf(i - 1, j));
        return a + s * faces;
    }
};

// A v = a*v + s*lap(D lap v): the 13-point fourth-order stencil with frozen D.
struct BiLaplacianOp {
    const Field* D;
    double a, s;

    double lap_at(const Field& x, int i, int j) const {
        const int R = x.rows, C = x.cols;
        const double c = x(i, j);
        double acc = 0.0;
        if (j + 1 < C) acc += x(i, j + 1) - c;
        if (j - 1 >= 0) acc += x(i, j - 1) - c;
        if (i + 1 < R) acc += x(i + 1, j) - c;
        if (i - 1 >= 0) acc += x(i - 1, j) - c;
        return acc;
    }
    double apply_at(const Field& x, int i, int j) const {
        const Field& Df = *D;
        const int R = x.rows, C = x.cols;
        const double center = Df(i, j) * lap_at(x, i, j);
        double acc = 0.0;
        if (j + 1 < C) acc += Df(i, j + 1) * lap_at(x, i, j + 1) - center;
        if (j - 1 >= 0) acc += Df(i, j - 1) * lap_at(x, i, j - 1) - center;
        if (i + 1 < R) acc += Df(i + 1, j) * lap_at(x, i + 1, j) - center;
        if (i - 1 >= 0) acc += Df(i - 1, j) * lap_at(x, i - 1, j) - center;
        return a * x(i, j) + s * acc;
    }
    double diag_at(int i, int j) const {
        const Field& Df = *D;
        const int R = Df.rows, C = Df.cols;
        double nb_sum = 0.0;
        int nb = 0;
        if (j + 1 < C) { nb_sum += Df(i, j + 1); ++nb; }
        if (j - 1 >= 0) { nb_sum += Df(i, j - 1); ++nb; }
        if (i + 1 < R) { nb_sum += Df(i + 1, j); ++nb; }
        if (i - 1 >= 0) { nb_sum += Df(i - 1, j); ++nb; }
        double d = double(nb);  // -d is the center weight of the Laplacian
        return a + s * (Df(i, j) * d * d + nb_sum);
    }
};

template <class Op>
Field apply_operator(const Op& op, const Field& x) {
    Field out(x.rows, x.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j)
            out(i, j) = op.apply_at(x, i, j);
    return out;
}

// Solves op(x) = rhs in place. Terminates when the max-norm residual drops
// to tol * (1 + ||rhs||_inf); sets converged = false after max_sweeps.
template <class Op>
GsResult gauss_seidel(const Op& op, const Field& rhs, Field& x, double tol, int max_sweeps) {
    if (!rhs.same_shape(x)) throw std::invalid_argument("gauss_seidel: shape mismatch");
    if (max_sweeps < 1) throw std::invalid_argument("gauss_seidel: max_sweeps must be >= 1");
    const int R = x.rows, C = x.cols;
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j)
            if (!(op.diag_at(i, j) > 0.0))
                throw SolverError("gauss_seidel: non-positive diagonal at (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")");

    const double target = tol * (1.0 + max_abs(rhs));
    GsResult res;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < C; ++j)
                x(i, j) += (rhs(i, j) - op.apply_at(x, i, j)) / op.diag_at(i, j);
        double r = 0.0;
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < C; ++j)
                r = std::max(r, std::fabs(rhs(i, j) - op.apply_at(x, i, j)));
        res.residuals.push_back(r);
        res.sweeps = sweep;
        res.final_residual = r;
        if (r <= target) return res;
    }
    res.converged = false;
    return res;
}

}  // namespace despeckle
