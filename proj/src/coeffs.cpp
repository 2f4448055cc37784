#include "despeckle/coeffs.hpp"

#include <cmath>
#include <stdexcept>

namespace despeckle {

Field grayscale_indicator(const Field& I_xi, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("grayscale_indicator: alpha must be >= 0");
    const double M = max_abs(I_xi);
    Field out(I_xi.rows, I_xi.cols);
    if (M == 0.0) return out;
    const double Ma = std::pow(M, alpha);
    for (size_t n = 0; n < out.size(); ++n) {
        double a = std::pow(std::fabs(I_xi.v[n]), alpha);
        out.v[n] = 2.0 * a / (a + Ma);
    }
    return out;
}

static Field edge_damping(const Field& u, double xi, double iota, double beta) {
    Field u_xi = gaussian_convolve(u, xi);
    Field out(u.rows, u.cols);
    for (size_t n = 0; n < out.size(); ++n)
        out.v[n] = 1.0 / (1.0 + iota * std::pow(std::fabs(u_xi.v[n]), beta));
    return out;
}

Field coeff_proposed(const Field& I, const Field& u, const CoeffParams& p) {
    if (!I.same_shape(u)) throw std::invalid_argument("coeff_proposed: shape mismatch");
    Field I_xi = gaussian_convolve(I, p.xi);
    Field g = grayscale_indicator(I_xi, p.alpha);
    Field damp = edge_damping(u, p.xi, p.iota, p.beta);
    for (size_t n = 0; n < g.size(); ++n) g.v[n] *= damp.v[n];
    return g;
}

Field coeff_tdfm(const Field& I, const CoeffParams& p) {
    if (p.k <= 0.0) throw std::invalid_argument("coeff_tdfm: k must be > 0");
    Field I_xi = gaussian_convolve(I, p.xi);
    Field g = grayscale_indicator(I_xi, p.alpha);
    Field lap = laplacian(I_xi);
    for (size_t n = 0; n < g.size(); ++n) {
        double r = lap.v[n] / p.k;
        g.v[n] /= 1.0 + r * r;
    }
    return g;
}

Field coeff_hpcpde(const Field& I, const Field& u, const CoeffParams& p) {
    if (!I.same_shape(u)) throw std::invalid_argument("coeff_hpcpde: shape mismatch");
    Field I_xi = gaussian_convolve(I, p.xi);
    Field s(I.rows, I.cols);
    const double M = max_abs(I_xi);
    if (M == 0.0) return s;  // all-zero image: coefficient defined as 0
    if (p.s_kind == HpcpdeSKind::scaled_modulus) {
        for (size_t n = 0; n < s.size(); ++n) s.v[n] = std::fabs(I_xi.v[n]) / M;
    } else {
        Field g2 = gradient_magnitude_sq(I_xi);
        for (size_t n = 0; n < s.size(); ++n) s.v[n] = std::sqrt(g2.v[n]);
    }
    Field damp = edge_damping(u, p.xi, p.iota, p.beta);
    Field out(I.rows, I.cols);
    for (size_t n = 0; n < out.size(); ++n)
        out.v[n] = damp.v[n] / (1.0 + std::pow(s.v[n], p.alpha));
    return out;
}

double edge_h(double s, double k_h, EdgeHKind kind) {
    if (k_h <= 0.0) throw std::invalid_argument("edge_h: k_h must be > 0");
    if (kind == EdgeHKind::rational) {
        double s2 = s * s;
        return s2 / (s2 + k_h * k_h);
    }
    return std::min(std::fabs(s) / k_h, 1.0);
}

Field edge_h_field(const Field& s, double k_h, EdgeHKind kind) {
    Field out(s.rows, s.cols);
    for (size_t n = 0; n < out.size(); ++n) out.v[n] = edge_h(s.v[n], k_h, kind);
    return out;
}

}  // namespace despeckle
