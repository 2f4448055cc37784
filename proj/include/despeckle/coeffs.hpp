#pragma once

// Diffusion coefficients for the three models. All operate on pre-smoothed
// quantities internally (Gaussian scale xi) and stay within [0, 1].

#include "despeckle/field.hpp"

namespace despeckle {

enum class EdgeHKind {
    rational,   // h(s) = s^2 / (s^2 + k_h^2)
    clipped,    // h(s) = min(|s| / k_h, 1)
};

enum class HpcpdeSKind {
    scaled_modulus,     // s = |I_xi| / M_xi
    gradient_modulus,   // s = |grad I_xi|
};

struct CoeffParams {
    double alpha = 1.0;
    double beta = 10.0;
    double iota = 1.0;
    double xi = 1.0;
    double k = 1.0;      // TDFM Laplacian gate
    double k_h = 1.0;    // edge source gate
    HpcpdeSKind s_kind = HpcpdeSKind::scaled_modulus;
};

// 2|I_xi|^a / (|I_xi|^a + M^a) with M = max_abs(I_xi); all zeros when M == 0.
Field grayscale_indicator(const Field& I_xi, double alpha);

// Proposed model: grayscale indicator damped by the edge variable,
// D = g(I_xi) / (1 + iota*|u_xi|^beta).
Field coeff_proposed(const Field& I, const Field& u, const CoeffParams& p);

// TDFM: grayscale indicator gated by the smoothed Laplacian,
// C = g(I_xi) / (1 + (|lap I_xi|/k)^2).
Field coeff_tdfm(const Field& I, const CoeffParams& p);

// HPCPDE second-order diffusivity, c = 1 / ((1 + s^alpha)(1 + iota*|u_xi|^beta)).
Field coeff_hpcpde(const Field& I, const Field& u, const CoeffParams& p);

double edge_h(double s, double k_h, EdgeHKind kind);
Field edge_h_field(const Field& s, double k_h, EdgeHKind kind);

}  // namespace despeckle
