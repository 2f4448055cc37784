#pragma once

// Three-level weighted time scheme for the hyperbolic intensity equation,
// theta scheme for the parabolic edge equation, and the full run drivers.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "despeckle/coeffs.hpp"
#include "despeckle/field.hpp"
#include "despeckle/gauss_seidel.hpp"
#include "despeckle/metrics.hpp"

namespace despeckle {

enum class ModelKind { proposed, tdfm, hpcpde };

const char* model_name(ModelKind m);
ModelKind parse_model(const std::string& name);

struct ModelParams {
    ModelKind model = ModelKind::proposed;
    double alpha = 1.0;
    double beta = 10.0;
    double gamma = 1.0;   // damping
    double lambda = 0.1;  // fidelity weight
    double iota = 1.0;
    double nu = 1.0;      // edge diffusion scale
    double xi = 1.0;      // Gaussian smoothing scale
    double k = 1.0;       // TDFM Laplacian gate
    double k_h = 1.0;     // edge source gate
    EdgeHKind h_kind = EdgeHKind::rational;
    HpcpdeSKind s_kind = HpcpdeSKind::scaled_modulus;
    bool signed_fidelity = false;  // sign(I-J)*(I-J)^2 variant, off by default

    CoeffParams coeff() const {
        return CoeffParams{alpha, beta, iota, xi, k, k_h, s_kind};
    }
};

struct SchemeWeights {
    double tau = 0.25;
    double theta1 = 0.25;  // implicit share of the intensity force
    double theta2 = 0.25;  // level n-1 share
    double theta = 0.5;    // edge equation
};

struct GsSettings {
    double tol = 1e-6;
    int max_sweeps = 200;
};

enum class StopMode { best_psnr, relative_change, max_iters };

StopMode parse_stop_mode(const std::string& name);
const char* stop_mode_name(StopMode m);

struct StopRule {
    StopMode mode = StopMode::best_psnr;
    double epsilon = 1e-4;
    int patience = 3;
    int max_iters = 500;
};

// Diffusion coefficient of the given model at the current state.
Field coeff_field(const ModelParams& p, const Field& I, const Field& u);

// Full force F at one time level, reusing an already computed coefficient.
Field force_from_coeff(const ModelParams& p, const Field& coeff, const Field& I, const Field& J);

// Convenience form matching the model definition (computes the coefficient).
Field rhs_force(const ModelParams& p, const Field& I, const Field& u, const Field& J);

struct StepResult {
    Field next;
    GsResult gs;
};

// One intensity step of
//   (1 + gamma*tau/2) I' - tau^2*theta1*F_lin(I')
//     = 2 I - (1 - gamma*tau/2) I_prev + tau^2 ((1-theta1-theta2) F + theta2 F_prev)
// where F_lin freezes the coefficient at level n. theta1 == 0 skips the solve.
StepResult step_intensity(const ModelParams& p, const SchemeWeights& w,
                          const Field& I, const Field& I_prev,
                          const Field& F, const Field& F_prev,
                          const Field& coeff, const GsSettings& gs);

// One edge step of (1+tau*theta) u' - (nu^2/2)tau*theta lap u'
//   = (1 - tau(1-theta)) u + (nu^2/2)tau(1-theta) lap u + tau*source.
StepResult step_edge(const SchemeWeights& w, double nu,
                     const Field& u, const Field& source, const GsSettings& gs);

struct IterationStats {
    int iter = 0;
    double psnr_db = 0.0;       // NaN when no reference
    double ssim = 0.0;          // NaN when no reference
    double mssim_paper = 0.0;   // running mean of ssim, NaN when no reference
    double rel_change = 0.0;
    double speckle_index = 0.0;
    int gs_sweeps = 0;
    double min_I = 0.0;
    double max_I = 0.0;
};

struct RunMonitors {
    double coeff_min = 0.0, coeff_max = 0.0;
    long coeff_violations = 0;       // cells outside [0,1], over the whole run
    double run_min_I = 0.0, run_max_I = 0.0;
    double bound_lo = 0.0, bound_hi = 0.0;  // max-principle band from the input
    int max_principle_violations = 0;       // iterations breaching the band
    int gs_nonconverged = 0;
    long gs_total_sweeps = 0;
};

struct RunReport {
    std::vector<IterationStats> trace;
    int iterations = 0;
    int best_iter = 0;          // 0 = input
    bool has_reference = false;
    double psnr_input = 0.0, si_input = 0.0;
    double psnr = 0.0;          // of the returned field (NaN without reference)
    double ssim_final = 0.0;    // windowed MSSIM of the returned field
    double mssim_paper = 0.0;   // iteration-averaged MSSIM over the run
    double si = 0.0;
    double rel_change_final = 0.0;
    RunMonitors monitors;
};

struct RunResult {
    Field restored;
    RunReport report;
};

using ProgressFn = std::function<void(const IterationStats&)>;

// Runs one model on one channel. reference enables PSNR/SSIM tracking and is
// required by best-psnr stopping. Aborts with SolverError on non-finite
// iterates. Fields may be on any consistent intensity scale; ssim_p.range
// must match that scale.
RunResult run_model(const Field& noisy, const Field* reference,
                    const ModelParams& p, const SchemeWeights& w,
                    const StopRule& stop, const GsSettings& gs,
                    const SsimParams& ssim_p, const ProgressFn& progress = nullptr);

struct ColorSummary {
    double psnr = 0.0;        // joint over channels
    double ssim_final = 0.0;  // mean of per-channel windowed MSSIM
    double mssim_paper = 0.0;
    double si = 0.0;          // over all channels jointly
    double psnr_input = 0.0, si_input = 0.0;
};

struct ColorResult {
    std::vector<Field> restored;
    std::vector<RunReport> channels;
    ColorSummary summary;
};

// Independent per-channel runs with shared parameters.
ColorResult run_color(const std::vector<Field>& noisy, const std::vector<Field>* reference,
                      const ModelParams& p, const SchemeWeights& w,
                      const StopRule& stop, const GsSettings& gs,
                      const SsimParams& ssim_p, const ProgressFn& progress = nullptr);

}  // namespace despeckle
