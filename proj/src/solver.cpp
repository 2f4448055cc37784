#include "despeckle/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace despeckle {

const char* model_name(ModelKind m) {
    switch (m) {
        case ModelKind::proposed: return "proposed";
        case ModelKind::tdfm: return "tdfm";
        case ModelKind::hpcpde: return "hpcpde";
    }
    return "?";
}

ModelKind parse_model(const std::string& name) {
    if (name == "proposed") return ModelKind::proposed;
    if (name == "tdfm") return ModelKind::tdfm;
    if (name == "hpcpde") return ModelKind::hpcpde;
    throw std::invalid_argument("unknown model: " + name);
}

StopMode parse_stop_mode(const std::string& name) {
    if (name == "best-psnr") return StopMode::best_psnr;
    if (name == "relative-change") return StopMode::relative_change;
    if (name == "max-iters") return StopMode::max_iters;
    throw std::invalid_argument("unknown stop mode: " + name);
}

const char* stop_mode_name(StopMode m) {
    switch (m) {
        case StopMode::best_psnr: return "best-psnr";
        case StopMode::relative_change: return "relative-change";
        case StopMode::max_iters: return "max-iters";
    }
    return "?";
}

Field coeff_field(const ModelParams& p, const Field& I, const Field& u) {
    switch (p.model) {
        case ModelKind::proposed: return coeff_proposed(I, u, p.coeff());
        case ModelKind::tdfm: return coeff_tdfm(I, p.coeff());
        case ModelKind::hpcpde: return coeff_hpcpde(I, u, p.coeff());
    }
    throw std::invalid_argument("coeff_field: bad model");
}

Field force_from_coeff(const ModelParams& p, const Field& coeff, const Field& I, const Field& J) {
    if (p.model == ModelKind::hpcpde) return divergence_flux(coeff, I);

    Field w = laplacian(I);
    for (size_t n = 0; n < w.size(); ++n) w.v[n] *= coeff.v[n];
    Field F = laplacian(w);
    const double eps_div = 1e-3 * max_abs(J);
    for (size_t n = 0; n < F.size(); ++n) {
        double d = I.v[n] - J.v[n];
        double fid;
        if (p.model == ModelKind::tdfm) {
            double denom = std::max(std::fabs(I.v[n]), eps_div);
            double r = d / denom;
            fid = p.lambda * r * r;
            if (p.signed_fidelity && d < 0.0) fid = -fid;
        } else {
            fid = p.lambda * d * d;
            if (p.signed_fidelity && d < 0.0) fid = -fid;
        }
        F.v[n] = -F.v[n] - fid;
    }
    return F;
}

Field rhs_force(const ModelParams& p, const Field& I, const Field& u, const Field& J) {
    return force_from_coeff(p, coeff_field(p, I, u), I, J);
}

StepResult step_intensity(const ModelParams& p, const SchemeWeights& w,
                          const Field& I, const Field& I_prev,
                          const Field& F, const Field& F_prev,
                          const Field& coeff, const GsSettings& gs) {
    const double tau = w.tau, t2 = tau * tau;
    const double a = 1.0 + 0.5 * p.gamma * tau;
    const double we = 1.0 - w.theta1 - w.theta2;

    Field rhs(I.rows, I.cols);
    for (size_t n = 0; n < rhs.size(); ++n)
        rhs.v[n] = 2.0 * I.v[n] + (0.5 * p.gamma * tau - 1.0) * I_prev.v[n] +
                   t2 * (we * F.v[n] + w.theta2 * F_prev.v[n]);

    StepResult out;
    if (w.theta1 == 0.0) {
        out.next = std::move(rhs);
        for (double& x : out.next.v) x /= a;
        return out;
    }
    out.next = I;
    const double s = t2 * w.theta1;
    if (p.model == ModelKind::hpcpde) {
        DivFluxOp op{&coeff, a, s};
        out.gs = gauss_seidel(op, rhs, out.next, gs.tol, gs.max_sweeps);
    } else {
        BiLaplacianOp op{&coeff, a, s};
        out.gs = gauss_seidel(op, rhs, out.next, gs.tol, gs.max_sweeps);
    }
    return out;
}

StepResult step_edge(const SchemeWeights& w, double nu,
                     const Field& u, const Field& source, const GsSettings& gs) {
    if (!u.same_shape(source)) throw std::invalid_argument("step_edge: shape mismatch");
    const double tau = w.tau, th = w.theta;
    const double a = 1.0 + tau * th;
    const double s_impl = 0.5 * nu * nu * tau * th;
    const double s_expl = 0.5 * nu * nu * tau * (1.0 - th);

    Field rhs(u.rows, u.cols);
    if (s_expl != 0.0) {
        Field lap = laplacian(u);
        for (size_t n = 0; n < rhs.size(); ++n)
            rhs.v[n] = (1.0 - tau * (1.0 - th)) * u.v[n] + s_expl * lap.v[n] + tau * source.v[n];
    } else {
        for (size_t n = 0; n < rhs.size(); ++n)
            rhs.v[n] = (1.0 - tau * (1.0 - th)) * u.v[n] + tau * source.v[n];
    }

    StepResult out;
    if (s_impl == 0.0) {
        out.next = std::move(rhs);
        for (double& x : out.next.v) x /= a;
        return out;
    }
    out.next = u;
    HelmholtzOp op{u.rows, u.cols, a, s_impl};
    out.gs = gauss_seidel(op, rhs, out.next, gs.tol, gs.max_sweeps);
    return out;
}

static void check_finite(const Field& f, int iter, const char* what) {
    for (double x : f.v)
        if (!std::isfinite(x))
            throw SolverError(std::string("non-finite ") + what + " at iteration " +
                              std::to_string(iter));
}

static Field edge_source(const ModelParams& p, const Field& I) {
    Field sm = gaussian_convolve(I, p.xi);
    Field s(I.rows, I.cols);
    if (p.model == ModelKind::proposed) {
        Field lap = laplacian(sm);
        for (size_t n = 0; n < s.size(); ++n) s.v[n] = std::fabs(lap.v[n]);
    } else {
        Field g2 = gradient_magnitude_sq(sm);
        for (size_t n = 0; n < s.size(); ++n) s.v[n] = std::sqrt(g2.v[n]);
    }
    return edge_h_field(s, p.k_h, p.h_kind);
}

RunResult run_model(const Field& noisy, const Field* reference,
                    const ModelParams& p, const SchemeWeights& w,
                    const StopRule& stop, const GsSettings& gs,
                    const SsimParams& ssim_p, const ProgressFn& progress) {
    if (noisy.rows < 3 || noisy.cols < 3)
        throw std::invalid_argument("run_model: image too small");
    if (reference && !reference->same_shape(noisy))
        throw std::invalid_argument("run_model: reference shape mismatch");
    if (stop.mode == StopMode::best_psnr && !reference)
        throw std::invalid_argument("run_model: best-psnr stopping needs a reference");
    if (stop.max_iters < 1) throw std::invalid_argument("run_model: max_iters must be >= 1");
    check_finite(noisy, 0, "input");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const Field& J = noisy;
    Field I_prev = J, I_cur = J;
    Field u;
    if (p.model != ModelKind::tdfm)
        u = gaussian_convolve(gradient_magnitude_sq(J), p.xi);

    RunResult rr;
    RunReport& rep = rr.report;
    rep.has_reference = reference != nullptr;
    rep.psnr_input = reference ? psnr(*reference, J) : nan;
    rep.si_input = speckle_index(J);

    const double rho = min_value(J), theta_b = max_value(J);
    const double band = 0.05 * (theta_b - rho);
    rep.monitors.bound_lo = rho - band;
    rep.monitors.bound_hi = theta_b + band;
    rep.monitors.coeff_min = std::numeric_limits<double>::infinity();
    rep.monitors.coeff_max = -std::numeric_limits<double>::infinity();
    rep.monitors.run_min_I = rho;
    rep.monitors.run_max_I = theta_b;

    Field best = J;
    double best_psnr = rep.psnr_input;
    int best_iter = 0, non_improving = 0;

    Field F_cur, F_prev;
    std::vector<double> ssim_trace;

    for (int k = 1; k <= stop.max_iters; ++k) {
        Field D = coeff_field(p, I_cur, u);
        for (double c : D.v) {
            rep.monitors.coeff_min = std::min(rep.monitors.coeff_min, c);
            rep.monitors.coeff_max = std::max(rep.monitors.coeff_max, c);
            if (c < 0.0 || c > 1.0) ++rep.monitors.coeff_violations;
        }

        F_cur = force_from_coeff(p, D, I_cur, J);
        if (k == 1) F_prev = F_cur;

        StepResult st = step_intensity(p, w, I_cur, I_prev, F_cur, F_prev, D, gs);
        check_finite(st.next, k, "intensity");
        if (!st.gs.converged) ++rep.monitors.gs_nonconverged;
        rep.monitors.gs_total_sweeps += st.gs.sweeps;

        if (p.model != ModelKind::tdfm) {
            StepResult se = step_edge(w, p.nu, u, edge_source(p, I_cur), gs);
            check_finite(se.next, k, "edge variable");
            if (!se.gs.converged) ++rep.monitors.gs_nonconverged;
            rep.monitors.gs_total_sweeps += se.gs.sweeps;
            u = std::move(se.next);
        }

        I_prev = std::move(I_cur);
        I_cur = std::move(st.next);
        F_prev = std::move(F_cur);

        IterationStats it;
        it.iter = k;
        it.rel_change = relative_change(I_cur, I_prev);
        it.speckle_index = speckle_index(I_cur);
        it.gs_sweeps = st.gs.sweeps;
        it.min_I = min_value(I_cur);
        it.max_I = max_value(I_cur);
        if (reference) {
            it.psnr_db = psnr(*reference, I_cur);
            it.ssim = ssim(*reference, I_cur, ssim_p);
            ssim_trace.push_back(it.ssim);
            it.mssim_paper = mssim_paper(ssim_trace);
        } else {
            it.psnr_db = nan;
            it.ssim = nan;
            it.mssim_paper = nan;
        }

        rep.monitors.run_min_I = std::min(rep.monitors.run_min_I, it.min_I);
        rep.monitors.run_max_I = std::max(rep.monitors.run_max_I, it.max_I);
        if (it.min_I < rep.monitors.bound_lo || it.max_I > rep.monitors.bound_hi)
            ++rep.monitors.max_principle_violations;

        rep.trace.push_back(it);
        rep.iterations = k;
        if (progress) progress(it);

        if (reference && it.psnr_db > best_psnr) {
            best_psnr = it.psnr_db;
            best = I_cur;
            best_iter = k;
            non_improving = 0;
        } else {
            ++non_improving;
        }

        if (stop.mode == StopMode::best_psnr &&
            (non_improving >= stop.patience || it.rel_change <= stop.epsilon))
            break;
        if (stop.mode == StopMode::relative_change && it.rel_change <= stop.epsilon)
            break;
    }

    const bool pick_best = stop.mode == StopMode::best_psnr;
    rr.restored = pick_best ? std::move(best) : std::move(I_cur);
    rep.best_iter = pick_best ? best_iter : rep.iterations;
    rep.rel_change_final = rep.trace.back().rel_change;
    rep.si = speckle_index(rr.restored);
    if (reference) {
        rep.psnr = psnr(*reference, rr.restored);
        rep.ssim_final = ssim(*reference, rr.restored, ssim_p);
        rep.mssim_paper = mssim_paper(ssim_trace);
    } else {
        rep.psnr = nan;
        rep.ssim_final = nan;
        rep.mssim_paper = nan;
    }
    return rr;
}

ColorResult run_color(const std::vector<Field>& noisy, const std::vector<Field>* reference,
                      const ModelParams& p, const SchemeWeights& w,
                      const StopRule& stop, const GsSettings& gs,
                      const SsimParams& ssim_p, const ProgressFn& progress) {
    if (noisy.empty()) throw std::invalid_argument("run_color: no channels");
    if (reference && reference->size() != noisy.size())
        throw std::invalid_argument("run_color: reference channel count mismatch");

    ColorResult cr;
    for (size_t c = 0; c < noisy.size(); ++c) {
        const Field* ref = reference ? &(*reference)[c] : nullptr;
        RunResult r = run_model(noisy[c], ref, p, w, stop, gs, ssim_p, progress);
        cr.restored.push_back(std::move(r.restored));
        cr.channels.push_back(std::move(r.report));
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    ColorSummary& s = cr.summary;
    s.si = speckle_index_multi(cr.restored);
    s.si_input = speckle_index_multi(noisy);
    if (reference) {
        s.psnr = psnr_multi(*reference, cr.restored);
        s.psnr_input = psnr_multi(*reference, noisy);
        double sf = 0.0, mp = 0.0;
        for (const RunReport& r : cr.channels) {
            sf += r.ssim_final;
            mp += r.mssim_paper;
        }
        s.ssim_final = sf / double(cr.channels.size());
        s.mssim_paper = mp / double(cr.channels.size());
    } else {
        s.psnr = s.psnr_input = s.ssim_final = s.mssim_paper = nan;
    }
    return cr;
}

}  // namespace despeckle
