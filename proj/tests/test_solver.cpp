#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "despeckle/gauss_seidel.hpp"
#include "despeckle/solver.hpp"
#include "test_util.hpp"

using namespace despeckle;

TEST_CASE("model and stop mode names round trip") {
    for (auto m : {ModelKind::proposed, ModelKind::tdfm, ModelKind::hpcpde})
        CHECK(parse_model(model_name(m)) == m);
    for (auto s : {StopMode::best_psnr, StopMode::relative_change, StopMode::max_iters})
        CHECK(parse_stop_mode(stop_mode_name(s)) == s);
    CHECK_THROWS_AS(parse_model("fancy"), std::invalid_argument);
    CHECK_THROWS_AS(parse_stop_mode("never"), std::invalid_argument);
}

TEST_CASE("operators agree with the field-level stencils") {
    Field x = testutil::random_field(11, 13, 17, -1.0, 1.0);
    Field c = testutil::random_field(11, 13, 18, 0.05, 1.0);

    HelmholtzOp h{11, 13, 1.3, 0.07};
    Field hx = apply_operator(h, x);
    Field lap = laplacian(x);
    for (size_t n = 0; n < x.size(); ++n)
        CHECK(hx.v[n] == doctest::Approx(1.3 * x.v[n] - 0.07 * lap.v[n]).epsilon(1e-14));

    DivFluxOp d{&c, 1.1, 0.05};
    Field dx = apply_operator(d, x);
    Field div = divergence_flux(c, x);
    for (size_t n = 0; n < x.size(); ++n)
        CHECK(dx.v[n] == doctest::Approx(1.1 * x.v[n] - 0.05 * div.v[n]).epsilon(1e-14));

    BiLaplacianOp b{&c, 1.2, 0.02};
    Field bx = apply_operator(b, x);
    Field w = laplacian(x);
    for (size_t n = 0; n < w.size(); ++n) w.v[n] *= c.v[n];
    Field lap2 = laplacian(w);
    for (size_t n = 0; n < x.size(); ++n)
        CHECK(bx.v[n] == doctest::Approx(1.2 * x.v[n] + 0.02 * lap2.v[n]).epsilon(1e-13));
}

TEST_CASE("operator matrices are symmetric") {
    Field c = testutil::random_field(6, 7, 3, 0.05, 1.0);
    const int n = 42;
    auto sym = [&](const std::vector<double>& A) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                worst = std::max(worst, std::fabs(A[size_t(i) * n + j] - A[size_t(j) * n + i]));
        return worst;
    };
    CHECK(sym(testutil::assemble_dense(HelmholtzOp{6, 7, 1.4, 0.08}, 6, 7)) <= 1e-15);
    CHECK(sym(testutil::assemble_dense(DivFluxOp{&c, 1.2, 0.06}, 6, 7)) <= 1e-15);
    CHECK(sym(testutil::assemble_dense(BiLaplacianOp{&c, 1.1, 0.02}, 6, 7)) <= 1e-14);
}

TEST_CASE("gauss_seidel solves to the dense LU answer") {
    const int R = 8, C = 8, n = R * C;
    for (int trial = 0; trial < 5; ++trial) {
        Field D = testutil::random_field(R, C, 500 + trial, 0.05, 1.0);
        Field rhs = testutil::random_field(R, C, 600 + trial, -1.0, 1.0);
        std::vector<double> b(rhs.v);

        auto solve_and_check = [&](auto op, double tol_vs_dense) {
            std::vector<double> A = testutil::assemble_dense(op, R, C);
            std::vector<double> xd = testutil::dense_solve(A, b);
            Field x(R, C, 0.0);
            GsResult g = gauss_seidel(op, rhs, x, 1e-11, 50000);
            CHECK(g.converged);
            double worst = 0.0;
            for (int i = 0; i < n; ++i) worst = std::max(worst, std::fabs(x.v[size_t(i)] - xd[size_t(i)]));
            CHECK(worst <= tol_vs_dense);
        };

        solve_and_check(HelmholtzOp{R, C, 1.2, 0.0625}, 1e-8);
        solve_and_check(DivFluxOp{&D, 1.2, 0.0625}, 1e-8);
        solve_and_check(BiLaplacianOp{&D, 1.125, 0.015625}, 1e-8);
    }
}

TEST_CASE("gauss_seidel residuals never increase") {
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Field D = testutil::random_field(8, 8, 900 + trial, 0.05, 1.0);
        Field rhs = testutil::random_field(8, 8, 1900 + trial, -1.0, 1.0);
        Field x(8, 8, 0.0);
        GsResult g;
        switch (trial % 3) {
            case 0: g = gauss_seidel(HelmholtzOp{8, 8, 1.0 + 0.01 * trial, 0.08}, rhs, x, 1e-12, 400); break;
            case 1: g = gauss_seidel(DivFluxOp{&D, 1.0 + 0.01 * trial, 0.08}, rhs, x, 1e-12, 400); break;
            default: g = gauss_seidel(BiLaplacianOp{&D, 1.0 + 0.01 * trial, 0.02}, rhs, x, 1e-12, 400); break;
        }
        for (size_t k = 1; k < g.residuals.size(); ++k) {
            CHECK(g.residuals[k] <= g.residuals[k - 1] * (1.0 + 1e-10) + 1e-300);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("gauss_seidel with the identity converges in one exact sweep") {
    Field rhs = testutil::random_field(9, 5, 44, -3.0, 3.0);
    Field x(9, 5, 0.0);
    GsResult g = gauss_seidel(HelmholtzOp{9, 5, 1.0, 0.0}, rhs, x, 1e-12, 10);
    CHECK(g.sweeps == 1);
    CHECK(g.converged);
    CHECK(g.final_residual == 0.0);
    CHECK(std::memcmp(x.v.data(), rhs.v.data(), sizeof(double) * x.size()) == 0);
}

TEST_CASE("gauss_seidel diagnostics and validation") {
    Field rhs(4, 4, 1.0), x(4, 4, 0.0);
    CHECK_THROWS_AS(gauss_seidel(HelmholtzOp{4, 4, 0.0, 0.0}, rhs, x, 1e-6, 10), SolverError);
    CHECK_THROWS_AS(gauss_seidel(HelmholtzOp{4, 4, -1.0, 0.0}, rhs, x, 1e-6, 10), SolverError);
    Field bad(4, 5, 0.0);
    CHECK_THROWS_AS(gauss_seidel(HelmholtzOp{4, 4, 1.0, 0.1}, rhs, bad, 1e-6, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(gauss_seidel(HelmholtzOp{4, 4, 1.0, 0.1}, rhs, x, 1e-6, 0),
                    std::invalid_argument);

    // starved sweep budget reports non-convergence instead of throwing
    Field hard_rhs = testutil::random_field(12, 12, 5, -1.0, 1.0);
    Field y(12, 12, 0.0);
    GsResult g = gauss_seidel(HelmholtzOp{12, 12, 0.01, 1.0}, hard_rhs, y, 1e-14, 1);
    CHECK_FALSE(g.converged);
    CHECK(g.sweeps == 1);
    CHECK(g.residuals.size() == 1);
}

TEST_CASE("gauss_seidel is deterministic") {
    Field D = testutil::random_field(10, 10, 12, 0.05, 1.0);
    Field rhs = testutil::random_field(10, 10, 13, -1.0, 1.0);
    Field x1(10, 10, 0.0), x2(10, 10, 0.0);
    BiLaplacianOp op{&D, 1.125, 0.015625};
    GsResult g1 = gauss_seidel(op, rhs, x1, 1e-10, 1000);
    GsResult g2 = gauss_seidel(op, rhs, x2, 1e-10, 1000);
    CHECK(g1.sweeps == g2.sweeps);
    CHECK(std::memcmp(x1.v.data(), x2.v.data(), sizeof(double) * x1.size()) == 0);
}

TEST_CASE("force terms match their definitions") {
    Field I = testutil::random_field(10, 10, 71, 0.1, 1.0);
    Field J = testutil::random_field(10, 10, 72, 0.1, 1.0);
    Field D = testutil::random_field(10, 10, 73, 0.0, 1.0);

    ModelParams prop;
    prop.model = ModelKind::proposed;
    prop.lambda = 0.3;
    Field Fp = force_from_coeff(prop, D, I, J);
    Field lapI = laplacian(I);
    Field w = lapI;
    for (size_t n = 0; n < w.size(); ++n) w.v[n] *= D.v[n];
    Field lap2 = laplacian(w);
    for (size_t n = 0; n < Fp.size(); ++n) {
        double d = I.v[n] - J.v[n];
        CHECK(Fp.v[n] == doctest::Approx(-lap2.v[n] - 0.3 * d * d).epsilon(1e-13));
    }

    ModelParams td = prop;
    td.model = ModelKind::tdfm;
    Field Ft = force_from_coeff(td, D, I, J);
    double eps_div = 1e-3 * max_abs(J);
    for (size_t n = 0; n < Ft.size(); ++n) {
        double d = I.v[n] - J.v[n];
        double r = d / std::max(std::fabs(I.v[n]), eps_div);
        CHECK(Ft.v[n] == doctest::Approx(-lap2.v[n] - 0.3 * r * r).epsilon(1e-13));
    }

    // signed variant flips the fidelity push where I < J
    ModelParams sp = prop;
    sp.signed_fidelity = true;
    Field Fs = force_from_coeff(sp, D, I, J);
    for (size_t n = 0; n < Fs.size(); ++n) {
        double d = I.v[n] - J.v[n];
        double fid = 0.3 * d * d;
        if (d < 0.0) fid = -fid;
        CHECK(Fs.v[n] == doctest::Approx(-lap2.v[n] - fid).epsilon(1e-13));
    }

    ModelParams hp = prop;
    hp.model = ModelKind::hpcpde;
    Field Fh = force_from_coeff(hp, D, I, J);
    Field div = divergence_flux(D, I);
    CHECK(testutil::max_abs_diff(Fh, div) == 0.0);
}

TEST_CASE("explicit intensity step follows the scalar recursion") {
    SchemeWeights w;
    w.theta1 = 0.0;
    ModelParams p;  // gamma 1, tau 0.25
    Field I(3, 3, 1.0), I_prev(3, 3, 1.0), F(3, 3, 2.0), F_prev(3, 3, 1.0), D(3, 3, 0.5);
    GsSettings gs;

    StepResult st = step_intensity(p, w, I, I_prev, F, F_prev, D, gs);
    CHECK(st.gs.sweeps == 0);
    double rhs = 2.0 + (0.125 - 1.0) + 0.0625 * (0.75 * 2.0 + 0.25 * 1.0);
    for (double x : st.next.v) CHECK(x == doctest::Approx(rhs / 1.125).epsilon(1e-15));

    // zero force and equal levels: the step is a pure contraction toward I
    Field Z(3, 3, 0.0);
    StepResult id = step_intensity(p, w, I, I_prev, Z, Z, D, gs);
    for (double x : id.next.v) CHECK(x == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("implicit intensity step solves the frozen-coefficient system") {
    const int R = 6, C = 6;
    SchemeWeights w;  // tau 0.25, theta1 0.25
    GsSettings gs{1e-12, 50000};
    Field I = testutil::random_field(R, C, 81, 0.2, 1.0);
    Field I_prev = testutil::random_field(R, C, 82, 0.2, 1.0);
    Field F = testutil::random_field(R, C, 83, -0.5, 0.5);
    Field F_prev = testutil::random_field(R, C, 84, -0.5, 0.5);
    Field D = testutil::random_field(R, C, 85, 0.05, 1.0);

    auto check_against_dense = [&](const ModelParams& p, auto op) {
        Field rhs(R, C);
        const double t2 = w.tau * w.tau, we = 1.0 - w.theta1 - w.theta2;
        for (size_t n = 0; n < rhs.size(); ++n)
            rhs.v[n] = 2.0 * I.v[n] + (0.5 * p.gamma * w.tau - 1.0) * I_prev.v[n] +
                       t2 * (we * F.v[n] + w.theta2 * F_prev.v[n]);
        std::vector<double> A = testutil::assemble_dense(op, R, C);
        std::vector<double> xd = testutil::dense_solve(A, rhs.v);
        StepResult st = step_intensity(p, w, I, I_prev, F, F_prev, D, gs);
        CHECK(st.gs.converged);
        CHECK(st.gs.sweeps > 0);
        double worst = 0.0;
        for (size_t n = 0; n < st.next.size(); ++n)
            worst = std::max(worst, std::fabs(st.next.v[n] - xd[n]));
        CHECK(worst <= 1e-9);
    };

    ModelParams prop;
    const double a = 1.0 + 0.5 * prop.gamma * w.tau;
    const double s = w.tau * w.tau * w.theta1;
    check_against_dense(prop, BiLaplacianOp{&D, a, s});

    ModelParams hp;
    hp.model = ModelKind::hpcpde;
    check_against_dense(hp, DivFluxOp{&D, a, s});
}

TEST_CASE("edge step follows the theta recursion") {
    SchemeWeights w;  // tau 0.25, theta 0.5
    GsSettings gs;

    // nu == 0 collapses to the scalar update (1 - 0.125)u / (1 + 0.125)
    Field u(3, 3, 1.0), zero(3, 3, 0.0);
    StepResult st = step_edge(w, 0.0, u, zero, gs);
    CHECK(st.gs.sweeps == 0);
    for (double x : st.next.v) CHECK(x == doctest::Approx(7.0 / 9.0).epsilon(1e-15));

    // constant field: the Laplacian vanishes, so nu does not matter
    GsSettings tight{1e-13, 20000};
    StepResult sd = step_edge(w, 1.0, u, zero, tight);
    for (double x : sd.next.v) CHECK(x == doctest::Approx(7.0 / 9.0).epsilon(1e-9));

    // source pins the steady state: u' = (0.875 u + tau s)/1.125
    Field src(3, 3, 2.0);
    StepResult ss = step_edge(w, 0.0, u, src, gs);
    for (double x : ss.next.v)
        CHECK(x == doctest::Approx((0.875 + 0.25 * 2.0) / 1.125).epsilon(1e-15));

    Field bad(3, 4, 0.0);
    CHECK_THROWS_AS(step_edge(w, 1.0, u, bad, gs), std::invalid_argument);
}

TEST_CASE("edge step matches the dense theta-scheme solve") {
    const int R = 7, C = 5;
    SchemeWeights w;
    w.theta = 0.7;
    GsSettings gs{1e-12, 20000};
    Field u = testutil::random_field(R, C, 31, 0.0, 1.0);
    Field src = testutil::random_field(R, C, 32, 0.0, 1.0);
    const double nu = 1.3;

    const double a = 1.0 + w.tau * w.theta;
    const double si = 0.5 * nu * nu * w.tau * w.theta;
    const double se = 0.5 * nu * nu * w.tau * (1.0 - w.theta);
    Field lap = laplacian(u);
    Field rhs(R, C);
    for (size_t n = 0; n < rhs.size(); ++n)
        rhs.v[n] = (1.0 - w.tau * (1.0 - w.theta)) * u.v[n] + se * lap.v[n] + 0.25 * src.v[n];
    std::vector<double> A = testutil::assemble_dense(HelmholtzOp{R, C, a, si}, R, C);
    std::vector<double> xd = testutil::dense_solve(A, rhs.v);

    StepResult st = step_edge(w, nu, u, src, gs);
    CHECK(st.gs.converged);
    double worst = 0.0;
    for (size_t n = 0; n < st.next.size(); ++n)
        worst = std::max(worst, std::fabs(st.next.v[n] - xd[n]));
    CHECK(worst <= 1e-9);
}
