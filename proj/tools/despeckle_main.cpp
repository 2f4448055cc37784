// Command-line harness: noise synthesis, despeckling runs, metric evaluation,
// and benchmark suites. Exit codes: 0 ok, 1 usage, 2 I/O, 3 solver failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "despeckle/bench.hpp"
#include "despeckle/io.hpp"
#include "despeckle/presets.hpp"
#include "despeckle/speckle.hpp"

namespace fs = std::filesystem;
using namespace despeckle;

namespace {

void print_metric(const char* name, double x) {
    if (std::isinf(x)) {
        std::printf("%s %s\n", name, x > 0 ? "inf" : "-inf");
    } else {
        std::printf("%s %.10g\n", name, x);
    }
}

int cmd_noise(const std::string& input, const std::string& output, int looks, uint64_t seed,
              bool ascii) {
    Image img = read_netpbm(input);
    std::vector<Field> noisy;
    for (size_t c = 0; c < img.ch.size(); ++c) {
        uint64_t s = img.color() ? channel_seed(seed, int(c)) : seed;
        noisy.push_back(apply_noise(img.ch[c], SpeckleSpec{looks, s}));
    }
    double si = img.color() ? speckle_index_multi(noisy) : speckle_index(noisy[0]);
    Image out = img;
    out.ch = std::move(noisy);  // written clamped to [0, maxval]
    write_netpbm(output, out, !ascii);
    print_metric("speckle_index", si);
    return 0;
}

int cmd_eval(const std::string& ref_path, const std::string& test_path, bool as_json) {
    Image ref = read_netpbm(ref_path);
    Image test = read_netpbm(test_path);
    if (ref.ch.size() != test.ch.size())
        throw std::invalid_argument("eval: channel count mismatch");
    SsimParams sp;
    sp.range = double(ref.maxval);
    double p, s, si_r, si_t;
    if (ref.color()) {
        p = psnr_multi(ref.ch, test.ch);
        double acc = 0.0;
        for (size_t c = 0; c < 3; ++c) acc += ssim(ref.ch[c], test.ch[c], sp);
        s = acc / 3.0;
        si_r = speckle_index_multi(ref.ch);
        si_t = speckle_index_multi(test.ch);
    } else {
        p = psnr(ref.ch[0], test.ch[0]);
        s = ssim(ref.ch[0], test.ch[0], sp);
        si_r = speckle_index(ref.ch[0]);
        si_t = speckle_index(test.ch[0]);
    }
    if (as_json) {
        auto enc = [](double x) {
            if (std::isinf(x)) return std::string("\"inf\"");
            char b[64];
            std::snprintf(b, sizeof b, "%.10g", x);
            return std::string(b);
        };
        std::printf("{\"psnr\": %s, \"ssim\": %s, \"si_ref\": %s, \"si_test\": %s}\n",
                    enc(p).c_str(), enc(s).c_str(), enc(si_r).c_str(), enc(si_t).c_str());
    } else {
        print_metric("psnr", p);
        print_metric("ssim", s);
        print_metric("si_ref", si_r);
        print_metric("si_test", si_t);
    }
    return 0;
}

int cmd_denoise(const RunConfig& cfg, bool quiet) {
    Image img = read_netpbm(cfg.input);
    std::vector<Field> noisy = to_unit(img);

    Image ref_img;
    std::vector<Field> ref;
    bool has_ref = !cfg.reference.empty();
    if (has_ref) {
        ref_img = read_netpbm(cfg.reference);
        if (ref_img.ch.size() != img.ch.size())
            throw std::invalid_argument("reference/input channel count mismatch");
        ref = to_unit(ref_img);
    }

    SsimParams sp{1.5, 5, 0.01, 0.03, 1.0};
    fs::create_directories(cfg.output_dir);
    const fs::path out_dir(cfg.output_dir);

    ProgressFn progress;
    if (!quiet)
        progress = [](const IterationStats& it) {
            if (it.iter % 10 == 0)
                std::fprintf(stderr, "iter %d rel %.3g psnr %.4g\n", it.iter, it.rel_change,
                             it.psnr_db);
        };

    {
        std::ofstream os(out_dir / "resolved_config.json");
        os << config_to_json(cfg);
    }

    if (img.color()) {
        ColorResult cr = run_color(noisy, has_ref ? &ref : nullptr, cfg.params, cfg.weights,
                                   cfg.stop, cfg.gs, sp, progress);
        write_netpbm((out_dir / "restored.ppm").string(), from_unit(cr.restored, img.maxval));
        for (size_t c = 0; c < cr.channels.size(); ++c) {
            std::ofstream tr(out_dir / ("trace_" + std::to_string(c) + ".csv"));
            write_trace_csv(tr, cr.channels[c]);
        }
        std::ofstream js(out_dir / "summary.json");
        js << color_summary_to_json(cfg, cr);
        if (cfg.contour_stride > 0)
            for (size_t c = 0; c < cr.restored.size(); ++c) {
                Field native = cr.restored[c];
                for (double& x : native.v) x *= img.maxval;
                std::ofstream co(out_dir / ("contour_" + std::to_string(c) + ".csv"));
                export_contour_grid(native, cfg.contour_stride, co);
            }
        int iters = 0;
        for (const RunReport& r : cr.channels) iters = std::max(iters, r.iterations);
        std::printf("iterations %d\n", iters);
        print_metric("psnr", cr.summary.psnr);
        print_metric("mssim", cr.summary.ssim_final);
        print_metric("si", cr.summary.si);
    } else {
        RunResult rr = run_model(noisy[0], has_ref ? &ref[0] : nullptr, cfg.params, cfg.weights,
                                 cfg.stop, cfg.gs, sp, progress);
        write_netpbm((out_dir / "restored.pgm").string(), from_unit({rr.restored}, img.maxval));
        std::ofstream tr(out_dir / "trace.csv");
        write_trace_csv(tr, rr.report);
        std::ofstream js(out_dir / "summary.json");
        js << summary_to_json(cfg, rr.report);
        if (cfg.contour_stride > 0) {
            Field native = rr.restored;
            for (double& x : native.v) x *= img.maxval;
            std::ofstream co(out_dir / "contour.csv");
            export_contour_grid(native, cfg.contour_stride, co);
        }
        std::printf("iterations %d\n", rr.report.iterations);
        std::printf("best_iter %d\n", rr.report.best_iter);
        print_metric("psnr", rr.report.psnr);
        print_metric("mssim", rr.report.ssim_final);
        print_metric("si", rr.report.si);
        print_metric("rel_change", rr.report.rel_change_final);
    }
    return 0;
}

int cmd_bench(const std::string& suite_path, const std::string& out_dir, int reps_override,
              uint64_t seed_override, bool has_seed) {
    BenchSuite suite = load_suite(suite_path);
    if (reps_override > 0) suite.repetitions = reps_override;
    if (has_seed) suite.seed = seed_override;
    BenchResult res = run_bench(suite, out_dir, std::cout);
    std::ofstream tbl(fs::path(out_dir) / "table.csv");
    write_bench_table(tbl, res);
    std::printf("cells %zu failures %d\n", res.cells.size(), res.failures);
    return res.failures > 0 ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled fourth-order PDE despeckling harness"};
    app.require_subcommand(1);

    // noise
    auto* noise = app.add_subcommand("noise", "apply multiplicative speckle to an image");
    std::string n_in, n_out;
    int n_looks = 1;
    uint64_t n_seed = 1;
    bool n_ascii = false;
    noise->add_option("-i,--input", n_in, "clean image (pgm/ppm)")->required();
    noise->add_option("-o,--output", n_out, "noisy image path")->required();
    noise->add_option("-L,--looks", n_looks, "number of looks")->check(CLI::PositiveNumber);
    noise->add_option("--seed", n_seed, "noise seed");
    noise->add_flag("--ascii", n_ascii, "write P2/P3 instead of binary");

    // denoise
    auto* den = app.add_subcommand("denoise", "run a despeckling model");
    std::string d_cfg_path, d_in, d_ref, d_out = "out", d_model = "proposed", d_preset;
    std::string d_stop_mode, d_edge_h, d_hpcpde_s;
    int d_looks = 0, d_patience = 0, d_max_iters = 0, d_gs_sweeps = 0, d_stride = -1;
    uint64_t d_seed = 0;
    double d_alpha = 0, d_beta = 0, d_gamma = 0, d_lambda = 0, d_iota = 0, d_nu = 0, d_xi = 0,
           d_k = 0, d_kh = 0, d_tau = 0, d_th1 = 0, d_th2 = 0, d_theta = 0, d_eps = 0,
           d_gs_tol = 0;
    bool d_signed = false, d_quiet = false;
    den->add_option("--config", d_cfg_path, "JSON run configuration");
    den->add_option("-i,--input", d_in, "noisy image");
    den->add_option("--reference", d_ref, "clean reference (enables PSNR tracking)");
    den->add_option("-o,--output-dir", d_out, "output directory");
    den->add_option("--model", d_model, "proposed | tdfm | hpcpde");
    den->add_option("--preset", d_preset, "named parameter preset");
    den->add_option("--looks", d_looks, "looks (echoed into reports)");
    den->add_option("--seed", d_seed, "seed (echoed into reports)");
    den->add_option("--alpha", d_alpha);
    den->add_option("--beta", d_beta);
    den->add_option("--gamma", d_gamma);
    den->add_option("--lambda", d_lambda);
    den->add_option("--iota", d_iota);
    den->add_option("--nu", d_nu);
    den->add_option("--xi", d_xi);
    den->add_option("--k", d_k);
    den->add_option("--k-h", d_kh);
    den->add_option("--edge-h", d_edge_h, "rational | clipped");
    den->add_option("--hpcpde-s", d_hpcpde_s, "scaled-modulus | gradient-modulus");
    den->add_flag("--signed-fidelity", d_signed);
    den->add_option("--tau", d_tau);
    den->add_option("--theta1", d_th1);
    den->add_option("--theta2", d_th2);
    den->add_option("--theta", d_theta);
    den->add_option("--stop-mode", d_stop_mode, "best-psnr | relative-change | max-iters");
    den->add_option("--epsilon", d_eps);
    den->add_option("--patience", d_patience);
    den->add_option("--max-iters", d_max_iters);
    den->add_option("--gs-tol", d_gs_tol);
    den->add_option("--gs-max-sweeps", d_gs_sweeps);
    den->add_option("--contour-stride", d_stride, "export contour csv at this stride");
    den->add_flag("--quiet", d_quiet);

    // eval
    auto* ev = app.add_subcommand("eval", "metrics for an image pair");
    std::string e_ref, e_test;
    bool e_json = false;
    ev->add_option("--reference", e_ref)->required();
    ev->add_option("--test", e_test)->required();
    ev->add_flag("--json", e_json);

    // bench
    auto* be = app.add_subcommand("bench", "run a benchmark suite");
    std::string b_suite, b_out = "bench-out";
    int b_reps = 0;
    uint64_t b_seed = 0;
    be->add_option("--suite", b_suite, "suite JSON")->required();
    be->add_option("-o,--out", b_out, "output directory");
    be->add_option("--reps", b_reps, "override repetitions");
    be->add_option("--seed", b_seed, "override suite seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (noise->parsed()) return cmd_noise(n_in, n_out, n_looks, n_seed, n_ascii);
        if (ev->parsed()) return cmd_eval(e_ref, e_test, e_json);
        if (be->parsed())
            return cmd_bench(b_suite, b_out, b_reps, b_seed, be->count("--seed") > 0);

        // denoise: config file, then explicit flags on top
        RunConfig cfg;
        if (!d_cfg_path.empty()) {
            cfg = load_config(d_cfg_path);
        } else {
            if (d_in.empty()) throw std::invalid_argument("denoise needs --input or --config");
            cfg.input = d_in;
        }
        if (den->count("--input")) cfg.input = d_in;
        if (den->count("--reference")) cfg.reference = d_ref;
        if (den->count("--output-dir") || cfg.output_dir.empty()) cfg.output_dir = d_out;
        if (den->count("--model")) cfg.params.model = parse_model(d_model);
        if (den->count("--preset")) {
            const PresetEntry* e = find_preset(d_preset, cfg.params.model);
            if (!e) throw std::invalid_argument("unknown preset '" + d_preset + "'");
            cfg.preset = d_preset;
            apply_preset(cfg.params, *e);
            if (den->count("--model")) cfg.params.model = parse_model(d_model);
            if (e->looks > 0) cfg.looks = e->looks;
        }
        if (den->count("--looks")) cfg.looks = d_looks;
        if (den->count("--seed")) cfg.seed = d_seed;
        if (den->count("--alpha")) cfg.params.alpha = d_alpha;
        if (den->count("--beta")) cfg.params.beta = d_beta;
        if (den->count("--gamma")) cfg.params.gamma = d_gamma;
        if (den->count("--lambda")) cfg.params.lambda = d_lambda;
        if (den->count("--iota")) cfg.params.iota = d_iota;
        if (den->count("--nu")) cfg.params.nu = d_nu;
        if (den->count("--xi")) cfg.params.xi = d_xi;
        if (den->count("--k")) cfg.params.k = d_k;
        if (den->count("--k-h")) cfg.params.k_h = d_kh;
        if (den->count("--edge-h")) {
            if (d_edge_h == "rational") cfg.params.h_kind = EdgeHKind::rational;
            else if (d_edge_h == "clipped") cfg.params.h_kind = EdgeHKind::clipped;
            else throw std::invalid_argument("--edge-h must be rational or clipped");
        }
        if (den->count("--hpcpde-s")) {
            if (d_hpcpde_s == "scaled-modulus") cfg.params.s_kind = HpcpdeSKind::scaled_modulus;
            else if (d_hpcpde_s == "gradient-modulus")
                cfg.params.s_kind = HpcpdeSKind::gradient_modulus;
            else throw std::invalid_argument("--hpcpde-s must be scaled-modulus or gradient-modulus");
        }
        if (d_signed) cfg.params.signed_fidelity = true;
        if (den->count("--tau")) cfg.weights.tau = d_tau;
        if (den->count("--theta1")) cfg.weights.theta1 = d_th1;
        if (den->count("--theta2")) cfg.weights.theta2 = d_th2;
        if (den->count("--theta")) cfg.weights.theta = d_theta;
        if (den->count("--stop-mode")) {
            cfg.stop.mode = parse_stop_mode(d_stop_mode);
            cfg.stop_mode_explicit = true;
        }
        if (!cfg.stop_mode_explicit)
            cfg.stop.mode = cfg.reference.empty() ? StopMode::relative_change
                                                  : StopMode::best_psnr;
        if (den->count("--epsilon")) cfg.stop.epsilon = d_eps;
        if (den->count("--patience")) cfg.stop.patience = d_patience;
        if (den->count("--max-iters")) cfg.stop.max_iters = d_max_iters;
        if (den->count("--gs-tol")) cfg.gs.tol = d_gs_tol;
        if (den->count("--gs-max-sweeps")) cfg.gs.max_sweeps = d_gs_sweeps;
        if (d_stride >= 0) cfg.contour_stride = d_stride;
        return cmd_denoise(cfg, d_quiet);
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
