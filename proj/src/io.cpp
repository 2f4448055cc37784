#include "despeckle/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "despeckle/presets.hpp"

namespace despeckle {

namespace {

struct Tokenizer {
    const std::string& s;
    size_t pos = 0;
    const std::string& path;

    void skip_space_and_comments() {
        while (pos < s.size()) {
            if (std::isspace(static_cast<unsigned char>(s[pos]))) {
                ++pos;
            } else if (s[pos] == '#') {
                while (pos < s.size() && s[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    std::string next() {
        skip_space_and_comments();
        size_t start = pos;
        while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (start == pos) throw IoError(path + ": truncated header");
        return s.substr(start, pos - start);
    }

    long next_int(const char* what) {
        std::string t = next();
        try {
            size_t used = 0;
            long v = std::stol(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            throw IoError(path + ": bad " + what + " token '" + t + "'");
        }
    }
};

}  // namespace

Image read_netpbm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string data = buf.str();

    Tokenizer tk{data, 0, path};
    const std::string magic = tk.next();
    bool ascii, color;
    if (magic == "P2") ascii = true, color = false;
    else if (magic == "P3") ascii = true, color = true;
    else if (magic == "P5") ascii = false, color = false;
    else if (magic == "P6") ascii = false, color = true;
    else throw IoError(path + ": unsupported magic '" + magic + "'");

    Image img;
    img.width = int(tk.next_int("width"));
    img.height = int(tk.next_int("height"));
    long maxval = tk.next_int("maxval");
    if (img.width < 1 || img.height < 1) throw IoError(path + ": non-positive dimensions");
    if (maxval < 1 || maxval > 65535) throw IoError(path + ": maxval out of range");
    img.maxval = int(maxval);

    const int nch = color ? 3 : 1;
    img.ch.assign(size_t(nch), Field(img.height, img.width));
    const size_t samples = size_t(img.width) * size_t(img.height) * size_t(nch);

    if (ascii) {
        for (size_t n = 0; n < samples; ++n) {
            long v = tk.next_int("sample");
            if (v < 0 || v > maxval) throw IoError(path + ": sample out of range");
            img.ch[n % nch].v[n / nch] = double(v);
        }
    } else {
        if (tk.pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[tk.pos])))
            throw IoError(path + ": missing raster separator");
        size_t p = tk.pos + 1;
        const int bytes = maxval > 255 ? 2 : 1;
        if (data.size() - p < samples * size_t(bytes))
            throw IoError(path + ": truncated raster");
        for (size_t n = 0; n < samples; ++n) {
            unsigned v;
            if (bytes == 1) {
                v = static_cast<unsigned char>(data[p + n]);
            } else {
                v = (static_cast<unsigned char>(data[p + 2 * n]) << 8) |
                    static_cast<unsigned char>(data[p + 2 * n + 1]);
            }
            if (long(v) > maxval) throw IoError(path + ": sample out of range");
            img.ch[n % nch].v[n / nch] = double(v);
        }
    }
    return img;
}

std::vector<Field> to_unit(const Image& img) {
    std::vector<Field> out;
    out.reserve(img.ch.size());
    for (const Field& f : img.ch) {
        Field u(f.rows, f.cols);
        for (size_t n = 0; n < f.size(); ++n)
            u.v[n] = std::max(f.v[n], 1.0) / double(img.maxval);
        out.push_back(std::move(u));
    }
    return out;
}

Image from_unit(const std::vector<Field>& ch, int maxval) {
    if (ch.empty()) throw std::invalid_argument("from_unit: no channels");
    Image img;
    img.width = ch[0].cols;
    img.height = ch[0].rows;
    img.maxval = maxval;
    for (const Field& f : ch) {
        Field s(f.rows, f.cols);
        for (size_t n = 0; n < f.size(); ++n) s.v[n] = f.v[n] * double(maxval);
        img.ch.push_back(std::move(s));
    }
    return img;
}

static long quantize(double x, int maxval) {
    long v = std::llround(x);  // rounds half away from zero
    if (v < 0) v = 0;
    if (v > maxval) v = maxval;
    return v;
}

void write_netpbm(const std::string& path, const Image& img, bool binary) {
    if (img.ch.size() != 1 && img.ch.size() != 3)
        throw std::invalid_argument("write_netpbm: need 1 or 3 channels");
    if (img.maxval < 1 || img.maxval > 65535)
        throw std::invalid_argument("write_netpbm: maxval out of range");
    for (const Field& f : img.ch)
        if (f.rows != img.height || f.cols != img.width)
            throw std::invalid_argument("write_netpbm: channel shape mismatch");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    const bool color = img.color();
    const char* magic = binary ? (color ? "P6" : "P5") : (color ? "P3" : "P2");
    out << magic << "\n" << img.width << " " << img.height << "\n" << img.maxval << "\n";

    const size_t pixels = size_t(img.width) * size_t(img.height);
    const size_t nch = img.ch.size();
    if (binary) {
        const int bytes = img.maxval > 255 ? 2 : 1;
        std::string raster;
        raster.reserve(pixels * nch * size_t(bytes));
        for (size_t n = 0; n < pixels; ++n)
            for (size_t c = 0; c < nch; ++c) {
                long v = quantize(img.ch[c].v[n], img.maxval);
                if (bytes == 2) raster.push_back(char((v >> 8) & 0xFF));
                raster.push_back(char(v & 0xFF));
            }
        out.write(raster.data(), std::streamsize(raster.size()));
    } else {
        for (int i = 0; i < img.height; ++i) {
            for (int j = 0; j < img.width; ++j)
                for (size_t c = 0; c < nch; ++c) {
                    if (j > 0 || c > 0) out << ' ';
                    out << quantize(img.ch[c](i, j), img.maxval);
                }
            out << '\n';
        }
    }
    if (!out) throw IoError(path + ": write failed");
}

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> known,
                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown config key '" + where + it.key() + "'");
    }
}

// null is treated as absent so a config echo can be fed back in unchanged
template <class T>
void get_to(const json& obj, const char* key, T& out) {
    if (obj.contains(key) && !obj.at(key).is_null()) obj.at(key).get_to(out);
}

}  // namespace

static RunConfig parse_config_fields(const json& j);

RunConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");
    check_keys(j, {"input", "reference", "output_dir", "model", "preset", "looks", "seed",
                   "contour_stride", "params", "weights", "stop", "gauss_seidel"},
               "");
    try {
        return parse_config_fields(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

static RunConfig parse_config_fields(const json& j) {
    RunConfig cfg;
    if (!j.contains("input")) throw ConfigError("missing required key 'input'");
    j.at("input").get_to(cfg.input);
    get_to(j, "reference", cfg.reference);
    get_to(j, "output_dir", cfg.output_dir);

    std::string model = "proposed";
    get_to(j, "model", model);
    cfg.params.model = parse_model(model);

    get_to(j, "preset", cfg.preset);
    if (!cfg.preset.empty()) {
        const PresetEntry* e = find_preset(cfg.preset, cfg.params.model);
        if (!e) throw ConfigError("unknown preset '" + cfg.preset + "'");
        apply_preset(cfg.params, *e);
        if (j.contains("model")) cfg.params.model = parse_model(model);
        if (e->looks > 0) cfg.looks = e->looks;
    }
    get_to(j, "looks", cfg.looks);
    if (cfg.looks < 1) throw ConfigError("'looks' must be >= 1");
    get_to(j, "seed", cfg.seed);
    get_to(j, "contour_stride", cfg.contour_stride);
    if (cfg.contour_stride < 0) throw ConfigError("'contour_stride' must be >= 0");

    if (j.contains("params")) {
        const json& p = j.at("params");
        check_keys(p, {"alpha", "beta", "gamma", "lambda", "iota", "nu", "xi", "k", "k_h",
                       "edge_h", "hpcpde_s", "signed_fidelity"},
                   "params.");
        get_to(p, "alpha", cfg.params.alpha);
        get_to(p, "beta", cfg.params.beta);
        get_to(p, "gamma", cfg.params.gamma);
        get_to(p, "lambda", cfg.params.lambda);
        get_to(p, "iota", cfg.params.iota);
        get_to(p, "nu", cfg.params.nu);
        get_to(p, "xi", cfg.params.xi);
        get_to(p, "k", cfg.params.k);
        get_to(p, "k_h", cfg.params.k_h);
        if (p.contains("edge_h")) {
            std::string s = p.at("edge_h").get<std::string>();
            if (s == "rational") cfg.params.h_kind = EdgeHKind::rational;
            else if (s == "clipped") cfg.params.h_kind = EdgeHKind::clipped;
            else throw ConfigError("params.edge_h must be 'rational' or 'clipped'");
        }
        if (p.contains("hpcpde_s")) {
            std::string s = p.at("hpcpde_s").get<std::string>();
            if (s == "scaled-modulus") cfg.params.s_kind = HpcpdeSKind::scaled_modulus;
            else if (s == "gradient-modulus") cfg.params.s_kind = HpcpdeSKind::gradient_modulus;
            else throw ConfigError("params.hpcpde_s must be 'scaled-modulus' or 'gradient-modulus'");
        }
        get_to(p, "signed_fidelity", cfg.params.signed_fidelity);
    }
    if (j.contains("weights")) {
        const json& w = j.at("weights");
        check_keys(w, {"tau", "theta1", "theta2", "theta"}, "weights.");
        get_to(w, "tau", cfg.weights.tau);
        get_to(w, "theta1", cfg.weights.theta1);
        get_to(w, "theta2", cfg.weights.theta2);
        get_to(w, "theta", cfg.weights.theta);
        if (cfg.weights.tau <= 0) throw ConfigError("weights.tau must be > 0");
    }
    if (j.contains("stop")) {
        const json& s = j.at("stop");
        check_keys(s, {"mode", "epsilon", "patience", "max_iters"}, "stop.");
        if (s.contains("mode")) {
            cfg.stop.mode = parse_stop_mode(s.at("mode").get<std::string>());
            cfg.stop_mode_explicit = true;
        }
        get_to(s, "epsilon", cfg.stop.epsilon);
        get_to(s, "patience", cfg.stop.patience);
        get_to(s, "max_iters", cfg.stop.max_iters);
        if (cfg.stop.patience < 1) throw ConfigError("stop.patience must be >= 1");
        if (cfg.stop.max_iters < 1) throw ConfigError("stop.max_iters must be >= 1");
    }
    if (j.contains("gauss_seidel")) {
        const json& g = j.at("gauss_seidel");
        check_keys(g, {"tol", "max_sweeps"}, "gauss_seidel.");
        get_to(g, "tol", cfg.gs.tol);
        get_to(g, "max_sweeps", cfg.gs.max_sweeps);
        if (cfg.gs.tol <= 0) throw ConfigError("gauss_seidel.tol must be > 0");
        if (cfg.gs.max_sweeps < 1) throw ConfigError("gauss_seidel.max_sweeps must be >= 1");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str());
}

static ojson params_json(const ModelParams& p) {
    ojson o;
    o["alpha"] = p.alpha;
    o["beta"] = p.beta;
    o["gamma"] = p.gamma;
    o["lambda"] = p.lambda;
    o["iota"] = p.iota;
    o["nu"] = p.nu;
    o["xi"] = p.xi;
    o["k"] = p.k;
    o["k_h"] = p.k_h;
    o["edge_h"] = p.h_kind == EdgeHKind::rational ? "rational" : "clipped";
    o["hpcpde_s"] =
        p.s_kind == HpcpdeSKind::scaled_modulus ? "scaled-modulus" : "gradient-modulus";
    o["signed_fidelity"] = p.signed_fidelity;
    return o;
}

static ojson config_json(const RunConfig& cfg) {
    ojson o;
    o["input"] = cfg.input;
    o["reference"] = cfg.reference.empty() ? ojson(nullptr) : ojson(cfg.reference);
    o["output_dir"] = cfg.output_dir;
    o["model"] = model_name(cfg.params.model);
    o["preset"] = cfg.preset.empty() ? ojson(nullptr) : ojson(cfg.preset);
    o["looks"] = cfg.looks;
    o["seed"] = cfg.seed;
    o["contour_stride"] = cfg.contour_stride;
    o["params"] = params_json(cfg.params);
    o["weights"] = {{"tau", cfg.weights.tau},
                    {"theta1", cfg.weights.theta1},
                    {"theta2", cfg.weights.theta2},
                    {"theta", cfg.weights.theta}};
    o["stop"] = {{"mode", stop_mode_name(cfg.stop.mode)},
                 {"epsilon", cfg.stop.epsilon},
                 {"patience", cfg.stop.patience},
                 {"max_iters", cfg.stop.max_iters}};
    o["gauss_seidel"] = {{"tol", cfg.gs.tol}, {"max_sweeps", cfg.gs.max_sweeps}};
    return o;
}

std::string config_to_json(const RunConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

// PSNR can be +inf (exact match); JSON has no inf literal, so use "inf".
static ojson metric_json(double x) {
    if (std::isnan(x)) return ojson(nullptr);
    if (std::isinf(x)) return ojson(x > 0 ? "inf" : "-inf");
    return ojson(x);
}

static ojson report_json(const RunReport& rep) {
    ojson o;
    o["iterations"] = rep.iterations;
    o["best_iter"] = rep.best_iter;
    ojson m;
    m["psnr_input"] = metric_json(rep.psnr_input);
    m["psnr"] = metric_json(rep.psnr);
    m["ssim"] = metric_json(rep.ssim_final);
    m["mssim_paper"] = metric_json(rep.mssim_paper);
    m["si_input"] = metric_json(rep.si_input);
    m["si"] = metric_json(rep.si);
    m["rel_change_final"] = metric_json(rep.rel_change_final);
    o["metrics"] = m;
    ojson mon;
    mon["coeff_min"] = rep.monitors.coeff_min;
    mon["coeff_max"] = rep.monitors.coeff_max;
    mon["coeff_violations"] = rep.monitors.coeff_violations;
    mon["min_I"] = rep.monitors.run_min_I;
    mon["max_I"] = rep.monitors.run_max_I;
    mon["bound_lo"] = rep.monitors.bound_lo;
    mon["bound_hi"] = rep.monitors.bound_hi;
    mon["max_principle_violations"] = rep.monitors.max_principle_violations;
    mon["gs_nonconverged"] = rep.monitors.gs_nonconverged;
    mon["gs_total_sweeps"] = rep.monitors.gs_total_sweeps;
    o["monitors"] = mon;
    return o;
}

std::string summary_to_json(const RunConfig& cfg, const RunReport& rep) {
    ojson o = config_json(cfg);
    o["run"] = report_json(rep);
    return o.dump(2) + "\n";
}

std::string color_summary_to_json(const RunConfig& cfg, const ColorResult& cr) {
    ojson o = config_json(cfg);
    ojson agg;
    agg["psnr_input"] = metric_json(cr.summary.psnr_input);
    agg["psnr"] = metric_json(cr.summary.psnr);
    agg["ssim"] = metric_json(cr.summary.ssim_final);
    agg["mssim_paper"] = metric_json(cr.summary.mssim_paper);
    agg["si_input"] = metric_json(cr.summary.si_input);
    agg["si"] = metric_json(cr.summary.si);
    o["aggregate"] = agg;
    ojson chans = ojson::array();
    for (const RunReport& r : cr.channels) chans.push_back(report_json(r));
    o["channels"] = chans;
    return o.dump(2) + "\n";
}

static void csv_num(std::ostream& os, double x, const char* fmt = "%.10g") {
    if (std::isnan(x)) return;  // empty cell
    if (std::isinf(x)) {
        os << (x > 0 ? "inf" : "-inf");
        return;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, x);
    os << buf;
}

void write_trace_csv(std::ostream& os, const RunReport& rep) {
    os << "iter,psnr_db,ssim,mssim_paper,rel_change,speckle_index,gs_sweeps,min_I,max_I\n";
    for (const IterationStats& it : rep.trace) {
        os << it.iter << ',';
        csv_num(os, it.psnr_db);
        os << ',';
        csv_num(os, it.ssim);
        os << ',';
        csv_num(os, it.mssim_paper);
        os << ',';
        csv_num(os, it.rel_change);
        os << ',';
        csv_num(os, it.speckle_index);
        os << ',' << it.gs_sweeps << ',';
        csv_num(os, it.min_I);
        os << ',';
        csv_num(os, it.max_I);
        os << '\n';
    }
}

void export_contour_grid(const Field& f, int stride, std::ostream& os) {
    if (stride < 1) throw std::invalid_argument("export_contour_grid: stride must be >= 1");
    os << "x,y,value\n";
    char buf[64];
    for (int i = 0; i < f.rows; i += stride)
        for (int j = 0; j < f.cols; j += stride) {
            std::snprintf(buf, sizeof buf, "%.17g", f(i, j));
            os << j << ',' << i << ',' << buf << '\n';
        }
}

}  // namespace despeckle
