#include "despeckle/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace despeckle {

static void check_pair(const Field& a, const Field& b, const char* op) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(op) + ": shape mismatch");
    if (a.rows < 1 || a.cols < 1) throw std::invalid_argument(std::string(op) + ": empty field");
}

double psnr(const Field& ref, const Field& test) {
    check_pair(ref, test, "psnr");
    double peak = max_value(ref);
    double mse = 0.0;
    for (size_t n = 0; n < ref.size(); ++n) {
        double d = ref.v[n] - test.v[n];
        mse += d * d;
    }
    mse /= double(ref.size());
    if (mse == 0.0) return psnr_infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double psnr_multi(const std::vector<Field>& ref, const std::vector<Field>& test) {
    if (ref.empty() || ref.size() != test.size())
        throw std::invalid_argument("psnr_multi: channel count mismatch");
    double peak = 0.0, sq = 0.0;
    size_t count = 0;
    for (size_t c = 0; c < ref.size(); ++c) {
        check_pair(ref[c], test[c], "psnr_multi");
        peak = std::max(peak, max_value(ref[c]));
        for (size_t n = 0; n < ref[c].size(); ++n) {
            double d = ref[c].v[n] - test[c].v[n];
            sq += d * d;
        }
        count += ref[c].size();
    }
    double mse = sq / double(count);
    if (mse == 0.0) return psnr_infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

// Separable weighted moments with the SSIM window.
static Field window_filter(const Field& f, const GaussianKernel& k) {
    const int r = k.radius();
    const int R = f.rows, C = f.cols;
    Field tmp(R, C), out(R, C);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) {
            double acc = 0.0;
            for (int t = -r; t <= r; ++t)
                acc += k.taps[size_t(t + r)] * f(i, reflect_index(j + t, C));
            tmp(i, j) = acc;
        }
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) {
            double acc = 0.0;
            for (int t = -r; t <= r; ++t)
                acc += k.taps[size_t(t + r)] * tmp(reflect_index(i + t, R), j);
            out(i, j) = acc;
        }
    return out;
}

Field ssim_map(const Field& ref, const Field& test, const SsimParams& p) {
    check_pair(ref, test, "ssim");
    const int w = 2 * p.radius + 1;
    if (ref.rows < w || ref.cols < w)
        throw std::invalid_argument("ssim: image smaller than the window");

    GaussianKernel k;
    k.sigma = p.sigma;
    k.taps.resize(size_t(w));
    double sum = 0.0;
    for (int t = -p.radius; t <= p.radius; ++t) {
        double g = std::exp(-0.5 * double(t) * double(t) / (p.sigma * p.sigma));
        k.taps[size_t(t + p.radius)] = g;
        sum += g;
    }
    for (double& g : k.taps) g /= sum;

    Field xx(ref.rows, ref.cols), yy(ref.rows, ref.cols), xy(ref.rows, ref.cols);
    for (size_t n = 0; n < ref.size(); ++n) {
        xx.v[n] = ref.v[n] * ref.v[n];
        yy.v[n] = test.v[n] * test.v[n];
        xy.v[n] = ref.v[n] * test.v[n];
    }
    Field mx = window_filter(ref, k), my = window_filter(test, k);
    Field mxx = window_filter(xx, k), myy = window_filter(yy, k), mxy = window_filter(xy, k);

    const double c1 = (p.k1 * p.range) * (p.k1 * p.range);
    const double c2 = (p.k2 * p.range) * (p.k2 * p.range);
    Field out(ref.rows, ref.cols);
    for (size_t n = 0; n < out.size(); ++n) {
        double mu_x = mx.v[n], mu_y = my.v[n];
        double sx = mxx.v[n] - mu_x * mu_x;
        double sy = myy.v[n] - mu_y * mu_y;
        double sxy = mxy.v[n] - mu_x * mu_y;
        out.v[n] = ((2.0 * mu_x * mu_y + c1) * (2.0 * sxy + c2)) /
                   ((mu_x * mu_x + mu_y * mu_y + c1) * (sx + sy + c2));
    }
    return out;
}

double ssim(const Field& ref, const Field& test, const SsimParams& p) {
    Field m = ssim_map(ref, test, p);
    double acc = 0.0;
    for (double x : m.v) acc += x;
    return acc / double(m.size());
}

double mssim_paper(const std::vector<double>& ssim_trace) {
    if (ssim_trace.empty()) throw std::invalid_argument("mssim_paper: empty trace");
    double acc = 0.0;
    for (double s : ssim_trace) acc += s;
    return acc / double(ssim_trace.size());
}

double speckle_index(const Field& f) {
    if (f.rows < 1 || f.cols < 1) throw std::invalid_argument("speckle_index: empty field");
    double mean = 0.0;
    for (double x : f.v) mean += x;
    mean /= double(f.size());
    if (mean == 0.0) throw std::invalid_argument("speckle_index: zero mean");
    double var = 0.0;
    for (double x : f.v) var += (x - mean) * (x - mean);
    var /= double(f.size());
    return std::sqrt(var) / mean;
}

double speckle_index_multi(const std::vector<Field>& ch) {
    if (ch.empty()) throw std::invalid_argument("speckle_index_multi: no channels");
    double mean = 0.0;
    size_t count = 0;
    for (const Field& f : ch) {
        for (double x : f.v) mean += x;
        count += f.size();
    }
    mean /= double(count);
    if (mean == 0.0) throw std::invalid_argument("speckle_index_multi: zero mean");
    double var = 0.0;
    for (const Field& f : ch)
        for (double x : f.v) var += (x - mean) * (x - mean);
    var /= double(count);
    return std::sqrt(var) / mean;
}

double relative_change(const Field& cur, const Field& prev) {
    check_pair(cur, prev, "relative_change");
    double num = 0.0, den = 0.0;
    for (size_t n = 0; n < cur.size(); ++n) {
        double d = cur.v[n] - prev.v[n];
        num += d * d;
        den += prev.v[n] * prev.v[n];
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

}  // namespace despeckle
