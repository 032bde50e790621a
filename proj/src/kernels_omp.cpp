#include "tscl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

// Parallelization strategy: loops run over units (output planes, channels,
// rows) that are written by exactly one iteration, with a fixed inner
// summation order, so results do not depend on the thread count. Whole-array
// reductions use fixed 4096-element chunks combined in order.

namespace tscl::kern {

namespace {

inline int reflect(int i, int n) {
    while (i < 0 || i >= n) i = (i < 0) ? (-i - 1) : (2 * n - 1 - i);
    return i;
}

// Fixed-association four-lane dot product; deterministic and SLP-friendly.
inline double dot_strict(const double* a, const double* b, int n) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

constexpr std::size_t kSumChunk = 4096;

} // namespace

void conv3x3_forward(const double* x, const double* w, const double* b, double* y,
                     int N, int Cin, int Cout, int H, int W) {
    const std::size_t HW = static_cast<std::size_t>(H) * W;
#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < N; ++n) {
        for (int co = 0; co < Cout; ++co) {
            double* yp = y + (static_cast<std::size_t>(n) * Cout + co) * HW;
            std::fill(yp, yp + HW, b ? b[co] : 0.0);
            for (int ci = 0; ci < Cin; ++ci) {
                const double* xp = x + (static_cast<std::size_t>(n) * Cin + ci) * HW;
                const double* wk = w + (static_cast<std::size_t>(co) * Cin + ci) * 9;
                for (int ky = 0; ky < 3; ++ky) {
                    for (int kx = 0; kx < 3; ++kx) {
                        const double wv = wk[ky * 3 + kx];
                        const int dy = ky - 1, dx = kx - 1;
                        const int yy0 = dy < 0 ? -dy : 0;
                        const int yy1 = H - (dy > 0 ? dy : 0);
                        const int xx0 = dx < 0 ? -dx : 0;
                        const int xx1 = W - (dx > 0 ? dx : 0);
                        for (int yy = yy0; yy < yy1; ++yy) {
                            double* yr = yp + static_cast<std::size_t>(yy) * W;
                            const double* xr = xp + static_cast<std::size_t>(yy + dy) * W + dx;
                            for (int xx = xx0; xx < xx1; ++xx) yr[xx] += wv * xr[xx];
                        }
                    }
                }
            }
        }
    }
}

void conv3x3_backward_input(const double* gy, const double* w, double* gx,
                            int N, int Cin, int Cout, int H, int W) {
    const std::size_t HW = static_cast<std::size_t>(H) * W;
#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < N; ++n) {
        for (int ci = 0; ci < Cin; ++ci) {
            double* gxp = gx + (static_cast<std::size_t>(n) * Cin + ci) * HW;
            for (int co = 0; co < Cout; ++co) {
                const double* gyp = gy + (static_cast<std::size_t>(n) * Cout + co) * HW;
                const double* wk = w + (static_cast<std::size_t>(co) * Cin + ci) * 9;
                for (int ky = 0; ky < 3; ++ky) {
                    for (int kx = 0; kx < 3; ++kx) {
                        const double wv = wk[ky * 3 + kx];
                        const int dy = ky - 1, dx = kx - 1;
                        const int yy0 = dy > 0 ? dy : 0;
                        const int yy1 = H + (dy < 0 ? dy : 0);
                        const int xx0 = dx > 0 ? dx : 0;
                        const int xx1 = W + (dx < 0 ? dx : 0);
                        for (int yy = yy0; yy < yy1; ++yy) {
                            double* gxr = gxp + static_cast<std::size_t>(yy) * W;
                            const double* gyr = gyp + static_cast<std::size_t>(yy - dy) * W - dx;
                            for (int xx = xx0; xx < xx1; ++xx) gxr[xx] += wv * gyr[xx];
                        }
                    }
                }
            }
        }
    }
}

void conv3x3_backward_params(const double* x, const double* gy, double* gw, double* gb,
                             int N, int Cin, int Cout, int H, int W) {
    const std::size_t HW = static_cast<std::size_t>(H) * W;
#pragma omp parallel for schedule(static)
    for (int co = 0; co < Cout; ++co) {
        double bsum = 0.0;
        for (int n = 0; n < N; ++n) {
            const double* gyp = gy + (static_cast<std::size_t>(n) * Cout + co) * HW;
            for (std::size_t i = 0; i < HW; ++i) bsum += gyp[i];
        }
        if (gb) gb[co] += bsum;
        for (int ci = 0; ci < Cin; ++ci) {
            double* wk = gw + (static_cast<std::size_t>(co) * Cin + ci) * 9;
            for (int ky = 0; ky < 3; ++ky) {
                for (int kx = 0; kx < 3; ++kx) {
                    const int dy = ky - 1, dx = kx - 1;
                    const int yy0 = dy < 0 ? -dy : 0;
                    const int yy1 = H - (dy > 0 ? dy : 0);
                    const int xx0 = dx < 0 ? -dx : 0;
                    const int xx1 = W - (dx > 0 ? dx : 0);
                    double acc = 0.0;
                    for (int n = 0; n < N; ++n) {
                        const double* gyp = gy + (static_cast<std::size_t>(n) * Cout + co) * HW;
                        const double* xp = x + (static_cast<std::size_t>(n) * Cin + ci) * HW;
                        for (int yy = yy0; yy < yy1; ++yy) {
                            acc += dot_strict(gyp + static_cast<std::size_t>(yy) * W + xx0,
                                              xp + static_cast<std::size_t>(yy + dy) * W + xx0 + dx,
                                              xx1 - xx0);
                        }
                    }
                    wk[ky * 3 + kx] += acc;
                }
            }
        }
    }
}

void bn_channel_stats(const double* x, int N, int C, int HW, double* mean, double* var) {
    const double m = static_cast<double>(N) * HW;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < C; ++c) {
        double sum = 0.0, sumsq = 0.0;
        for (int n = 0; n < N; ++n) {
            const double* p = x + (static_cast<std::size_t>(n) * C + c) * HW;
            for (int i = 0; i < HW; ++i) {
                const double v = p[i];
                sum += v;
                sumsq += v * v;
            }
        }
        const double mu = sum / m;
        mean[c] = mu;
        var[c] = std::max(0.0, sumsq / m - mu * mu);
    }
}

void bn_forward(const double* x, const double* gamma, const double* beta, const double* mean,
                const double* var, double eps, double* y, int N, int C, int HW) {
#pragma omp parallel for collapse(2) schedule(static)
    for (int n = 0; n < N; ++n) {
        for (int c = 0; c < C; ++c) {
            const double scale = gamma[c] / std::sqrt(var[c] + eps);
            const double shift = beta[c] - scale * mean[c];
            const std::size_t off = (static_cast<std::size_t>(n) * C + c) * HW;
            const double* xp = x + off;
            double* yp = y + off;
            for (int i = 0; i < HW; ++i) yp[i] = scale * xp[i] + shift;
        }
    }
}

void bn_backward(const double* x, const double* gamma, const double* mean, const double* var,
                 double eps, const double* gy, double* gx, double* ggamma, double* gbeta,
                 int N, int C, int HW) {
    const double m = static_cast<double>(N) * HW;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < C; ++c) {
        const double inv_std = 1.0 / std::sqrt(var[c] + eps);
        const double mu = mean[c];
        double sum_g = 0.0, sum_gxh = 0.0;
        for (int n = 0; n < N; ++n) {
            const std::size_t off = (static_cast<std::size_t>(n) * C + c) * HW;
            const double* xp = x + off;
            const double* gp = gy + off;
            for (int i = 0; i < HW; ++i) {
                sum_g += gp[i];
                sum_gxh += gp[i] * (xp[i] - mu) * inv_std;
            }
        }
        if (gbeta) gbeta[c] += sum_g;
        if (ggamma) ggamma[c] += sum_gxh;
        const double mean_g = sum_g / m;
        const double mean_gxh = sum_gxh / m;
        const double scale = gamma[c] * inv_std;
        for (int n = 0; n < N; ++n) {
            const std::size_t off = (static_cast<std::size_t>(n) * C + c) * HW;
            const double* xp = x + off;
            const double* gp = gy + off;
            double* gq = gx + off;
            for (int i = 0; i < HW; ++i) {
                const double xhat = (xp[i] - mu) * inv_std;
                gq[i] += scale * (gp[i] - mean_g - xhat * mean_gxh);
            }
        }
    }
}

void leaky_relu_forward(const double* x, double slope, double* y, std::size_t n) {
#pragma omp parallel for schedule(static) if (n > 4096)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void leaky_relu_backward(const double* x, double slope, const double* gy, double* gx,
                         std::size_t n) {
#pragma omp parallel for schedule(static) if (n > 4096)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        gx[i] += x[i] > 0.0 ? gy[i] : slope * gy[i];
}

void sigmoid_forward(const double* x, double* y, std::size_t n) {
#pragma omp parallel for schedule(static) if (n > 4096)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}

void sigmoid_backward(const double* y, const double* gy, double* gx, std::size_t n) {
#pragma omp parallel for schedule(static) if (n > 4096)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        gx[i] += gy[i] * y[i] * (1.0 - y[i]);
}

void avg_pool2_forward(const double* x, double* y, int N, int C, int H, int W) {
    const int Ho = H / 2, Wo = W / 2;
    const std::size_t HW = static_cast<std::size_t>(H) * W;
    const std::size_t HWo = static_cast<std::size_t>(Ho) * Wo;
#pragma omp parallel for schedule(static)
    for (int p = 0; p < N * C; ++p) {
        const double* xp = x + static_cast<std::size_t>(p) * HW;
        double* yp = y + static_cast<std::size_t>(p) * HWo;
        for (int yy = 0; yy < Ho; ++yy) {
            const double* r0 = xp + static_cast<std::size_t>(2 * yy) * W;
            const double* r1 = r0 + W;
            double* yr = yp + static_cast<std::size_t>(yy) * Wo;
            for (int xx = 0; xx < Wo; ++xx)
                yr[xx] = 0.25 * ((r0[2 * xx] + r0[2 * xx + 1]) + (r1[2 * xx] + r1[2 * xx + 1]));
        }
    }
}

void avg_pool2_backward(const double* gy, double* gx, int N, int C, int H, int W) {
    const int Ho = H / 2, Wo = W / 2;
    const std::size_t HW = static_cast<std::size_t>(H) * W;
    const std::size_t HWo = static_cast<std::size_t>(Ho) * Wo;
#pragma omp parallel for schedule(static)
    for (int p = 0; p < N * C; ++p) {
        const double* gyp = gy + static_cast<std::size_t>(p) * HWo;
        double* gxp = gx + static_cast<std::size_t>(p) * HW;
        for (int yy = 0; yy < H; ++yy) {
            const double* gr = gyp + static_cast<std::size_t>(yy / 2) * Wo;
            double* gxr = gxp + static_cast<std::size_t>(yy) * W;
            for (int xx = 0; xx < W; ++xx) gxr[xx] += 0.25 * gr[xx / 2];
        }
    }
}

void blur_rows_forward(const double* x, double* y, const double* k, int taps, int rows, int W) {
    const int r = taps / 2;
    const int lo = std::min(r, W);
    const int hi = std::max(lo, W - r);
#pragma omp parallel for schedule(static)
    for (int row = 0; row < rows; ++row) {
        const double* xr = x + static_cast<std::size_t>(row) * W;
        double* yr = y + static_cast<std::size_t>(row) * W;
        for (int i = 0; i < lo; ++i) {
            double s = 0.0;
            for (int t = 0; t < taps; ++t) s += k[t] * xr[reflect(i + t - r, W)];
            yr[i] = s;
        }
        std::fill(yr + lo, yr + hi, 0.0);
        for (int t = 0; t < taps; ++t) {
            const double kv = k[t];
            const int off = t - r;
            const double* src = xr + lo + off;
            for (int i = lo; i < hi; ++i) yr[i] += kv * src[i - lo];
        }
        for (int i = hi; i < W; ++i) {
            double s = 0.0;
            for (int t = 0; t < taps; ++t) s += k[t] * xr[reflect(i + t - r, W)];
            yr[i] = s;
        }
    }
}

void blur_rows_adjoint(const double* gy, double* gx, const double* k, int taps, int rows, int W) {
    const int r = taps / 2;
    const int lo = std::min(r, W);
    const int hi = std::max(lo, W - r);
#pragma omp parallel for schedule(static)
    for (int row = 0; row < rows; ++row) {
        const double* gyr = gy + static_cast<std::size_t>(row) * W;
        double* gxr = gx + static_cast<std::size_t>(row) * W;
        for (int i = 0; i < lo; ++i)
            for (int t = 0; t < taps; ++t) gxr[reflect(i + t - r, W)] += k[t] * gyr[i];
        for (int t = 0; t < taps; ++t) {
            const double kv = k[t];
            const int off = t - r;
            double* dst = gxr + lo + off;
            for (int i = lo; i < hi; ++i) dst[i - lo] += kv * gyr[i];
        }
        for (int i = hi; i < W; ++i)
            for (int t = 0; t < taps; ++t) gxr[reflect(i + t - r, W)] += k[t] * gyr[i];
    }
}

void blur_cols_forward(const double* x, double* y, const double* k, int taps, int planes,
                       int H, int W) {
    const int r = taps / 2;
    const std::size_t HW = static_cast<std::size_t>(H) * W;
#pragma omp parallel for schedule(static)
    for (int p = 0; p < planes; ++p) {
        const double* xp = x + static_cast<std::size_t>(p) * HW;
        double* yp = y + static_cast<std::size_t>(p) * HW;
        for (int yy = 0; yy < H; ++yy) {
            double* yr = yp + static_cast<std::size_t>(yy) * W;
            std::fill(yr, yr + W, 0.0);
            for (int t = 0; t < taps; ++t) {
                const double kv = k[t];
                const double* xr = xp + static_cast<std::size_t>(reflect(yy + t - r, H)) * W;
                for (int i = 0; i < W; ++i) yr[i] += kv * xr[i];
            }
        }
    }
}

void blur_cols_adjoint(const double* gy, double* gx, const double* k, int taps, int planes,
                       int H, int W) {
    const int r = taps / 2;
    const std::size_t HW = static_cast<std::size_t>(H) * W;
#pragma omp parallel for schedule(static)
    for (int p = 0; p < planes; ++p) {
        const double* gyp = gy + static_cast<std::size_t>(p) * HW;
        double* gxp = gx + static_cast<std::size_t>(p) * HW;
        for (int yy = 0; yy < H; ++yy) {
            const double* gyr = gyp + static_cast<std::size_t>(yy) * W;
            for (int t = 0; t < taps; ++t) {
                const double kv = k[t];
                double* gxr = gxp + static_cast<std::size_t>(reflect(yy + t - r, H)) * W;
                for (int i = 0; i < W; ++i) gxr[i] += kv * gyr[i];
            }
        }
    }
}

void global_avg_pool_forward(const double* x, double* y, int N, int C, int HW) {
#pragma omp parallel for schedule(static)
    for (int p = 0; p < N * C; ++p) {
        const double* xp = x + static_cast<std::size_t>(p) * HW;
        double s = 0.0;
        for (int i = 0; i < HW; ++i) s += xp[i];
        y[p] = s / HW;
    }
}

void global_avg_pool_backward(const double* gy, double* gx, int N, int C, int HW) {
#pragma omp parallel for schedule(static)
    for (int p = 0; p < N * C; ++p) {
        const double g = gy[p] / HW;
        double* gxp = gx + static_cast<std::size_t>(p) * HW;
        for (int i = 0; i < HW; ++i) gxp[i] += g;
    }
}

void linear_forward(const double* x, const double* w, const double* b, double* y,
                    int N, int In, int Out) {
#pragma omp parallel for schedule(static)
    for (int n = 0; n < N; ++n) {
        const double* xp = x + static_cast<std::size_t>(n) * In;
        double* yp = y + static_cast<std::size_t>(n) * Out;
        for (int o = 0; o < Out; ++o)
            yp[o] = (b ? b[o] : 0.0) + dot_strict(xp, w + static_cast<std::size_t>(o) * In, In);
    }
}

void linear_backward(const double* x, const double* w, const double* gy, double* gx,
                     double* gw, double* gb, int N, int In, int Out) {
    if (gx) {
#pragma omp parallel for schedule(static)
        for (int n = 0; n < N; ++n) {
            const double* gyp = gy + static_cast<std::size_t>(n) * Out;
            double* gxp = gx + static_cast<std::size_t>(n) * In;
            for (int o = 0; o < Out; ++o) {
                const double g = gyp[o];
                const double* wp = w + static_cast<std::size_t>(o) * In;
                for (int i = 0; i < In; ++i) gxp[i] += g * wp[i];
            }
        }
    }
#pragma omp parallel for schedule(static)
    for (int o = 0; o < Out; ++o) {
        double bs = 0.0;
        double* gwp = gw ? gw + static_cast<std::size_t>(o) * In : nullptr;
        for (int n = 0; n < N; ++n) {
            const double g = gy[static_cast<std::size_t>(n) * Out + o];
            bs += g;
            if (gwp) {
                const double* xp = x + static_cast<std::size_t>(n) * In;
                for (int i = 0; i < In; ++i) gwp[i] += g * xp[i];
            }
        }
        if (gb) gb[o] += bs;
    }
}

double reduce_sum(const double* x, std::size_t n) {
    const std::size_t nchunks = (n + kSumChunk - 1) / kSumChunk;
    if (nchunks <= 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kSumChunk;
        const std::size_t hi = std::min(n, lo + kSumChunk);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i];
        partial[static_cast<std::size_t>(c)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

#define TSCL_EW_LOOP(expr)                                                        \
    _Pragma("omp parallel for schedule(static) if (n > 4096)")                    \
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) { expr; }

void vadd(const double* a, const double* b, double* y, std::size_t n) { TSCL_EW_LOOP(y[i] = a[i] + b[i]) }
void vsub(const double* a, const double* b, double* y, std::size_t n) { TSCL_EW_LOOP(y[i] = a[i] - b[i]) }
void vmul(const double* a, const double* b, double* y, std::size_t n) { TSCL_EW_LOOP(y[i] = a[i] * b[i]) }
void vdiv(const double* a, const double* b, double* y, std::size_t n) { TSCL_EW_LOOP(y[i] = a[i] / b[i]) }

void vaffine(const double* x, double scale, double shift, double* y, std::size_t n) {
    TSCL_EW_LOOP(y[i] = scale * x[i] + shift)
}

void vrsub(double c, const double* x, double* y, std::size_t n) { TSCL_EW_LOOP(y[i] = c - x[i]) }
void vlog(const double* x, double* y, std::size_t n) { TSCL_EW_LOOP(y[i] = std::log(x[i])) }
void vsqrt(const double* x, double* y, std::size_t n) { TSCL_EW_LOOP(y[i] = std::sqrt(x[i])) }
void vpow(const double* x, double p, double* y, std::size_t n) { TSCL_EW_LOOP(y[i] = std::pow(x[i], p)) }

void vclamp(const double* x, double lo, double hi, double* y, std::size_t n) {
    TSCL_EW_LOOP(y[i] = std::min(hi, std::max(lo, x[i])))
}

void acc(double* dst, const double* src, std::size_t n) { TSCL_EW_LOOP(dst[i] += src[i]) }

void acc_scaled(double* dst, const double* src, double s, std::size_t n) {
    TSCL_EW_LOOP(dst[i] += s * src[i])
}

void acc_mul(double* dst, const double* a, const double* b, std::size_t n) {
    TSCL_EW_LOOP(dst[i] += a[i] * b[i])
}

void acc_div(double* dst, const double* a, const double* b, std::size_t n) {
    TSCL_EW_LOOP(dst[i] += a[i] / b[i])
}

void acc_div_out(double* dst, const double* gy, const double* z, const double* y, std::size_t n) {
    TSCL_EW_LOOP(dst[i] -= gy[i] * z[i] / y[i])
}

void acc_pow_back(double* dst, const double* gy, const double* x, double p, std::size_t n) {
    TSCL_EW_LOOP(dst[i] += gy[i] * p * std::pow(x[i], p - 1.0))
}

void acc_sqrt_back(double* dst, const double* gy, const double* y, std::size_t n) {
    TSCL_EW_LOOP(if (y[i] > 0.0) dst[i] += gy[i] * 0.5 / y[i])
}

void acc_clamp_back(double* dst, const double* gy, const double* x, double lo, double hi,
                    std::size_t n) {
    TSCL_EW_LOOP(if (x[i] >= lo && x[i] <= hi) dst[i] += gy[i])
}

#undef TSCL_EW_LOOP

} // namespace tscl::kern
