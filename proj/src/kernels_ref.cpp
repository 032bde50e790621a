#include "tscl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

// Naive single-threaded reference kernels. Written for obviousness, not
// speed; the kernel tests check the OpenMP implementations against these.

namespace tscl::kern_ref {

namespace {

inline int reflect(int i, int n) {
    while (i < 0 || i >= n) i = (i < 0) ? (-i - 1) : (2 * n - 1 - i);
    return i;
}

inline std::size_t idx4(int a, int b, int c, int d, int B, int C, int D) {
    return ((static_cast<std::size_t>(a) * B + b) * C + c) * D + d;
}

} // namespace

void conv3x3_forward(const double* x, const double* w, const double* b, double* y,
                     int N, int Cin, int Cout, int H, int W) {
    for (int n = 0; n < N; ++n)
        for (int co = 0; co < Cout; ++co)
            for (int yy = 0; yy < H; ++yy)
                for (int xx = 0; xx < W; ++xx) {
                    double s = b ? b[co] : 0.0;
                    for (int ci = 0; ci < Cin; ++ci)
                        for (int ky = 0; ky < 3; ++ky)
                            for (int kx = 0; kx < 3; ++kx) {
                                const int sy = yy + ky - 1, sx = xx + kx - 1;
                                if (sy < 0 || sy >= H || sx < 0 || sx >= W) continue;
                                s += w[idx4(co, ci, ky, kx, Cin, 3, 3)] *
                                     x[idx4(n, ci, sy, sx, Cin, H, W)];
                            }
                    y[idx4(n, co, yy, xx, Cout, H, W)] = s;
                }
}

void conv3x3_backward_input(const double* gy, const double* w, double* gx,
                            int N, int Cin, int Cout, int H, int W) {
    for (int n = 0; n < N; ++n)
        for (int co = 0; co < Cout; ++co)
            for (int yy = 0; yy < H; ++yy)
                for (int xx = 0; xx < W; ++xx) {
                    const double g = gy[idx4(n, co, yy, xx, Cout, H, W)];
                    for (int ci = 0; ci < Cin; ++ci)
                        for (int ky = 0; ky < 3; ++ky)
                            for (int kx = 0; kx < 3; ++kx) {
                                const int sy = yy + ky - 1, sx = xx + kx - 1;
                                if (sy < 0 || sy >= H || sx < 0 || sx >= W) continue;
                                gx[idx4(n, ci, sy, sx, Cin, H, W)] +=
                                    g * w[idx4(co, ci, ky, kx, Cin, 3, 3)];
                            }
                }
}

void conv3x3_backward_params(const double* x, const double* gy, double* gw, double* gb,
                             int N, int Cin, int Cout, int H, int W) {
    for (int n = 0; n < N; ++n)
        for (int co = 0; co < Cout; ++co)
            for (int yy = 0; yy < H; ++yy)
                for (int xx = 0; xx < W; ++xx) {
                    const double g = gy[idx4(n, co, yy, xx, Cout, H, W)];
                    if (gb) gb[co] += g;
                    for (int ci = 0; ci < Cin; ++ci)
                        for (int ky = 0; ky < 3; ++ky)
                            for (int kx = 0; kx < 3; ++kx) {
                                const int sy = yy + ky - 1, sx = xx + kx - 1;
                                if (sy < 0 || sy >= H || sx < 0 || sx >= W) continue;
                                gw[idx4(co, ci, ky, kx, Cin, 3, 3)] +=
                                    g * x[idx4(n, ci, sy, sx, Cin, H, W)];
                            }
                }
}

void bn_channel_stats(const double* x, int N, int C, int HW, double* mean, double* var) {
    const double m = static_cast<double>(N) * HW;
    for (int c = 0; c < C; ++c) {
        double sum = 0.0;
        for (int n = 0; n < N; ++n)
            for (int i = 0; i < HW; ++i) sum += x[(static_cast<std::size_t>(n) * C + c) * HW + i];
        const double mu = sum / m;
        double sq = 0.0;
        for (int n = 0; n < N; ++n)
            for (int i = 0; i < HW; ++i) {
                const double d = x[(static_cast<std::size_t>(n) * C + c) * HW + i] - mu;
                sq += d * d;
            }
        mean[c] = mu;
        var[c] = sq / m;
    }
}

void bn_forward(const double* x, const double* gamma, const double* beta, const double* mean,
                const double* var, double eps, double* y, int N, int C, int HW) {
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c)
            for (int i = 0; i < HW; ++i) {
                const std::size_t j = (static_cast<std::size_t>(n) * C + c) * HW + i;
                y[j] = gamma[c] * (x[j] - mean[c]) / std::sqrt(var[c] + eps) + beta[c];
            }
}

void bn_backward(const double* x, const double* gamma, const double* mean, const double* var,
                 double eps, const double* gy, double* gx, double* ggamma, double* gbeta,
                 int N, int C, int HW) {
    const double m = static_cast<double>(N) * HW;
    for (int c = 0; c < C; ++c) {
        const double inv_std = 1.0 / std::sqrt(var[c] + eps);
        double sum_g = 0.0, sum_gxh = 0.0;
        for (int n = 0; n < N; ++n)
            for (int i = 0; i < HW; ++i) {
                const std::size_t j = (static_cast<std::size_t>(n) * C + c) * HW + i;
                sum_g += gy[j];
                sum_gxh += gy[j] * (x[j] - mean[c]) * inv_std;
            }
        if (gbeta) gbeta[c] += sum_g;
        if (ggamma) ggamma[c] += sum_gxh;
        for (int n = 0; n < N; ++n)
            for (int i = 0; i < HW; ++i) {
                const std::size_t j = (static_cast<std::size_t>(n) * C + c) * HW + i;
                const double xhat = (x[j] - mean[c]) * inv_std;
                gx[j] += gamma[c] * inv_std * (gy[j] - sum_g / m - xhat * sum_gxh / m);
            }
    }
}

void leaky_relu_forward(const double* x, double slope, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void leaky_relu_backward(const double* x, double slope, const double* gy, double* gx,
                         std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) gx[i] += x[i] > 0.0 ? gy[i] : slope * gy[i];
}

void sigmoid_forward(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}

void sigmoid_backward(const double* y, const double* gy, double* gx, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) gx[i] += gy[i] * y[i] * (1.0 - y[i]);
}

void avg_pool2_forward(const double* x, double* y, int N, int C, int H, int W) {
    const int Ho = H / 2, Wo = W / 2;
    for (int p = 0; p < N * C; ++p)
        for (int yy = 0; yy < Ho; ++yy)
            for (int xx = 0; xx < Wo; ++xx) {
                double s = 0.0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        s += x[static_cast<std::size_t>(p) * H * W +
                               static_cast<std::size_t>(2 * yy + a) * W + 2 * xx + b];
                y[static_cast<std::size_t>(p) * Ho * Wo + static_cast<std::size_t>(yy) * Wo + xx] =
                    s / 4.0;
            }
}

void avg_pool2_backward(const double* gy, double* gx, int N, int C, int H, int W) {
    const int Ho = H / 2, Wo = W / 2;
    for (int p = 0; p < N * C; ++p)
        for (int yy = 0; yy < H; ++yy)
            for (int xx = 0; xx < W; ++xx)
                gx[static_cast<std::size_t>(p) * H * W + static_cast<std::size_t>(yy) * W + xx] +=
                    0.25 * gy[static_cast<std::size_t>(p) * Ho * Wo +
                              static_cast<std::size_t>(yy / 2) * Wo + xx / 2];
}

void blur_rows_forward(const double* x, double* y, const double* k, int taps, int rows, int W) {
    const int r = taps / 2;
    for (int row = 0; row < rows; ++row)
        for (int i = 0; i < W; ++i) {
            double s = 0.0;
            for (int t = 0; t < taps; ++t)
                s += k[t] * x[static_cast<std::size_t>(row) * W + reflect(i + t - r, W)];
            y[static_cast<std::size_t>(row) * W + i] = s;
        }
}

void blur_rows_adjoint(const double* gy, double* gx, const double* k, int taps, int rows, int W) {
    const int r = taps / 2;
    for (int row = 0; row < rows; ++row)
        for (int i = 0; i < W; ++i)
            for (int t = 0; t < taps; ++t)
                gx[static_cast<std::size_t>(row) * W + reflect(i + t - r, W)] +=
                    k[t] * gy[static_cast<std::size_t>(row) * W + i];
}

void blur_cols_forward(const double* x, double* y, const double* k, int taps, int planes,
                       int H, int W) {
    const int r = taps / 2;
    for (int p = 0; p < planes; ++p)
        for (int yy = 0; yy < H; ++yy)
            for (int i = 0; i < W; ++i) {
                double s = 0.0;
                for (int t = 0; t < taps; ++t)
                    s += k[t] * x[static_cast<std::size_t>(p) * H * W +
                                  static_cast<std::size_t>(reflect(yy + t - r, H)) * W + i];
                y[static_cast<std::size_t>(p) * H * W + static_cast<std::size_t>(yy) * W + i] = s;
            }
}

void blur_cols_adjoint(const double* gy, double* gx, const double* k, int taps, int planes,
                       int H, int W) {
    const int r = taps / 2;
    for (int p = 0; p < planes; ++p)
        for (int yy = 0; yy < H; ++yy)
            for (int i = 0; i < W; ++i)
                for (int t = 0; t < taps; ++t)
                    gx[static_cast<std::size_t>(p) * H * W +
                       static_cast<std::size_t>(reflect(yy + t - r, H)) * W + i] +=
                        k[t] * gy[static_cast<std::size_t>(p) * H * W +
                                  static_cast<std::size_t>(yy) * W + i];
}

void global_avg_pool_forward(const double* x, double* y, int N, int C, int HW) {
    for (int p = 0; p < N * C; ++p) {
        double s = 0.0;
        for (int i = 0; i < HW; ++i) s += x[static_cast<std::size_t>(p) * HW + i];
        y[p] = s / HW;
    }
}

void global_avg_pool_backward(const double* gy, double* gx, int N, int C, int HW) {
    for (int p = 0; p < N * C; ++p)
        for (int i = 0; i < HW; ++i) gx[static_cast<std::size_t>(p) * HW + i] += gy[p] / HW;
}

void linear_forward(const double* x, const double* w, const double* b, double* y,
                    int N, int In, int Out) {
    for (int n = 0; n < N; ++n)
        for (int o = 0; o < Out; ++o) {
            double s = b ? b[o] : 0.0;
            for (int i = 0; i < In; ++i)
                s += x[static_cast<std::size_t>(n) * In + i] * w[static_cast<std::size_t>(o) * In + i];
            y[static_cast<std::size_t>(n) * Out + o] = s;
        }
}

void linear_backward(const double* x, const double* w, const double* gy, double* gx,
                     double* gw, double* gb, int N, int In, int Out) {
    for (int n = 0; n < N; ++n)
        for (int o = 0; o < Out; ++o) {
            const double g = gy[static_cast<std::size_t>(n) * Out + o];
            if (gb) gb[o] += g;
            for (int i = 0; i < In; ++i) {
                if (gx) gx[static_cast<std::size_t>(n) * In + i] += g * w[static_cast<std::size_t>(o) * In + i];
                if (gw) gw[static_cast<std::size_t>(o) * In + i] += g * x[static_cast<std::size_t>(n) * In + i];
            }
        }
}

double reduce_sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

void vadd(const double* a, const double* b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] + b[i];
}
void vsub(const double* a, const double* b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] - b[i];
}
void vmul(const double* a, const double* b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}
void vdiv(const double* a, const double* b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] / b[i];
}
void vaffine(const double* x, double scale, double shift, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = scale * x[i] + shift;
}
void vrsub(double c, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = c - x[i];
}
void vlog(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::log(x[i]);
}
void vsqrt(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::sqrt(x[i]);
}
void vpow(const double* x, double p, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::pow(x[i], p);
}
void vclamp(const double* x, double lo, double hi, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::min(hi, std::max(lo, x[i]));
}
void acc(double* dst, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}
void acc_scaled(double* dst, const double* src, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += s * src[i];
}
void acc_mul(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += a[i] * b[i];
}
void acc_div(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += a[i] / b[i];
}
void acc_div_out(double* dst, const double* gy, const double* z, const double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] -= gy[i] * z[i] / y[i];
}
void acc_pow_back(double* dst, const double* gy, const double* x, double p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += gy[i] * p * std::pow(x[i], p - 1.0);
}
void acc_sqrt_back(double* dst, const double* gy, const double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (y[i] > 0.0) dst[i] += gy[i] * 0.5 / y[i];
}
void acc_clamp_back(double* dst, const double* gy, const double* x, double lo, double hi,
                    std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] >= lo && x[i] <= hi) dst[i] += gy[i];
}

} // namespace tscl::kern_ref
