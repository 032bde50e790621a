#pragma once
#include <cstddef>

// Low-level numeric kernels on raw buffers.
//
// tscl::kern     — OpenMP-parallel kernels used by the op layer. Every kernel
//                  is thread-count invariant: each output element is written
//                  by exactly one iteration with a fixed inner summation
//                  order, and full reductions go through a fixed-chunk
//                  partial-sum scheme, so results are bit-identical no matter
//                  how many threads run.
// tscl::kern_ref — naive single-threaded reference implementations, kept for
//                  the kernel tests and the benchmark target. Not used by the
//                  op layer.
//
// Backward kernels accumulate (+=) into their destination buffers.

#define TSCL_KERNEL_DECLS                                                                          \
    void conv3x3_forward(const double* x, const double* w, const double* b, double* y,            \
                         int N, int Cin, int Cout, int H, int W);                                  \
    void conv3x3_backward_input(const double* gy, const double* w, double* gx,                    \
                                int N, int Cin, int Cout, int H, int W);                           \
    void conv3x3_backward_params(const double* x, const double* gy, double* gw, double* gb,       \
                                 int N, int Cin, int Cout, int H, int W);                          \
    /* per-channel biased statistics over the N*H*W elements of each channel */                   \
    void bn_channel_stats(const double* x, int N, int C, int HW, double* mean, double* var);      \
    void bn_forward(const double* x, const double* gamma, const double* beta, const double* mean, \
                    const double* var, double eps, double* y, int N, int C, int HW);               \
    void bn_backward(const double* x, const double* gamma, const double* mean, const double* var, \
                     double eps, const double* gy, double* gx, double* ggamma, double* gbeta,      \
                     int N, int C, int HW);                                                        \
    void leaky_relu_forward(const double* x, double slope, double* y, std::size_t n);              \
    void leaky_relu_backward(const double* x, double slope, const double* gy, double* gx,          \
                             std::size_t n);                                                       \
    void sigmoid_forward(const double* x, double* y, std::size_t n);                               \
    void sigmoid_backward(const double* y, const double* gy, double* gx, std::size_t n);           \
    void avg_pool2_forward(const double* x, double* y, int N, int C, int H, int W);                \
    void avg_pool2_backward(const double* gy, double* gx, int N, int C, int H, int W);             \
    /* separable blur passes; `taps` odd; symmetric edge reflection */                             \
    void blur_rows_forward(const double* x, double* y, const double* k, int taps, int rows,        \
                           int W);                                                                 \
    void blur_rows_adjoint(const double* gy, double* gx, const double* k, int taps, int rows,      \
                           int W);                                                                 \
    void blur_cols_forward(const double* x, double* y, const double* k, int taps, int planes,      \
                           int H, int W);                                                          \
    void blur_cols_adjoint(const double* gy, double* gx, const double* k, int taps, int planes,    \
                           int H, int W);                                                          \
    void global_avg_pool_forward(const double* x, double* y, int N, int C, int HW);                \
    void global_avg_pool_backward(const double* gy, double* gx, int N, int C, int HW);             \
    void linear_forward(const double* x, const double* w, const double* b, double* y, int N,       \
                        int In, int Out);                                                          \
    void linear_backward(const double* x, const double* w, const double* gy, double* gx,           \
                         double* gw, double* gb, int N, int In, int Out);                          \
    double reduce_sum(const double* x, std::size_t n);                                             \
    /* elementwise forward */                                                                      \
    void vadd(const double* a, const double* b, double* y, std::size_t n);                         \
    void vsub(const double* a, const double* b, double* y, std::size_t n);                         \
    void vmul(const double* a, const double* b, double* y, std::size_t n);                         \
    void vdiv(const double* a, const double* b, double* y, std::size_t n);                         \
    void vaffine(const double* x, double scale, double shift, double* y, std::size_t n);           \
    void vrsub(double c, const double* x, double* y, std::size_t n);                               \
    void vlog(const double* x, double* y, std::size_t n);                                          \
    void vsqrt(const double* x, double* y, std::size_t n);                                         \
    void vpow(const double* x, double p, double* y, std::size_t n);                                \
    void vclamp(const double* x, double lo, double hi, double* y, std::size_t n);                  \
    /* elementwise backward accumulators */                                                        \
    void acc(double* dst, const double* src, std::size_t n);             /* dst += src        */   \
    void acc_scaled(double* dst, const double* src, double s, std::size_t n); /* dst += s*src */   \
    void acc_mul(double* dst, const double* a, const double* b, std::size_t n); /* dst += a*b */   \
    void acc_div(double* dst, const double* a, const double* b, std::size_t n); /* dst += a/b */   \
    /* dst -= gy * z / y  (for z = x/y) */                                                         \
    void acc_div_out(double* dst, const double* gy, const double* z, const double* y,              \
                     std::size_t n);                                                               \
    void acc_pow_back(double* dst, const double* gy, const double* x, double p, std::size_t n);    \
    void acc_sqrt_back(double* dst, const double* gy, const double* y, std::size_t n);             \
    void acc_clamp_back(double* dst, const double* gy, const double* x, double lo, double hi,      \
                        std::size_t n);

namespace tscl::kern {
TSCL_KERNEL_DECLS
}

namespace tscl::kern_ref {
TSCL_KERNEL_DECLS
}

#undef TSCL_KERNEL_DECLS
