#include "tscl/ops.hpp"

#include <cmath>
#include <vector>

#include "tscl/errors.hpp"
#include "tscl/kernels.hpp"

namespace tscl::ops {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ShapeError(msg);
}

void require_4d(const Tensor& t, const char* who) {
    if (t.ndim() != 4)
        throw ShapeError(std::string(who) + ": expected 4-d tensor, got " + shape_str(t.shape()));
}

bool grad_wanted(std::initializer_list<Tensor> ins) {
    for (const auto& t : ins)
        if (t.requires_grad()) return true;
    return false;
}

void record(bool wanted, std::function<void()> fn) {
    if (!wanted) return;
    if (Tape* t = Tape::current()) t->record(std::move(fn));
}

Tensor out_like(Shape s, bool rg) { return Tensor::zeros(std::move(s), rg); }

std::vector<double> gaussian_kernel(int window, double sigma) {
    if (window < 3 || window % 2 == 0)
        throw ShapeError("gaussian_blur: window must be odd and >= 3, got " +
                         std::to_string(window));
    std::vector<double> k(static_cast<std::size_t>(window));
    const int r = window / 2;
    double sum = 0.0;
    for (int i = 0; i < window; ++i) {
        const double d = i - r;
        k[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[static_cast<std::size_t>(i)];
    }
    for (auto& v : k) v /= sum;
    return k;
}

} // namespace

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b) {
    require_4d(x, "conv2d");
    require_4d(w, "conv2d weight");
    require(w.dim(2) == 3 && w.dim(3) == 3,
            "conv2d: kernel must be 3x3, got " + shape_str(w.shape()));
    require(x.dim(1) == w.dim(1),
            "conv2d: input channel mismatch: x " + shape_str(x.shape()) + " vs weight " +
                shape_str(w.shape()));
    require(b.ndim() == 1 && b.dim(0) == w.dim(0),
            "conv2d: bias " + shape_str(b.shape()) + " vs weight " + shape_str(w.shape()));
    const int N = x.dim(0), Cin = x.dim(1), H = x.dim(2), W = x.dim(3);
    const int Cout = w.dim(0);

    const bool rg = grad_wanted({x, w, b});
    Tensor y = out_like({N, Cout, H, W}, rg);
    kern::conv3x3_forward(x.data(), w.data(), b.data(), y.data(), N, Cin, Cout, H, W);

    record(rg, [x, w, b, y, N, Cin, Cout, H, W]() mutable {
        if (!y.has_grad()) return;
        if (x.requires_grad()) {
            x.ensure_grad();
            kern::conv3x3_backward_input(y.grad(), w.data(), x.grad(), N, Cin, Cout, H, W);
        }
        if (w.requires_grad() || b.requires_grad()) {
            w.ensure_grad();
            b.ensure_grad();
            kern::conv3x3_backward_params(x.data(), y.grad(), w.grad(), b.grad(), N, Cin, Cout, H,
                                          W);
        }
    });
    return y;
}

Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  Tensor& running_mean, Tensor& running_var, bool train, double momentum,
                  double eps) {
    require_4d(x, "batch_norm");
    const int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    const int HW = H * W;
    require(gamma.ndim() == 1 && gamma.dim(0) == C,
            "batch_norm: gamma " + shape_str(gamma.shape()) + " vs input " + shape_str(x.shape()));
    require(beta.ndim() == 1 && beta.dim(0) == C,
            "batch_norm: beta " + shape_str(beta.shape()) + " vs input " + shape_str(x.shape()));

    const bool rg = grad_wanted({x, gamma, beta});
    Tensor y = out_like(x.shape(), rg);

    if (train) {
        if (static_cast<long long>(N) * HW <= 1)
            throw NumericError("batch_norm: degenerate variance, batch has a single element per "
                               "channel (N*H*W = 1) in train mode");
        Tensor mean_t = Tensor::zeros({C});
        Tensor var_t = Tensor::zeros({C});
        kern::bn_channel_stats(x.data(), N, C, HW, mean_t.data(), var_t.data());
        kern::bn_forward(x.data(), gamma.data(), beta.data(), mean_t.data(), var_t.data(), eps,
                         y.data(), N, C, HW);
        for (int c = 0; c < C; ++c) {
            running_mean.data()[c] =
                (1.0 - momentum) * running_mean.data()[c] + momentum * mean_t.data()[c];
            running_var.data()[c] =
                (1.0 - momentum) * running_var.data()[c] + momentum * var_t.data()[c];
        }
        record(rg, [x, gamma, beta, y, mean_t, var_t, eps, N, C, HW]() mutable {
            if (!y.has_grad()) return;
            x.ensure_grad();
            gamma.ensure_grad();
            beta.ensure_grad();
            kern::bn_backward(x.data(), gamma.data(), mean_t.data(), var_t.data(), eps, y.grad(),
                              x.grad(), gamma.grad(), beta.grad(), N, C, HW);
        });
    } else {
        kern::bn_forward(x.data(), gamma.data(), beta.data(), running_mean.data(),
                         running_var.data(), eps, y.data(), N, C, HW);
        Tensor rm = running_mean, rv = running_var;
        record(rg, [x, gamma, beta, y, rm, rv, eps, N, C, HW]() mutable {
            if (!y.has_grad()) return;
            // Running statistics are constants here, so the Jacobian is a
            // per-channel affine map.
            const std::size_t plane = static_cast<std::size_t>(HW);
            for (int c = 0; c < C; ++c) {
                const double inv_std = 1.0 / std::sqrt(rv.data()[c] + eps);
                const double scale = gamma.data()[c] * inv_std;
                double gg = 0.0, gb = 0.0;
                for (int n = 0; n < N; ++n) {
                    const std::size_t off = (static_cast<std::size_t>(n) * C + c) * plane;
                    if (x.requires_grad()) {
                        x.ensure_grad();
                        kern::acc_scaled(x.grad() + off, y.grad() + off, scale, plane);
                    }
                    for (std::size_t i = 0; i < plane; ++i) {
                        const double xhat = (x.data()[off + i] - rm.data()[c]) * inv_std;
                        gg += y.grad()[off + i] * xhat;
                        gb += y.grad()[off + i];
                    }
                }
                if (gamma.requires_grad()) {
                    gamma.ensure_grad();
                    gamma.grad()[c] += gg;
                }
                if (beta.requires_grad()) {
                    beta.ensure_grad();
                    beta.grad()[c] += gb;
                }
            }
        });
    }
    return y;
}

Tensor leaky_relu(const Tensor& x, double slope) {
    const bool rg = x.requires_grad();
    Tensor y = out_like(x.shape(), rg);
    kern::leaky_relu_forward(x.data(), slope, y.data(), x.numel());
    record(rg, [x, y, slope]() mutable {
        if (!y.has_grad()) return;
        x.ensure_grad();
        kern::leaky_relu_backward(x.data(), slope, y.grad(), x.grad(), x.numel());
    });
    return y;
}

Tensor sigmoid(const Tensor& x) {
    const bool rg = x.requires_grad();
    Tensor y = out_like(x.shape(), rg);
    kern::sigmoid_forward(x.data(), y.data(), x.numel());
    record(rg, [x, y]() mutable {
        if (!y.has_grad()) return;
        x.ensure_grad();
        kern::sigmoid_backward(y.data(), y.grad(), x.grad(), x.numel());
    });
    return y;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    require_4d(a, "concat_channels");
    require_4d(b, "concat_channels");
    require(a.dim(0) == b.dim(0) && a.dim(2) == b.dim(2) && a.dim(3) == b.dim(3),
            "concat_channels: N/H/W mismatch: " + shape_str(a.shape()) + " vs " +
                shape_str(b.shape()));
    const int N = a.dim(0), Ca = a.dim(1), Cb = b.dim(1), H = a.dim(2), W = a.dim(3);
    const std::size_t plane = static_cast<std::size_t>(H) * W;
    const bool rg = grad_wanted({a, b});
    Tensor y = out_like({N, Ca + Cb, H, W}, rg);
    for (int n = 0; n < N; ++n) {
        std::copy(a.data() + static_cast<std::size_t>(n) * Ca * plane,
                  a.data() + static_cast<std::size_t>(n + 1) * Ca * plane,
                  y.data() + static_cast<std::size_t>(n) * (Ca + Cb) * plane);
        std::copy(b.data() + static_cast<std::size_t>(n) * Cb * plane,
                  b.data() + static_cast<std::size_t>(n + 1) * Cb * plane,
                  y.data() + static_cast<std::size_t>(n) * (Ca + Cb) * plane + Ca * plane);
    }
    record(rg, [a, b, y, N, Ca, Cb, plane]() mutable {
        if (!y.has_grad()) return;
        for (int n = 0; n < N; ++n) {
            const double* gy = y.grad() + static_cast<std::size_t>(n) * (Ca + Cb) * plane;
            if (a.requires_grad()) {
                a.ensure_grad();
                kern::acc(a.grad() + static_cast<std::size_t>(n) * Ca * plane, gy, Ca * plane);
            }
            if (b.requires_grad()) {
                b.ensure_grad();
                kern::acc(b.grad() + static_cast<std::size_t>(n) * Cb * plane, gy + Ca * plane,
                          Cb * plane);
            }
        }
    });
    return y;
}

Tensor avg_pool2(const Tensor& x) {
    require_4d(x, "avg_pool2");
    const int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    require(H % 2 == 0 && W % 2 == 0,
            "avg_pool2: spatial size must be even, got " + shape_str(x.shape()));
    const bool rg = x.requires_grad();
    Tensor y = out_like({N, C, H / 2, W / 2}, rg);
    kern::avg_pool2_forward(x.data(), y.data(), N, C, H, W);
    record(rg, [x, y, N, C, H, W]() mutable {
        if (!y.has_grad()) return;
        x.ensure_grad();
        kern::avg_pool2_backward(y.grad(), x.grad(), N, C, H, W);
    });
    return y;
}

Tensor mean(const Tensor& x) {
    const bool rg = x.requires_grad();
    Tensor y = out_like({1}, rg);
    const std::size_t n = x.numel();
    y.data()[0] = kern::reduce_sum(x.data(), n) / static_cast<double>(n);
    record(rg, [x, y, n]() mutable {
        if (!y.has_grad()) return;
        x.ensure_grad();
        const double g = y.grad()[0] / static_cast<double>(n);
        Tensor ones = Tensor::full({static_cast<int>(n)}, 1.0);
        kern::acc_scaled(x.grad(), ones.data(), g, n);
    });
    return y;
}

Tensor gaussian_blur(const Tensor& x, int window, double sigma) {
    require_4d(x, "gaussian_blur");
    const int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    const auto k = gaussian_kernel(window, sigma);
    const bool rg = x.requires_grad();

    Tensor tmp = Tensor::zeros(x.shape());
    Tensor y = out_like(x.shape(), rg);
    kern::blur_rows_forward(x.data(), tmp.data(), k.data(), window, N * C * H, W);
    kern::blur_cols_forward(tmp.data(), y.data(), k.data(), window, N * C, H, W);

    record(rg, [x, y, k, window, N, C, H, W]() mutable {
        if (!y.has_grad()) return;
        x.ensure_grad();
        Tensor t = Tensor::zeros(x.shape());
        kern::blur_cols_adjoint(y.grad(), t.data(), k.data(), window, N * C, H, W);
        kern::blur_rows_adjoint(t.data(), x.grad(), k.data(), window, N * C * H, W);
    });
    return y;
}

Tensor global_avg_pool(const Tensor& x) {
    require_4d(x, "global_avg_pool");
    const int N = x.dim(0), C = x.dim(1), HW = x.dim(2) * x.dim(3);
    const bool rg = x.requires_grad();
    Tensor y = out_like({N, C}, rg);
    kern::global_avg_pool_forward(x.data(), y.data(), N, C, HW);
    record(rg, [x, y, N, C, HW]() mutable {
        if (!y.has_grad()) return;
        x.ensure_grad();
        kern::global_avg_pool_backward(y.grad(), x.grad(), N, C, HW);
    });
    return y;
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
    require(x.ndim() == 2, "linear: expected 2-d input, got " + shape_str(x.shape()));
    require(w.ndim() == 2 && w.dim(1) == x.dim(1),
            "linear: weight " + shape_str(w.shape()) + " vs input " + shape_str(x.shape()));
    require(b.ndim() == 1 && b.dim(0) == w.dim(0),
            "linear: bias " + shape_str(b.shape()) + " vs weight " + shape_str(w.shape()));
    const int N = x.dim(0), In = x.dim(1), Out = w.dim(0);
    const bool rg = grad_wanted({x, w, b});
    Tensor y = out_like({N, Out}, rg);
    kern::linear_forward(x.data(), w.data(), b.data(), y.data(), N, In, Out);
    record(rg, [x, w, b, y, N, In, Out]() mutable {
        if (!y.has_grad()) return;
        double* gx = nullptr;
        double* gw = nullptr;
        double* gb = nullptr;
        if (x.requires_grad()) {
            x.ensure_grad();
            gx = x.grad();
        }
        if (w.requires_grad()) {
            w.ensure_grad();
            gw = w.grad();
        }
        if (b.requires_grad()) {
            b.ensure_grad();
            gb = b.grad();
        }
        kern::linear_backward(x.data(), w.data(), y.grad(), gx, gw, gb, N, In, Out);
    });
    return y;
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* who) {
    if (a.shape() != b.shape())
        throw ShapeError(std::string(who) + ": shape mismatch: " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
}

} // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    const bool rg = grad_wanted({a, b});
    Tensor y = out_like(a.shape(), rg);
    kern::vadd(a.data(), b.data(), y.data(), y.numel());
    record(rg, [a, b, y]() mutable {
        if (!y.has_grad()) return;
        if (a.requires_grad()) {
            a.ensure_grad();
            kern::acc(a.grad(), y.grad(), y.numel());
        }
        if (b.requires_grad()) {
            b.ensure_grad();
            kern::acc(b.grad(), y.grad(), y.numel());
        }
    });
    return y;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    const bool rg = grad_wanted({a, b});
    Tensor y = out_like(a.shape(), rg);
    kern::vsub(a.data(), b.data(), y.data(), y.numel());
    record(rg, [a, b, y]() mutable {
        if (!y.has_grad()) return;
        if (a.requires_grad()) {
            a.ensure_grad();
            kern::acc(a.grad(), y.grad(), y.numel());
        }
        if (b.requires_grad()) {
            b.ensure_grad();
            kern::acc_scaled(b.grad(), y.grad(), -1.0, y.numel());
        }
    });
    return y;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    const bool rg = grad_wanted({a, b});
    Tensor y = out_like(a.shape(), rg);
    kern::vmul(a.data(), b.data(), y.data(), y.numel());
    record(rg, [a, b, y]() mutable {
        if (!y.has_grad()) return;
        if (a.requires_grad()) {
            a.ensure_grad();
            kern::acc_mul(a.grad(), y.grad(), b.data(), y.numel());
        }
        if (b.requires_grad()) {
            b.ensure_grad();
            kern::acc_mul(b.grad(), y.grad(), a.data(), y.numel());
        }
    });
    return y;
}

Tensor div(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "div");
    const bool rg = grad_wanted({a, b});
    Tensor y = out_like(a.shape(), rg);
    kern::vdiv(a.data(), b.data(), y.data(), y.numel());
    record(rg, [a, b, y]() mutable {
        if (!y.has_grad()) return;
        if (a.requires_grad()) {
            a.ensure_grad();
            kern::acc_div(a.grad(), y.grad(), b.data(), y.numel());
        }
        if (b.requires_grad()) {
            b.ensure_grad();
            kern::acc_div_out(b.grad(), y.grad(), y.data(), b.data(), y.numel());
        }
    });
    return y;
}

Tensor add_scalar(const Tensor& x, double c) {
    const bool rg = x.requires_grad();
    Tensor y = out_like(x.shape(), rg);
    kern::vaffine(x.data(), 1.0, c, y.data(), y.numel());
    record(rg, [x, y]() mutable {
        if (!y.has_grad()) return;
        x.ensure_grad();
        kern::acc(x.grad(), y.grad(), y.numel());
    });
    return y;
}

Tensor mul_scalar(const Tensor& x, double s) {
    const bool rg = x.requires_grad();
    Tensor y = out_like(x.shape(), rg);
    kern::vaffine(x.data(), s, 0.0, y.data(), y.numel());
    record(rg, [x, y, s]() mutable {
        if (!y.has_grad()) return;
        x.ensure_grad();
        kern::acc_scaled(x.grad(), y.grad(), s, y.numel());
    });
    return y;
}

Tensor rsub_scalar(double c, const Tensor& x) {
    const bool rg = x.requires_grad();
    Tensor y = out_like(x.shape(), rg);
    kern::vrsub(c, x.data(), y.data(), y.numel());
    record(rg, [x, y]() mutable {
        if (!y.has_grad()) return;
        x.ensure_grad();
        kern::acc_scaled(x.grad(), y.grad(), -1.0, y.numel());
    });
    return y;
}

Tensor log(const Tensor& x) {
    const bool rg = x.requires_grad();
    Tensor y = out_like(x.shape(), rg);
    kern::vlog(x.data(), y.data(), y.numel());
    record(rg, [x, y]() mutable {
        if (!y.has_grad()) return;
        x.ensure_grad();
        kern::acc_div(x.grad(), y.grad(), x.data(), y.numel());
    });
    return y;
}

Tensor sqrt(const Tensor& x) {
    const bool rg = x.requires_grad();
    Tensor y = out_like(x.shape(), rg);
    kern::vsqrt(x.data(), y.data(), y.numel());
    record(rg, [x, y]() mutable {
        if (!y.has_grad()) return;
        x.ensure_grad();
        kern::acc_sqrt_back(x.grad(), y.grad(), y.data(), y.numel());
    });
    return y;
}

Tensor pow_scalar(const Tensor& x, double p) {
    const bool rg = x.requires_grad();
    Tensor y = out_like(x.shape(), rg);
    kern::vpow(x.data(), p, y.data(), y.numel());
    record(rg, [x, y, p]() mutable {
        if (!y.has_grad()) return;
        x.ensure_grad();
        kern::acc_pow_back(x.grad(), y.grad(), x.data(), p, y.numel());
    });
    return y;
}

Tensor clamp(const Tensor& x, double lo, double hi) {
    const bool rg = x.requires_grad();
    Tensor y = out_like(x.shape(), rg);
    kern::vclamp(x.data(), lo, hi, y.data(), y.numel());
    record(rg, [x, y, lo, hi]() mutable {
        if (!y.has_grad()) return;
        x.ensure_grad();
        kern::acc_clamp_back(x.grad(), y.grad(), x.data(), lo, hi, y.numel());
    });
    return y;
}

} // namespace tscl::ops
