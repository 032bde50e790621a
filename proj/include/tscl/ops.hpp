#pragma once
#include "tscl/tensor.hpp"

// Differentiable tensor operations. Forward results are computed by the
// kernels in tscl::kern; when a Tape is in scope and an input requires
// gradients, a backward closure is recorded. All backward paths accumulate
// additively, so a tensor consumed by several branches receives the sum of
// the branch gradients.

namespace tscl::ops {

/// 3x3 convolution, stride 1, zero padding 1 (spatial size preserved).
/// x: [N,Cin,H,W], w: [Cout,Cin,3,3], b: [Cout].
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b);

/// Per-channel batch normalization over N*H*W. Train mode normalizes by
/// batch statistics and updates the running buffers in place (momentum);
/// eval mode normalizes by the running buffers.
Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  Tensor& running_mean, Tensor& running_var, bool train,
                  double momentum = 0.1, double eps = 1e-5);

Tensor leaky_relu(const Tensor& x, double slope = 0.01);
Tensor sigmoid(const Tensor& x);

/// Channel concatenation of two [N,*,H,W] tensors.
Tensor concat_channels(const Tensor& a, const Tensor& b);

/// 2x2 stride-2 mean pooling; requires even H and W.
Tensor avg_pool2(const Tensor& x);

/// Mean over all elements -> scalar tensor.
Tensor mean(const Tensor& x);

/// Depthwise separable Gaussian blur with symmetric edge reflection.
Tensor gaussian_blur(const Tensor& x, int window = 11, double sigma = 1.5);

/// Global average pool [N,C,H,W] -> [N,C].
Tensor global_avg_pool(const Tensor& x);

/// Affine map [N,In] x [Out,In] + [Out] -> [N,Out].
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor add_scalar(const Tensor& x, double c);
Tensor mul_scalar(const Tensor& x, double s);
Tensor rsub_scalar(double c, const Tensor& x);   // c - x
Tensor log(const Tensor& x);
Tensor sqrt(const Tensor& x);
Tensor pow_scalar(const Tensor& x, double p);
/// Clamp to [lo, hi]; gradient passes through inside the bounds.
Tensor clamp(const Tensor& x, double lo, double hi);

} // namespace tscl::ops
