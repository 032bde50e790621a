#pragma once
#include "tscl/dynamics.hpp"
#include "tscl/tensor.hpp"

namespace tscl {

/// Options for the image-similarity terms. The multi-scale default fits
/// 32x32 inputs: 3 scales with a 7-tap window (the coarsest scale must
/// still contain the window).
struct MetricOpts {
    int ssim_window = 11;
    double ssim_sigma = 1.5;
    int msssim_scales = 3;
    int msssim_window = 7;
};

/// Mean local SSIM with a Gaussian window, dynamic range 1
/// (c1 = 0.01^2, c2 = 0.03^2). Differentiable; returns a scalar tensor.
Tensor ssim(const Tensor& a, const Tensor& b, int window = 11, double sigma = 1.5);

/// Multi-scale SSIM, product form: mean contrast-structure terms at the
/// finer scales, full SSIM at the coarsest, canonical exponents renormalized
/// to the scale count. scales = 1 reduces to ssim exactly.
Tensor ms_ssim(const Tensor& a, const Tensor& b, int scales, int window = 11, double sigma = 1.5);

/// sqrt(mean((a-b)^2)) as a differentiable scalar tensor.
Tensor rmse_loss(const Tensor& a, const Tensor& b);
double rmse(const Tensor& a, const Tensor& b);

/// 20*log10(1/rmse) for images in [0,1]; 100 dB cap below rmse = 1e-5.
double psnr(const Tensor& a, const Tensor& b);

/// Mean binary cross entropy; predictions are clamped to
/// [1e-7, 1 - 1e-7] before the logs.
Tensor bce(const Tensor& pred, const Tensor& target);

/// 0.5*(1 - ssim) + 0.5*(1 - ms_ssim) + 0.3*rmse.
Tensor encode_loss(const Tensor& cover, const Tensor& stego, const MetricOpts& opts = {});

/// w_e*L_e + w_d*L_d + w_s*L_s as a graph node.
Tensor total_loss(const WeightVector& w, const Tensor& loss_encode, const Tensor& loss_decode,
                  const Tensor& loss_steg);
double total_loss(const WeightVector& w, const LossTriple& losses);

/// Fraction of payload positions where round(prediction) equals the bit.
double bit_accuracy(const Tensor& bits, const Tensor& pred);

struct MetricReport {
    double ssim = 0.0;
    double msssim = 0.0;
    double psnr = 0.0;
    double rmse = 0.0;
    double bit_accuracy = 0.0;
    double steg_score = 0.0;
};

} // namespace tscl
