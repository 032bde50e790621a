#include "tscl/metrics.hpp"

#include <cmath>

#include "tscl/errors.hpp"
#include "tscl/ops.hpp"

namespace tscl {

namespace {

constexpr double kC1 = 0.01 * 0.01;  // (K1*L)^2, L = 1
constexpr double kC2 = 0.03 * 0.03;
constexpr double kMsTermFloor = 1e-6;

// Canonical five-scale exponents.
constexpr double kMsWeights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

struct SsimMaps {
    Tensor full;  // luminance * contrast-structure
    Tensor cs;    // contrast-structure only
};

SsimMaps ssim_maps(const Tensor& a, const Tensor& b, int window, double sigma) {
    if (a.shape() != b.shape())
        throw ShapeError("ssim: shape mismatch: " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    if (a.ndim() != 4) throw ShapeError("ssim: expected 4-d image, got " + shape_str(a.shape()));
    if (a.dim(2) < window || a.dim(3) < window)
        throw MetricError("ssim: image " + std::to_string(a.dim(2)) + "x" +
                          std::to_string(a.dim(3)) + " is smaller than the " +
                          std::to_string(window) + "x" + std::to_string(window) +
                          " window; configure a smaller window");

    using namespace ops;
    Tensor mu_a = gaussian_blur(a, window, sigma);
    Tensor mu_b = gaussian_blur(b, window, sigma);
    Tensor mu_ab = mul(mu_a, mu_b);
    Tensor mu_aa = mul(mu_a, mu_a);
    Tensor mu_bb = mul(mu_b, mu_b);
    Tensor var_a = sub(gaussian_blur(mul(a, a), window, sigma), mu_aa);
    Tensor var_b = sub(gaussian_blur(mul(b, b), window, sigma), mu_bb);
    Tensor cov = sub(gaussian_blur(mul(a, b), window, sigma), mu_ab);

    Tensor lum = div(add_scalar(mul_scalar(mu_ab, 2.0), kC1),
                     add_scalar(add(mu_aa, mu_bb), kC1));
    Tensor cs = div(add_scalar(mul_scalar(cov, 2.0), kC2),
                    add_scalar(add(var_a, var_b), kC2));
    return {mul(lum, cs), cs};
}

} // namespace

Tensor ssim(const Tensor& a, const Tensor& b, int window, double sigma) {
    return ops::mean(ssim_maps(a, b, window, sigma).full);
}

Tensor ms_ssim(const Tensor& a, const Tensor& b, int scales, int window, double sigma) {
    if (scales < 1 || scales > 5)
        throw MetricError("ms_ssim: scales must be in [1, 5], got " + std::to_string(scales));
    if (a.ndim() != 4)
        throw ShapeError("ms_ssim: expected 4-d image, got " + shape_str(a.shape()));
    const int factor = 1 << (scales - 1);
    if (a.dim(2) % factor != 0 || a.dim(3) % factor != 0)
        throw MetricError("ms_ssim: image " + std::to_string(a.dim(2)) + "x" +
                          std::to_string(a.dim(3)) + " is not divisible by 2^" +
                          std::to_string(scales - 1));
    if (a.dim(2) / factor < window || a.dim(3) / factor < window)
        throw MetricError("ms_ssim: too many scales for image size (coarsest scale " +
                          std::to_string(a.dim(2) / factor) + "x" +
                          std::to_string(a.dim(3) / factor) + " is smaller than the " +
                          std::to_string(window) + "-tap window)");

    double wsum = 0.0;
    for (int j = 0; j < scales; ++j) wsum += kMsWeights[j];

    using namespace ops;
    Tensor cur_a = a, cur_b = b;
    Tensor result;
    for (int j = 0; j < scales; ++j) {
        SsimMaps maps = ssim_maps(cur_a, cur_b, window, sigma);
        const bool coarsest = (j == scales - 1);
        Tensor term = mean(coarsest ? maps.full : maps.cs);
        // Floor keeps the power well defined on pathological inputs.
        term = clamp(term, kMsTermFloor, std::numeric_limits<double>::infinity());
        Tensor factor_t = pow_scalar(term, kMsWeights[j] / wsum);
        result = result.defined() ? mul(result, factor_t) : factor_t;
        if (!coarsest) {
            cur_a = avg_pool2(cur_a);
            cur_b = avg_pool2(cur_b);
        }
    }
    return result;
}

Tensor rmse_loss(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape())
        throw ShapeError("rmse: shape mismatch: " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    using namespace ops;
    Tensor d = sub(a, b);
    return ops::sqrt(mean(mul(d, d)));
}

double rmse(const Tensor& a, const Tensor& b) { return rmse_loss(a, b).item(); }

double psnr(const Tensor& a, const Tensor& b) {
    const double r = rmse(a, b);
    if (r < 1e-5) return 100.0;
    return 20.0 * std::log10(1.0 / r);
}

Tensor bce(const Tensor& pred, const Tensor& target) {
    if (pred.shape() != target.shape())
        throw ShapeError("bce: shape mismatch: " + shape_str(pred.shape()) + " vs " +
                         shape_str(target.shape()));
    using namespace ops;
    Tensor p = clamp(pred, 1e-7, 1.0 - 1e-7);
    Tensor pos = mul(target, ops::log(p));
    Tensor neg = mul(rsub_scalar(1.0, target), ops::log(rsub_scalar(1.0, p)));
    return mul_scalar(mean(add(pos, neg)), -1.0);
}

Tensor encode_loss(const Tensor& cover, const Tensor& stego, const MetricOpts& opts) {
    using namespace ops;
    Tensor s = ssim(cover, stego, opts.ssim_window, opts.ssim_sigma);
    Tensor ms = ms_ssim(cover, stego, opts.msssim_scales, opts.msssim_window, opts.ssim_sigma);
    Tensor term = add(mul_scalar(rsub_scalar(1.0, s), 0.5), mul_scalar(rsub_scalar(1.0, ms), 0.5));
    return add(term, mul_scalar(rmse_loss(cover, stego), 0.3));
}

Tensor total_loss(const WeightVector& w, const Tensor& loss_encode, const Tensor& loss_decode,
                  const Tensor& loss_steg) {
    using namespace ops;
    return add(add(mul_scalar(loss_encode, w.encode), mul_scalar(loss_decode, w.decode)),
               mul_scalar(loss_steg, w.steganalysis));
}

double total_loss(const WeightVector& w, const LossTriple& losses) {
    return w.encode * losses.encode + w.decode * losses.decode +
           w.steganalysis * losses.steganalysis;
}

double bit_accuracy(const Tensor& bits, const Tensor& pred) {
    if (bits.shape() != pred.shape())
        throw ShapeError("bit_accuracy: shape mismatch: " + shape_str(bits.shape()) + " vs " +
                         shape_str(pred.shape()));
    std::size_t hits = 0;
    const std::size_t n = bits.numel();
    for (std::size_t i = 0; i < n; ++i)
        if (std::round(pred.data()[i]) == bits.data()[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(n);
}

} // namespace tscl
