#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "tscl/rng.hpp"
#include "tscl/tensor.hpp"

namespace tscl {

/// Load a binary PPM (P6, maxval 255) as a [3,H,W] tensor in [0,1].
Tensor load_ppm(const std::string& path);

/// Save a [3,H,W] tensor in [0,1] as binary PPM; values are rounded to
/// 8 bits and clamped.
void save_ppm(const Tensor& image, const std::string& path);

/// Cover-image corpus with disjoint, exhaustive index-range splits
/// (floor(0.7c) train / floor(0.15c) val / remainder test).
struct Dataset {
    std::vector<Tensor> images;  // each [3,H,W]
    std::size_t train_count = 0;
    std::size_t val_count = 0;
    int image_size = 0;

    std::size_t test_count() const { return images.size() - train_count - val_count; }
    const Tensor& train(std::size_t i) const { return images[i]; }
    const Tensor& val(std::size_t i) const { return images[train_count + i]; }
    const Tensor& test(std::size_t i) const { return images[train_count + val_count + i]; }
};

/// Deterministic synthetic corpus: a rotating mix of smooth gradients,
/// random geometric shapes on gradient backgrounds, and band-limited
/// (sinusoid-mixture) noise. Pixels stay in [0,1].
Dataset synth_corpus(std::uint64_t seed, int count, int image_size);

/// Load a corpus from `<root>/{train,val,test}/*.ppm` (files sorted by name).
Dataset load_corpus_dir(const std::string& root);

/// Write a corpus to the same layout.
void save_corpus_dir(const Dataset& data, const std::string& root);

struct PayloadSpec {
    int depth = 1;  // bits per pixel, 1..3
    std::uint64_t seed = 0;
};

/// I.i.d. fair payload bits, shape [N, depth, H, H], deterministic per
/// (seed, N, depth, H).
Tensor payload_gen(const PayloadSpec& spec, int n, int image_size);

/// Same bit stream, drawn from a caller-owned generator (the trainer pulls
/// consecutive batches from one stream).
Tensor payload_from_rng(Rng& rng, int n, int depth, int image_size);

/// FNV-1a over the quantized bytes of every image; corpus identity check.
std::uint64_t corpus_hash(const Dataset& data);

} // namespace tscl
