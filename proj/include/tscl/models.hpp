#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tscl/tensor.hpp"

namespace tscl {

/// One conv unit: 3x3 conv, optional batch norm, then an activation.
struct ConvBlock {
    enum class Act { LeakyRelu, Sigmoid, None };

    Tensor w;  // [Cout, Cin, 3, 3]
    Tensor b;  // [Cout]
    bool has_bn = true;
    Tensor gamma, beta, running_mean, running_var;  // [Cout] when has_bn
    Act act = Act::LeakyRelu;
};

Tensor conv_block_forward(ConvBlock& block, const Tensor& x, bool train);

/// Channel plans. The payload depth D widens the encoder input.
std::vector<int> encoder_widths(int payload_depth);  // 3+D -> ... -> 3, 9 convs
std::vector<int> decoder_widths(int payload_depth);  // 3 -> ... -> D, 5 convs
std::vector<int> steganalyzer_widths();              // 3 -> ... -> 64, 4 convs

struct EncoderParams {
    std::vector<ConvBlock> blocks;
    int payload_depth = 1;
};

struct DecoderParams {
    std::vector<ConvBlock> blocks;
    int payload_depth = 1;
};

struct SteganalyzerParams {
    std::vector<ConvBlock> blocks;
    Tensor fc_w;  // [1, 64]
    Tensor fc_b;  // [1]
};

struct ModelParams {
    EncoderParams encoder;
    DecoderParams decoder;
    SteganalyzerParams steganalyzer;
    int payload_depth = 1;
    int image_size = 32;
};

/// Kaiming-uniform conv init (LeakyReLU gain, slope 0.01), zero biases,
/// BN gamma = 1 / beta = 0. Deterministic per seed.
ModelParams init_params(std::uint64_t seed, int payload_depth, int image_size);

/// Stego image from cover + payload: channel concat through the conv stack,
/// sigmoid head keeps the output in [0, 1].
Tensor encoder_forward(EncoderParams& params, const Tensor& cover, const Tensor& payload,
                       bool train);

/// Payload probabilities recovered from a (possibly stego) image.
Tensor decoder_forward(DecoderParams& params, const Tensor& stego, bool train);

/// Per-image steganalysis score in (0, 1); near 1 flags hidden content.
/// Output shape [N, 1].
Tensor steganalyzer_forward(SteganalyzerParams& params, const Tensor& images, bool train);

struct NamedParam {
    std::string name;
    Tensor tensor;
    bool trainable = true;
};

/// All parameters in declaration order (conv w/b, then BN gamma/beta and
/// running stats per block; running stats are not trainable).
std::vector<NamedParam> named_params(ModelParams& params);
std::vector<NamedParam> encoder_decoder_params(ModelParams& params);
std::vector<NamedParam> steganalyzer_params(ModelParams& params);

/// Serialized Adam state stored alongside the parameters.
struct AdamBlob {
    std::uint64_t step = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
};

/// Versioned binary checkpoint: magic "TSCL", format version, channel plan,
/// payload depth and image size, then raw little-endian doubles per
/// parameter in declaration order, then the optional optimizer state.
void save_checkpoint(const std::string& path, ModelParams& params,
                     const AdamBlob* adam = nullptr);

struct Checkpoint {
    ModelParams params;
    std::optional<AdamBlob> adam;
};

Checkpoint load_checkpoint(const std::string& path);

} // namespace tscl
