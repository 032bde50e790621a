#include "tscl/models.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "tscl/errors.hpp"
#include "tscl/ops.hpp"
#include "tscl/rng.hpp"

namespace tscl {

Tensor conv_block_forward(ConvBlock& block, const Tensor& x, bool train) {
    Tensor y = ops::conv2d(x, block.w, block.b);
    if (block.has_bn)
        y = ops::batch_norm(y, block.gamma, block.beta, block.running_mean, block.running_var,
                            train);
    switch (block.act) {
        case ConvBlock::Act::LeakyRelu: return ops::leaky_relu(y, 0.01);
        case ConvBlock::Act::Sigmoid: return ops::sigmoid(y);
        case ConvBlock::Act::None: return y;
    }
    return y;
}

std::vector<int> encoder_widths(int payload_depth) {
    return {3 + payload_depth, 32, 32, 64, 64, 64, 32, 32, 16, 3};
}

std::vector<int> decoder_widths(int payload_depth) {
    return {3, 32, 64, 64, 32, payload_depth};
}

std::vector<int> steganalyzer_widths() { return {3, 16, 32, 64, 64}; }

namespace {

constexpr double kLeakySlope = 0.01;

ConvBlock make_block(Rng& rng, int cin, int cout, bool bn, ConvBlock::Act act) {
    ConvBlock blk;
    const double gain = std::sqrt(2.0 / (1.0 + kLeakySlope * kLeakySlope));
    const double bound = gain * std::sqrt(3.0 / (static_cast<double>(cin) * 9.0));
    std::vector<double> w(static_cast<std::size_t>(cout) * cin * 9);
    for (auto& v : w) v = rng.uniform(-bound, bound);
    blk.w = Tensor::from({cout, cin, 3, 3}, std::move(w), true);
    blk.b = Tensor::zeros({cout}, true);
    blk.has_bn = bn;
    if (bn) {
        blk.gamma = Tensor::full({cout}, 1.0, true);
        blk.beta = Tensor::zeros({cout}, true);
        blk.running_mean = Tensor::zeros({cout});
        blk.running_var = Tensor::full({cout}, 1.0);
    }
    blk.act = act;
    return blk;
}

std::vector<ConvBlock> make_stack(Rng& rng, const std::vector<int>& widths,
                                  ConvBlock::Act final_act, bool final_bn) {
    std::vector<ConvBlock> blocks;
    const std::size_t n = widths.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        const bool last = (i + 1 == n);
        blocks.push_back(make_block(rng, widths[i], widths[i + 1], last ? final_bn : true,
                                    last ? final_act : ConvBlock::Act::LeakyRelu));
    }
    return blocks;
}

} // namespace

ModelParams init_params(std::uint64_t seed, int payload_depth, int image_size) {
    if (payload_depth < 1 || payload_depth > 3)
        throw ConfigError("payload depth must be 1, 2 or 3, got " +
                          std::to_string(payload_depth));
    Rng rng(seed);
    ModelParams mp;
    mp.payload_depth = payload_depth;
    mp.image_size = image_size;
    mp.encoder.payload_depth = payload_depth;
    mp.encoder.blocks =
        make_stack(rng, encoder_widths(payload_depth), ConvBlock::Act::Sigmoid, false);
    mp.decoder.payload_depth = payload_depth;
    mp.decoder.blocks =
        make_stack(rng, decoder_widths(payload_depth), ConvBlock::Act::Sigmoid, false);
    mp.steganalyzer.blocks =
        make_stack(rng, steganalyzer_widths(), ConvBlock::Act::LeakyRelu, true);
    {
        const double gain = std::sqrt(2.0 / (1.0 + kLeakySlope * kLeakySlope));
        const double bound = gain * std::sqrt(3.0 / 64.0);
        std::vector<double> w(64);
        for (auto& v : w) v = rng.uniform(-bound, bound);
        mp.steganalyzer.fc_w = Tensor::from({1, 64}, std::move(w), true);
        mp.steganalyzer.fc_b = Tensor::zeros({1}, true);
    }
    return mp;
}

Tensor encoder_forward(EncoderParams& params, const Tensor& cover, const Tensor& payload,
                       bool train) {
    if (payload.dim(1) != params.payload_depth)
        throw ShapeError("encoder: payload depth mismatch: payload " +
                         shape_str(payload.shape()) + " vs configured depth " +
                         std::to_string(params.payload_depth));
    Tensor x = ops::concat_channels(cover, payload);
    for (auto& blk : params.blocks) x = conv_block_forward(blk, x, train);
    return x;
}

Tensor decoder_forward(DecoderParams& params, const Tensor& stego, bool train) {
    Tensor x = stego;
    for (auto& blk : params.blocks) x = conv_block_forward(blk, x, train);
    return x;
}

Tensor steganalyzer_forward(SteganalyzerParams& params, const Tensor& images, bool train) {
    Tensor x = images;
    for (auto& blk : params.blocks) x = conv_block_forward(blk, x, train);
    x = ops::global_avg_pool(x);
    x = ops::linear(x, params.fc_w, params.fc_b);
    return ops::sigmoid(x);
}

namespace {

void collect_block(std::vector<NamedParam>& out, const std::string& prefix, ConvBlock& blk) {
    out.push_back({prefix + ".w", blk.w, true});
    out.push_back({prefix + ".b", blk.b, true});
    if (blk.has_bn) {
        out.push_back({prefix + ".gamma", blk.gamma, true});
        out.push_back({prefix + ".beta", blk.beta, true});
        out.push_back({prefix + ".running_mean", blk.running_mean, false});
        out.push_back({prefix + ".running_var", blk.running_var, false});
    }
}

void collect_stack(std::vector<NamedParam>& out, const std::string& prefix,
                   std::vector<ConvBlock>& blocks) {
    for (std::size_t i = 0; i < blocks.size(); ++i)
        collect_block(out, prefix + ".block" + std::to_string(i), blocks[i]);
}

} // namespace

std::vector<NamedParam> encoder_decoder_params(ModelParams& params) {
    std::vector<NamedParam> out;
    collect_stack(out, "encoder", params.encoder.blocks);
    collect_stack(out, "decoder", params.decoder.blocks);
    return out;
}

std::vector<NamedParam> steganalyzer_params(ModelParams& params) {
    std::vector<NamedParam> out;
    collect_stack(out, "steganalyzer", params.steganalyzer.blocks);
    out.push_back({"steganalyzer.fc.w", params.steganalyzer.fc_w, true});
    out.push_back({"steganalyzer.fc.b", params.steganalyzer.fc_b, true});
    return out;
}

std::vector<NamedParam> named_params(ModelParams& params) {
    std::vector<NamedParam> out = encoder_decoder_params(params);
    auto steg = steganalyzer_params(params);
    out.insert(out.end(), steg.begin(), steg.end());
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoint format (all integers little-endian):
//   char[4]  magic "TSCL"
//   u32      version (1)
//   u32      payload depth
//   u32      image size
//   3x       u32 count + u32[] widths (encoder, decoder, steganalyzer)
//   u64      total parameter doubles
//   f64[]    parameters in declaration order
//   u8       has-adam flag
//   if set:  u64 step, u64 buffer doubles, f64[] m, f64[] v
// ---------------------------------------------------------------------------

namespace {

static_assert(sizeof(double) == 8);

template <typename T>
void write_raw(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& is, const std::string& path) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw ParseError("checkpoint " + path + ": truncated at byte " +
                              std::to_string(static_cast<long long>(is.tellg())));
    return v;
}

void write_widths(std::ofstream& os, const std::vector<int>& widths) {
    write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(widths.size()));
    for (int w : widths) write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(w));
}

std::vector<int> read_widths(std::ifstream& is, const std::string& path) {
    const auto n = read_raw<std::uint32_t>(is, path);
    std::vector<int> widths(n);
    for (auto& w : widths) w = static_cast<int>(read_raw<std::uint32_t>(is, path));
    return widths;
}

} // namespace

void save_checkpoint(const std::string& path, ModelParams& params, const AdamBlob* adam) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ParseError("checkpoint: cannot open " + path + " for writing");
    os.write("TSCL", 4);
    write_raw<std::uint32_t>(os, 1u);
    write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(params.payload_depth));
    write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(params.image_size));
    write_widths(os, encoder_widths(params.payload_depth));
    write_widths(os, decoder_widths(params.payload_depth));
    write_widths(os, steganalyzer_widths());

    auto all = named_params(params);
    std::uint64_t total = 0;
    for (auto& p : all) total += p.tensor.numel();
    write_raw<std::uint64_t>(os, total);
    for (auto& p : all)
        os.write(reinterpret_cast<const char*>(p.tensor.data()),
                 static_cast<std::streamsize>(p.tensor.numel() * sizeof(double)));

    write_raw<std::uint8_t>(os, adam ? 1u : 0u);
    if (adam) {
        write_raw<std::uint64_t>(os, adam->step);
        std::uint64_t blob = 0;
        for (auto& m : adam->m) blob += m.size();
        write_raw<std::uint64_t>(os, blob);
        for (auto& m : adam->m)
            os.write(reinterpret_cast<const char*>(m.data()),
                     static_cast<std::streamsize>(m.size() * sizeof(double)));
        for (auto& v : adam->v)
            os.write(reinterpret_cast<const char*>(v.data()),
                     static_cast<std::streamsize>(v.size() * sizeof(double)));
    }
    if (!os) throw ParseError("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError("checkpoint: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "TSCL", 4) != 0)
        throw ParseError("checkpoint " + path + ": bad magic");
    const auto version = read_raw<std::uint32_t>(is, path);
    if (version != 1)
        throw ParseError("checkpoint " + path + ": unsupported version " +
                         std::to_string(version));
    const int depth = static_cast<int>(read_raw<std::uint32_t>(is, path));
    const int size = static_cast<int>(read_raw<std::uint32_t>(is, path));

    Checkpoint ck;
    ck.params = init_params(0, depth, size);
    if (read_widths(is, path) != encoder_widths(depth) ||
        read_widths(is, path) != decoder_widths(depth) ||
        read_widths(is, path) != steganalyzer_widths())
        throw ParseError("checkpoint " + path + ": channel plan mismatch");

    auto all = named_params(ck.params);
    std::uint64_t total = 0;
    for (auto& p : all) total += p.tensor.numel();
    if (read_raw<std::uint64_t>(is, path) != total)
        throw ParseError("checkpoint " + path + ": parameter count mismatch");
    for (auto& p : all) {
        is.read(reinterpret_cast<char*>(p.tensor.data()),
                static_cast<std::streamsize>(p.tensor.numel() * sizeof(double)));
        if (!is) throw ParseError("checkpoint " + path + ": truncated parameter data");
    }

    if (read_raw<std::uint8_t>(is, path)) {
        AdamBlob blob;
        blob.step = read_raw<std::uint64_t>(is, path);
        const auto doubles = read_raw<std::uint64_t>(is, path);
        std::uint64_t expect = 0;
        std::vector<std::size_t> sizes;
        for (auto& p : all)
            if (p.trainable && p.name.rfind("steganalyzer", 0) != 0) {
                sizes.push_back(p.tensor.numel());
                expect += p.tensor.numel();
            }
        if (doubles != expect)
            throw ParseError("checkpoint " + path + ": optimizer state size mismatch");
        auto read_bufs = [&](std::vector<std::vector<double>>& dst) {
            for (std::size_t s : sizes) {
                std::vector<double> buf(s);
                is.read(reinterpret_cast<char*>(buf.data()),
                        static_cast<std::streamsize>(s * sizeof(double)));
                if (!is) throw ParseError("checkpoint " + path + ": truncated optimizer state");
                dst.push_back(std::move(buf));
            }
        };
        read_bufs(blob.m);
        read_bufs(blob.v);
        ck.adam = std::move(blob);
    }
    return ck;
}

} // namespace tscl
