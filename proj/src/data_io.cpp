#include "tscl/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "tscl/errors.hpp"

namespace fs = std::filesystem;

namespace tscl {

namespace {

int parse_ppm_int(std::ifstream& is, const std::string& path) {
    // Skips whitespace and '#' comments, then reads a decimal value.
    int ch = is.get();
    while (is) {
        if (ch == '#') {
            while (is && ch != '\n') ch = is.get();
        } else if (std::isspace(ch)) {
            ch = is.get();
        } else {
            break;
        }
    }
    if (!is || !std::isdigit(ch))
        throw ParseError("ppm " + path + ": expected integer at byte " +
                         std::to_string(static_cast<long long>(is.tellg())));
    long value = 0;
    while (is && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        ch = is.get();
    }
    return static_cast<int>(value);
}

} // namespace

Tensor load_ppm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError("ppm " + path + ": cannot open");
    char magic[2];
    is.read(magic, 2);
    if (!is || magic[0] != 'P')
        throw ParseError("ppm " + path + ": bad magic at byte 0");
    if (magic[1] != '6')
        throw ParseError("ppm " + path + ": unsupported variant P" + std::string(1, magic[1]) +
                         " (only binary P6 is handled)");
    const int w = parse_ppm_int(is, path);
    const int h = parse_ppm_int(is, path);
    const int maxval = parse_ppm_int(is, path);
    if (w <= 0 || h <= 0) throw ParseError("ppm " + path + ": bad dimensions");
    if (maxval != 255)
        throw ParseError("ppm " + path + ": maxval must be 255, got " + std::to_string(maxval));
    // parse_ppm_int consumed the single whitespace after maxval already.
    const std::size_t pixels = static_cast<std::size_t>(w) * h;
    std::vector<unsigned char> raw(pixels * 3);
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(is.gcount()) != raw.size())
        throw ParseError("ppm " + path + ": truncated pixel data at byte " +
                         std::to_string(static_cast<long long>(is.tellg() == -1
                                                                   ? 0
                                                                   : is.tellg())) +
                         " (" + std::to_string(is.gcount()) + " of " +
                         std::to_string(raw.size()) + " bytes)");
    Tensor img = Tensor::zeros({3, h, w});
    for (std::size_t p = 0; p < pixels; ++p)
        for (int c = 0; c < 3; ++c)
            img.data()[static_cast<std::size_t>(c) * pixels + p] = raw[p * 3 + c] / 255.0;
    return img;
}

void save_ppm(const Tensor& image, const std::string& path) {
    if (image.ndim() != 3 || image.dim(0) != 3)
        throw ShapeError("save_ppm: expected [3,H,W] image, got " + shape_str(image.shape()));
    const int h = image.dim(1), w = image.dim(2);
    const std::size_t pixels = static_cast<std::size_t>(w) * h;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ParseError("ppm " + path + ": cannot open for writing");
    os << "P6\n" << w << " " << h << "\n255\n";
    std::vector<unsigned char> raw(pixels * 3);
    for (std::size_t p = 0; p < pixels; ++p)
        for (int c = 0; c < 3; ++c) {
            const double v = image.data()[static_cast<std::size_t>(c) * pixels + p];
            raw[p * 3 + c] = static_cast<unsigned char>(
                std::clamp(std::lround(v * 255.0), 0L, 255L));
        }
    os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!os) throw ParseError("ppm " + path + ": write failed");
}

namespace {

void paint_gradient(Tensor& img, Rng& rng, int hw) {
    double c0[3], c1[3];
    for (int c = 0; c < 3; ++c) {
        c0[c] = rng.uniform(0.15, 0.85);
        c1[c] = rng.uniform(0.15, 0.85);
    }
    const double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    const double dx = std::cos(angle), dy = std::sin(angle);
    for (int y = 0; y < hw; ++y)
        for (int x = 0; x < hw; ++x) {
            const double proj =
                ((x * dx + y * dy) / hw + 1.0) * 0.5;  // roughly [0,1]
            const double t = std::clamp(proj, 0.0, 1.0);
            for (int c = 0; c < 3; ++c)
                img.data()[static_cast<std::size_t>(c) * hw * hw +
                           static_cast<std::size_t>(y) * hw + x] = c0[c] + (c1[c] - c0[c]) * t;
        }
}

void paint_shapes(Tensor& img, Rng& rng, int hw) {
    paint_gradient(img, rng, hw);
    const int count = static_cast<int>(rng.uniform_int(3, 6));
    for (int s = 0; s < count; ++s) {
        double col[3];
        for (int c = 0; c < 3; ++c) col[c] = rng.uniform(0.1, 0.9);
        const bool circle = rng.bit() != 0;
        const int cx = static_cast<int>(rng.uniform_int(0, hw - 1));
        const int cy = static_cast<int>(rng.uniform_int(0, hw - 1));
        const int r = static_cast<int>(rng.uniform_int(hw / 8, hw / 3));
        for (int y = std::max(0, cy - r); y < std::min(hw, cy + r + 1); ++y)
            for (int x = std::max(0, cx - r); x < std::min(hw, cx + r + 1); ++x) {
                if (circle && (x - cx) * (x - cx) + (y - cy) * (y - cy) > r * r) continue;
                for (int c = 0; c < 3; ++c)
                    img.data()[static_cast<std::size_t>(c) * hw * hw +
                               static_cast<std::size_t>(y) * hw + x] = col[c];
            }
    }
}

void paint_bandlimited(Tensor& img, Rng& rng, int hw) {
    constexpr int kWaves = 8;
    for (int c = 0; c < 3; ++c) {
        double amp[kWaves], fx[kWaves], fy[kWaves], ph[kWaves];
        double total = 0.0;
        for (int k = 0; k < kWaves; ++k) {
            amp[k] = rng.uniform(0.2, 1.0);
            fx[k] = rng.uniform(-6.0, 6.0);
            fy[k] = rng.uniform(-6.0, 6.0);
            ph[k] = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
            total += amp[k];
        }
        for (int y = 0; y < hw; ++y)
            for (int x = 0; x < hw; ++x) {
                double v = 0.0;
                for (int k = 0; k < kWaves; ++k)
                    v += amp[k] * std::sin(2.0 * 3.14159265358979323846 *
                                               (fx[k] * x + fy[k] * y) / hw +
                                           ph[k]);
                // Map [-total, total] into [0.15, 0.85].
                img.data()[static_cast<std::size_t>(c) * hw * hw +
                           static_cast<std::size_t>(y) * hw + x] =
                    0.5 + 0.35 * (v / total);
            }
    }
}

} // namespace

Dataset synth_corpus(std::uint64_t seed, int count, int image_size) {
    if (count < 10) throw ConfigError("synthetic corpus needs count >= 10, got " +
                                      std::to_string(count));
    if (image_size < 8) throw ConfigError("synthetic corpus needs image size >= 8");
    Rng rng(seed);
    Dataset data;
    data.image_size = image_size;
    data.images.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Tensor img = Tensor::zeros({3, image_size, image_size});
        switch (i % 3) {
            case 0: paint_gradient(img, rng, image_size); break;
            case 1: paint_shapes(img, rng, image_size); break;
            default: paint_bandlimited(img, rng, image_size); break;
        }
        for (std::size_t j = 0; j < img.numel(); ++j)
            img.data()[j] = std::clamp(img.data()[j], 0.0, 1.0);
        data.images.push_back(std::move(img));
    }
    data.train_count = static_cast<std::size_t>(count * 7 / 10);
    data.val_count = static_cast<std::size_t>(count * 15 / 100);
    return data;
}

Dataset load_corpus_dir(const std::string& root) {
    Dataset data;
    auto load_split = [&](const char* split) {
        const fs::path dir = fs::path(root) / split;
        if (!fs::is_directory(dir))
            throw ParseError("corpus: missing directory " + dir.string());
        std::vector<std::string> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".ppm") files.push_back(e.path().string());
        std::sort(files.begin(), files.end());
        std::size_t n = 0;
        for (const auto& f : files) {
            Tensor img = load_ppm(f);
            if (data.image_size == 0) data.image_size = img.dim(1);
            if (img.dim(1) != data.image_size || img.dim(2) != data.image_size)
                throw ParseError("corpus: image size mismatch in " + f);
            data.images.push_back(std::move(img));
            ++n;
        }
        return n;
    };
    data.train_count = load_split("train");
    data.val_count = load_split("val");
    load_split("test");
    if (data.images.empty()) throw ParseError("corpus: no .ppm images under " + root);
    return data;
}

void save_corpus_dir(const Dataset& data, const std::string& root) {
    const char* splits[3] = {"train", "val", "test"};
    const std::size_t bounds[4] = {0, data.train_count, data.train_count + data.val_count,
                                   data.images.size()};
    for (int s = 0; s < 3; ++s) {
        const fs::path dir = fs::path(root) / splits[s];
        fs::create_directories(dir);
        for (std::size_t i = bounds[s]; i < bounds[s + 1]; ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "%05zu.ppm", i);
            save_ppm(data.images[i], (dir / name).string());
        }
    }
}

Tensor payload_from_rng(Rng& rng, int n, int depth, int image_size) {
    Tensor bits = Tensor::zeros({n, depth, image_size, image_size});
    for (std::size_t i = 0; i < bits.numel(); ++i)
        bits.data()[i] = static_cast<double>(rng.bit());
    return bits;
}

Tensor payload_gen(const PayloadSpec& spec, int n, int image_size) {
    if (spec.depth < 1 || spec.depth > 3)
        throw ConfigError("payload depth must be 1, 2 or 3, got " + std::to_string(spec.depth));
    Rng rng(spec.seed);
    return payload_from_rng(rng, n, spec.depth, image_size);
}

std::uint64_t corpus_hash(const Dataset& data) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](unsigned char byte) {
        h ^= byte;
        h *= 1099511628211ull;
    };
    for (const auto& img : data.images)
        for (std::size_t i = 0; i < img.numel(); ++i)
            mix(static_cast<unsigned char>(
                std::clamp(std::lround(img.data()[i] * 255.0), 0L, 255L)));
    return h;
}

} // namespace tscl
