// SPDX-License-Identifier: Apache-2.0
#include "rdh3ec/frame.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rdh3ec/rng.hpp"

namespace rdh3ec {

void check_dimensions(int width, int height) {
    if (width <= 0 || height <= 0 || width % 16 != 0 || height % 16 != 0) {
        throw ValidationError("frame dimensions must be positive multiples of 16, got " +
                              std::to_string(width) + "x" + std::to_string(height));
    }
}

Frame make_frame(int width, int height, uint8_t fill) {
    check_dimensions(width, height);
    Frame f;
    f.width = width;
    f.height = height;
    f.luma.assign(static_cast<size_t>(width) * height, fill);
    return f;
}

Sequence load_raw_sequence(const std::string& path, int width, int height,
                           int count, RawLayout layout) {
    check_dimensions(width, height);
    if (count < 1) throw ValidationError("frame count must be >= 1");

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    const size_t luma_size = static_cast<size_t>(width) * height;
    const size_t frame_size =
        layout == RawLayout::y8 ? luma_size : luma_size + luma_size / 2;

    in.seekg(0, std::ios::end);
    const auto file_size = static_cast<uint64_t>(in.tellg());
    if (file_size < frame_size * static_cast<uint64_t>(count)) {
        throw IoError(path + " too short: need " +
                      std::to_string(frame_size * static_cast<uint64_t>(count)) +
                      " bytes, have " + std::to_string(file_size));
    }
    in.seekg(0, std::ios::beg);

    Sequence seq;
    seq.frames.reserve(count);
    for (int t = 0; t < count; ++t) {
        Frame f = make_frame(width, height);
        in.read(reinterpret_cast<char*>(f.luma.data()), static_cast<std::streamsize>(luma_size));
        if (layout == RawLayout::yuv420) {
            in.seekg(static_cast<std::streamoff>(luma_size / 2), std::ios::cur);
        }
        if (!in) throw IoError("read failure on " + path);
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

namespace {

// Triangle wave with period 512, values 0..255.
int tri512(int64_t u) {
    int m = static_cast<int>(((u % 512) + 512) % 512);
    return m < 256 ? m : 511 - m;
}

// Triangle wave with period 256, values 0..254 (slope 2).
int tri256x2(int64_t u) {
    int m = static_cast<int>(((u % 256) + 256) % 256);
    return 2 * (m < 128 ? m : 255 - m);
}

// Product of two triangle waves drifting (2,1) px per frame. The short-period
// horizontal factor sweeps the local slope over [1, 2] as the vertical factor
// varies, so the quantized spectrum populates every magnitude band of the qp
// sweep instead of collapsing onto one or two levels.
Frame gradient_frame(uint64_t seed, int width, int height, int t) {
    const int ox = static_cast<int>(Rng::mix({seed, 0x6772616411ull}) % 512);
    const int oy = static_cast<int>(Rng::mix({seed, 0x6772616422ull}) % 512);
    Frame f = make_frame(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int u = tri256x2(ox + x - 2 * t);
            const int v = tri256x2(oy + y - t) / 2 + tri512(oy + 3 * (y - t));
            const int p = (u * (v + 256)) / 512; // up to 316; fold back below 256
            f.at(x, y) = static_cast<uint8_t>(p <= 255 ? p : 510 - p);
        }
    }
    return f;
}

// Smoothed noise field: raw splitmix noise, two passes of 3x3 box blur,
// contrast brought down so quantized AC activity stays moderate.
std::vector<uint8_t> texture_field(uint64_t seed, int fw, int fh) {
    std::vector<int> a(static_cast<size_t>(fw) * fh);
    Rng rng(Rng::mix({seed, 0x7465787475726531ull}));
    for (auto& v : a) v = static_cast<int>(rng.next_u64() & 0xFF);

    std::vector<int> b(a.size());
    for (int pass = 0; pass < 6; ++pass) {
        for (int y = 0; y < fh; ++y) {
            for (int x = 0; x < fw; ++x) {
                int sum = 0;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        int xx = std::min(std::max(x + dx, 0), fw - 1);
                        int yy = std::min(std::max(y + dy, 0), fh - 1);
                        sum += a[static_cast<size_t>(yy) * fw + xx];
                    }
                }
                b[static_cast<size_t>(y) * fw + x] = sum / 9;
            }
        }
        a.swap(b);
    }

    std::vector<uint8_t> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        int v = 128 + (a[i] - 128) / 3;
        out[i] = static_cast<uint8_t>(std::min(std::max(v, 0), 255));
    }
    return out;
}

} // namespace

Sequence synth_sequence(SynthKind kind, uint64_t seed, int width, int height,
                        int count, int shift_x, int shift_y) {
    check_dimensions(width, height);
    if (count < 1) throw ValidationError("frame count must be >= 1");
    if (shift_x < -15 || shift_x > 15 || shift_y < -15 || shift_y > 15) {
        throw ValidationError("texture shift must lie in [-15,15]^2");
    }

    Sequence seq;
    seq.frames.reserve(count);

    if (kind == SynthKind::moving_gradient) {
        for (int t = 0; t < count; ++t) {
            seq.frames.push_back(gradient_frame(seed, width, height, t));
        }
        return seq;
    }

    // translating_texture: crop a fixed field at an advancing offset. Frame t
    // reads the field at origin + t*(shift_x, shift_y), so a block of frame
    // t+1 equals the frame-t block displaced by the shift.
    const int span_x = std::abs(shift_x) * (count - 1);
    const int span_y = std::abs(shift_y) * (count - 1);
    const int fw = width + span_x;
    const int fh = height + span_y;
    const std::vector<uint8_t> field = texture_field(seed, fw, fh);
    const int base_x = shift_x >= 0 ? 0 : span_x;
    const int base_y = shift_y >= 0 ? 0 : span_y;

    for (int t = 0; t < count; ++t) {
        const int ox = base_x + t * shift_x;
        const int oy = base_y + t * shift_y;
        Frame f = make_frame(width, height);
        for (int y = 0; y < height; ++y) {
            const uint8_t* src = &field[static_cast<size_t>(oy + y) * fw + ox];
            std::copy(src, src + width, f.luma.begin() + static_cast<size_t>(y) * width);
        }
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

void save_frame(const Frame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(frame.luma.data()),
              static_cast<std::streamsize>(frame.luma.size()));
    if (!out) throw IoError("write failure on " + path);
}

void append_frame(const Frame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(frame.luma.data()),
              static_cast<std::streamsize>(frame.luma.size()));
    if (!out) throw IoError("write failure on " + path);
}

Frame load_frame(const std::string& path, int width, int height) {
    Sequence s = load_raw_sequence(path, width, height, 1, RawLayout::y8);
    return std::move(s.frames[0]);
}

} // namespace rdh3ec
