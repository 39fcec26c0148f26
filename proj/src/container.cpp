// SPDX-License-Identifier: Apache-2.0
#include "rdh3ec/container.hpp"

#include <fstream>

namespace rdh3ec {

namespace {

constexpr char kMagic[4] = {'R', 'D', 'H', '3'};
constexpr uint8_t kVersion = 1;

void put_u8(std::string& buf, uint8_t v) { buf.push_back(static_cast<char>(v)); }
void put_u16(std::string& buf, uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xFF));
    buf.push_back(static_cast<char>((v >> 8) & 0xFF));
}
void put_u64(std::string& buf, uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader {
public:
    ByteReader(const std::string& data, const std::string& path) : data_(data), path_(path) {}

    uint8_t u8() { return static_cast<uint8_t>(byte()); }
    uint16_t u16() {
        const uint16_t lo = u8();
        return static_cast<uint16_t>(lo | (static_cast<uint16_t>(u8()) << 8));
    }
    uint64_t u64() {
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(u8()) << (8 * i);
        return v;
    }
    int16_t s16() { return static_cast<int16_t>(u16()); }

private:
    char byte() {
        if (pos_ >= data_.size()) throw IoError(path_ + " truncated");
        return data_[pos_++];
    }
    const std::string& data_;
    std::string path_;
    size_t pos_ = 0;
};

} // namespace

void write_container(const MarkedContainer& c, const std::string& path) {
    check_dimensions(c.width, c.height);
    if (c.qp < 0 || c.qp > 51) throw ValidationError("container qp out of range");
    if (c.alpha < 1 || c.alpha > 255) throw ValidationError("container alpha out of range");
    if (c.frames.size() > 0xFFFF) throw ValidationError("too many frames for container");

    std::string buf;
    buf.append(kMagic, 4);
    put_u8(buf, kVersion);
    put_u16(buf, static_cast<uint16_t>(c.width));
    put_u16(buf, static_cast<uint16_t>(c.height));
    put_u8(buf, static_cast<uint8_t>(c.qp));
    put_u8(buf, static_cast<uint8_t>(c.alpha));
    put_u16(buf, static_cast<uint16_t>(c.frames.size()));
    put_u64(buf, c.key_id);

    const size_t n_mbs = static_cast<size_t>(c.width / kMbSize) * (c.height / kMbSize);
    for (const auto& frame : c.frames) {
        if (frame.size() != n_mbs) throw ValidationError("frame macroblock count mismatch");
        for (const QuantizedMacroblock& mb : frame) {
            for (int32_t v : mb.coeffs) {
                if (v < INT16_MIN || v > INT16_MAX) {
                    throw ValidationError("coefficient out of 16-bit range");
                }
                put_u16(buf, static_cast<uint16_t>(static_cast<int16_t>(v)));
            }
        }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write failure on " + path);
}

MarkedContainer read_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (data.size() < 4 || data.compare(0, 4, kMagic, 4) != 0) {
        throw IoError(path + " is not a marked-stream container");
    }
    ByteReader r(data, path);
    r.u16();
    r.u16(); // skip magic (4 bytes)
    const uint8_t version = r.u8();
    if (version != kVersion) {
        throw IoError(path + ": unsupported container version " + std::to_string(version));
    }

    MarkedContainer c;
    c.width = r.u16();
    c.height = r.u16();
    c.qp = r.u8();
    c.alpha = r.u8();
    const int frame_count = r.u16();
    c.key_id = r.u64();
    check_dimensions(c.width, c.height);

    const int mbs_x = c.width / kMbSize;
    const size_t n_mbs = static_cast<size_t>(mbs_x) * (c.height / kMbSize);
    c.frames.resize(static_cast<size_t>(frame_count));
    for (auto& frame : c.frames) {
        frame.resize(n_mbs);
        for (size_t k = 0; k < n_mbs; ++k) {
            frame[k].index = static_cast<int>(k);
            frame[k].qp = c.qp;
            for (int i = 0; i < kCoeffsPerMb; ++i) frame[k].coeffs[i] = r.s16();
        }
    }
    return c;
}

} // namespace rdh3ec
