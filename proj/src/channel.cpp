// SPDX-License-Identifier: Apache-2.0
#include "rdh3ec/channel.hpp"

#include <fstream>

#include "rdh3ec/rng.hpp"

namespace rdh3ec {

int LossMask::lost_count() const {
    int c = 0;
    for (uint8_t v : lost) c += v;
    return c;
}

LossMask draw_mask(int n_mbs, double plr, uint64_t seed) {
    if (n_mbs < 1) throw ValidationError("mask needs n_mbs >= 1");
    if (plr < 0.0 || plr >= 1.0) throw ValidationError("loss rate must be in [0, 1)");
    LossMask m;
    m.n_mbs = n_mbs;
    m.plr = plr;
    m.seed = seed;
    m.lost.resize(static_cast<size_t>(n_mbs));
    Rng rng(Rng::mix({seed, 0x4d41534bull, static_cast<uint64_t>(n_mbs)}));
    for (auto& f : m.lost) f = rng.bernoulli(plr) ? 1 : 0;
    return m;
}

ReceivedFrame apply_mask(const std::vector<QuantizedMacroblock>& marked, const LossMask& mask) {
    if (static_cast<int>(marked.size()) != mask.n_mbs) {
        throw ValidationError("mask/frame macroblock count mismatch");
    }
    ReceivedFrame r;
    r.mbs = marked;
    r.lost = mask.lost;
    for (size_t k = 0; k < r.mbs.size(); ++k) {
        if (mask.lost[k]) r.mbs[k].coeffs.fill(0);
    }
    return r;
}

std::vector<uint8_t> pack_mask(const std::vector<uint8_t>& lost) {
    std::vector<uint8_t> bytes((lost.size() + 7) / 8, 0);
    for (size_t i = 0; i < lost.size(); ++i) {
        if (lost[i]) bytes[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
    }
    return bytes;
}

std::vector<uint8_t> unpack_mask(const std::vector<uint8_t>& bytes, int n_mbs) {
    if (bytes.size() < (static_cast<size_t>(n_mbs) + 7) / 8) {
        throw IoError("mask sidecar too short");
    }
    std::vector<uint8_t> lost(static_cast<size_t>(n_mbs));
    for (int i = 0; i < n_mbs; ++i) {
        lost[static_cast<size_t>(i)] =
            (bytes[static_cast<size_t>(i) / 8] >> (i % 8)) & 1u;
    }
    return lost;
}

void write_mask_sidecar(const std::vector<LossMask>& masks, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    for (const LossMask& m : masks) {
        const auto bytes = pack_mask(m.lost);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
    }
    if (!out) throw IoError("write failure on " + path);
}

std::vector<std::vector<uint8_t>> read_mask_sidecar(const std::string& path, int n_mbs,
                                                    int n_frames) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    const size_t per_frame = (static_cast<size_t>(n_mbs) + 7) / 8;
    std::vector<std::vector<uint8_t>> out;
    out.reserve(static_cast<size_t>(n_frames));
    for (int t = 0; t < n_frames; ++t) {
        std::vector<uint8_t> bytes(per_frame);
        in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(per_frame));
        if (!in) throw IoError(path + " too short for " + std::to_string(n_frames) + " frames");
        out.push_back(unpack_mask(bytes, n_mbs));
    }
    return out;
}

} // namespace rdh3ec
