// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdh3ec/codec.hpp"

namespace rdh3ec {

// Independent per-macroblock erasures at the configured loss rate.
struct LossMask {
    int n_mbs = 0;
    double plr = 0.0;
    uint64_t seed = 0;
    std::vector<uint8_t> lost; // 1 = lost

    int lost_count() const;
};

LossMask draw_mask(int n_mbs, double plr, uint64_t seed);

struct ReceivedFrame {
    std::vector<QuantizedMacroblock> mbs; // lost macroblocks zeroed
    std::vector<uint8_t> lost;
};

// Intact macroblocks pass through bit-exactly; lost ones are zeroed and
// flagged unavailable.
ReceivedFrame apply_mask(const std::vector<QuantizedMacroblock>& marked, const LossMask& mask);

// Sidecar packing: one byte per 8 macroblocks, raster order, LSB-first.
std::vector<uint8_t> pack_mask(const std::vector<uint8_t>& lost);
std::vector<uint8_t> unpack_mask(const std::vector<uint8_t>& bytes, int n_mbs);

void write_mask_sidecar(const std::vector<LossMask>& masks, const std::string& path);
std::vector<std::vector<uint8_t>> read_mask_sidecar(const std::string& path, int n_mbs,
                                                    int n_frames);

} // namespace rdh3ec
