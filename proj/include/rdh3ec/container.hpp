// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdh3ec/codec.hpp"

namespace rdh3ec {

// Marked-stream container. Little-endian layout:
//   "RDH3"  magic, 4 bytes
//   u8      version (1)
//   u16     width        u16 height
//   u8      qp           u8  alpha
//   u16     frame count
//   u64     key id
// then per frame: N*256 coefficients as signed 16-bit little-endian, in
// macroblock-raster / block-raster / zigzag order.
struct MarkedContainer {
    int width = 0;
    int height = 0;
    int qp = 0;
    int alpha = 1;
    uint64_t key_id = 0;
    std::vector<std::vector<QuantizedMacroblock>> frames;
};

void write_container(const MarkedContainer& c, const std::string& path);
MarkedContainer read_container(const std::string& path);

} // namespace rdh3ec
