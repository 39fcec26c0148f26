// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rdh3ec/frame.hpp"
#include "rdh3ec/rdh3.hpp"

namespace rdh3ec {

constexpr int kMbSize = 16;
constexpr int kBlocksPerMb = 16;   // 4x4 grid of 4x4 blocks
constexpr int kCoeffsPerBlock = 16;
constexpr int kCoeffsPerMb = 256;
constexpr int kTriplesPerBlock = 5; // AC zigzag 1-3, 4-6, 7-9, 10-12, 13-15
constexpr int kTriplesPerMb = 80;

// Standard 4x4 zigzag scan, flat row*4+col indices.
constexpr std::array<int, 16> kZigzag = {0, 1, 4, 8, 5, 2, 3, 6, 9, 12, 13, 10, 7, 11, 14, 15};

struct Macroblock {
    int index = 0; // raster position in the frame
    std::array<uint8_t, kCoeffsPerMb> samples{}; // 16x16, row-major

    bool operator==(const Macroblock&) const = default;
};

// Per macroblock: sixteen 4x4 blocks in raster order, each stored as a
// zigzag-ordered 16-vector (index 0 = DC, 1..15 = AC).
struct QuantizedMacroblock {
    int index = 0;
    int qp = 0;
    std::array<int32_t, kCoeffsPerMb> coeffs{};

    bool operator==(const QuantizedMacroblock&) const = default;
};

std::vector<Macroblock> partition(const Frame& frame);
Frame reassemble(const std::vector<Macroblock>& mbs, int width, int height);

// Uniform quantizer step, 2^((qp-4)/6). qp in [0, 51].
double qstep(int qp);

// 4x4 integer core transform (rows [1,1,1,1],[2,1,-1,-2],[1,-1,-1,1],
// [1,-2,2,-1]) on 128-offset samples, then uniform dead-zone quantization
// q = sgn(c) * floor(|c|/step + 1/3). No per-position scaling.
QuantizedMacroblock transform_quantize(const Macroblock& mb, int qp);
Macroblock dequantize_inverse(const QuantizedMacroblock& qmb);

// AC coefficients of all blocks as 80 triples; DC never appears.
TripleStream to_triples(const QuantizedMacroblock& qmb);
QuantizedMacroblock from_triples(const TripleStream& stream, const QuantizedMacroblock& tmpl);

TripleStream frame_triples(const std::vector<QuantizedMacroblock>& mbs);

// Frame-level kernels, parallel over macroblocks.
std::vector<QuantizedMacroblock> encode_frame(const Frame& frame, int qp);
Frame decode_frame_pixels(const std::vector<QuantizedMacroblock>& mbs, int width, int height);

} // namespace rdh3ec
