// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "rdh3ec/analytics.hpp"
#include "rdh3ec/codec.hpp"
#include "rdh3ec/frame.hpp"
#include "rdh3ec/motion.hpp"

namespace rdh3ec::serial {

// Straight-line single-threaded references for the parallel kernels. The
// transform pair evaluates the matrix products directly instead of the
// butterfly decomposition, and the motion search scans every candidate with
// no early exit, so each pair crosses two independent routes. Tests and the
// benchmark compare them bit for bit against the fast paths.

QuantizedMacroblock transform_quantize(const Macroblock& mb, int qp);
Macroblock dequantize_inverse(const QuantizedMacroblock& qmb);

std::vector<QuantizedMacroblock> encode_frame(const Frame& frame, int qp);
Frame decode_frame_pixels(const std::vector<QuantizedMacroblock>& mbs, int width, int height);

MotionVector estimate_mv(const Frame& cur, int mb_index, const Frame& reference,
                         int range = kSearchRange);
std::vector<MotionVector> estimate_frame_mvs(const Frame& cur, const Frame& reference,
                                             int range = kSearchRange);

uint64_t ssd(const Frame& a, const Frame& b);

ConcealabilityEstimate monte_carlo_concealability(int n_mbs, int alpha, double p,
                                                  int trials, uint64_t seed);

} // namespace rdh3ec::serial
