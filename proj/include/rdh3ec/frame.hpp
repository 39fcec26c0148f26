// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdh3ec/common.hpp"

namespace rdh3ec {

// Luma plane. Width and height are positive multiples of 16.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> luma; // row-major, width*height samples

    uint8_t at(int x, int y) const { return luma[static_cast<size_t>(y) * width + x]; }
    uint8_t& at(int x, int y) { return luma[static_cast<size_t>(y) * width + x]; }
    int mb_count() const { return (width / 16) * (height / 16); }

    bool operator==(const Frame&) const = default;
};

Frame make_frame(int width, int height, uint8_t fill = 0);

struct Sequence {
    std::vector<Frame> frames;
    int gop_length = 10;
};

enum class RawLayout { y8, yuv420 };

enum class SynthKind { moving_gradient, translating_texture };

// Reads `count` frames of raw video. For yuv420 the chroma planes are
// skipped; only luma enters the pipeline.
Sequence load_raw_sequence(const std::string& path, int width, int height,
                           int count, RawLayout layout);

// Deterministic test material.
//   moving_gradient     smooth separable triangle ramps drifting (2,1) px/frame
//   translating_texture a fixed smoothed noise field cropped at an offset that
//                       advances by (shift_x, shift_y) each frame, so frame t+1
//                       matches frame t displaced by exactly that vector
Sequence synth_sequence(SynthKind kind, uint64_t seed, int width, int height,
                        int count, int shift_x = 3, int shift_y = -2);

void save_frame(const Frame& frame, const std::string& path);
void append_frame(const Frame& frame, const std::string& path); // create-or-append
Frame load_frame(const std::string& path, int width, int height);

void check_dimensions(int width, int height);

} // namespace rdh3ec
