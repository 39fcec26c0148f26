// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rdh3ec/analytics.hpp"
#include "rdh3ec/channel.hpp"
#include "rdh3ec/codec.hpp"
#include "rdh3ec/frame.hpp"
#include "rdh3ec/motion.hpp"

namespace rdh3ec {

enum class MbStatus : uint8_t { intact, concealed, black };

const char* status_name(MbStatus s);

struct ConcealmentOutcome {
    Frame frame;
    std::vector<MbStatus> status;
    std::vector<std::optional<MotionVector>> mvs; // recovered, per macroblock
    int black_count = 0;
    int concealed_count = 0;
};

// Receiver side for one frame: extract and losslessly recover the payload
// from intact macroblocks, vote the motion vectors, then rebuild pixels.
// Lost macroblocks are motion-compensated from the reference when a vector
// survived, black otherwise (always black without a reference).
ConcealmentOutcome decode_frame(const ReceivedFrame& received, const SlotMap& map, int qp,
                                const Frame* reference, int width, int height);

// Per-frame key/seed derivations shared by the encoder and the decoder-side
// CLI commands.
uint64_t slot_key(uint64_t key, int frame_index);
uint64_t mask_seed(uint64_t seed, int frame_index);
uint64_t ecd_seed(uint64_t key, int frame_index);

struct EncodedFrame {
    std::vector<QuantizedMacroblock> cover;
    std::vector<QuantizedMacroblock> marked;
    std::vector<MotionVector> mvs;
    std::vector<int> capacities;
    std::vector<MbSpan> spans;
    int spill_events = 0;
    bool first_in_gop = false;
};

struct EncodedSequence {
    int width = 0, height = 0, qp = 0, alpha = 1, gop_length = 10;
    uint64_t key = 0;
    Placement placement = Placement::random;
    std::vector<EncodedFrame> frames;
    std::vector<Frame> unmarked_decode; // encoder reconstruction chain
};

// Full encoder pass: transform/quantize, motion estimation against the
// encoder's own reconstruction, payload assembly, embedding. The first frame
// of every GOP has no reference and carries zero vectors.
EncodedSequence encode_sequence(const Sequence& seq, int qp, int alpha, uint64_t key,
                                Placement placement, int gop_length);

struct FrameReport {
    int frame = 0;
    bool first_in_gop = false;
    double psnr = 0, mse = 0;          // original vs concealed
    double psnr_marked = 0;            // original vs naive decode of marked stream
    double psnr_unmarked = 0;          // original vs unmarked decode (the limit)
    int lost_count = 0, black_count = 0, concealed_count = 0;
};

struct DecodeRun {
    std::vector<ConcealmentOutcome> outcomes;
    std::vector<FrameReport> reports;
};

// Channel + decoder pass over an encoded sequence. The reference for frame t
// is the decoder's own reconstruction of frame t-1 within the GOP.
DecodeRun transmit_and_decode(const EncodedSequence& enc, const Sequence& original,
                              double plr, uint64_t seed);

struct PipelineConfig {
    int qp = 24;
    int alpha = 1;
    uint64_t key = 1;
    double plr = 0.0;
    uint64_t seed = 0;
    Placement placement = Placement::random;
    int gop_length = 10;
    int ec_trials = 8; // 0 skips the full-embed capacity measurement
};

struct FrameMetrics {
    int frame = 0;
    bool first_in_gop = false;
    double psnr = 0, mse = 0, psnr_marked = 0, psnr_unmarked = 0;
    int lost_count = 0, black_count = 0, concealed_count = 0, spill_events = 0;
    EcdEstimates est;
    MeasuredEcd meas;
    double p_c = 0, p_nc = 0;
};

struct PipelineResult {
    EncodedSequence encoded;
    DecodeRun run;
    std::vector<FrameMetrics> metrics;
};

PipelineResult run_pipeline(const Sequence& seq, const PipelineConfig& cfg);

} // namespace rdh3ec
