// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rdh3ec/codec.hpp"
#include "rdh3ec/frame.hpp"
#include "rdh3ec/rdh3.hpp"

namespace rdh3ec {

constexpr int kSearchRange = 15;
constexpr int kMvBits = 10; // two 5-bit offset-binary components

struct MotionVector {
    int dx = 0;
    int dy = 0;

    bool operator==(const MotionVector&) const = default;
};

// Full search over (dx,dy) in [-range,range]^2; candidate windows must lie
// entirely inside the reference. Minimizes SAD; ties go to the smallest
// |dx|+|dy|, then lexicographic (dy, dx).
MotionVector estimate_mv(const Frame& cur, int mb_index, const Frame& reference,
                         int range = kSearchRange);

// Parallel over macroblocks.
std::vector<MotionVector> estimate_frame_mvs(const Frame& cur, const Frame& reference,
                                             int range = kSearchRange);

// Offset-binary: each 5-bit field is component+15, MSB first, dx then dy.
// Field value 31 is never produced; decode rejects it.
Bits encode_mv(const MotionVector& mv);
std::optional<MotionVector> decode_mv(const Bits& bits, size_t offset = 0);

enum class Placement { random, changeless };

// Keyed assignment of MV copies to payload slots. Copy c of macroblock k has
// copy index k*alpha + (c); slot s carries copy copy_of_slot[s] and is hosted
// by macroblock s/alpha. Changeless placement is the identity map.
struct SlotMap {
    int n_mbs = 0;
    int alpha = 1;
    uint64_t key = 0;
    std::vector<uint32_t> slot_of_copy;
    std::vector<uint32_t> copy_of_slot;

    int n_slots() const { return n_mbs * alpha; }
    int host_of_slot(int s) const { return s / alpha; }
    int source_of_slot(int s) const { return static_cast<int>(copy_of_slot[s]) / alpha; }
};

SlotMap build_slotmap(int n_mbs, int alpha, uint64_t key,
                      Placement placement = Placement::random);

// Guaranteed embeddable bits per macroblock from a classification pass over
// its triples.
std::vector<int> min_capacities(const std::vector<QuantizedMacroblock>& cover);
int min_capacity(const TripleStream& triples);

int payload_bits_per_mb(int alpha);
int max_feasible_alpha(int64_t total_capacity_bits, int n_mbs);

// The per-frame payload: slot s holds the 10-bit code of its source MB's
// motion vector; macroblock k's nominal share is the alpha slots it hosts.
struct MarkPayload {
    int n_mbs = 0;
    int alpha = 0;
    Bits global; // n_mbs * alpha * 10 bits in slot order
};

// Validates total capacity and assembles the payload. Throws CapacityError
// naming the largest repetition factor that fits.
MarkPayload build_payload(const std::vector<MotionVector>& mvs, const SlotMap& map,
                          const std::vector<int>& capacities);

// Payload placement bookkeeping. Each macroblock absorbs a contiguous run of
// global payload bits (plus one optional wrap-phase run); spans drive the
// slot-loss rule: a slot is lost when any macroblock holding any of its bits
// is lost.
struct MbSpan {
    size_t bit_lo = 0, bit_hi = 0;           // main run, [lo, hi)
    size_t wrap_lo = 0, wrap_hi = 0;         // wrap run, [lo, hi)
    size_t stop_triple = 0;                  // first pass-through triple after main run
};

struct FrameEmbedResult {
    std::vector<QuantizedMacroblock> marked;
    std::vector<MbSpan> spans;
    int spill_events = 0; // macroblocks whose own share overflowed
};

// Embeds the payload macroblock by macroblock. Bits that do not fit carry
// forward to the next macroblock in raster order; any left after the last
// wrap around into still-unfilled triples.
FrameEmbedResult embed_frame_payload(const std::vector<QuantizedMacroblock>& cover,
                                     const MarkPayload& payload);

struct FrameExtractResult {
    std::vector<QuantizedMacroblock> recovered; // lost MBs copied through as-is
    Bits global;                                // n_mbs*alpha*10 bits, zeros where unknown
    std::vector<uint8_t> bit_valid;             // per global bit
    std::vector<MbSpan> spans;
    std::vector<Bits> per_mb_bits;              // main-run bits per macroblock
};

// Mirrors embed_frame_payload on the receiver. Lost macroblocks contribute
// nothing; their budget is assumed fully absorbed (exact whenever no spill
// chain crosses a lost macroblock, which the capacity report tracks).
FrameExtractResult extract_frame_payload(const std::vector<QuantizedMacroblock>& received,
                                         const std::vector<uint8_t>& lost, int alpha);

struct RecoveredMvs {
    std::vector<std::vector<MotionVector>> candidates; // per source MB
    std::vector<std::optional<MotionVector>> final_mv; // majority vote; nullopt = no MV
};

// Slot-level reconciliation: every valid slot contributes one candidate for
// its source macroblock; the final vector is the strict plurality winner.
RecoveredMvs recover_mvs_slots(const std::vector<std::optional<Bits>>& slot_bits,
                               const SlotMap& map);

// Aligned convenience form: per-MB strings, each macroblock carrying exactly
// its own alpha slots (the no-spill layout).
RecoveredMvs recover_mvs(const std::vector<Bits>& per_mb_bits,
                         const std::vector<uint8_t>& mb_valid, const SlotMap& map);

// Slot bit strings + validity out of an extraction result.
std::vector<std::optional<Bits>> slots_from_extraction(const FrameExtractResult& ex,
                                                       const SlotMap& map);

} // namespace rdh3ec
