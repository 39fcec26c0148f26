// SPDX-License-Identifier: Apache-2.0
#include "rdh3ec/motion.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

#include "rdh3ec/rng.hpp"

namespace rdh3ec {

namespace {

struct Candidate {
    uint32_t sad = UINT32_MAX;
    int cost = 0; // |dx| + |dy|
    int dx = 0;
    int dy = 0;

    bool better_than(const Candidate& o) const {
        if (sad != o.sad) return sad < o.sad;
        if (cost != o.cost) return cost < o.cost;
        if (dy != o.dy) return dy < o.dy;
        return dx < o.dx;
    }
};

// SAD with row-wise early exit once the running sum exceeds the bound.
uint32_t sad16(const Frame& cur, int cx, int cy, const Frame& ref, int rx, int ry,
               uint32_t bound) {
    uint32_t sum = 0;
    for (int y = 0; y < kMbSize; ++y) {
        const uint8_t* a = &cur.luma[static_cast<size_t>(cy + y) * cur.width + cx];
        const uint8_t* b = &ref.luma[static_cast<size_t>(ry + y) * ref.width + rx];
        for (int x = 0; x < kMbSize; ++x) {
            sum += static_cast<uint32_t>(std::abs(static_cast<int>(a[x]) - static_cast<int>(b[x])));
        }
        if (sum > bound) return sum;
    }
    return sum;
}

} // namespace

MotionVector estimate_mv(const Frame& cur, int mb_index, const Frame& reference, int range) {
    if (cur.width != reference.width || cur.height != reference.height) {
        throw ValidationError("motion search needs equal frame dimensions");
    }
    const int mbs_x = cur.width / kMbSize;
    const int bx = (mb_index % mbs_x) * kMbSize;
    const int by = (mb_index / mbs_x) * kMbSize;

    Candidate best;
    for (int dy = -range; dy <= range; ++dy) {
        const int ry = by + dy;
        if (ry < 0 || ry + kMbSize > cur.height) continue;
        for (int dx = -range; dx <= range; ++dx) {
            const int rx = bx + dx;
            if (rx < 0 || rx + kMbSize > cur.width) continue;
            const uint32_t s = sad16(cur, bx, by, reference, rx, ry, best.sad);
            if (s > best.sad) continue;
            Candidate cand{s, std::abs(dx) + std::abs(dy), dx, dy};
            if (cand.better_than(best)) best = cand;
        }
    }
    return {best.dx, best.dy};
}

std::vector<MotionVector> estimate_frame_mvs(const Frame& cur, const Frame& reference,
                                             int range) {
    const int n = cur.mb_count();
    std::vector<MotionVector> out(static_cast<size_t>(n));
#pragma omp parallel for schedule(dynamic, 4)
    for (int i = 0; i < n; ++i) {
        out[i] = estimate_mv(cur, i, reference, range);
    }
    return out;
}

Bits encode_mv(const MotionVector& mv) {
    if (std::abs(mv.dx) > kSearchRange || std::abs(mv.dy) > kSearchRange) {
        throw ValidationError("motion vector out of range");
    }
    Bits out(kMvBits);
    const int fx = mv.dx + kSearchRange;
    const int fy = mv.dy + kSearchRange;
    for (int i = 0; i < 5; ++i) {
        out[i] = static_cast<uint8_t>((fx >> (4 - i)) & 1);
        out[5 + i] = static_cast<uint8_t>((fy >> (4 - i)) & 1);
    }
    return out;
}

std::optional<MotionVector> decode_mv(const Bits& bits, size_t offset) {
    if (bits.size() < offset + kMvBits) return std::nullopt;
    int fx = 0, fy = 0;
    for (int i = 0; i < 5; ++i) {
        fx = (fx << 1) | bits[offset + i];
        fy = (fy << 1) | bits[offset + 5 + i];
    }
    if (fx == 31 || fy == 31) return std::nullopt;
    return MotionVector{fx - kSearchRange, fy - kSearchRange};
}

SlotMap build_slotmap(int n_mbs, int alpha, uint64_t key, Placement placement) {
    if (n_mbs < 1 || alpha < 1) throw ValidationError("need n_mbs >= 1 and alpha >= 1");
    SlotMap m;
    m.n_mbs = n_mbs;
    m.alpha = alpha;
    m.key = key;
    const size_t n = static_cast<size_t>(n_mbs) * alpha;
    m.slot_of_copy.resize(n);
    for (size_t i = 0; i < n; ++i) m.slot_of_copy[i] = static_cast<uint32_t>(i);
    if (placement == Placement::random) {
        Rng rng(Rng::mix({key, 0x534c4f544d415ull, static_cast<uint64_t>(n)}));
        shuffle(m.slot_of_copy, rng);
    }
    m.copy_of_slot.resize(n);
    for (size_t i = 0; i < n; ++i) m.copy_of_slot[m.slot_of_copy[i]] = static_cast<uint32_t>(i);
    return m;
}

int min_capacity(const TripleStream& triples) {
    int cap = 0;
    for (const Triple& t : triples) cap += min_capacity_bits(classify(t));
    return cap;
}

std::vector<int> min_capacities(const std::vector<QuantizedMacroblock>& cover) {
    std::vector<int> caps(cover.size());
    const int n = static_cast<int>(cover.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        caps[i] = min_capacity(to_triples(cover[i]));
    }
    return caps;
}

int payload_bits_per_mb(int alpha) { return alpha * kMvBits; }

int max_feasible_alpha(int64_t total_capacity_bits, int n_mbs) {
    if (n_mbs < 1) return 0;
    return static_cast<int>(total_capacity_bits / (static_cast<int64_t>(n_mbs) * kMvBits));
}

MarkPayload build_payload(const std::vector<MotionVector>& mvs, const SlotMap& map,
                          const std::vector<int>& capacities) {
    if (static_cast<int>(mvs.size()) != map.n_mbs) {
        throw ValidationError("need one motion vector per macroblock");
    }
    if (static_cast<int>(capacities.size()) != map.n_mbs) {
        throw ValidationError("need one capacity entry per macroblock");
    }
    int64_t total_cap = 0;
    for (int c : capacities) total_cap += c;
    const int64_t needed = static_cast<int64_t>(map.n_slots()) * kMvBits;
    if (needed > total_cap) {
        const int feasible = max_feasible_alpha(total_cap, map.n_mbs);
        throw CapacityError("payload needs " + std::to_string(needed) + " bits, frame holds " +
                                std::to_string(total_cap) + "; largest feasible alpha is " +
                                std::to_string(feasible),
                            feasible);
    }

    MarkPayload p;
    p.n_mbs = map.n_mbs;
    p.alpha = map.alpha;
    p.global.resize(static_cast<size_t>(needed));
    for (int s = 0; s < map.n_slots(); ++s) {
        const Bits enc = encode_mv(mvs[static_cast<size_t>(map.source_of_slot(s))]);
        std::copy(enc.begin(), enc.end(), p.global.begin() + static_cast<size_t>(s) * kMvBits);
    }
    return p;
}

FrameEmbedResult embed_frame_payload(const std::vector<QuantizedMacroblock>& cover,
                                     const MarkPayload& payload) {
    const int n = static_cast<int>(cover.size());
    if (payload.n_mbs != n) throw ValidationError("payload/frame macroblock count mismatch");
    const size_t L = static_cast<size_t>(payload_bits_per_mb(payload.alpha));

    FrameEmbedResult r;
    r.marked = cover;
    r.spans.resize(cover.size());
    size_t consumed = 0;

    for (int k = 0; k < n; ++k) {
        // Pending queue: everything carried from earlier macroblocks plus
        // this macroblock's own share.
        const size_t push_hi = static_cast<size_t>(k + 1) * L;
        Bits pending(payload.global.begin() + static_cast<std::ptrdiff_t>(consumed),
                     payload.global.begin() + static_cast<std::ptrdiff_t>(push_hi));
        BitReader reader(pending);
        TripleStream stream = to_triples(r.marked[static_cast<size_t>(k)]);
        StreamEmbed e = embed_into(stream, 0, reader);
        r.marked[static_cast<size_t>(k)] = from_triples(stream, r.marked[static_cast<size_t>(k)]);

        r.spans[static_cast<size_t>(k)].bit_lo = consumed;
        consumed += e.bits_embedded;
        r.spans[static_cast<size_t>(k)].bit_hi = consumed;
        r.spans[static_cast<size_t>(k)].stop_triple = e.next_index;
        if (consumed < push_hi) ++r.spill_events;
    }

    // Wrap leftover bits into macroblocks that still have unused triples.
    const size_t total = payload.global.size();
    bool progress = true;
    while (consumed < total && progress) {
        progress = false;
        for (int k = 0; k < n && consumed < total; ++k) {
            MbSpan& sp = r.spans[static_cast<size_t>(k)];
            if (sp.stop_triple >= kTriplesPerMb) continue;
            Bits pending(payload.global.begin() + static_cast<std::ptrdiff_t>(consumed),
                         payload.global.end());
            BitReader reader(pending);
            TripleStream stream = to_triples(r.marked[static_cast<size_t>(k)]);
            StreamEmbed e = embed_into(stream, sp.stop_triple, reader);
            r.marked[static_cast<size_t>(k)] =
                from_triples(stream, r.marked[static_cast<size_t>(k)]);
            if (e.bits_embedded > 0) {
                if (sp.wrap_hi == sp.wrap_lo) sp.wrap_lo = consumed;
                sp.wrap_hi = consumed + e.bits_embedded;
                consumed += e.bits_embedded;
                progress = true;
            }
            sp.stop_triple = e.next_index;
        }
    }
    if (consumed < total) {
        const int feasible =
            static_cast<int>(consumed / (static_cast<size_t>(n) * kMvBits));
        throw CapacityError("frame absorbed only " + std::to_string(consumed) + " of " +
                                std::to_string(total) + " payload bits",
                            feasible);
    }
    return r;
}

FrameExtractResult extract_frame_payload(const std::vector<QuantizedMacroblock>& received,
                                         const std::vector<uint8_t>& lost, int alpha) {
    const int n = static_cast<int>(received.size());
    if (static_cast<int>(lost.size()) != n) throw ValidationError("loss mask size mismatch");
    const size_t L = static_cast<size_t>(payload_bits_per_mb(alpha));
    const size_t total = static_cast<size_t>(n) * L;

    FrameExtractResult r;
    r.recovered = received;
    r.global.assign(total, 0);
    r.bit_valid.assign(total, 0);
    r.spans.resize(received.size());
    r.per_mb_bits.resize(received.size());

    size_t consumed = 0;
    for (int k = 0; k < n; ++k) {
        MbSpan& sp = r.spans[static_cast<size_t>(k)];
        sp.bit_lo = consumed;
        const size_t budget_hi = static_cast<size_t>(k + 1) * L;
        if (lost[static_cast<size_t>(k)]) {
            // Budget assumed fully absorbed; exact unless this macroblock
            // itself spilled, and its bits are unrecoverable either way.
            consumed = budget_hi;
            sp.bit_hi = budget_hi;
            sp.stop_triple = kTriplesPerMb;
            continue;
        }
        TripleStream stream = to_triples(received[static_cast<size_t>(k)]);
        Bits got;
        StreamExtract e = extract_from(stream, 0, budget_hi - consumed, got);
        r.recovered[static_cast<size_t>(k)] =
            from_triples(stream, received[static_cast<size_t>(k)]);
        r.per_mb_bits[static_cast<size_t>(k)] = got;
        for (size_t i = 0; i < got.size(); ++i) {
            r.global[consumed + i] = got[i];
            r.bit_valid[consumed + i] = 1;
        }
        consumed += got.size();
        sp.bit_hi = consumed;
        sp.stop_triple = e.next_index;
    }

    // Wrap phase, mirroring the embedder. A lost macroblock with unused
    // triples would have absorbed an unknown share, so everything after it
    // stays unknown.
    bool progress = true;
    while (consumed < total && progress) {
        progress = false;
        for (int k = 0; k < n && consumed < total; ++k) {
            MbSpan& sp = r.spans[static_cast<size_t>(k)];
            if (lost[static_cast<size_t>(k)]) continue;
            if (sp.stop_triple >= kTriplesPerMb) continue;
            TripleStream stream = to_triples(r.recovered[static_cast<size_t>(k)]);
            Bits got;
            StreamExtract e = extract_from(stream, sp.stop_triple, total - consumed, got);
            r.recovered[static_cast<size_t>(k)] =
                from_triples(stream, r.recovered[static_cast<size_t>(k)]);
            if (!got.empty()) {
                if (sp.wrap_hi == sp.wrap_lo) sp.wrap_lo = consumed;
                for (size_t i = 0; i < got.size(); ++i) {
                    r.global[consumed + i] = got[i];
                    r.bit_valid[consumed + i] = 1;
                }
                consumed += got.size();
                sp.wrap_hi = consumed;
                progress = true;
            }
            sp.stop_triple = e.next_index;
        }
    }
    return r;
}

std::vector<std::optional<Bits>> slots_from_extraction(const FrameExtractResult& ex,
                                                       const SlotMap& map) {
    std::vector<std::optional<Bits>> slots(static_cast<size_t>(map.n_slots()));
    for (int s = 0; s < map.n_slots(); ++s) {
        const size_t lo = static_cast<size_t>(s) * kMvBits;
        bool ok = true;
        for (size_t i = lo; i < lo + kMvBits; ++i) {
            if (!ex.bit_valid[i]) {
                ok = false;
                break;
            }
        }
        if (ok) {
            slots[static_cast<size_t>(s)] =
                Bits(ex.global.begin() + static_cast<std::ptrdiff_t>(lo),
                     ex.global.begin() + static_cast<std::ptrdiff_t>(lo + kMvBits));
        }
    }
    return slots;
}

RecoveredMvs recover_mvs_slots(const std::vector<std::optional<Bits>>& slot_bits,
                               const SlotMap& map) {
    RecoveredMvs r;
    r.candidates.resize(static_cast<size_t>(map.n_mbs));
    r.final_mv.resize(static_cast<size_t>(map.n_mbs));
    for (int s = 0; s < map.n_slots(); ++s) {
        if (!slot_bits[static_cast<size_t>(s)]) continue;
        auto mv = decode_mv(*slot_bits[static_cast<size_t>(s)]);
        if (!mv) continue; // bad field value: drop the single candidate
        r.candidates[static_cast<size_t>(map.source_of_slot(s))].push_back(*mv);
    }
    for (int k = 0; k < map.n_mbs; ++k) {
        const auto& cands = r.candidates[static_cast<size_t>(k)];
        if (cands.empty()) continue;
        std::map<std::pair<int, int>, int> votes;
        for (const MotionVector& mv : cands) ++votes[{mv.dx, mv.dy}];
        int best = 0;
        bool unique = false;
        std::pair<int, int> winner{};
        for (const auto& [mv, cnt] : votes) {
            if (cnt > best) {
                best = cnt;
                winner = mv;
                unique = true;
            } else if (cnt == best) {
                unique = false;
            }
        }
        if (unique) r.final_mv[static_cast<size_t>(k)] = MotionVector{winner.first, winner.second};
    }
    return r;
}

RecoveredMvs recover_mvs(const std::vector<Bits>& per_mb_bits,
                         const std::vector<uint8_t>& mb_valid, const SlotMap& map) {
    const size_t L = static_cast<size_t>(payload_bits_per_mb(map.alpha));
    std::vector<std::optional<Bits>> slots(static_cast<size_t>(map.n_slots()));
    for (int s = 0; s < map.n_slots(); ++s) {
        const int host = map.host_of_slot(s);
        if (!mb_valid[static_cast<size_t>(host)]) continue;
        const auto& bits = per_mb_bits[static_cast<size_t>(host)];
        if (bits.size() != L) continue;
        const size_t off = static_cast<size_t>(s % map.alpha) * kMvBits;
        slots[static_cast<size_t>(s)] =
            Bits(bits.begin() + static_cast<std::ptrdiff_t>(off),
                 bits.begin() + static_cast<std::ptrdiff_t>(off + kMvBits));
    }
    return recover_mvs_slots(slots, map);
}

} // namespace rdh3ec
