// SPDX-License-Identifier: Apache-2.0
#include "rdh3ec/conceal.hpp"

#include <algorithm>

#include "rdh3ec/rng.hpp"

namespace rdh3ec {

const char* status_name(MbStatus s) {
    switch (s) {
        case MbStatus::intact: return "intact";
        case MbStatus::concealed: return "concealed";
        case MbStatus::black: return "black";
    }
    return "?";
}

uint64_t slot_key(uint64_t key, int frame_index) {
    return Rng::mix({key, 0x534c4f54ull, static_cast<uint64_t>(frame_index)});
}

uint64_t mask_seed(uint64_t seed, int frame_index) {
    return Rng::mix({seed, 0x4d41534bull, static_cast<uint64_t>(frame_index)});
}

uint64_t ecd_seed(uint64_t key, int frame_index) {
    return Rng::mix({key, 0x454344ull, static_cast<uint64_t>(frame_index)});
}

ConcealmentOutcome decode_frame(const ReceivedFrame& received, const SlotMap& map, int qp,
                                const Frame* reference, int width, int height) {
    check_dimensions(width, height);
    const int n = static_cast<int>(received.mbs.size());
    if (n != map.n_mbs) throw ValidationError("slot map does not match macroblock count");
    if (reference && (reference->width != width || reference->height != height)) {
        throw ValidationError("reference dimensions mismatch");
    }

    qstep(qp); // validates the range
    for (const QuantizedMacroblock& mb : received.mbs) {
        if (mb.qp != qp) throw ValidationError("received stream was quantized at a different qp");
    }

    FrameExtractResult ex = extract_frame_payload(received.mbs, received.lost, map.alpha);
    RecoveredMvs rec = recover_mvs_slots(slots_from_extraction(ex, map), map);

    ConcealmentOutcome out;
    out.status.resize(static_cast<size_t>(n));
    out.mvs = rec.final_mv;

    std::vector<Macroblock> pixels(static_cast<size_t>(n));
    const int mbs_x = width / kMbSize;

#pragma omp parallel for schedule(static)
    for (int k = 0; k < n; ++k) {
        Macroblock& mb = pixels[static_cast<size_t>(k)];
        if (!received.lost[static_cast<size_t>(k)]) {
            mb = dequantize_inverse(ex.recovered[static_cast<size_t>(k)]);
            mb.index = k; // raster position is authoritative
            out.status[static_cast<size_t>(k)] = MbStatus::intact;
            continue;
        }
        mb.index = k;
        const auto& mv = rec.final_mv[static_cast<size_t>(k)];
        if (reference && mv) {
            const int bx = (k % mbs_x) * kMbSize;
            const int by = (k / mbs_x) * kMbSize;
            const int sx = std::clamp(bx + mv->dx, 0, width - kMbSize);
            const int sy = std::clamp(by + mv->dy, 0, height - kMbSize);
            for (int y = 0; y < kMbSize; ++y) {
                const uint8_t* src = &reference->luma[static_cast<size_t>(sy + y) * width + sx];
                std::copy(src, src + kMbSize, mb.samples.begin() + y * kMbSize);
            }
            out.status[static_cast<size_t>(k)] = MbStatus::concealed;
        } else {
            mb.samples.fill(0);
            out.status[static_cast<size_t>(k)] = MbStatus::black;
        }
    }

    for (int k = 0; k < n; ++k) {
        if (out.status[static_cast<size_t>(k)] == MbStatus::black) ++out.black_count;
        if (out.status[static_cast<size_t>(k)] == MbStatus::concealed) ++out.concealed_count;
    }
    out.frame = reassemble(pixels, width, height);
    return out;
}

EncodedSequence encode_sequence(const Sequence& seq, int qp, int alpha, uint64_t key,
                                Placement placement, int gop_length) {
    if (seq.frames.empty()) throw ValidationError("empty sequence");
    if (gop_length < 1) throw ValidationError("gop length must be >= 1");
    qstep(qp); // validates qp range

    const Frame& f0 = seq.frames.front();
    for (const Frame& f : seq.frames) {
        if (f.width != f0.width || f.height != f0.height) {
            throw ValidationError("all frames must share dimensions");
        }
    }

    EncodedSequence enc;
    enc.width = f0.width;
    enc.height = f0.height;
    enc.qp = qp;
    enc.alpha = alpha;
    enc.gop_length = gop_length;
    enc.key = key;
    enc.placement = placement;
    enc.frames.reserve(seq.frames.size());
    enc.unmarked_decode.reserve(seq.frames.size());

    const int n_mbs = f0.mb_count();
    for (size_t t = 0; t < seq.frames.size(); ++t) {
        EncodedFrame ef;
        ef.first_in_gop = (t % static_cast<size_t>(gop_length)) == 0;
        ef.cover = encode_frame(seq.frames[t], qp);

        // The reference chain never resets: only the very first frame has
        // nothing behind it and carries zero vectors. GOP boundaries are a
        // reporting epoch (first-in-GOP frames are flagged and left out of
        // concealment-quality aggregates).
        if (t == 0) {
            ef.mvs.assign(static_cast<size_t>(n_mbs), MotionVector{0, 0});
        } else {
            ef.mvs = estimate_frame_mvs(seq.frames[t], enc.unmarked_decode[t - 1]);
        }

        ef.capacities = min_capacities(ef.cover);
        const SlotMap map = build_slotmap(n_mbs, alpha,
                                          slot_key(key, static_cast<int>(t)), placement);
        const MarkPayload payload = build_payload(ef.mvs, map, ef.capacities);
        FrameEmbedResult er = embed_frame_payload(ef.cover, payload);
        ef.marked = std::move(er.marked);
        ef.spans = std::move(er.spans);
        ef.spill_events = er.spill_events;

        enc.unmarked_decode.push_back(decode_frame_pixels(ef.cover, enc.width, enc.height));
        enc.frames.push_back(std::move(ef));
    }
    return enc;
}

DecodeRun transmit_and_decode(const EncodedSequence& enc, const Sequence& original,
                              double plr, uint64_t seed) {
    if (original.frames.size() != enc.frames.size()) {
        throw ValidationError("original/encoded frame count mismatch");
    }
    const int n_mbs = (enc.width / kMbSize) * (enc.height / kMbSize);

    DecodeRun run;
    run.outcomes.reserve(enc.frames.size());
    run.reports.reserve(enc.frames.size());

    const Frame* reference = nullptr;
    for (size_t t = 0; t < enc.frames.size(); ++t) {
        const EncodedFrame& ef = enc.frames[t];
        const SlotMap map = build_slotmap(n_mbs, enc.alpha,
                                          slot_key(enc.key, static_cast<int>(t)), enc.placement);
        const LossMask mask = draw_mask(n_mbs, plr, mask_seed(seed, static_cast<int>(t)));
        const ReceivedFrame received = apply_mask(ef.marked, mask);

        ConcealmentOutcome outcome =
            decode_frame(received, map, enc.qp, reference, enc.width, enc.height);

        FrameReport rep;
        rep.frame = static_cast<int>(t);
        rep.first_in_gop = ef.first_in_gop;
        rep.psnr = psnr(original.frames[t], outcome.frame);
        rep.mse = mse(original.frames[t], outcome.frame);
        rep.psnr_marked =
            psnr(original.frames[t], decode_frame_pixels(ef.marked, enc.width, enc.height));
        rep.psnr_unmarked = psnr(original.frames[t], enc.unmarked_decode[t]);
        rep.lost_count = mask.lost_count();
        rep.black_count = outcome.black_count;
        rep.concealed_count = outcome.concealed_count;
        run.reports.push_back(rep);

        run.outcomes.push_back(std::move(outcome));
        reference = &run.outcomes.back().frame;
    }
    return run;
}

PipelineResult run_pipeline(const Sequence& seq, const PipelineConfig& cfg) {
    PipelineResult r;
    r.encoded = encode_sequence(seq, cfg.qp, cfg.alpha, cfg.key, cfg.placement, cfg.gop_length);
    r.run = transmit_and_decode(r.encoded, seq, cfg.plr, cfg.seed);

    const int n_mbs = (r.encoded.width / kMbSize) * (r.encoded.height / kMbSize);
    const LossModel lm = loss_model(n_mbs, cfg.alpha, cfg.plr);

    r.metrics.reserve(seq.frames.size());
    for (size_t t = 0; t < seq.frames.size(); ++t) {
        const EncodedFrame& ef = r.encoded.frames[t];
        const FrameReport& rep = r.run.reports[t];
        FrameMetrics m;
        m.frame = rep.frame;
        m.first_in_gop = rep.first_in_gop;
        m.psnr = rep.psnr;
        m.mse = rep.mse;
        m.psnr_marked = rep.psnr_marked;
        m.psnr_unmarked = rep.psnr_unmarked;
        m.lost_count = rep.lost_count;
        m.black_count = rep.black_count;
        m.concealed_count = rep.concealed_count;
        m.spill_events = ef.spill_events;
        const TripleStream cover = frame_triples(ef.cover);
        m.est = estimate_ec_d(census(cover));
        if (cfg.ec_trials > 0) {
            m.meas = measure_ec_d(cover, cfg.ec_trials, ecd_seed(cfg.key, rep.frame));
        }
        m.p_c = lm.p_c;
        m.p_nc = lm.p_nc;
        r.metrics.push_back(m);
    }
    return r;
}

} // namespace rdh3ec
