// SPDX-License-Identifier: Apache-2.0
#include "rdh3ec/serial.hpp"

#include <cmath>
#include <cstdlib>

#include "rdh3ec/rng.hpp"

namespace rdh3ec::serial {

namespace {

constexpr double kFwd[4][4] = {{1, 1, 1, 1}, {2, 1, -1, -2}, {1, -1, -1, 1}, {1, -2, 2, -1}};
constexpr double kDiag[4] = {0.25, 0.1, 0.25, 0.1};

} // namespace

QuantizedMacroblock transform_quantize(const Macroblock& mb, int qp) {
    const double step = qstep(qp);
    QuantizedMacroblock q;
    q.index = mb.index;
    q.qp = qp;
    for (int block = 0; block < kBlocksPerMb; ++block) {
        const int bx = (block % 4) * 4;
        const int by = (block / 4) * 4;
        double x[4][4];
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                x[i][j] = static_cast<double>(mb.samples[(by + i) * kMbSize + bx + j]) - 128.0;
            }
        }
        // C = M * X * Mt, evaluated term by term.
        double mx[4][4];
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                double s = 0;
                for (int k = 0; k < 4; ++k) s += kFwd[i][k] * x[k][j];
                mx[i][j] = s;
            }
        }
        double c[4][4];
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                double s = 0;
                for (int k = 0; k < 4; ++k) s += mx[i][k] * kFwd[j][k];
                c[i][j] = s;
            }
        }
        for (int i = 0; i < kCoeffsPerBlock; ++i) {
            const int flat = kZigzag[i];
            const double v = c[flat / 4][flat % 4];
            const double mag = std::floor(std::abs(v) / step + 1.0 / 3.0);
            q.coeffs[block * kCoeffsPerBlock + i] = static_cast<int32_t>(v < 0 ? -mag : mag);
        }
    }
    return q;
}

Macroblock dequantize_inverse(const QuantizedMacroblock& qmb) {
    const double step = qstep(qmb.qp);
    Macroblock mb;
    mb.index = qmb.index;
    for (int block = 0; block < kBlocksPerMb; ++block) {
        const int bx = (block % 4) * 4;
        const int by = (block / 4) * 4;
        double c[4][4];
        for (int i = 0; i < kCoeffsPerBlock; ++i) {
            const int flat = kZigzag[i];
            c[flat / 4][flat % 4] =
                static_cast<double>(qmb.coeffs[block * kCoeffsPerBlock + i]) * step;
        }
        double u[4][4];
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) u[i][j] = kDiag[i] * c[i][j] * kDiag[j];
        }
        double v[4][4];
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                double s = 0;
                for (int k = 0; k < 4; ++k) s += kFwd[k][i] * u[k][j];
                v[i][j] = s;
            }
        }
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                double s = 0;
                for (int k = 0; k < 4; ++k) s += v[i][k] * kFwd[k][j];
                int64_t px = std::llround(s + 128.0);
                px = px < 0 ? 0 : (px > 255 ? 255 : px);
                mb.samples[(by + i) * kMbSize + bx + j] = static_cast<uint8_t>(px);
            }
        }
    }
    return mb;
}

std::vector<QuantizedMacroblock> encode_frame(const Frame& frame, int qp) {
    std::vector<Macroblock> mbs = partition(frame);
    std::vector<QuantizedMacroblock> out(mbs.size());
    for (size_t i = 0; i < mbs.size(); ++i) out[i] = serial::transform_quantize(mbs[i], qp);
    return out;
}

Frame decode_frame_pixels(const std::vector<QuantizedMacroblock>& mbs, int width, int height) {
    std::vector<Macroblock> px(mbs.size());
    for (size_t i = 0; i < mbs.size(); ++i) px[i] = serial::dequantize_inverse(mbs[i]);
    return reassemble(px, width, height);
}

MotionVector estimate_mv(const Frame& cur, int mb_index, const Frame& reference, int range) {
    if (cur.width != reference.width || cur.height != reference.height) {
        throw ValidationError("motion search needs equal frame dimensions");
    }
    const int mbs_x = cur.width / kMbSize;
    const int bx = (mb_index % mbs_x) * kMbSize;
    const int by = (mb_index / mbs_x) * kMbSize;

    uint32_t best_sad = UINT32_MAX;
    int best_cost = 0, best_dx = 0, best_dy = 0;
    bool have = false;
    for (int dy = -range; dy <= range; ++dy) {
        for (int dx = -range; dx <= range; ++dx) {
            const int rx = bx + dx;
            const int ry = by + dy;
            if (rx < 0 || ry < 0 || rx + kMbSize > cur.width || ry + kMbSize > cur.height) {
                continue;
            }
            uint32_t sad = 0;
            for (int y = 0; y < kMbSize; ++y) {
                for (int x = 0; x < kMbSize; ++x) {
                    sad += static_cast<uint32_t>(
                        std::abs(static_cast<int>(cur.at(bx + x, by + y)) -
                                 static_cast<int>(reference.at(rx + x, ry + y))));
                }
            }
            const int cost = std::abs(dx) + std::abs(dy);
            const bool better =
                !have || sad < best_sad ||
                (sad == best_sad &&
                 (cost < best_cost ||
                  (cost == best_cost && (dy < best_dy || (dy == best_dy && dx < best_dx)))));
            if (better) {
                have = true;
                best_sad = sad;
                best_cost = cost;
                best_dx = dx;
                best_dy = dy;
            }
        }
    }
    return {best_dx, best_dy};
}

std::vector<MotionVector> estimate_frame_mvs(const Frame& cur, const Frame& reference,
                                             int range) {
    const int n = cur.mb_count();
    std::vector<MotionVector> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = serial::estimate_mv(cur, i, reference, range);
    return out;
}

uint64_t ssd(const Frame& a, const Frame& b) {
    if (a.width != b.width || a.height != b.height) {
        throw ValidationError("frame dimension mismatch");
    }
    uint64_t sum = 0;
    for (size_t i = 0; i < a.luma.size(); ++i) {
        const int d = static_cast<int>(a.luma[i]) - static_cast<int>(b.luma[i]);
        sum += static_cast<uint64_t>(d * d);
    }
    return sum;
}

ConcealabilityEstimate monte_carlo_concealability(int n_mbs, int alpha, double p,
                                                  int trials, uint64_t seed) {
    uint64_t lost_total = 0;
    uint64_t failed_total = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(Rng::mix({seed, 0x4d43434f4e43ull, static_cast<uint64_t>(t)}));
        const size_t n_slots = static_cast<size_t>(n_mbs) * alpha;
        std::vector<uint32_t> slot_of_copy(n_slots);
        for (size_t i = 0; i < n_slots; ++i) slot_of_copy[i] = static_cast<uint32_t>(i);
        shuffle(slot_of_copy, rng);
        std::vector<uint8_t> lost(static_cast<size_t>(n_mbs));
        for (auto& f : lost) f = rng.bernoulli(p) ? 1 : 0;
        for (int k = 0; k < n_mbs; ++k) {
            if (!lost[static_cast<size_t>(k)]) continue;
            ++lost_total;
            bool all = true;
            for (int j = 0; j < alpha && all; ++j) {
                const int host =
                    static_cast<int>(slot_of_copy[static_cast<size_t>(k) * alpha + j]) / alpha;
                all = lost[static_cast<size_t>(host)] != 0;
            }
            if (all) ++failed_total;
        }
    }
    ConcealabilityEstimate e;
    e.lost_mbs = lost_total;
    e.failed_mbs = failed_total;
    e.total_mbs = static_cast<uint64_t>(trials) * static_cast<uint64_t>(n_mbs);
    e.conditional = lost_total ? static_cast<double>(failed_total) / lost_total : 0.0;
    e.conditional_half_width =
        lost_total ? 1.96 * std::sqrt(e.conditional * (1 - e.conditional) /
                                      static_cast<double>(lost_total))
                   : 0.0;
    e.unconditional = static_cast<double>(failed_total) / static_cast<double>(e.total_mbs);
    e.unconditional_half_width =
        1.96 * std::sqrt(e.unconditional * (1 - e.unconditional) /
                         static_cast<double>(e.total_mbs));
    return e;
}

} // namespace rdh3ec::serial
