// SPDX-License-Identifier: Apache-2.0
#include "rdh3ec/codec.hpp"

#include <cmath>

namespace rdh3ec {

std::vector<Macroblock> partition(const Frame& frame) {
    check_dimensions(frame.width, frame.height);
    const int mbs_x = frame.width / kMbSize;
    const int mbs_y = frame.height / kMbSize;
    std::vector<Macroblock> out(static_cast<size_t>(mbs_x) * mbs_y);
    for (int my = 0; my < mbs_y; ++my) {
        for (int mx = 0; mx < mbs_x; ++mx) {
            Macroblock& mb = out[static_cast<size_t>(my) * mbs_x + mx];
            mb.index = my * mbs_x + mx;
            for (int y = 0; y < kMbSize; ++y) {
                const uint8_t* src = &frame.luma[static_cast<size_t>(my * kMbSize + y) * frame.width +
                                                 static_cast<size_t>(mx) * kMbSize];
                std::copy(src, src + kMbSize, mb.samples.begin() + y * kMbSize);
            }
        }
    }
    return out;
}

Frame reassemble(const std::vector<Macroblock>& mbs, int width, int height) {
    check_dimensions(width, height);
    const int mbs_x = width / kMbSize;
    Frame f = make_frame(width, height);
    for (const Macroblock& mb : mbs) {
        const int mx = mb.index % mbs_x;
        const int my = mb.index / mbs_x;
        for (int y = 0; y < kMbSize; ++y) {
            const uint8_t* src = &mb.samples[static_cast<size_t>(y) * kMbSize];
            std::copy(src, src + kMbSize,
                      f.luma.begin() + static_cast<size_t>(my * kMbSize + y) * width +
                          static_cast<size_t>(mx) * kMbSize);
        }
    }
    return f;
}

namespace {

// 2^(r/6) for r = 0..5, frozen so qstep() is bit-identical everywhere.
constexpr double kSixthPow2[6] = {
    1.0,
    1.122462048309373,
    1.2599210498948732,
    1.4142135623730951,
    1.5874010519681994,
    1.7817974362806785,
};

int64_t round_half_away(double v) {
    return std::llround(v); // llround rounds halfway cases away from zero
}

// Dead-zone quantizer with the H.264 intra offset of one third of a step.
// The offset keeps the zero-set threshold distinct at every qp, which plain
// nearest rounding does not (steps for qp 20 and 22 share the integer
// threshold |c| >= 4).
int32_t quantize_level(double c, double step) {
    const double mag = std::floor(std::abs(c) / step + 1.0 / 3.0);
    return static_cast<int32_t>(c < 0 ? -mag : mag);
}

// Forward butterfly for one row/column [x0 x1 x2 x3].
inline void fwd4(int32_t x0, int32_t x1, int32_t x2, int32_t x3,
                 int32_t& y0, int32_t& y1, int32_t& y2, int32_t& y3) {
    const int32_t s03 = x0 + x3, d03 = x0 - x3;
    const int32_t s12 = x1 + x2, d12 = x1 - x2;
    y0 = s03 + s12;
    y2 = s03 - s12;
    y1 = 2 * d03 + d12;
    y3 = d03 - 2 * d12;
}

} // namespace

double qstep(int qp) {
    if (qp < 0 || qp > 51) throw ValidationError("qp must be in [0, 51]");
    const int e = qp - 4;
    int m = e / 6;
    int r = e % 6;
    if (r < 0) {
        r += 6;
        m -= 1;
    }
    return std::ldexp(kSixthPow2[r], m);
}

QuantizedMacroblock transform_quantize(const Macroblock& mb, int qp) {
    const double step = qstep(qp);
    QuantizedMacroblock q;
    q.index = mb.index;
    q.qp = qp;

    for (int block = 0; block < kBlocksPerMb; ++block) {
        const int bx = (block % 4) * 4;
        const int by = (block / 4) * 4;
        int32_t r[4][4]; // 128-offset residual
        for (int y = 0; y < 4; ++y) {
            for (int x = 0; x < 4; ++x) {
                r[y][x] = static_cast<int32_t>(mb.samples[(by + y) * kMbSize + bx + x]) - 128;
            }
        }
        int32_t tmp[4][4];
        for (int y = 0; y < 4; ++y) {
            fwd4(r[y][0], r[y][1], r[y][2], r[y][3], tmp[y][0], tmp[y][1], tmp[y][2], tmp[y][3]);
        }
        int32_t coef[4][4];
        for (int x = 0; x < 4; ++x) {
            fwd4(tmp[0][x], tmp[1][x], tmp[2][x], tmp[3][x], coef[0][x], coef[1][x], coef[2][x],
                 coef[3][x]);
        }
        for (int i = 0; i < kCoeffsPerBlock; ++i) {
            const int flat = kZigzag[i];
            q.coeffs[block * kCoeffsPerBlock + i] =
                quantize_level(coef[flat / 4][flat % 4], step);
        }
    }
    return q;
}

Macroblock dequantize_inverse(const QuantizedMacroblock& qmb) {
    const double step = qstep(qmb.qp);
    Macroblock mb;
    mb.index = qmb.index;

    // Exact inverse of the integer transform: X = Mt D C D M with
    // D = diag(1/4, 1/10, 1/4, 1/10).
    static constexpr double kM[4][4] = {
        {1, 1, 1, 1}, {2, 1, -1, -2}, {1, -1, -1, 1}, {1, -2, 2, -1}};
    static constexpr double kDiag[4] = {0.25, 0.1, 0.25, 0.1};

    for (int block = 0; block < kBlocksPerMb; ++block) {
        const int bx = (block % 4) * 4;
        const int by = (block / 4) * 4;
        double c[4][4];
        for (int i = 0; i < kCoeffsPerBlock; ++i) {
            const int flat = kZigzag[i];
            c[flat / 4][flat % 4] =
                static_cast<double>(qmb.coeffs[block * kCoeffsPerBlock + i]) * step;
        }
        // u = D*C*D
        double u[4][4];
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) u[i][j] = kDiag[i] * c[i][j] * kDiag[j];
        }
        // x = Mt * u * M
        double v[4][4];
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                double s = 0;
                for (int k = 0; k < 4; ++k) s += kM[k][i] * u[k][j];
                v[i][j] = s;
            }
        }
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                double s = 0;
                for (int k = 0; k < 4; ++k) s += v[i][k] * kM[k][j];
                int64_t px = round_half_away(s + 128.0);
                px = px < 0 ? 0 : (px > 255 ? 255 : px);
                mb.samples[(by + i) * kMbSize + bx + j] = static_cast<uint8_t>(px);
            }
        }
    }
    return mb;
}

TripleStream to_triples(const QuantizedMacroblock& qmb) {
    TripleStream out;
    out.reserve(kTriplesPerMb);
    for (int block = 0; block < kBlocksPerMb; ++block) {
        const int32_t* z = &qmb.coeffs[block * kCoeffsPerBlock];
        for (int t = 0; t < kTriplesPerBlock; ++t) {
            out.push_back({z[1 + 3 * t], z[2 + 3 * t], z[3 + 3 * t]});
        }
    }
    return out;
}

QuantizedMacroblock from_triples(const TripleStream& stream, const QuantizedMacroblock& tmpl) {
    if (stream.size() != kTriplesPerMb) {
        throw ValidationError("triple stream must hold exactly 80 triples, got " +
                              std::to_string(stream.size()));
    }
    QuantizedMacroblock q = tmpl;
    for (int block = 0; block < kBlocksPerMb; ++block) {
        int32_t* z = &q.coeffs[block * kCoeffsPerBlock];
        for (int t = 0; t < kTriplesPerBlock; ++t) {
            const Triple& tr = stream[block * kTriplesPerBlock + t];
            z[1 + 3 * t] = tr.a;
            z[2 + 3 * t] = tr.b;
            z[3 + 3 * t] = tr.c;
        }
    }
    return q;
}

TripleStream frame_triples(const std::vector<QuantizedMacroblock>& mbs) {
    TripleStream out;
    out.reserve(mbs.size() * kTriplesPerMb);
    for (const auto& q : mbs) {
        TripleStream t = to_triples(q);
        out.insert(out.end(), t.begin(), t.end());
    }
    return out;
}

std::vector<QuantizedMacroblock> encode_frame(const Frame& frame, int qp) {
    std::vector<Macroblock> mbs = partition(frame);
    std::vector<QuantizedMacroblock> out(mbs.size());
    const int n = static_cast<int>(mbs.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        out[i] = transform_quantize(mbs[i], qp);
    }
    return out;
}

Frame decode_frame_pixels(const std::vector<QuantizedMacroblock>& mbs, int width, int height) {
    std::vector<Macroblock> px(mbs.size());
    const int n = static_cast<int>(mbs.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        px[i] = dequantize_inverse(mbs[i]);
    }
    return reassemble(px, width, height);
}

} // namespace rdh3ec
