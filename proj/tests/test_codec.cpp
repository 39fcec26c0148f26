// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rdh3ec/codec.hpp"
#include "rdh3ec/rng.hpp"
#include "rdh3ec/serial.hpp"

using namespace rdh3ec;

namespace {

Macroblock random_mb(Rng& rng, int index = 0) {
    Macroblock mb;
    mb.index = index;
    for (auto& s : mb.samples) s = static_cast<uint8_t>(rng.next_below(256));
    return mb;
}

Frame random_frame(Rng& rng, int w, int h) {
    Frame f = make_frame(w, h);
    for (auto& s : f.luma) s = static_cast<uint8_t>(rng.next_below(256));
    return f;
}

} // namespace

TEST_CASE("partition geometry and lossless reassembly") {
    Rng rng(1);
    Frame f = random_frame(rng, 176, 144);
    auto mbs = partition(f);
    CHECK(mbs.size() == 99);
    CHECK(reassemble(mbs, 176, 144) == f);

    Frame tiny = random_frame(rng, 16, 16);
    auto one = partition(tiny);
    CHECK(one.size() == 1);
    for (int i = 0; i < kCoeffsPerMb; ++i) CHECK(one[0].samples[i] == tiny.luma[i]);
}

TEST_CASE("quantizer step values") {
    CHECK(qstep(4) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(qstep(10) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(qstep(16) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(qstep(22) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(qstep(28) == doctest::Approx(16.0).epsilon(1e-12));
    for (int qp = 1; qp <= 51; ++qp) CHECK(qstep(qp) > qstep(qp - 1));
    CHECK_THROWS_AS(qstep(-1), ValidationError);
    CHECK_THROWS_AS(qstep(52), ValidationError);
}

TEST_CASE("flat residual transforms to all-zero coefficients") {
    Macroblock mid;
    mid.samples.fill(128);
    for (int qp : {0, 18, 24, 30, 51}) {
        auto q = transform_quantize(mid, qp);
        for (int32_t c : q.coeffs) CHECK(c == 0);
    }
}

TEST_CASE("constant block has DC-only coefficients") {
    Macroblock mb;
    mb.samples.fill(200);
    auto q = transform_quantize(mb, 20);
    bool any_dc = false;
    for (int block = 0; block < kBlocksPerMb; ++block) {
        for (int i = 0; i < kCoeffsPerBlock; ++i) {
            if (i == 0) {
                any_dc = any_dc || q.coeffs[block * kCoeffsPerBlock] != 0;
            } else {
                CHECK(q.coeffs[block * kCoeffsPerBlock + i] == 0);
            }
        }
    }
    CHECK(any_dc);
}

TEST_CASE("butterfly path equals direct matrix evaluation") {
    // Straight-line check of a single 4x4 against literal matrix products.
    const int x[4][4] = {{7, 250, 3, 128}, {90, 17, 201, 55}, {128, 128, 127, 129}, {0, 255, 64, 32}};
    const int m[4][4] = {{1, 1, 1, 1}, {2, 1, -1, -2}, {1, -1, -1, 1}, {1, -2, 2, -1}};
    int mx[4][4] = {};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) mx[i][j] += m[i][k] * (x[k][j] - 128);
    int c[4][4] = {};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) c[i][j] += mx[i][k] * m[j][k];

    Macroblock mb;
    mb.samples.fill(128);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) mb.samples[i * kMbSize + j] = static_cast<uint8_t>(x[i][j]);

    const int qp = 24;
    auto q = transform_quantize(mb, qp);
    for (int i = 0; i < kCoeffsPerBlock; ++i) {
        const int flat = kZigzag[i];
        const double v = c[flat / 4][flat % 4];
        const double mag = std::floor(std::abs(v) / qstep(qp) + 1.0 / 3.0);
        const auto expect = static_cast<int32_t>(v < 0 ? -mag : mag);
        CHECK(q.coeffs[i] == expect);
    }

    // And the two library routes agree on random macroblocks at every qp.
    Rng rng(42);
    for (int qp2 : {0, 12, 18, 24, 30, 40, 51}) {
        for (int t = 0; t < 20; ++t) {
            Macroblock r = random_mb(rng);
            CHECK(transform_quantize(r, qp2) == serial::transform_quantize(r, qp2));
        }
    }
}

TEST_CASE("constant-block reconstruction error stays tiny at fine quantization") {
    for (int qp = 0; qp <= 10; ++qp) {
        for (int v : {0, 3, 17, 127, 128, 200, 255}) {
            Macroblock mb;
            mb.samples.fill(static_cast<uint8_t>(v));
            Macroblock rec = dequantize_inverse(transform_quantize(mb, qp));
            for (int i = 0; i < kCoeffsPerMb; ++i) {
                CHECK(std::abs(static_cast<int>(rec.samples[i]) - v) <= 2);
            }
        }
    }
}

TEST_CASE("all-zero coefficients reconstruct the mid-gray block") {
    QuantizedMacroblock q;
    q.qp = 24;
    Macroblock rec = dequantize_inverse(q);
    for (auto s : rec.samples) CHECK(s == 128);
}

TEST_CASE("quantizer fixed point") {
    // Requantizing a dequantized coefficient returns the same level.
    Rng rng(3);
    for (int qp : {0, 10, 18, 24, 30, 42, 51}) {
        const double step = qstep(qp);
        for (int t = 0; t < 500; ++t) {
            const int32_t q = static_cast<int32_t>(rng.next_below(801)) - 400;
            const double v = static_cast<double>(q) * step;
            const double mag = std::floor(std::abs(v) / step + 1.0 / 3.0);
            const auto requant = static_cast<int32_t>(v < 0 ? -mag : mag);
            CHECK(requant == q);
        }
    }
}

TEST_CASE("reconstruction error bound from the quantizer") {
    // Per-pixel error is bounded by the propagated per-coefficient error:
    // the dead-zone leaves at most 2/3 of a step per coefficient, and the
    // inverse gains sum to less than 1 per pixel.
    Rng rng(4);
    for (int qp : {10, 18, 24}) {
        const double bound = qstep(qp) * 2.0 / 3.0 + 1.0;
        for (int t = 0; t < 10; ++t) {
            Macroblock mb = random_mb(rng);
            Macroblock rec = dequantize_inverse(transform_quantize(mb, qp));
            for (int i = 0; i < kCoeffsPerMb; ++i) {
                CHECK(std::abs(static_cast<int>(rec.samples[i]) -
                               static_cast<int>(mb.samples[i])) <= bound);
            }
        }
    }
}

TEST_CASE("triple packing conventions") {
    QuantizedMacroblock q;
    q.qp = 24;
    auto triples = to_triples(q);
    REQUIRE(triples.size() == kTriplesPerMb);
    for (const Triple& t : triples) CHECK(t == Triple{0, 0, 0});

    // single AC coefficient at zigzag index 5 of block 0 lands mid-triple 1
    q.coeffs[5] = 9;
    triples = to_triples(q);
    CHECK(triples[1] == Triple{0, 9, 0});

    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        QuantizedMacroblock r;
        r.qp = 20;
        for (auto& c : r.coeffs) c = static_cast<int32_t>(rng.next_below(41)) - 20;
        CHECK(from_triples(to_triples(r), r) == r);
    }

    TripleStream bad(79);
    CHECK_THROWS_AS(from_triples(bad, q), ValidationError);
}

TEST_CASE("triples never touch DC") {
    Rng rng(12);
    QuantizedMacroblock r;
    r.qp = 20;
    for (auto& c : r.coeffs) c = static_cast<int32_t>(rng.next_below(41)) - 20;
    TripleStream s = to_triples(r);
    for (Triple& t : s) t = {t.a + 1, t.b - 1, t.c + 2};
    QuantizedMacroblock modified = from_triples(s, r);
    for (int block = 0; block < kBlocksPerMb; ++block) {
        CHECK(modified.coeffs[block * kCoeffsPerBlock] == r.coeffs[block * kCoeffsPerBlock]);
    }
}

TEST_CASE("coefficient mass is non-increasing in qp") {
    Rng rng(13);
    for (int t = 0; t < 10; ++t) {
        Macroblock mb = random_mb(rng);
        int64_t prev_mass = -1;
        for (int qp = 18; qp <= 30; qp += 2) {
            auto q = transform_quantize(mb, qp);
            int64_t mass = 0;
            for (int32_t c : q.coeffs) mass += std::abs(c);
            if (prev_mass >= 0) CHECK(mass <= prev_mass);
            prev_mass = mass;
        }
    }
}

TEST_CASE("frame triple stream length is N x 80") {
    Rng rng(14);
    Frame f = random_frame(rng, 176, 144);
    auto mbs = encode_frame(f, 24);
    CHECK(frame_triples(mbs).size() == 99u * kTriplesPerMb);
}
