// SPDX-License-Identifier: Apache-2.0
//
// Compares the OpenMP kernels against their serial references: wall time,
// speedup, and bit-exact agreement.
#include <cstdio>
#include <functional>
#include <string>

#include <omp.h>

#include "rdh3ec/analytics.hpp"
#include "rdh3ec/codec.hpp"
#include "rdh3ec/frame.hpp"
#include "rdh3ec/motion.hpp"
#include "rdh3ec/rng.hpp"
#include "rdh3ec/serial.hpp"

using namespace rdh3ec;

namespace {

double time_of(const std::function<void()>& fn, int reps) {
    fn(); // warm up
    const double t0 = omp_get_wtime();
    for (int i = 0; i < reps; ++i) fn();
    return (omp_get_wtime() - t0) / reps;
}

void row(const char* name, double serial_s, double parallel_s, bool equal) {
    std::printf("%-22s %10.3f ms %10.3f ms %7.2fx   %s\n", name, serial_s * 1e3,
                parallel_s * 1e3, serial_s / parallel_s, equal ? "bit-exact" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    const int w = argc > 1 ? std::atoi(argv[1]) : 704; // 4x QCIF by default
    const int h = argc > 2 ? std::atoi(argv[2]) : 576;
    const int qp = 24;

    std::printf("threads: %d, frame %dx%d (%d macroblocks)\n\n", omp_get_max_threads(), w, h,
                (w / 16) * (h / 16));
    std::printf("%-22s %13s %13s %8s\n", "kernel", "serial", "openmp", "speedup");

    Rng rng(1);
    Frame a = make_frame(w, h);
    for (auto& s : a.luma) s = static_cast<uint8_t>(rng.next_below(256));
    Sequence tex = synth_sequence(SynthKind::translating_texture, 7, w, h, 2, 3, -2);

    {
        auto ser = serial::encode_frame(a, qp);
        auto par = encode_frame(a, qp);
        row("transform+quantize", time_of([&] { serial::encode_frame(a, qp); }, 3),
            time_of([&] { encode_frame(a, qp); }, 3), ser == par);

        auto dser = serial::decode_frame_pixels(ser, w, h);
        auto dpar = decode_frame_pixels(par, w, h);
        row("dequantize+inverse", time_of([&] { serial::decode_frame_pixels(ser, w, h); }, 3),
            time_of([&] { decode_frame_pixels(ser, w, h); }, 3), dser == dpar);
    }
    {
        auto ser = serial::estimate_frame_mvs(tex.frames[1], tex.frames[0]);
        auto par = estimate_frame_mvs(tex.frames[1], tex.frames[0]);
        row("motion full search",
            time_of([&] { serial::estimate_frame_mvs(tex.frames[1], tex.frames[0]); }, 1),
            time_of([&] { estimate_frame_mvs(tex.frames[1], tex.frames[0]); }, 1), ser == par);
    }
    {
        const uint64_t ser = serial::ssd(a, tex.frames[0]);
        const uint64_t par = ssd(a, tex.frames[0]);
        row("squared error sum", time_of([&] { serial::ssd(a, tex.frames[0]); }, 20),
            time_of([&] { ssd(a, tex.frames[0]); }, 20), ser == par);
    }
    {
        auto ser = serial::monte_carlo_concealability(99, 5, 0.2, 20000, 3);
        auto par = monte_carlo_concealability(99, 5, 0.2, 20000, 3);
        row("monte-carlo trials",
            time_of([&] { serial::monte_carlo_concealability(99, 5, 0.2, 20000, 3); }, 1),
            time_of([&] { monte_carlo_concealability(99, 5, 0.2, 20000, 3); }, 1),
            ser.failed_mbs == par.failed_mbs && ser.lost_mbs == par.lost_mbs);
    }
    return 0;
}
