// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "rdh3ec/frame.hpp"
#include "rdh3ec/rdh3.hpp"

namespace rdh3ec {

// Sum of squared sample differences; exact integer accumulation.
uint64_t ssd(const Frame& a, const Frame& b);
double mse(const Frame& a, const Frame& b);
// 10*log10(255^2 / mse); +infinity for identical frames.
double psnr(const Frame& a, const Frame& b);

// Triple population split by embedding class, plus the sub-populations the
// reference estimator weighs separately.
struct ClassCensus {
    uint64_t all_zero = 0;  // (0,0,0)
    uint64_t mid_zero = 0;  // (a,0,c), c != 0
    uint64_t head_only = 0; // (a,0,0), a != 0
    uint64_t head_mid = 0;  // (a,b,0), a,b != 0
    uint64_t shifted = 0;   // b != 0, c != 0
    uint64_t mid_only = 0;  // (0,b,0), b != 0

    uint64_t head_mid_big = 0;  // (a,b,0), |a| > 2, b != 0
    uint64_t head_mid_unit = 0; // (a,b,0), |a| = 1, b != 0
    uint64_t unit_tail_pos = 0; // exactly (0,0,1)

    uint64_t total() const {
        return all_zero + mid_zero + head_only + head_mid + shifted + mid_only;
    }
};

ClassCensus census(const TripleStream& s);

// Closed-form capacity/distortion estimates. `pro` rates this embedder,
// `rec` the two-bit-per-triple reference scheme it is compared against.
// Values are exact multiples of 1/8; *_eighths carries them as integers.
struct EcdEstimates {
    int64_t ec_pro_eighths = 0;
    int64_t ec_rec_eighths = 0;
    int64_t d_pro_eighths = 0;
    int64_t d_rec_eighths = 0;
    int64_t ec_diff_eighths = 0;
    int64_t d_diff_eighths = 0;

    double ec_pro = 0, ec_rec = 0, d_pro = 0, d_rec = 0;
    double ec_diff = 0, d_diff = 0;
    double ecdr_pro = 0, ecdr_rec = 0; // NaN when the distortion term is zero
};

EcdEstimates estimate_ec_d(const ClassCensus& c);

// Full-embedding measurement: independent uniform payloads, mean embedded
// bits and mean L1 coefficient distortion.
struct MeasuredEcd {
    double mean_bits = 0;
    double mean_cost = 0;
};
MeasuredEcd measure_ec_d(const TripleStream& cover, int trials, uint64_t seed);

// Concealability model for repetition factor alpha under loss rate p with n
// macroblocks per frame:
//   P_beta = C(n,beta) / sum_{j=1..alpha} C(n,j)
//   P_nc   = sum_beta P_beta * p^beta,    P_c = 1 - P_nc
struct LossModel {
    std::vector<double> p_beta; // beta = 1..alpha
    double p_nc = 0;
    double p_c = 0;
};
LossModel loss_model(int n_mbs, int alpha, double p);

// Simulates (random slot permutation, Bernoulli mask) pairs and counts lost
// macroblocks whose every copy-hosting macroblock is also lost.
// `conditional` is comparable to P_nc (failures among lost macroblocks);
// `unconditional` to p * P_nc.
struct ConcealabilityEstimate {
    double conditional = 0;
    double conditional_half_width = 0; // 95% normal-approximation interval
    double unconditional = 0;
    double unconditional_half_width = 0;
    uint64_t lost_mbs = 0;
    uint64_t failed_mbs = 0;
    uint64_t total_mbs = 0;
};
ConcealabilityEstimate monte_carlo_concealability(int n_mbs, int alpha, double p,
                                                  int trials, uint64_t seed);

} // namespace rdh3ec
