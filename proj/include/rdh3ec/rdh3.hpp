// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rdh3ec/common.hpp"

namespace rdh3ec {

// Three adjacent zigzag AC coefficients, the embedding unit.
struct Triple {
    int32_t a = 0;
    int32_t b = 0;
    int32_t c = 0;

    bool operator==(const Triple&) const = default;
};

using TripleStream = std::vector<Triple>;

// Total partition of integer triples. Each class has its own embedding rule:
//   all_zero   (0,0,0)          up to 3 bits, prefix code over near-zero marks
//   mid_zero   (a,0,c), c != 0  1-2 bits; the 1-branch expands c away from 0
//   head_only  (a,0,0), a != 0  2-3 bits; the 000-branch expands a away from 0
//   head_mid   (a,b,0), a,b!=0  1-2 bits; b always steps away from 0
//   mid_only   (0,b,0), b != 0  no bits; b steps away from 0 (keeps the
//                               near-zero mark space unambiguous)
//   shifted    b != 0, c != 0   no bits; b and c both step away from 0
enum class TripleClass : uint8_t {
    all_zero,
    mid_zero,
    head_only,
    head_mid,
    mid_only,
    shifted,
};

TripleClass classify(const Triple& t);

const char* class_name(TripleClass c);

// Bits are carried as vectors of 0/1 bytes; payloads are small.
using Bits = std::vector<uint8_t>;

Bits bits_from_string(const std::string& s); // "0101..."
std::string bits_to_string(const Bits& b);

// Forward cursor over a payload. Reads past the end return 0 so a codeword
// that straddles the payload tail can complete; consumed_real() never counts
// padding.
class BitReader {
public:
    explicit BitReader(const Bits& bits) : bits_(&bits) {}

    uint8_t read() {
        if (pos_ < bits_->size()) return (*bits_)[pos_++];
        ++pos_;
        return 0;
    }
    bool exhausted() const { return pos_ >= bits_->size(); }
    size_t consumed_real() const { return pos_ < bits_->size() ? pos_ : bits_->size(); }
    size_t cursor() const { return pos_; }

private:
    const Bits* bits_;
    size_t pos_ = 0;
};

// Marks one triple, consuming 0-3 payload bits. Total function; every
// modification moves a coefficient by exactly +-1.
Triple embed_triple(const Triple& cover, BitReader& payload);

struct TripleExtract {
    Bits bits; // 0-3 extracted bits
    Triple recovered;
};

// Inverts embed_triple. Throws IntegrityError on the marked patterns
// (0, b, +-1) with |b| >= 2, which no embedding rule can produce.
TripleExtract extract_triple(const Triple& marked);

// In-place stream embedding starting at triple index `begin`. Marks triples
// until the payload is exhausted; later triples are left untouched. Returns
// the index of the first untouched triple and the count of real payload bits
// consumed.
struct StreamEmbed {
    size_t next_index = 0;
    size_t bits_embedded = 0;
};
StreamEmbed embed_into(TripleStream& stream, size_t begin, BitReader& payload);

// In-place stream extraction starting at `begin`, collecting at most
// `max_real_bits` payload bits (codeword tails past that limit are padding
// and are dropped). Triples after the stop point pass through unmodified.
struct StreamExtract {
    size_t next_index = 0;
    size_t bits_collected = 0;
};
StreamExtract extract_from(TripleStream& stream, size_t begin, size_t max_real_bits,
                           Bits& out);

struct EmbedResult {
    TripleStream marked;
    size_t bits_embedded = 0;
    size_t stop_index = 0; // first pass-through triple
};
EmbedResult embed_stream(const TripleStream& cover, const Bits& payload);

struct ExtractResult {
    Bits bits;
    TripleStream recovered;
    size_t stop_index = 0;
};
ExtractResult extract_stream(const TripleStream& marked, size_t expected_bits);

// Guaranteed number of payload bits one triple of this class absorbs
// (shortest codeword; 0 for the shift-only classes).
int min_capacity_bits(TripleClass c);

std::map<std::array<int32_t, 3>, uint64_t> compute_triple_histogram(const TripleStream& s);

} // namespace rdh3ec
