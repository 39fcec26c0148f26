// SPDX-License-Identifier: Apache-2.0
#include "rdh3ec/rdh3.hpp"

namespace rdh3ec {

namespace {

int sgn(int32_t v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

} // namespace

TripleClass classify(const Triple& t) {
    if (t.b == 0) {
        if (t.c != 0) return TripleClass::mid_zero;
        return t.a == 0 ? TripleClass::all_zero : TripleClass::head_only;
    }
    if (t.c == 0) {
        return t.a == 0 ? TripleClass::mid_only : TripleClass::head_mid;
    }
    return TripleClass::shifted;
}

const char* class_name(TripleClass c) {
    switch (c) {
        case TripleClass::all_zero: return "all_zero";
        case TripleClass::mid_zero: return "mid_zero";
        case TripleClass::head_only: return "head_only";
        case TripleClass::head_mid: return "head_mid";
        case TripleClass::mid_only: return "mid_only";
        case TripleClass::shifted: return "shifted";
    }
    return "?";
}

Bits bits_from_string(const std::string& s) {
    Bits out;
    out.reserve(s.size());
    for (char ch : s) {
        if (ch != '0' && ch != '1') throw ValidationError("bit string must be 0/1");
        out.push_back(ch == '1' ? 1 : 0);
    }
    return out;
}

std::string bits_to_string(const Bits& b) {
    std::string s;
    s.reserve(b.size());
    for (uint8_t v : b) s.push_back(v ? '1' : '0');
    return s;
}

// Codeword tables.
//
//   all_zero      000 -> ( 0, 0, 0)    100 -> ( 0,-1, 0)    110 -> (0, 0, 1)
//                 001 -> ( 0, 1, 0)    101 -> ( 1, 0, 0)    111 -> (0, 0,-1)
//                 01  -> (-1, 0, 0)
//   mid_zero      00 -> (a, 1, c)      01 -> (a,-1, c)      1 -> (a, 0, c+sgn c)
//   head_only     000 -> (a+sgn a,0,0) 001 -> (a, 1, 0)     01 -> (a,-1, 0)
//                 10  -> (a, 0, 1)     11  -> (a, 0,-1)
//   head_mid      00 -> (a, b+sgn b, 0)  01 -> (a, b+sgn b, 1)
//                 1  -> (a, b+sgn b,-1)
//   mid_only      (0, b+sgn b, 0), no bits
//   shifted       (a, b+sgn b, c+sgn c), no bits
//
// head_mid's one-bit branch steps b as well: leaving b at magnitude 1 would
// collide with the mid_zero marks (a,+-1,c).
Triple embed_triple(const Triple& cover, BitReader& payload) {
    const auto cls = classify(cover);
    const Triple& t = cover;

    switch (cls) {
        case TripleClass::all_zero: {
            uint8_t b1 = payload.read();
            uint8_t b2 = payload.read();
            if (b1 == 0) {
                if (b2 == 1) return {-1, 0, 0};           // 01
                return payload.read() ? Triple{0, 1, 0}   // 001
                                      : Triple{0, 0, 0};  // 000
            }
            uint8_t b3 = payload.read();
            if (b2 == 0) return b3 ? Triple{1, 0, 0} : Triple{0, -1, 0}; // 101 / 100
            return b3 ? Triple{0, 0, -1} : Triple{0, 0, 1};              // 111 / 110
        }
        case TripleClass::mid_zero: {
            if (payload.read()) return {t.a, 0, t.c + sgn(t.c)}; // 1
            return payload.read() ? Triple{t.a, -1, t.c}         // 01
                                  : Triple{t.a, 1, t.c};         // 00
        }
        case TripleClass::head_only: {
            uint8_t b1 = payload.read();
            uint8_t b2 = payload.read();
            if (b1 == 0) {
                if (b2 == 1) return {t.a, -1, 0};                    // 01
                return payload.read() ? Triple{t.a, 1, 0}            // 001
                                      : Triple{t.a + sgn(t.a), 0, 0}; // 000
            }
            return b2 ? Triple{t.a, 0, -1} : Triple{t.a, 0, 1}; // 11 / 10
        }
        case TripleClass::head_mid: {
            const int32_t bs = t.b + sgn(t.b);
            if (payload.read()) return {t.a, bs, -1};      // 1
            return payload.read() ? Triple{t.a, bs, 1}     // 01
                                  : Triple{t.a, bs, 0};    // 00
        }
        case TripleClass::mid_only:
            return {0, t.b + sgn(t.b), 0};
        case TripleClass::shifted:
            return {t.a, t.b + sgn(t.b), t.c + sgn(t.c)};
    }
    return t; // unreachable
}

// Decision table keyed on the (|b|, |c|) pattern of the marked triple; each
// reachable pattern belongs to exactly one embedding branch.
TripleExtract extract_triple(const Triple& m) {
    const int ab = std::abs(m.b);
    const int ac = std::abs(m.c);

    auto bits = [](std::initializer_list<int> l) {
        Bits v;
        for (int b : l) v.push_back(static_cast<uint8_t>(b));
        return v;
    };

    if (ab == 0 && ac == 0) {
        if (m.a == 0) return {bits({0, 0, 0}), {0, 0, 0}};
        if (m.a == -1) return {bits({0, 1}), {0, 0, 0}};
        if (m.a == 1) return {bits({1, 0, 1}), {0, 0, 0}};
        return {bits({0, 0, 0}), {m.a - sgn(m.a), 0, 0}}; // expanded head_only
    }
    if (ab == 0 && ac == 1) {
        if (m.a == 0) {
            return m.c == 1 ? TripleExtract{bits({1, 1, 0}), {0, 0, 0}}
                            : TripleExtract{bits({1, 1, 1}), {0, 0, 0}};
        }
        return m.c == 1 ? TripleExtract{bits({1, 0}), {m.a, 0, 0}}
                        : TripleExtract{bits({1, 1}), {m.a, 0, 0}};
    }
    if (ab == 0) { // |c| >= 2: mid_zero shift branch
        return {bits({1}), {m.a, 0, m.c - sgn(m.c)}};
    }
    if (ab == 1 && ac == 0) {
        if (m.a == 0) {
            return m.b == 1 ? TripleExtract{bits({0, 0, 1}), {0, 0, 0}}
                            : TripleExtract{bits({1, 0, 0}), {0, 0, 0}};
        }
        return m.b == 1 ? TripleExtract{bits({0, 0, 1}), {m.a, 0, 0}}
                        : TripleExtract{bits({0, 1}), {m.a, 0, 0}};
    }
    if (ab == 1) { // c != 0: mid_zero data branches
        return m.b == 1 ? TripleExtract{bits({0, 0}), {m.a, 0, m.c}}
                        : TripleExtract{bits({0, 1}), {m.a, 0, m.c}};
    }
    // |b| >= 2 from here on.
    if (ac == 0) {
        if (m.a == 0) return {{}, {0, m.b - sgn(m.b), 0}}; // mid_only
        return {bits({0, 0}), {m.a, m.b - sgn(m.b), 0}};
    }
    if (ac == 1) {
        if (m.a == 0) {
            throw IntegrityError("unreachable marked triple (0," + std::to_string(m.b) +
                                 "," + std::to_string(m.c) + ")");
        }
        return m.c == 1 ? TripleExtract{bits({0, 1}), {m.a, m.b - sgn(m.b), 0}}
                        : TripleExtract{bits({1}), {m.a, m.b - sgn(m.b), 0}};
    }
    return {{}, {m.a, m.b - sgn(m.b), m.c - sgn(m.c)}}; // shifted
}

StreamEmbed embed_into(TripleStream& stream, size_t begin, BitReader& payload) {
    StreamEmbed r;
    r.bits_embedded = 0;
    size_t i = begin;
    const size_t before = payload.consumed_real();
    for (; i < stream.size(); ++i) {
        if (payload.exhausted()) break;
        stream[i] = embed_triple(stream[i], payload);
    }
    r.next_index = i;
    r.bits_embedded = payload.consumed_real() - before;
    return r;
}

StreamExtract extract_from(TripleStream& stream, size_t begin, size_t max_real_bits,
                           Bits& out) {
    StreamExtract r;
    size_t collected = 0;
    size_t i = begin;
    for (; i < stream.size() && collected < max_real_bits; ++i) {
        TripleExtract e = extract_triple(stream[i]);
        stream[i] = e.recovered;
        for (uint8_t bit : e.bits) {
            if (collected == max_real_bits) break; // codeword tail was padding
            out.push_back(bit);
            ++collected;
        }
    }
    r.next_index = i;
    r.bits_collected = collected;
    return r;
}

EmbedResult embed_stream(const TripleStream& cover, const Bits& payload) {
    EmbedResult r;
    r.marked = cover;
    BitReader reader(payload);
    StreamEmbed e = embed_into(r.marked, 0, reader);
    r.bits_embedded = e.bits_embedded;
    r.stop_index = e.next_index;
    return r;
}

ExtractResult extract_stream(const TripleStream& marked, size_t expected_bits) {
    ExtractResult r;
    r.recovered = marked;
    StreamExtract e = extract_from(r.recovered, 0, expected_bits, r.bits);
    // Fewer collected bits than expected means the assigned payload outran
    // this stream's capacity; the remainder lives in the caller's spill.
    r.stop_index = e.next_index;
    return r;
}

int min_capacity_bits(TripleClass c) {
    switch (c) {
        case TripleClass::all_zero: return 2;
        case TripleClass::mid_zero: return 1;
        case TripleClass::head_only: return 2;
        case TripleClass::head_mid: return 1;
        case TripleClass::mid_only: return 0;
        case TripleClass::shifted: return 0;
    }
    return 0;
}

std::map<std::array<int32_t, 3>, uint64_t> compute_triple_histogram(const TripleStream& s) {
    std::map<std::array<int32_t, 3>, uint64_t> h;
    for (const Triple& t : s) {
        ++h[{t.a, t.b, t.c}];
    }
    return h;
}

} // namespace rdh3ec
