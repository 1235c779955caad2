#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "chdict/bitstore.hpp"
#include "chdict/wordops.hpp"

// Self-delimiting integer code for the universe size: with bin(n) the usual
// binary numeral of n and L = |bin(n)| = ceil(log2(n+1)), the code is
//
//   big endian:    0^(L-1) bin(n)
//   little endian: binhat(n) 0^(L-1)    (binhat = bin with the leading 1
//                                         moved to the end)
//
// both of length 2L-1 bits. The string forms above read in the writing
// direction of their convention: big-endian codes are consumed left to
// right, little-endian codes right to left (a little-endian memory fills a
// word from its least significant end, so the last character written is the
// first one a decoder meets). Both decode in constant time from a word
// window via a single lowest-set-bit scan.

namespace chdict {

enum class Endianness { Big, Little };

inline unsigned gamma_code_bits(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("gamma: n must be positive");
    return 2 * static_cast<unsigned>(std::bit_width(n)) - 1;
}

inline std::string gamma_encode(std::uint64_t n, Endianness endian) {
    if (n == 0) throw std::invalid_argument("gamma: n must be positive");
    const unsigned len = static_cast<unsigned>(std::bit_width(n));
    std::string bin;
    bin.reserve(len);
    for (unsigned j = len; j-- > 0;) bin.push_back((n >> j) & 1 ? '1' : '0');
    const std::string pad(len - 1, '0');
    if (endian == Endianness::Big) return pad + bin;
    return bin.substr(1) + "1" + pad;  // leading 1 moved to the end
}

struct GammaDecoded {
    std::uint64_t value = 0;
    std::size_t consumed = 0;  // bits of code, taken from the reading end
};

// Decodes the code at the reading end of `bits` (front for Big, back for
// Little); characters beyond the code are ignored.
inline GammaDecoded gamma_decode(std::string_view bits, Endianness endian) {
    const auto bad = [](const char* why) { return std::invalid_argument(std::string("gamma decode: ") + why); };
    if (bits.empty()) throw bad("empty input");
    if (endian == Endianness::Big) {
        std::size_t z = 0;
        while (z < bits.size() && bits[z] == '0') {
            if (++z > kWordBits - 1) throw bad("zero run exceeds one word");
        }
        if (z == bits.size()) throw bad("all-zero input");
        const unsigned len = static_cast<unsigned>(z) + 1;
        if (bits.size() < 2 * static_cast<std::size_t>(len) - 1) throw bad("truncated code");
        std::uint64_t n = 0;
        for (unsigned j = 0; j < len; ++j) {
            const char c = bits[z + j];
            if (c != '0' && c != '1') throw bad("non-binary character");
            n = (n << 1) | static_cast<std::uint64_t>(c == '1');
        }
        return {n, 2 * static_cast<std::size_t>(len) - 1};
    }
    // Little endian: the padding zeros sit at the back of the code.
    std::size_t z = 0;
    while (z < bits.size() && bits[bits.size() - 1 - z] == '0') {
        if (++z > kWordBits - 1) throw bad("zero run exceeds one word");
    }
    if (z == bits.size()) throw bad("all-zero input");
    const unsigned len = static_cast<unsigned>(z) + 1;
    const std::size_t total = 2 * static_cast<std::size_t>(len) - 1;
    if (bits.size() < total) throw bad("truncated code");
    const std::size_t start = bits.size() - total;
    if (bits[start + len - 1] != '1') throw bad("missing end marker");
    std::uint64_t n = 1;
    for (unsigned j = 0; j + 1 < len; ++j) {
        const char c = bits[start + j];
        if (c != '0' && c != '1') throw bad("non-binary character");
        n = (n << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return {n, total};
}

// Store layout of the header: the code string occupies offsets
// [offset, offset + 2L-1) with its first character at the reading end of the
// window, i.e. the padding zeros always end up in the low-order bits. Big
// endian stores characters in stream order (a dump shows the paper string
// verbatim); little endian stores the string as the binary numeral it spells
// (last character at the lowest offset).
inline DWord gamma_header_value(std::uint64_t n, Endianness endian) {
    const unsigned len = static_cast<unsigned>(std::bit_width(n));
    if (endian == Endianness::Big) return static_cast<DWord>(bitrev(n, len)) << (len - 1);
    const std::uint64_t payload = len < kWordBits ? n & ((std::uint64_t{1} << (len - 1)) - 1) : n - (std::uint64_t{1} << (len - 1));
    return (DWord{1} << (len - 1)) | (static_cast<DWord>(payload) << len);
}

inline void gamma_write_header(BitStore& store, std::size_t offset, std::uint64_t n, Endianness endian) {
    store.write_bits(offset, gamma_code_bits(n), gamma_header_value(n, endian));
}

// Constant-time decode from the store: one window read, one lsb scan.
inline std::uint64_t gamma_read_header(const BitStore& store, std::size_t offset, Endianness endian) {
    const unsigned window =
        static_cast<unsigned>(std::min<std::size_t>(kDWordBits - 1, store.capacity_bits() - offset));
    const DWord x = store.read_bits(offset, window);
    if (x == 0) throw std::invalid_argument("gamma header: all-zero window");
    const unsigned t = lsb(x);
    if (t >= kWordBits) throw std::invalid_argument("gamma header: zero run exceeds one word");
    const unsigned len = t + 1;
    if (2 * len - 1 > window) throw std::invalid_argument("gamma header: truncated code");
    const std::uint64_t payload = static_cast<std::uint64_t>((x >> len) & dmask(t));
    if (endian == Endianness::Big) return (std::uint64_t{1} << t) | bitrev(payload, t);
    return (std::uint64_t{1} << t) | payload;
}

}  // namespace chdict
