#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>

// Word-level primitives: most/least significant set bit on operands of up to
// two machine words, and half-word packing. Everything here is branch-bounded
// and allocation-free.

namespace chdict {

using Word = std::uint64_t;
using DWord = unsigned __int128;  // double-word operand

inline constexpr unsigned kWordBits = 64;
inline constexpr unsigned kDWordBits = 2 * kWordBits;

// Mask of the `len` least significant bits, len in [0, 128].
inline constexpr DWord dmask(unsigned len) {
    if (len >= kDWordBits) return ~DWord{0};
    return (DWord{1} << len) - 1;
}

// Index of the highest set bit. Requires x != 0.
inline unsigned msb(DWord x) {
    if (x == 0) throw std::invalid_argument("msb: zero operand");
    const Word hi = static_cast<Word>(x >> kWordBits);
    if (hi != 0) return kWordBits + (kWordBits - 1) - static_cast<unsigned>(std::countl_zero(hi));
    return (kWordBits - 1) - static_cast<unsigned>(std::countl_zero(static_cast<Word>(x)));
}

// Index of the lowest set bit. Requires x != 0.
inline unsigned lsb(DWord x) {
    if (x == 0) throw std::invalid_argument("lsb: zero operand");
    const Word lo = static_cast<Word>(x);
    if (lo != 0) return static_cast<unsigned>(std::countr_zero(lo));
    return kWordBits + static_cast<unsigned>(std::countr_zero(static_cast<Word>(x >> kWordBits)));
}

// The b least significant bits of x. Requires x < 2^(2b) and b <= 64.
inline DWord lower_half(DWord x, unsigned b) {
    if (b > kWordBits) throw std::invalid_argument("lower_half: b too wide");
    if (b < kWordBits && (x >> (2 * b)) != 0) throw std::invalid_argument("lower_half: operand too wide");
    return x & dmask(b);
}

// Bits [b, 2b) of x. Requires x < 2^(2b) and b <= 64.
inline DWord upper_half(DWord x, unsigned b) {
    if (b > kWordBits) throw std::invalid_argument("upper_half: b too wide");
    if (b < kWordBits && (x >> (2 * b)) != 0) throw std::invalid_argument("upper_half: operand too wide");
    return x >> b;
}

// lo + hi * 2^b. Requires lo, hi < 2^b and b <= 64.
inline DWord pack(DWord lo, DWord hi, unsigned b) {
    if (b > kWordBits) throw std::invalid_argument("pack: b too wide");
    if ((lo & ~dmask(b)) != 0 || (hi & ~dmask(b)) != 0)
        throw std::invalid_argument("pack: half out of range");
    return lo | (hi << b);
}

// Reverse of the low 64 bits, constant instruction sequence.
inline constexpr Word bitrev64(Word x) {
    x = ((x & 0x5555555555555555ULL) << 1) | ((x >> 1) & 0x5555555555555555ULL);
    x = ((x & 0x3333333333333333ULL) << 2) | ((x >> 2) & 0x3333333333333333ULL);
    x = ((x & 0x0F0F0F0F0F0F0F0FULL) << 4) | ((x >> 4) & 0x0F0F0F0F0F0F0F0FULL);
    x = ((x & 0x00FF00FF00FF00FFULL) << 8) | ((x >> 8) & 0x00FF00FF00FF00FFULL);
    x = ((x & 0x0000FFFF0000FFFFULL) << 16) | ((x >> 16) & 0x0000FFFF0000FFFFULL);
    return (x << 32) | (x >> 32);
}

// Reverse of the low `width` bits of x; bits above `width` must be zero.
inline constexpr Word bitrev(Word x, unsigned width) {
    if (width == 0) return 0;
    if (width > kWordBits) throw std::invalid_argument("bitrev: width too wide");
    return bitrev64(x) >> (kWordBits - width);
}

}  // namespace chdict
