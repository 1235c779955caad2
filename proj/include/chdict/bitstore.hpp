#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "chdict/wordops.hpp"

// Bit-addressable backing memory with an exact bit budget and a word-access
// counter. The arena is deliberately constructible in a non-zero state so
// that structures built on top can prove they work over arbitrary initial
// memory. Filling happens at construction and is not counted; every
// read_bits/write_bits afterwards counts one access per word loaded or
// stored.

namespace chdict {

struct FillPolicy {
    enum class Kind { Zeros, Ones, Random, Crafted };

    Kind kind = Kind::Zeros;
    std::uint64_t seed = 0;
    std::vector<Word> pattern;  // cycled over the arena (Crafted)

    static FillPolicy zeros() { return {}; }
    static FillPolicy ones() { return {Kind::Ones, 0, {}}; }
    static FillPolicy random(std::uint64_t seed) { return {Kind::Random, seed, {}}; }
    static FillPolicy crafted(std::vector<Word> pattern) {
        if (pattern.empty()) throw std::invalid_argument("crafted fill: empty pattern");
        return {Kind::Crafted, 0, std::move(pattern)};
    }
};

class BitStore {
public:
    explicit BitStore(std::size_t capacity_bits, const FillPolicy& fill = FillPolicy::zeros())
        : capacity_bits_(capacity_bits),
          words_((capacity_bits + kWordBits - 1) / kWordBits) {
        if (capacity_bits == 0) throw std::invalid_argument("BitStore: zero capacity");
        switch (fill.kind) {
            case FillPolicy::Kind::Zeros:
                break;
            case FillPolicy::Kind::Ones:
                std::fill(words_.begin(), words_.end(), ~Word{0});
                break;
            case FillPolicy::Kind::Random: {
                std::mt19937_64 rng(fill.seed);
                for (auto& w : words_) w = rng();
                break;
            }
            case FillPolicy::Kind::Crafted:
                for (std::size_t i = 0; i < words_.size(); ++i)
                    words_[i] = fill.pattern[i % fill.pattern.size()];
                break;
        }
    }

    std::size_t capacity_bits() const { return capacity_bits_; }

    std::uint64_t accesses() const { return accesses_; }
    void reset_accesses() { accesses_ = 0; }

    // Value whose bit j equals the stored bit at offset + j. len <= 128.
    DWord read_bits(std::size_t offset, unsigned len) const {
        check_range(offset, len);
        if (len == 0) return 0;
        std::size_t w = offset / kWordBits;
        const unsigned shift = static_cast<unsigned>(offset % kWordBits);
        DWord acc = static_cast<DWord>(load(w)) >> shift;
        unsigned got = kWordBits - shift;
        while (got < len) {
            ++w;
            acc |= static_cast<DWord>(load(w)) << got;
            got += kWordBits;
        }
        return acc & dmask(len);
    }

    // Sets bits [offset, offset+len) to value; other bits untouched.
    void write_bits(std::size_t offset, unsigned len, DWord value) {
        check_range(offset, len);
        if (len < kDWordBits && (value & ~dmask(len)) != 0)
            throw std::invalid_argument("write_bits: value wider than len");
        if (len == 0) return;
        std::size_t w = offset / kWordBits;
        unsigned shift = static_cast<unsigned>(offset % kWordBits);
        unsigned remaining = len;
        DWord v = value;
        while (remaining > 0) {
            const unsigned take = std::min(kWordBits - shift, remaining);
            if (take == kWordBits) {
                store(w, static_cast<Word>(v));
            } else {
                const Word mask = static_cast<Word>(dmask(take)) << shift;
                const Word cur = load(w);
                store(w, (cur & ~mask) | ((static_cast<Word>(v) << shift) & mask));
            }
            v >>= take;
            remaining -= take;
            shift = 0;
            ++w;
        }
    }

    // Raw contents, least-significant-bit-first within each byte. Not access
    // counted: serialization is an external interface, not an operation.
    std::vector<std::uint8_t> dump_bytes() const {
        std::vector<std::uint8_t> out((capacity_bits_ + 7) / 8);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
        const unsigned spare = static_cast<unsigned>(out.size() * 8 - capacity_bits_);
        if (spare > 0) out.back() &= static_cast<std::uint8_t>(0xFFu >> spare);
        return out;
    }

    static BitStore from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t capacity_bits) {
        if (bytes.size() != (capacity_bits + 7) / 8)
            throw std::invalid_argument("from_bytes: size mismatch");
        BitStore s(capacity_bits);
        for (std::size_t i = 0; i < bytes.size(); ++i)
            s.words_[i / 8] |= static_cast<Word>(bytes[i]) << (8 * (i % 8));
        return s;
    }

private:
    void check_range(std::size_t offset, unsigned len) const {
        if (len > kDWordBits) throw std::invalid_argument("bit field wider than two words");
        if (offset > capacity_bits_ || capacity_bits_ - offset < len)
            throw std::out_of_range("bit range outside store capacity");
    }

    Word load(std::size_t w) const {
        ++accesses_;
        return words_[w];
    }
    void store(std::size_t w, Word value) {
        ++accesses_;
        words_[w] = value;
    }

    std::size_t capacity_bits_;
    std::vector<Word> words_;
    mutable std::uint64_t accesses_ = 0;
};

}  // namespace chdict
