#pragma once

#include <cstddef>
#include <stdexcept>

#include "chdict/bitstore.hpp"
#include "chdict/wordops.hpp"

// Externally sized atomic choice dictionary for a small universe: a plain bit
// vector occupying exactly m bits of a BitStore, m below a fixed constant
// number of words. Initialization zeroes the region, which is O(1) because
// the region is O(1) words long. choice returns the smallest member.

namespace chdict {

class WordDict {
public:
    static constexpr std::size_t kMaxUniverse = 255;  // < 2b for every supported b

    WordDict() = default;

    // Zeroes the region; the client set becomes empty.
    WordDict(BitStore& store, std::size_t offset, std::size_t m) : WordDict(attach(store, offset, m)) {
        for (std::size_t done = 0; done < m_;) {
            const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(kWordBits, m_ - done));
            store_->write_bits(offset_ + done, chunk, 0);
            done += chunk;
        }
    }

    // Adopts an existing region without touching it (deserialization path).
    static WordDict attach(BitStore& store, std::size_t offset, std::size_t m) {
        if (m == 0 || m > kMaxUniverse) throw std::invalid_argument("WordDict: bad universe size");
        if (offset > store.capacity_bits() || store.capacity_bits() - offset < m)
            throw std::invalid_argument("WordDict: region outside store");
        WordDict d;
        d.store_ = &store;
        d.offset_ = offset;
        d.m_ = m;
        return d;
    }

    std::size_t universe() const { return m_; }

    void insert(std::size_t ell) { store_->write_bits(offset_ + index(ell), 1, 1); }
    void erase(std::size_t ell) { store_->write_bits(offset_ + index(ell), 1, 0); }
    bool contains(std::size_t ell) const { return store_->read_bits(offset_ + index(ell), 1) != 0; }

    // Smallest member, 0 if the set is empty.
    std::size_t choice() const {
        for (std::size_t done = 0; done < m_;) {
            const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(kWordBits, m_ - done));
            const DWord v = store_->read_bits(offset_ + done, chunk);
            if (v != 0) return done + lsb(v) + 1;
            done += chunk;
        }
        return 0;
    }

    struct Cursor {
        std::size_t pos = 0;  // next bit position to examine
    };

    // Yields members in increasing order, 0 when exhausted.
    std::size_t next(Cursor& c) const {
        std::size_t pos = c.pos;
        while (pos < m_) {
            const std::size_t chunk_base = pos - pos % kWordBits;
            const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(kWordBits, m_ - chunk_base));
            const DWord v = store_->read_bits(offset_ + chunk_base, chunk) >> (pos - chunk_base);
            if (v != 0) {
                const std::size_t hit = pos + lsb(v);
                c.pos = hit + 1;
                return hit + 1;
            }
            pos = chunk_base + chunk;
        }
        c.pos = m_;
        return 0;
    }

private:
    std::size_t index(std::size_t ell) const {
        if (ell < 1 || ell > m_) throw std::invalid_argument("WordDict: element out of range");
        return ell - 1;
    }

    BitStore* store_ = nullptr;
    std::size_t offset_ = 0;
    std::size_t m_ = 0;
};

}  // namespace chdict
