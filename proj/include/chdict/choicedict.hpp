#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "chdict/bitstore.hpp"
#include "chdict/gamma.hpp"
#include "chdict/segdict.hpp"
#include "chdict/worddict.hpp"

// Choice dictionary over {1,...,n}: insert, delete, membership, "return any
// member" and iteration, all in constant time including initialization. The
// bit-vector representation of the client set is split into N = floor(n/2b)
// segments of 2b bits kept in a SegDict and a tail of n' = n mod 2b bits
// kept in a WordDict. In the hidden-barrier externally sized configuration
// the whole structure occupies exactly n+1 bits.

namespace chdict {

enum class BPolicy { TwoWords, OneWord, HalfWord };
enum class Sizing { ExternallySized, SelfContained };

struct Config {
    BPolicy b_policy = BPolicy::TwoWords;
    BarrierMode barrier = BarrierMode::Hidden;
    Sizing sizing = Sizing::ExternallySized;
    Endianness endian = Endianness::Big;
    FillPolicy fill = FillPolicy::zeros();
};

inline unsigned half_width_of(BPolicy p) {
    switch (p) {
        case BPolicy::TwoWords: return 2 * kWordBits;
        case BPolicy::OneWord: return kWordBits;
        case BPolicy::HalfWord: return kWordBits / 2;
    }
    throw std::invalid_argument("unknown b policy");
}

class ChoiceDict {
public:
    struct SpaceReport {
        std::size_t header = 0;   // self-delimiting size code, if any
        std::size_t barrier = 0;  // 1 flag bit (hidden) or one word (plain)
        std::size_t cells = 0;    // 2bN segment bits
        std::size_t tail = 0;     // n' leftover bits
        std::size_t total = 0;
    };

    explicit ChoiceDict(std::size_t n, Config cfg = {}) : cfg_(cfg), n_(n) {
        if (n < 1) throw std::invalid_argument("ChoiceDict: universe size must be positive");
        b_ = half_width_of(cfg.b_policy);
        const unsigned need = static_cast<unsigned>(std::bit_width(static_cast<std::uint64_t>(n)));
        if (cfg.barrier == BarrierMode::Hidden ? b_ < 2 * need : b_ < need)
            throw std::invalid_argument("ChoiceDict: b policy too narrow for this universe");
        segs_ = n / (2 * static_cast<std::size_t>(b_));
        seg_span_ = segs_ * 2 * b_;
        tail_ = n - seg_span_;
        header_bits_ = cfg.sizing == Sizing::SelfContained ? gamma_code_bits(n) : 0;
        store_ = std::make_unique<BitStore>(required_bits(n, cfg), cfg.fill);
        if (header_bits_ > 0) gamma_write_header(*store_, 0, n, cfg.endian);
        if (segs_ >= 1) {
            d1_ = SegDict(*store_, header_bits_, b_, segs_, cfg.barrier);
        } else {
            // No segments: the barrier field is unused but kept for the
            // uniform footprint; pin it to zero.
            store_->write_bits(header_bits_, barrier_field_bits(cfg.barrier), 0);
        }
        if (tail_ >= 1) d2_ = WordDict(*store_, tail_offset(), tail_);
    }

    static std::size_t required_bits(std::size_t n, const Config& cfg) {
        const std::size_t header = cfg.sizing == Sizing::SelfContained ? gamma_code_bits(n) : 0;
        return header + barrier_field_bits(cfg.barrier) + n;
    }

    // Rebuilds a dictionary from dumped bytes without scanning the body.
    // Externally sized layouts need the universe size supplied back.
    static ChoiceDict load(const std::vector<std::uint8_t>& bytes, Config cfg,
                           std::optional<std::size_t> n_external = std::nullopt) {
        std::size_t n = 0;
        if (cfg.sizing == Sizing::SelfContained) {
            BitStore peek = BitStore::from_bytes(bytes, bytes.size() * 8);
            n = gamma_read_header(peek, 0, cfg.endian);
        } else {
            if (!n_external) throw std::invalid_argument("load: externally sized layout needs n");
            n = *n_external;
        }
        const std::size_t total = required_bits(n, cfg);
        if ((total + 7) / 8 != bytes.size()) throw std::invalid_argument("load: size mismatch");
        ChoiceDict d(n, cfg, BitStore::from_bytes(bytes, total));
        return d;
    }

    std::size_t universe() const { return n_; }
    unsigned half_width() const { return b_; }
    std::size_t segment_count() const { return segs_; }
    std::size_t tail_size() const { return tail_; }
    const Config& config() const { return cfg_; }

    std::size_t footprint_bits() const { return store_->capacity_bits(); }

    SpaceReport space_report() const {
        return {header_bits_, barrier_field_bits(cfg_.barrier), seg_span_, tail_,
                store_->capacity_bits()};
    }

    BitStore& arena() { return *store_; }
    const BitStore& arena() const { return *store_; }
    const SegDict* segments() const { return segs_ >= 1 ? &d1_ : nullptr; }
    SegDict* segments() { return segs_ >= 1 ? &d1_ : nullptr; }

    std::vector<std::uint8_t> dump() const { return store_->dump_bytes(); }

    bool contains(std::size_t ell) const {
        check_element(ell);
        if (ell <= seg_span_) {
            const auto [i, p] = locate(ell);
            return d1_.read(i).bit(p, b_);
        }
        return d2_.contains(ell - seg_span_);
    }

    void insert(std::size_t ell) { set_element(ell, true); }
    void erase(std::size_t ell) { set_element(ell, false); }

    // Some member of the client set, 0 if it is empty. Within the segment
    // located by the segment dictionary the smallest element is returned.
    std::size_t choice() const {
        if (segs_ >= 1) {
            if (const std::size_t i = d1_.nonzero(); i != 0)
                return (i - 1) * 2 * static_cast<std::size_t>(b_) + d1_.read(i).lowest_bit(b_) + 1;
        }
        if (tail_ >= 1) {
            if (const std::size_t c = d2_.choice(); c != 0) return seg_span_ + c;
        }
        return 0;
    }

    // --- iteration -------------------------------------------------------
    //
    // The cursor is a single integer in [0, n]: below 2bN it names a
    // (right-side slot, bit offset) pair in the segment dictionary; from
    // 2bN on it names a tail position; n means the iteration is complete.
    // Its persistent size is therefore exactly ceil(log2(n+1)) bits.

    struct IterState {
        std::uint64_t pos = 0;
    };

    enum class IterPhase { Segments, Tail, Done };

    static unsigned iter_state_bits(std::size_t n) {
        return static_cast<unsigned>(std::bit_width(static_cast<std::uint64_t>(n)));
    }

    IterState iter_reset() const {
        const std::size_t start = segs_ >= 1 ? d1_.barrier() * 2 * static_cast<std::size_t>(b_) : 0;
        return {scan_from(start).first};
    }

    bool iter_done(const IterState& st) const { return st.pos >= n_; }

    IterPhase iter_phase(const IterState& st) const {
        if (st.pos >= n_) return IterPhase::Done;
        return st.pos < seg_span_ ? IterPhase::Segments : IterPhase::Tail;
    }

    // Next element, 0 when the iteration is complete. If the set is mutated
    // mid-iteration, elements may be skipped or repeated but everything
    // yielded is a member at the moment it is yielded.
    std::size_t iter_next(IterState& st) const {
        std::size_t pos = static_cast<std::size_t>(st.pos);
        std::size_t element = pos < n_ ? element_at(pos) : 0;
        if (element == 0 && pos < n_) {
            // The cursor went stale (mutation since the last scan).
            auto [fresh, live] = scan_from(pos);
            pos = fresh;
            element = live;
        }
        if (element == 0) {
            st.pos = n_;
            return 0;
        }
        st.pos = scan_from(pos + 1).first;
        return element;
    }

private:
    ChoiceDict(std::size_t n, Config cfg, BitStore&& adopted) : cfg_(cfg), n_(n) {
        b_ = half_width_of(cfg.b_policy);
        segs_ = n / (2 * static_cast<std::size_t>(b_));
        seg_span_ = segs_ * 2 * b_;
        tail_ = n - seg_span_;
        header_bits_ = cfg.sizing == Sizing::SelfContained ? gamma_code_bits(n) : 0;
        store_ = std::make_unique<BitStore>(std::move(adopted));
        if (segs_ >= 1) d1_ = SegDict::attach(*store_, header_bits_, b_, segs_, cfg.barrier);
        if (tail_ >= 1) d2_ = WordDict::attach(*store_, tail_offset(), tail_);
    }

    static std::size_t barrier_field_bits(BarrierMode mode) {
        return mode == BarrierMode::Hidden ? 1 : kWordBits;
    }

    std::size_t tail_offset() const {
        return header_bits_ + barrier_field_bits(cfg_.barrier) + seg_span_;
    }

    void check_element(std::size_t ell) const {
        if (ell < 1 || ell > n_) throw std::invalid_argument("ChoiceDict: element out of range");
    }

    std::pair<std::size_t, unsigned> locate(std::size_t ell) const {
        const std::size_t width = 2 * static_cast<std::size_t>(b_);
        return {(ell - 1) / width + 1, static_cast<unsigned>((ell - 1) % width)};
    }

    void set_element(std::size_t ell, bool on) {
        check_element(ell);
        if (ell <= seg_span_) {
            const auto [i, p] = locate(ell);
            CellValue v = d1_.read(i);
            v.set_bit(p, b_, on);
            d1_.write(i, v);
            return;
        }
        if (on)
            d2_.insert(ell - seg_span_);
        else
            d2_.erase(ell - seg_span_);
    }

    // Member element named by cursor position `pos`, or 0 if its bit is off.
    std::size_t element_at(std::size_t pos) const {
        if (pos < seg_span_) {
            const std::size_t width = 2 * static_cast<std::size_t>(b_);
            const std::size_t j = pos / width + 1;
            const unsigned p = static_cast<unsigned>(pos % width);
            const std::size_t i = d1_.mate(j);
            if (!d1_.read(i).bit(p, b_)) return 0;
            return (i - 1) * width + p + 1;
        }
        const std::size_t q = pos - seg_span_;
        if (!d2_.contains(q + 1)) return 0;
        return pos + 1;
    }

    // First live cursor position at or after `pos` together with its
    // element; {n, 0} if none. Constant: at most the remainder of the
    // current segment, one further segment (which is nonzero by the slot
    // invariant) and the tail are probed.
    std::pair<std::size_t, std::size_t> scan_from(std::size_t pos) const {
        const std::size_t width = 2 * static_cast<std::size_t>(b_);
        while (pos < seg_span_) {
            const std::size_t j = pos / width + 1;
            const unsigned p = static_cast<unsigned>(pos % width);
            const std::size_t i = d1_.mate(j);
            const unsigned q = d1_.read(i).lowest_bit_from(p, b_);
            if (q < 2 * b_) return {(j - 1) * width + q, (i - 1) * width + q + 1};
            pos = j * width;
        }
        if (tail_ >= 1) {
            WordDict::Cursor c{pos - seg_span_};
            if (const std::size_t e = d2_.next(c); e != 0) return {seg_span_ + e - 1, seg_span_ + e};
        }
        return {n_, 0};
    }

    Config cfg_;
    std::size_t n_ = 0;
    unsigned b_ = 0;
    std::size_t segs_ = 0;
    std::size_t seg_span_ = 0;
    std::size_t tail_ = 0;
    std::size_t header_bits_ = 0;
    std::unique_ptr<BitStore> store_;
    SegDict d1_;
    WordDict d2_;
};

}  // namespace chdict
