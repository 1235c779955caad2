#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

#include "chdict/bitstore.hpp"
#include "chdict/wordops.hpp"

// Constant-time-initializable array of N cells of 2b bits each, all zero
// after an O(1) initialization over arbitrary memory, with read, write and
// nonzero in constant time.
//
// Representation: an array A of N cells plus a barrier k that always equals
// the number of zero entries. Upper halves of cells encode a matching
// between indices left and right of the barrier: i and j are mates iff their
// mate fields point at each other and exactly one of them is <= k. An index
// is strong iff it is matched and left of the barrier, or unmatched and
// right of it; a_i != 0 exactly for strong i. Strong right cells store a_i
// verbatim; a strong left cell i stores the lower half of a_i, and the lower
// half of its mate stores the upper half.
//
// The barrier lives in a separate machine word (Plain) or, at a total cost
// of one bit, inside the otherwise unused upper-half bits of A[1] plus a
// one-bit nonzero flag (Hidden).

namespace chdict {

enum class BarrierMode { Hidden, Plain };

struct CellValue {
    DWord lo = 0;
    DWord hi = 0;

    bool zero() const { return lo == 0 && hi == 0; }
    friend bool operator==(const CellValue&, const CellValue&) = default;

    bool bit(unsigned pos, unsigned b) const {
        return ((pos < b ? lo >> pos : hi >> (pos - b)) & 1) != 0;
    }
    void set_bit(unsigned pos, unsigned b, bool value) {
        DWord& half = pos < b ? lo : hi;
        const unsigned at = pos < b ? pos : pos - b;
        if (value)
            half |= DWord{1} << at;
        else
            half &= ~(DWord{1} << at);
    }
    // Position of the lowest set bit within the 2b-bit value.
    unsigned lowest_bit(unsigned b) const { return lo != 0 ? lsb(lo) : b + lsb(hi); }

    // Lowest set bit at position >= from; 2b if there is none.
    unsigned lowest_bit_from(unsigned from, unsigned b) const {
        CellValue t = *this;
        if (from >= b) {
            t.lo = 0;
            t.hi &= ~dmask(from - b);
        } else {
            t.lo &= ~dmask(from);
        }
        return t.zero() ? 2 * b : t.lowest_bit(b);
    }

    static CellValue from_uint(DWord v, unsigned b) {
        return {v & dmask(b), b < kDWordBits ? v >> b : 0};
    }
};

namespace detail {
inline std::string dword_hex(DWord v) {
    if (v == 0) return "0x0";
    char buf[33];
    int at = 33;
    while (v != 0) {
        buf[--at] = "0123456789abcdef"[static_cast<unsigned>(v & 0xF)];
        v >>= 4;
    }
    return "0x" + std::string(buf + at, buf + 33);
}
}  // namespace detail

class SegDict {
public:
    // Which of the write-procedure shapes an operation took; kept as running
    // counters so tests can demand full branch coverage.
    struct WriteStats {
        std::uint64_t insert_coincide_all = 0;  // i = i' = k~ = k'
        std::uint64_t insert_swap = 0;          // i = k' != k~ = i'
        std::uint64_t insert_left_kt_matched = 0;
        std::uint64_t insert_left_kt_unmatched = 0;
        std::uint64_t insert_right_kt_matched = 0;
        std::uint64_t insert_right_kt_unmatched = 0;
        std::uint64_t erase_coincide_all = 0;
        std::uint64_t erase_swap = 0;
        std::uint64_t erase_left_kt_matched = 0;
        std::uint64_t erase_left_kt_unmatched = 0;
        std::uint64_t erase_right_kt_matched = 0;
        std::uint64_t erase_right_kt_unmatched = 0;
        std::uint64_t plain_overwrite = 0;  // neither insertion nor deletion
    };

    struct Layout {
        std::size_t region = 0;
        unsigned b = 0;
        std::size_t cells = 0;
        BarrierMode mode = BarrierMode::Hidden;
        unsigned mate_width = 0;

        std::size_t flag_offset() const { return region; }  // Hidden
        std::size_t k_offset() const { return region; }     // Plain
        std::size_t a_base() const { return region + (mode == BarrierMode::Hidden ? 1 : kWordBits); }
        std::size_t cell_offset(std::size_t i) const { return a_base() + (i - 1) * 2 * b; }
        std::size_t lower_offset(std::size_t i) const { return cell_offset(i); }
        std::size_t upper_offset(std::size_t i) const { return cell_offset(i) + b; }
        std::size_t mate_offset(std::size_t i) const { return upper_offset(i); }
        std::size_t hidden_k_offset() const { return upper_offset(1) + mate_width; }
    };

    SegDict() = default;

    // Initializes to (0,...,0) by placing the barrier at the right end;
    // everything else in the region is left as found.
    SegDict(BitStore& store, std::size_t region_offset, unsigned b, std::size_t cells, BarrierMode mode)
        : SegDict(attach(store, region_offset, b, cells, mode)) {
        store_k(cells);
    }

    // Adopts a region whose contents already satisfy the invariants.
    static SegDict attach(BitStore& store, std::size_t region_offset, unsigned b, std::size_t cells,
                          BarrierMode mode) {
        if (cells < 1) throw std::invalid_argument("SegDict: need at least one cell");
        if (b < 1 || b > kDWordBits) throw std::invalid_argument("SegDict: bad half width");
        const unsigned m = static_cast<unsigned>(std::bit_width(static_cast<std::uint64_t>(cells)));
        if (mode == BarrierMode::Hidden ? b < 2 * m : b < m)
            throw std::invalid_argument("SegDict: half width too small for cell count");
        const std::size_t need = region_bits(b, cells, mode);
        if (region_offset > store.capacity_bits() || store.capacity_bits() - region_offset < need)
            throw std::invalid_argument("SegDict: region outside store");
        SegDict d;
        d.store_ = &store;
        d.layout_ = Layout{region_offset, b, cells, mode,
                           mode == BarrierMode::Hidden ? m : b};
        return d;
    }

    static std::size_t region_bits(unsigned b, std::size_t cells, BarrierMode mode) {
        return 2 * static_cast<std::size_t>(b) * cells + (mode == BarrierMode::Hidden ? 1 : kWordBits);
    }

    std::size_t cells() const { return layout_.cells; }
    unsigned half_width() const { return layout_.b; }
    const Layout& layout() const { return layout_; }
    const WriteStats& stats() const { return stats_; }
    BitStore& store() const { return *store_; }

    // Current barrier position = number of zero entries.
    std::size_t barrier() const { return load_k(); }

    std::size_t mate(std::size_t i) const {
        check_index(i);
        return mate_at(i, load_k());
    }

    CellValue read(std::size_t i) const {
        check_index(i);
        return read_at(i, load_k());
    }

    // Some index with a_i != 0, or 0 if all entries are zero.
    std::size_t nonzero() const {
        const std::size_t k = load_k();
        if (k == layout_.cells) return 0;
        return mate_at(layout_.cells, k);
    }

    // Direct overwrite for a strong index (or under the internal-use
    // conditions of write); does not move the barrier.
    void simple_write(std::size_t i, CellValue x) {
        check_index(i);
        check_value(x);
        simple_write_at(i, x, load_k());
    }

    void write(std::size_t i, CellValue x) {
        check_index(i);
        check_value(x);
        std::size_t k = load_k();
        const CellValue x0 = read_at(i, k);
        const std::size_t iprime = mate_at(i, k);
        if (!x.zero()) {
            if (x0.zero()) {
                // Insertion: a_i goes zero -> nonzero, the barrier moves left
                // and index k~ = k crosses it.
                const std::size_t ktilde = k;
                const std::size_t kprime = mate_at(k, k);
                const CellValue u = read_at(k, k);
                k -= 1;
                note_insert(i, iprime, ktilde, kprime);
                simple_write_at(ktilde, u, k);
                if (i != kprime) {
                    set_mate_field(iprime, kprime);
                    set_mate_field(kprime, iprime);
                    store_lower(kprime, load_lower(i));
                }
            } else {
                ++stats_.plain_overwrite;
            }
            simple_write_at(i, x, k);
        } else if (!x0.zero()) {
            // Deletion: a_i goes nonzero -> zero, the barrier moves right and
            // index k~ = k + 1 crosses it.
            const std::size_t ktilde = k + 1;
            const std::size_t kprime = mate_at(ktilde, k);
            const CellValue v = read_at(kprime, k);
            k += 1;
            note_erase(i, iprime, ktilde, kprime);
            set_mate_field(iprime, kprime);
            set_mate_field(kprime, iprime);
            if (kprime != i) simple_write_at(kprime, v, k);
        }
        store_k(k);
    }

    struct Cursor {
        std::size_t j = 0;  // 0 = fresh; otherwise next right-side slot
    };

    // Enumerates every index with a_i != 0 exactly once (as the mates of the
    // right-side slots); 0 when exhausted. No writes may happen between the
    // calls of one enumeration.
    std::size_t next(Cursor& c) const {
        const std::size_t k = load_k();
        const std::size_t j = c.j == 0 ? k + 1 : c.j;
        if (j > layout_.cells) return 0;
        c.j = j + 1;
        return mate_at(j, k);
    }

    // Full-state validation: matching reciprocity and straddle, involution,
    // k = number of weak indices, nonzero values on strong indices, and the
    // hidden-barrier encoding. Test harness use; O(N).
    void check() const {
        const std::size_t k = load_k();
        if (k > layout_.cells) throw std::logic_error("segdict check: barrier out of range");
        if (layout_.mode == BarrierMode::Hidden) {
            const bool flag = store_->read_bits(layout_.flag_offset(), 1) != 0;
            if (flag != (k >= 1)) throw std::logic_error("segdict check: flag inconsistent with barrier");
        }
        std::size_t weak = 0;
        for (std::size_t i = 1; i <= layout_.cells; ++i) {
            const std::size_t mt = mate_at(i, k);
            if (mate_at(mt, k) != i) throw std::logic_error("segdict check: mate not an involution");
            if (mt != i) {
                const bool straddle = (i <= k && k < mt) || (mt <= k && k < i);
                if (!straddle) throw std::logic_error("segdict check: matched pair on one side");
            }
            if (mt <= k)
                ++weak;
            else if (read_at(i, k).zero())
                throw std::logic_error("segdict check: strong index holds zero");
        }
        if (weak != k) throw std::logic_error("segdict check: barrier != number of weak indices");
    }

    std::string dump_state() const {
        const std::size_t k = load_k();
        std::ostringstream out;
        out << "k=" << k << " flag=";
        if (layout_.mode == BarrierMode::Hidden)
            out << (store_->read_bits(layout_.flag_offset(), 1) != 0 ? 1 : 0);
        else
            out << "-";
        out << "\n";
        for (std::size_t i = 1; i <= layout_.cells; ++i) {
            const std::size_t mt = mate_at(i, k);
            const bool weak = mt <= k;
            out << i << ": lower=" << detail::dword_hex(load_lower(i)) << " upper(mate="
                << detail::dword_hex(load_mate_field(i));
            if (layout_.mode == BarrierMode::Hidden && i == 1 && k >= 1)
                out << ", hidden="
                    << detail::dword_hex(store_->read_bits(layout_.hidden_k_offset(), layout_.mate_width));
            out << ") [" << (weak ? "weak" : "strong") << "] [" << (i <= k ? "left" : "right") << "]\n";
        }
        return out.str();
    }

private:
    void check_index(std::size_t i) const {
        if (i < 1 || i > layout_.cells) throw std::invalid_argument("SegDict: index out of range");
    }
    void check_value(const CellValue& x) const {
        if ((x.lo & ~dmask(layout_.b)) != 0 || (x.hi & ~dmask(layout_.b)) != 0)
            throw std::invalid_argument("SegDict: value wider than 2b bits");
    }

    std::size_t load_k() const {
        if (layout_.mode == BarrierMode::Plain)
            return static_cast<std::size_t>(store_->read_bits(layout_.k_offset(), kWordBits));
        if (store_->read_bits(layout_.flag_offset(), 1) == 0) return 0;
        return static_cast<std::size_t>(
            store_->read_bits(layout_.hidden_k_offset(), layout_.mate_width));
    }

    void store_k(std::size_t k) {
        if (layout_.mode == BarrierMode::Plain) {
            store_->write_bits(layout_.k_offset(), kWordBits, k);
            return;
        }
        if (k >= 1) {
            store_->write_bits(layout_.hidden_k_offset(), layout_.mate_width, k);
            store_->write_bits(layout_.flag_offset(), 1, 1);
        } else {
            store_->write_bits(layout_.flag_offset(), 1, 0);
        }
    }

    DWord load_lower(std::size_t i) const { return store_->read_bits(layout_.lower_offset(i), layout_.b); }
    void store_lower(std::size_t i, DWord v) { store_->write_bits(layout_.lower_offset(i), layout_.b, v); }
    DWord load_mate_field(std::size_t i) const {
        return store_->read_bits(layout_.mate_offset(i), layout_.mate_width);
    }
    void set_mate_field(std::size_t i, std::size_t j) {
        store_->write_bits(layout_.mate_offset(i), layout_.mate_width, j);
    }
    CellValue load_cell(std::size_t i) const {
        return {load_lower(i), store_->read_bits(layout_.upper_offset(i), layout_.b)};
    }
    void store_cell(std::size_t i, CellValue x) {
        store_lower(i, x.lo);
        store_->write_bits(layout_.upper_offset(i), layout_.b, x.hi);
    }

    // Mate of i under barrier k: the mutually pointing index on the other
    // side of the barrier, or i itself if there is none.
    std::size_t mate_at(std::size_t i, std::size_t k) const {
        const DWord raw = load_mate_field(i);
        if (raw == 0 || raw > layout_.cells) return i;
        const std::size_t ip = static_cast<std::size_t>(raw);
        const bool straddle = (i <= k && k < ip) || (ip <= k && k < i);
        if (straddle && static_cast<std::size_t>(load_mate_field(ip)) == i) return ip;
        return i;
    }

    CellValue read_at(std::size_t i, std::size_t k) const {
        const std::size_t mt = mate_at(i, k);
        if (mt <= k) return {};  // i is weak exactly if mate(i) <= k
        if (i > k) return load_cell(i);
        return {load_lower(i), load_lower(mt)};
    }

    void simple_write_at(std::size_t i, CellValue x, std::size_t k) {
        if (i <= k) {
            const std::size_t mt = mate_at(i, k);
            store_lower(i, x.lo);
            store_lower(mt, x.hi);
        } else {
            store_cell(i, x);
            const std::size_t ip = mate_at(i, k);
            if (ip != i) set_mate_field(ip, ip);  // eliminate a spurious matching edge
        }
    }

    void note_insert(std::size_t i, std::size_t iprime, std::size_t ktilde, std::size_t kprime) {
        const bool kt_matched = kprime != ktilde;
        if (i == ktilde)
            ++stats_.insert_coincide_all;
        else if (i == kprime)
            ++stats_.insert_swap;
        else if (iprime == i)  // i weak and unmatched: left of the barrier
            ++(kt_matched ? stats_.insert_left_kt_matched : stats_.insert_left_kt_unmatched);
        else
            ++(kt_matched ? stats_.insert_right_kt_matched : stats_.insert_right_kt_unmatched);
    }

    void note_erase(std::size_t i, std::size_t iprime, std::size_t ktilde, std::size_t kprime) {
        const bool kt_matched = kprime != ktilde;
        if (i == ktilde)
            ++stats_.erase_coincide_all;
        else if (i == kprime)
            ++stats_.erase_swap;
        else if (iprime != i)  // i strong and matched: left of the barrier
            ++(kt_matched ? stats_.erase_left_kt_matched : stats_.erase_left_kt_unmatched);
        else
            ++(kt_matched ? stats_.erase_right_kt_matched : stats_.erase_right_kt_unmatched);
    }

    BitStore* store_ = nullptr;
    Layout layout_{};
    WriteStats stats_{};
};

}  // namespace chdict
