#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "chdict/oracle.hpp"
#include "chdict/segdict.hpp"
#include "test_util.hpp"

using namespace chdict;

namespace {

CellValue cv(std::uint64_t v, unsigned b) { return CellValue::from_uint(v, b); }

struct Fixture {
    BitStore store;
    SegDict dict;
    Fixture(unsigned b, std::size_t cells, BarrierMode mode, const FillPolicy& fill)
        : store(SegDict::region_bits(b, cells, mode), fill), dict(store, 0, b, cells, mode) {}
};

TEST(SegDict, InitReadsZeroOverGarbage) {
    for (const auto mode : {BarrierMode::Hidden, BarrierMode::Plain}) {
        for (const auto& fill : {FillPolicy::ones(), FillPolicy::random(3),
                                 testutil::fake_matching_fill(32, 8, mode)}) {
            Fixture f(32, 8, mode, fill);
            for (std::size_t i = 1; i <= 8; ++i) {
                ASSERT_TRUE(f.dict.read(i).zero());
                ASSERT_EQ(f.dict.mate(i), i);
            }
            ASSERT_EQ(f.dict.nonzero(), 0u);
            ASSERT_EQ(f.dict.barrier(), 8u);
            ASSERT_NO_THROW(f.dict.check());
        }
    }
}

TEST(SegDict, InitAccessCountIndependentOfSize) {
    std::uint64_t costs[2];
    std::size_t idx = 0;
    for (const std::size_t cells : {std::size_t{10}, std::size_t{1000000}}) {
        BitStore store(SegDict::region_bits(64, cells, BarrierMode::Hidden), FillPolicy::ones());
        store.reset_accesses();
        SegDict d(store, 0, 64, cells, BarrierMode::Hidden);
        costs[idx++] = store.accesses();
    }
    EXPECT_EQ(costs[0], costs[1]);
    EXPECT_LE(costs[1], 8u);
}

TEST(SegDict, RegionSizeFormulas) {
    EXPECT_EQ(SegDict::region_bits(128, 3, BarrierMode::Hidden), 2u * 128 * 3 + 1);
    EXPECT_EQ(SegDict::region_bits(128, 3, BarrierMode::Plain), 2u * 128 * 3 + 64);
    // The dictionary fits in a store of exactly that size.
    BitStore tight(SegDict::region_bits(32, 5, BarrierMode::Hidden), FillPolicy::ones());
    EXPECT_NO_THROW(SegDict(tight, 0, 32, 5, BarrierMode::Hidden));
    BitStore small(SegDict::region_bits(32, 5, BarrierMode::Hidden) - 1, FillPolicy::ones());
    EXPECT_THROW(SegDict(small, 0, 32, 5, BarrierMode::Hidden), std::invalid_argument);
}

TEST(SegDict, WidthPreconditions) {
    BitStore store(1 << 12);
    // Hidden mode needs b >= 2*ceil(log2(N+1)): N=8 -> m=4 -> b >= 8.
    EXPECT_THROW(SegDict(store, 0, 7, 8, BarrierMode::Hidden), std::invalid_argument);
    EXPECT_NO_THROW(SegDict(store, 0, 8, 8, BarrierMode::Hidden));
    // Plain mode needs b >= m.
    EXPECT_THROW(SegDict(store, 0, 3, 15, BarrierMode::Plain), std::invalid_argument);
    EXPECT_NO_THROW(SegDict(store, 0, 4, 15, BarrierMode::Plain));
    EXPECT_THROW(SegDict(store, 0, 32, 0, BarrierMode::Plain), std::invalid_argument);
}

TEST(SegDict, MateRejectsSameSidePointers) {
    Fixture f(16, 4, BarrierMode::Plain, FillPolicy::zeros());
    // Craft reciprocal upper fields for cells 2 and 3; both are left of the
    // barrier (k = 4), so the straddle condition must reject the pair.
    const auto& lay = f.dict.layout();
    f.store.write_bits(lay.mate_offset(2), lay.mate_width, 3);
    f.store.write_bits(lay.mate_offset(3), lay.mate_width, 2);
    EXPECT_EQ(f.dict.mate(2), 2u);
    EXPECT_EQ(f.dict.mate(3), 3u);
    ASSERT_NO_THROW(f.dict.check());
}

TEST(SegDict, PinnedFirstWrite) {
    // N=4 fresh, write(3,5): a = (0,0,5,0), k = 3, mate(3) = 4.
    Fixture f(16, 4, BarrierMode::Plain, FillPolicy::ones());
    f.dict.write(3, cv(5, 16));
    EXPECT_EQ(f.dict.read(3), cv(5, 16));
    EXPECT_TRUE(f.dict.read(1).zero());
    EXPECT_TRUE(f.dict.read(2).zero());
    EXPECT_TRUE(f.dict.read(4).zero());
    EXPECT_EQ(f.dict.barrier(), 3u);
    EXPECT_EQ(f.dict.mate(3), 4u);
    EXPECT_EQ(f.dict.mate(4), 3u);
    EXPECT_NO_THROW(f.dict.check());

    const std::size_t hit = f.dict.nonzero();
    EXPECT_EQ(hit, 3u);
    EXPECT_FALSE(f.dict.read(hit).zero());
}

TEST(SegDict, DumpStateGolden) {
    Fixture f(16, 4, BarrierMode::Plain, FillPolicy::ones());
    f.dict.write(3, cv(5, 16));
    EXPECT_EQ(f.dict.dump_state(),
              "k=3 flag=-\n"
              "1: lower=0xffff upper(mate=0xffff) [weak] [left]\n"
              "2: lower=0xffff upper(mate=0xffff) [weak] [left]\n"
              "3: lower=0x5 upper(mate=0x4) [strong] [left]\n"
              "4: lower=0x0 upper(mate=0x3) [weak] [right]\n");
}

TEST(SegDict, WriteSameValueIsNoop) {
    Fixture f(32, 6, BarrierMode::Hidden, FillPolicy::random(17));
    std::mt19937_64 rng(4);
    for (int step = 0; step < 200; ++step) {
        f.dict.write(1 + rng() % 6, cv(rng() % 5, 32));
        const std::size_t i = 1 + rng() % 6;
        const CellValue before = f.dict.read(i);
        const std::size_t k_before = f.dict.barrier();
        f.dict.write(i, before);
        ASSERT_EQ(f.dict.read(i), before);
        ASSERT_EQ(f.dict.barrier(), k_before);
        ASSERT_NO_THROW(f.dict.check());
    }
}

TEST(SegDict, SimpleWriteIdempotentOnAbstractState) {
    Fixture f(32, 5, BarrierMode::Hidden, FillPolicy::ones());
    f.dict.write(2, cv(7, 32));
    f.dict.write(4, cv(9, 32));
    for (std::size_t i : {std::size_t{2}, std::size_t{4}}) {
        const CellValue v = f.dict.read(i);
        f.dict.simple_write(i, v);
        ASSERT_EQ(f.dict.read(i), v);
        ASSERT_NO_THROW(f.dict.check());
    }
}

TEST(SegDict, InsertCoincidenceAllEqual) {
    // Insert at i = k while k is unmatched: the single-cell coincidence.
    Fixture f(16, 2, BarrierMode::Plain, FillPolicy::ones());
    f.dict.write(2, cv(9, 16));
    EXPECT_EQ(f.dict.read(2), cv(9, 16));
    EXPECT_TRUE(f.dict.read(1).zero());
    EXPECT_EQ(f.dict.barrier(), 1u);
    EXPECT_EQ(f.dict.stats().insert_coincide_all, 1u);
    EXPECT_NO_THROW(f.dict.check());
}

TEST(SegDict, DeleteSwapLeavesBothUnmatched) {
    // Case i = k' != k~ = i' of a deletion: i and k~ end up unmatched.
    Fixture f(16, 2, BarrierMode::Plain, FillPolicy::ones());
    f.dict.write(1, cv(5, 16));
    ASSERT_EQ(f.dict.mate(1), 2u);  // 1 matched with 2 across the barrier
    f.dict.write(1, cv(0, 16));
    EXPECT_EQ(f.dict.stats().erase_swap, 1u);
    EXPECT_EQ(f.dict.mate(1), 1u);
    EXPECT_EQ(f.dict.mate(2), 2u);
    EXPECT_TRUE(f.dict.read(1).zero());
    EXPECT_TRUE(f.dict.read(2).zero());
    EXPECT_EQ(f.dict.barrier(), 2u);
    EXPECT_NO_THROW(f.dict.check());
}

TEST(SegDict, SpuriousEdgeSeveredOnRightWrite) {
    // A whole-cell write right of the barrier whose payload happens to point
    // at a left cell that points back must not create a matching edge.
    const unsigned b = 16;
    Fixture f(b, 4, BarrierMode::Plain, FillPolicy::zeros());
    f.dict.write(4, cv(1, b));  // k=3, 4 unmatched strong
    // Now make cell 2 (left, weak) point at 4, and write a value into 4
    // whose upper half equals 2: a fake reciprocal pair.
    const auto& lay = f.dict.layout();
    f.store.write_bits(lay.mate_offset(2), lay.mate_width, 4);
    const CellValue trap = {0x1, 0x2};  // upper half parses as "mate = 2"
    f.dict.write(4, trap);
    EXPECT_EQ(f.dict.mate(2), 2u);  // edge severed: cell 2 points to itself
    EXPECT_EQ(f.dict.read(4), trap);
    EXPECT_TRUE(f.dict.read(2).zero());
    EXPECT_NO_THROW(f.dict.check());
}

TEST(SegDict, HiddenBarrierZeroOneTransitions) {
    for (const unsigned b : {2u, 32u, 128u}) {
        BitStore store(SegDict::region_bits(b, 1, BarrierMode::Hidden), FillPolicy::ones());
        SegDict d(store, 0, b, 1, BarrierMode::Hidden);
        ASSERT_EQ(d.barrier(), 1u);
        ASSERT_EQ(store.read_bits(d.layout().flag_offset(), 1), DWord{1});
        d.write(1, cv(1, b));  // k: 1 -> 0
        ASSERT_EQ(d.barrier(), 0u);
        ASSERT_EQ(store.read_bits(d.layout().flag_offset(), 1), DWord{0});
        ASSERT_EQ(d.read(1), cv(1, b));
        ASSERT_NO_THROW(d.check());
        d.write(1, cv(0, b));  // k: 0 -> 1
        ASSERT_EQ(d.barrier(), 1u);
        ASSERT_EQ(store.read_bits(d.layout().flag_offset(), 1), DWord{1});
        ASSERT_TRUE(d.read(1).zero());
        ASSERT_NO_THROW(d.check());
        d.write(1, cv(3, b));
        d.write(1, cv(2, b));  // overwrite while k = 0
        ASSERT_EQ(d.read(1), cv(2, b));
        ASSERT_NO_THROW(d.check());
    }
}

TEST(SegDict, HiddenFieldSurvivesNeighbourTraffic) {
    // Writes into other cells while k >= 1 must preserve the barrier stored
    // in A[1]'s upper half.
    Fixture f(32, 8, BarrierMode::Hidden, FillPolicy::random(21));
    ArraySeqOracle oracle(8, 32);
    std::mt19937_64 rng(8);
    for (int step = 0; step < 4000; ++step) {
        std::size_t i = 2 + rng() % 7;  // never touch cell 1 directly
        std::uint64_t v = rng() % 3;
        if (oracle.zero_count() <= 1 && v == 0) v = 1;  // keep k >= 1
        if (oracle.zero_count() <= 1 && oracle.read(i).zero() && v != 0) continue;
        f.dict.write(i, cv(v, 32));
        oracle.write(i, cv(v, 32));
        ASSERT_EQ(f.dict.barrier(), oracle.zero_count());
        ASSERT_NO_THROW(f.dict.check());
    }
}

TEST(SegDict, EnumerateMatchesOracle) {
    Fixture f(32, 10, BarrierMode::Hidden, FillPolicy::ones());
    SegDict::Cursor c;
    EXPECT_EQ(f.dict.next(c), 0u);  // empty

    ArraySeqOracle oracle(10, 32);
    std::mt19937_64 rng(123);
    for (int round = 0; round < 200; ++round) {
        const std::size_t i = 1 + rng() % 10;
        const std::uint64_t v = rng() % 4;
        f.dict.write(i, cv(v, 32));
        oracle.write(i, cv(v, 32));

        std::vector<std::size_t> got;
        SegDict::Cursor cur;
        while (std::size_t e = f.dict.next(cur)) got.push_back(e);
        std::vector<std::size_t> expect;
        for (std::size_t j = 1; j <= 10; ++j)
            if (!oracle.read(j).zero()) expect.push_back(j);
        std::sort(got.begin(), got.end());
        ASSERT_EQ(got, expect);
        for (const std::size_t e : got) ASSERT_FALSE(f.dict.read(e).zero());
    }
}

TEST(SegDict, RandomizedDifferentialBothModes) {
    for (const auto mode : {BarrierMode::Hidden, BarrierMode::Plain}) {
        for (const std::size_t cells : {1, 2, 3, 4, 5, 8, 64}) {
            for (const auto profile : {Profile::Uniform, Profile::BarrierThrash}) {
                const unsigned b = 32;
                const OpTrace t = gen_seq_trace(1000 + cells, cells, b, 3000, profile);
                for (const auto& fill : {FillPolicy::ones(), FillPolicy::random(cells),
                                         testutil::fake_matching_fill(b, cells, mode)}) {
                    const DiffReport rep = differential_run_seq(t, b, mode, fill);
                    ASSERT_TRUE(rep.ok) << "mode=" << (mode == BarrierMode::Hidden ? "hidden" : "plain")
                                        << " cells=" << cells << " at op " << rep.divergence_at << ": "
                                        << rep.message;
                }
            }
        }
    }
}

TEST(SegDict, RandomizedDifferentialWideCells) {
    // Full-width values, b = 128: cells of four words handled as two halves.
    const unsigned b = 128;
    BitStore store(SegDict::region_bits(b, 16, BarrierMode::Hidden), FillPolicy::random(7));
    SegDict d(store, 0, b, 16, BarrierMode::Hidden);
    ArraySeqOracle oracle(16, b);
    std::mt19937_64 rng(77);
    const auto wide = [&]() -> CellValue {
        if (rng() % 4 == 0) return {};
        return {((static_cast<DWord>(rng()) << 64) | rng()) & dmask(b),
                ((static_cast<DWord>(rng()) << 64) | rng()) & dmask(b)};
    };
    for (int step = 0; step < 20000; ++step) {
        const std::size_t i = 1 + rng() % 16;
        const CellValue v = wide();
        d.write(i, v);
        oracle.write(i, v);
        const std::size_t probe = 1 + rng() % 16;
        ASSERT_EQ(d.read(probe), oracle.read(probe));
        ASSERT_EQ(d.barrier(), oracle.zero_count());
        if (step % 64 == 0) {
            for (std::size_t j = 1; j <= 16; ++j) ASSERT_EQ(d.read(j), oracle.read(j));
            ASSERT_NO_THROW(d.check());
        }
        const std::size_t nz = d.nonzero();
        if (oracle.any_nonzero()) {
            ASSERT_NE(nz, 0u);
            ASSERT_FALSE(oracle.read(nz).zero());
        } else {
            ASSERT_EQ(nz, 0u);
        }
    }
}

TEST(SegDict, ExhaustiveSmallFromGarbage) {
    for (const std::size_t cells : {1, 2}) {
        const unsigned b = 8;
        const std::size_t visited = for_each_exhaustive_trace(cells, 4, 2, [&](const OpTrace& t) {
            for (const auto mode : {BarrierMode::Hidden, BarrierMode::Plain}) {
                const DiffReport rep =
                    differential_run_seq(t, b, mode, FillPolicy::ones(), true);
                ASSERT_TRUE(rep.ok) << "cells=" << cells << ": " << rep.message;
            }
        });
        EXPECT_GT(visited, 0u);
    }
}

TEST(SegDict, AccessCeilingIndependentOfSize) {
    // Identical per-op access ceilings for N = 2^4, 2^10, 2^20. The battery
    // addresses cells relative to the barrier and to the right end, so the
    // branch sequences are the same at every size.
    const unsigned b = 64;
    std::vector<std::uint64_t> write_max, read_max, nonzero_max, enum_max, init_cost;
    for (const std::size_t cells : {std::size_t{1} << 4, std::size_t{1} << 10, std::size_t{1} << 20}) {
        BitStore store(SegDict::region_bits(b, cells, BarrierMode::Hidden), FillPolicy::random(5));
        store.reset_accesses();
        SegDict d(store, 0, b, cells, BarrierMode::Hidden);
        init_cost.push_back(store.accesses());
        std::uint64_t wmax = 0, rmax = 0, nmax = 0, emax = 0;
        std::size_t tick = 0;
        testutil::relative_battery(
            cells, 20000, 42, [&] { return d.barrier(); },
            [&](std::size_t i, std::uint64_t v) {
                store.reset_accesses();
                d.write(i, cv(v, b));
                wmax = std::max(wmax, store.accesses());
                store.reset_accesses();
                (void)d.read(i);
                rmax = std::max(rmax, store.accesses());
                store.reset_accesses();
                (void)d.nonzero();
                nmax = std::max(nmax, store.accesses());
                if (++tick % 512 == 0) {
                    SegDict::Cursor c;
                    for (;;) {
                        store.reset_accesses();
                        const std::size_t e = d.next(c);
                        emax = std::max(emax, store.accesses());
                        if (e == 0) break;
                    }
                }
            });
        // The battery must have exercised every branch shape at this size.
        const auto& s = d.stats();
        ASSERT_GT(s.insert_coincide_all, 0u) << cells;
        ASSERT_GT(s.insert_swap, 0u) << cells;
        ASSERT_GT(s.insert_left_kt_matched, 0u) << cells;
        ASSERT_GT(s.insert_left_kt_unmatched, 0u) << cells;
        ASSERT_GT(s.insert_right_kt_matched, 0u) << cells;
        ASSERT_GT(s.insert_right_kt_unmatched, 0u) << cells;
        ASSERT_GT(s.erase_coincide_all, 0u) << cells;
        ASSERT_GT(s.erase_swap, 0u) << cells;
        ASSERT_GT(s.erase_left_kt_matched, 0u) << cells;
        ASSERT_GT(s.erase_left_kt_unmatched, 0u) << cells;
        ASSERT_GT(s.erase_right_kt_matched, 0u) << cells;
        ASSERT_GT(s.erase_right_kt_unmatched, 0u) << cells;
        write_max.push_back(wmax);
        read_max.push_back(rmax);
        nonzero_max.push_back(nmax);
        enum_max.push_back(emax);
    }
    EXPECT_EQ(write_max[0], write_max[1]);
    EXPECT_EQ(write_max[1], write_max[2]);
    EXPECT_EQ(read_max[0], read_max[1]);
    EXPECT_EQ(read_max[1], read_max[2]);
    EXPECT_EQ(nonzero_max[0], nonzero_max[1]);
    EXPECT_EQ(nonzero_max[1], nonzero_max[2]);
    EXPECT_EQ(enum_max[0], enum_max[1]);
    EXPECT_EQ(enum_max[1], enum_max[2]);
    EXPECT_EQ(init_cost[0], init_cost[1]);
    EXPECT_EQ(init_cost[1], init_cost[2]);
    EXPECT_LE(write_max[0], 64u);  // and the ceiling itself is small
}

TEST(SegDict, BranchCoverageUnderThrash) {
    SegDict::WriteStats total{};
    for (const std::size_t cells : {2, 3, 4, 8, 16}) {
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            BitStore store(SegDict::region_bits(32, cells, BarrierMode::Hidden), FillPolicy::random(seed));
            SegDict d(store, 0, 32, cells, BarrierMode::Hidden);
            const auto t = gen_seq_trace(seed, cells, 32, 600, Profile::BarrierThrash);
            for (const Op& op : t.ops)
                if (op.kind == Op::Kind::Write) d.write(op.a, cv(op.x, 32));
            const auto& s = d.stats();
            total.insert_coincide_all += s.insert_coincide_all;
            total.insert_swap += s.insert_swap;
            total.insert_left_kt_matched += s.insert_left_kt_matched;
            total.insert_left_kt_unmatched += s.insert_left_kt_unmatched;
            total.insert_right_kt_matched += s.insert_right_kt_matched;
            total.insert_right_kt_unmatched += s.insert_right_kt_unmatched;
            total.erase_coincide_all += s.erase_coincide_all;
            total.erase_swap += s.erase_swap;
            total.erase_left_kt_matched += s.erase_left_kt_matched;
            total.erase_left_kt_unmatched += s.erase_left_kt_unmatched;
            total.erase_right_kt_matched += s.erase_right_kt_matched;
            total.erase_right_kt_unmatched += s.erase_right_kt_unmatched;
        }
    }
    EXPECT_GT(total.insert_coincide_all, 0u);
    EXPECT_GT(total.insert_swap, 0u);
    EXPECT_GT(total.insert_left_kt_matched, 0u);
    EXPECT_GT(total.insert_left_kt_unmatched, 0u);
    EXPECT_GT(total.insert_right_kt_matched, 0u);
    EXPECT_GT(total.insert_right_kt_unmatched, 0u);
    EXPECT_GT(total.erase_coincide_all, 0u);
    EXPECT_GT(total.erase_swap, 0u);
    EXPECT_GT(total.erase_left_kt_matched, 0u);
    EXPECT_GT(total.erase_left_kt_unmatched, 0u);
    EXPECT_GT(total.erase_right_kt_matched, 0u);
    EXPECT_GT(total.erase_right_kt_unmatched, 0u);
}

TEST(SegDict, BarrierThrashHitsCoincidenceFast) {
    // The thrash profile reaches the all-coincide insertion within few ops.
    BitStore store(SegDict::region_bits(32, 2, BarrierMode::Hidden), FillPolicy::ones());
    SegDict d(store, 0, 32, 2, BarrierMode::Hidden);
    const auto t = gen_seq_trace(3, 2, 32, 10, Profile::BarrierThrash);
    for (const Op& op : t.ops)
        if (op.kind == Op::Kind::Write) d.write(op.a, cv(op.x, 32));
    EXPECT_GT(d.stats().insert_coincide_all, 0u);
}

TEST(SegDict, ArgumentValidation) {
    Fixture f(32, 4, BarrierMode::Hidden, FillPolicy::zeros());
    EXPECT_THROW(f.dict.write(0, cv(1, 32)), std::invalid_argument);
    EXPECT_THROW(f.dict.write(5, cv(1, 32)), std::invalid_argument);
    EXPECT_THROW(f.dict.read(0), std::invalid_argument);
    EXPECT_THROW(f.dict.read(5), std::invalid_argument);
    EXPECT_THROW(f.dict.write(1, CellValue{DWord{1} << 32, 0}), std::invalid_argument);
}

}  // namespace
