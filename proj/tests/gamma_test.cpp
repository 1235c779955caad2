#include <gtest/gtest.h>

#include <random>
#include <string>

#include "chdict/gamma.hpp"

using namespace chdict;

namespace {

TEST(Gamma, PinnedStrings) {
    EXPECT_EQ(gamma_encode(10, Endianness::Big), "0001010");  // bin(10) = 1010
    EXPECT_EQ(gamma_encode(1, Endianness::Big), "1");
    EXPECT_EQ(gamma_encode(1, Endianness::Little), "1");
    EXPECT_EQ(gamma_encode(10, Endianness::Little), "0101000");  // binhat(10) = 0101
    EXPECT_EQ(gamma_encode(2, Endianness::Big), "010");
    EXPECT_EQ(gamma_encode(2, Endianness::Little), "010");
    EXPECT_EQ(gamma_encode(11, Endianness::Big), "0001011");
    EXPECT_EQ(gamma_encode(11, Endianness::Little), "0111000");
}

TEST(Gamma, CodeLengthFormula) {
    for (std::uint64_t n = 1; n <= (1u << 16); ++n) {
        const unsigned expect = 2 * static_cast<unsigned>(std::bit_width(n)) - 1;
        ASSERT_EQ(gamma_code_bits(n), expect);
        if (n <= 4096) {
            ASSERT_EQ(gamma_encode(n, Endianness::Big).size(), expect);
            ASSERT_EQ(gamma_encode(n, Endianness::Little).size(), expect);
        }
    }
}

TEST(Gamma, RoundtripExhaustive) {
    for (std::uint64_t n = 1; n <= (1u << 20); ++n) {
        const auto big = gamma_decode(gamma_encode(n, Endianness::Big), Endianness::Big);
        ASSERT_EQ(big.value, n);
        ASSERT_EQ(big.consumed, gamma_code_bits(n));
        const auto little = gamma_decode(gamma_encode(n, Endianness::Little), Endianness::Little);
        ASSERT_EQ(little.value, n);
        ASSERT_EQ(little.consumed, gamma_code_bits(n));
    }
}

TEST(Gamma, PrefixFreeConcatenations) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 4000; ++trial) {
        const std::uint64_t n1 = 1 + rng() % 100000;
        const std::uint64_t n2 = 1 + rng() % 100000;
        {
            // Big endian reads front to back.
            const std::string s = gamma_encode(n1, Endianness::Big) + gamma_encode(n2, Endianness::Big);
            const auto first = gamma_decode(s, Endianness::Big);
            ASSERT_EQ(first.value, n1);
            const auto second = gamma_decode(s.substr(first.consumed), Endianness::Big);
            ASSERT_EQ(second.value, n2);
            ASSERT_EQ(first.consumed + second.consumed, s.size());
        }
        {
            // Little endian reads back to front: the code appended last is
            // nearest the reading end.
            const std::string s =
                gamma_encode(n1, Endianness::Little) + gamma_encode(n2, Endianness::Little);
            const auto first = gamma_decode(s, Endianness::Little);
            ASSERT_EQ(first.value, n2);
            const auto second =
                gamma_decode(s.substr(0, s.size() - first.consumed), Endianness::Little);
            ASSERT_EQ(second.value, n1);
        }
    }
}

TEST(Gamma, MalformedInputs) {
    EXPECT_THROW(gamma_decode("", Endianness::Big), std::invalid_argument);
    EXPECT_THROW(gamma_decode("0000", Endianness::Big), std::invalid_argument);
    EXPECT_THROW(gamma_decode("0000", Endianness::Little), std::invalid_argument);
    EXPECT_THROW(gamma_decode("001", Endianness::Big), std::invalid_argument);  // truncated
    EXPECT_THROW(gamma_decode(std::string(70, '0') + "1", Endianness::Big), std::invalid_argument);
    EXPECT_THROW(gamma_decode("1" + std::string(70, '0'), Endianness::Little), std::invalid_argument);
    EXPECT_THROW(gamma_encode(0, Endianness::Big), std::invalid_argument);
}

TEST(Gamma, HeaderStoreRoundtrip) {
    std::mt19937_64 rng(9);
    for (const auto endian : {Endianness::Big, Endianness::Little}) {
        for (int trial = 0; trial < 20000; ++trial) {
            const std::uint64_t n = 1 + rng() % (1u << 20);
            const unsigned code = gamma_code_bits(n);
            // Surround the header with garbage to prove decoding ignores it.
            BitStore s(code + 64, FillPolicy::random(trial));
            gamma_write_header(s, 0, n, endian);
            ASSERT_EQ(gamma_read_header(s, 0, endian), n);
        }
        for (const std::uint64_t n : {std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{3},
                                      (std::uint64_t{1} << 40) + 17, ~std::uint64_t{0} >> 1}) {
            BitStore s(gamma_code_bits(n) + 7, FillPolicy::ones());
            gamma_write_header(s, 0, n, endian);
            ASSERT_EQ(gamma_read_header(s, 0, endian), n);
        }
    }
}

TEST(Gamma, HeaderDumpShowsBigEndianStringVerbatim) {
    // Reading the stored bits in offset order reproduces the paper string
    // for the big-endian variant.
    BitStore s(7);
    gamma_write_header(s, 0, 10, Endianness::Big);
    std::string seen;
    for (int i = 0; i < 7; ++i) seen += s.read_bits(i, 1) != 0 ? '1' : '0';
    EXPECT_EQ(seen, "0001010");
    // The little-endian variant stores the string as a numeral, i.e.
    // reversed in offset order.
    BitStore t(7);
    gamma_write_header(t, 0, 10, Endianness::Little);
    seen.clear();
    for (int i = 0; i < 7; ++i) seen += t.read_bits(i, 1) != 0 ? '1' : '0';
    EXPECT_EQ(seen, "0001010");  // reverse of "0101000"
    BitStore u(7);
    gamma_write_header(u, 0, 11, Endianness::Little);
    seen.clear();
    for (int i = 0; i < 7; ++i) seen += u.read_bits(i, 1) != 0 ? '1' : '0';
    EXPECT_EQ(seen, "0001110");  // reverse of "0111000"
}

TEST(Gamma, HeaderDecodeAccessCeiling) {
    // Constant number of word reads no matter the universe size.
    std::uint64_t worst = 0;
    for (const std::uint64_t n : {std::uint64_t{1}, std::uint64_t{77}, std::uint64_t{1} << 19,
                                  std::uint64_t{1} << 40, std::uint64_t{1} << 62}) {
        for (const auto endian : {Endianness::Big, Endianness::Little}) {
            BitStore s(gamma_code_bits(n) + 128, FillPolicy::random(n));
            gamma_write_header(s, 0, n, endian);
            s.reset_accesses();
            ASSERT_EQ(gamma_read_header(s, 0, endian), n);
            worst = std::max(worst, s.accesses());
        }
    }
    EXPECT_LE(worst, 3u);
}

TEST(Gamma, HeaderMalformed) {
    BitStore zeroes(256);
    EXPECT_THROW(gamma_read_header(zeroes, 0, Endianness::Big), std::invalid_argument);
    BitStore tiny(5);
    tiny.write_bits(0, 5, 0b01000);  // says L=4, needs 7 bits, only 5 exist
    EXPECT_THROW(gamma_read_header(tiny, 0, Endianness::Big), std::invalid_argument);
}

}  // namespace
