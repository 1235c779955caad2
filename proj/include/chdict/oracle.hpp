#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chdict/choicedict.hpp"
#include "chdict/segdict.hpp"

// Ground-truth references and the differential harness: a naive set with
// explicit O(n) initialization, a plain array for the segment dictionary,
// deterministic operation-trace generators, and a runner that replays a
// trace against subject and oracle side by side, checking every observable
// output and the subject's internal invariants after each step.

namespace chdict {

// Plain bit vector with exact set semantics; iteration in increasing order.
class NaiveSet {
public:
    explicit NaiveSet(std::size_t n) : n_(n), bits_(n + 1, 0) {}

    std::size_t universe() const { return n_; }
    void insert(std::size_t ell) { bits_.at(ell) = 1; }
    void erase(std::size_t ell) { bits_.at(ell) = 0; }
    bool contains(std::size_t ell) const { return bits_.at(ell) != 0; }
    bool empty() const {
        return std::all_of(bits_.begin() + 1, bits_.end(), [](std::uint8_t b) { return b == 0; });
    }
    std::vector<std::size_t> elements() const {
        std::vector<std::size_t> out;
        for (std::size_t ell = 1; ell <= n_; ++ell)
            if (bits_[ell]) out.push_back(ell);
        return out;
    }

private:
    std::size_t n_;
    std::vector<std::uint8_t> bits_;
};

// Plain array of N cell values, the reference for SegDict.
class ArraySeqOracle {
public:
    ArraySeqOracle(std::size_t cells, unsigned b) : b_(b), values_(cells + 1) {}

    CellValue read(std::size_t i) const { return values_.at(i); }
    void write(std::size_t i, CellValue x) { values_.at(i) = x; }
    std::size_t zero_count() const {
        std::size_t z = 0;
        for (std::size_t i = 1; i < values_.size(); ++i)
            if (values_[i].zero()) ++z;
        return z;
    }
    bool any_nonzero() const { return zero_count() != values_.size() - 1; }
    unsigned half_width() const { return b_; }
    std::size_t cells() const { return values_.size() - 1; }

private:
    unsigned b_;
    std::vector<CellValue> values_;
};

// --- operation traces ------------------------------------------------------

struct Op {
    enum class Kind { Insert, Delete, Contains, Choice, IterateAll, Write, Read, Nonzero };
    Kind kind = Kind::Choice;
    std::uint64_t a = 0;  // element or cell index
    std::uint64_t x = 0;  // value for Write
};

inline const char* op_name(Op::Kind k) {
    switch (k) {
        case Op::Kind::Insert: return "insert";
        case Op::Kind::Delete: return "delete";
        case Op::Kind::Contains: return "contains";
        case Op::Kind::Choice: return "choice";
        case Op::Kind::IterateAll: return "iterate-all";
        case Op::Kind::Write: return "write";
        case Op::Kind::Read: return "read";
        case Op::Kind::Nonzero: return "nonzero";
    }
    return "?";
}

struct OpTrace {
    std::uint64_t universe = 0;  // n for set traces, N for sequence traces
    std::uint64_t seed = 0;
    std::vector<Op> ops;
};

enum class Profile { Uniform, InsertHeavy, BarrierThrash, ExhaustiveSmall };

// Deterministic set-operation trace over {1..n}.
inline OpTrace gen_set_trace(std::uint64_t seed, std::size_t n, std::size_t length, Profile profile) {
    if (length < 1) throw std::invalid_argument("gen_set_trace: empty trace");
    if (profile == Profile::ExhaustiveSmall)
        throw std::invalid_argument("gen_set_trace: exhaustive profile is for sequence traces");
    OpTrace t{n, seed, {}};
    t.ops.reserve(length);
    std::mt19937_64 rng(seed);
    NaiveSet shadow(n);  // the thrash profile tracks the zero count
    for (std::size_t step = 0; step < length; ++step) {
        const std::size_t ell = 1 + rng() % n;
        Op op;
        const unsigned roll = static_cast<unsigned>(rng() % 100);
        switch (profile) {
            case Profile::Uniform:
                op = roll < 30   ? Op{Op::Kind::Insert, ell}
                     : roll < 55 ? Op{Op::Kind::Delete, ell}
                     : roll < 80 ? Op{Op::Kind::Contains, ell}
                     : roll < 92 ? Op{Op::Kind::Choice}
                                 : Op{Op::Kind::IterateAll};
                break;
            case Profile::InsertHeavy:
                op = roll < 70   ? Op{Op::Kind::Insert, ell}
                     : roll < 80 ? Op{Op::Kind::Delete, ell}
                     : roll < 95 ? Op{Op::Kind::Contains, ell}
                                 : Op{Op::Kind::Choice};
                break;
            case Profile::BarrierThrash: {
                // Alternate insertions and deletions right at the boundary so
                // that the crossing index keeps coinciding with the target.
                const auto members = shadow.elements();
                if (step % 2 == 0 || members.empty()) {
                    std::size_t pick = ell;
                    for (unsigned tries = 0; tries < 4 && shadow.contains(pick); ++tries)
                        pick = 1 + rng() % n;
                    op = Op{Op::Kind::Insert, pick};
                } else {
                    op = Op{Op::Kind::Delete, members[rng() % members.size()]};
                }
                break;
            }
            case Profile::ExhaustiveSmall:
                break;
        }
        if (op.kind == Op::Kind::Insert) shadow.insert(op.a);
        if (op.kind == Op::Kind::Delete) shadow.erase(op.a);
        t.ops.push_back(op);
    }
    return t;
}

// Deterministic write/read/nonzero trace over N cells with values < 2^(2b).
inline OpTrace gen_seq_trace(std::uint64_t seed, std::size_t cells, unsigned b, std::size_t length,
                             Profile profile) {
    if (length < 1) throw std::invalid_argument("gen_seq_trace: empty trace");
    OpTrace t{cells, seed, {}};
    t.ops.reserve(length);
    if (profile == Profile::ExhaustiveSmall) {
        // seed selects one sequence from the exhaustive enumeration of
        // write(i, v) sequences with v in {0,1,2} and length <= 6.
        const std::uint64_t arity = cells * 3;
        std::uint64_t index = seed;
        std::size_t len = 1;
        std::uint64_t block = arity;
        while (index >= block && len < 6) {
            index -= block;
            block *= arity;
            ++len;
        }
        for (std::size_t step = 0; step < len; ++step) {
            const std::uint64_t digit = index % arity;
            index /= arity;
            t.ops.push_back(Op{Op::Kind::Write, 1 + digit / 3, digit % 3});
        }
        return t;
    }
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> zero(cells + 1, 1);  // shadow zero-ness for thrashing
    std::size_t zeros = cells;
    const auto random_value = [&]() -> std::uint64_t { return rng() % 4 == 0 ? 0 : (rng() | 1); };
    for (std::size_t step = 0; step < length; ++step) {
        Op op;
        const unsigned roll = static_cast<unsigned>(rng() % 100);
        switch (profile) {
            case Profile::Uniform:
                op = roll < 60   ? Op{Op::Kind::Write, 1 + rng() % cells, random_value()}
                     : roll < 90 ? Op{Op::Kind::Read, 1 + rng() % cells}
                                 : Op{Op::Kind::Nonzero};
                break;
            case Profile::InsertHeavy:
                op = roll < 80 ? Op{Op::Kind::Write, 1 + rng() % cells, rng() | 1}
                               : Op{Op::Kind::Read, 1 + rng() % cells};
                break;
            case Profile::BarrierThrash: {
                // Target the cells nearest the barrier: insert at the zero
                // count, delete just right of it.
                std::size_t i;
                std::uint64_t v;
                if (step % 2 == 0 && zeros > 0) {
                    i = std::min<std::size_t>(zeros, cells);
                    v = 1 + rng() % 2;
                } else {
                    i = std::min<std::size_t>(zeros + 1, cells);
                    v = 0;
                }
                if (roll < 20) i = 1 + rng() % cells;  // stir in some spread
                op = Op{Op::Kind::Write, i, v};
                break;
            }
            case Profile::ExhaustiveSmall:
                break;
        }
        if (op.kind == Op::Kind::Write) {
            const bool was_zero = zero[op.a] != 0;
            const bool is_zero = op.x == 0;
            if (was_zero && !is_zero) --zeros;
            if (!was_zero && is_zero) ++zeros;
            zero[op.a] = is_zero ? 1 : 0;
        }
        t.ops.push_back(op);
    }
    return t;
}

// Enumerates every write(i, v) sequence of length 1..max_len over i in
// {1..cells}, v in {0..max_value}; returns the number of sequences visited.
inline std::size_t for_each_exhaustive_trace(std::size_t cells, std::size_t max_len,
                                             std::uint64_t max_value,
                                             const std::function<void(const OpTrace&)>& fn) {
    OpTrace t{cells, 0, {}};
    std::size_t count = 0;
    const std::function<void()> recurse = [&]() {
        if (!t.ops.empty()) {
            fn(t);
            ++count;
        }
        if (t.ops.size() == max_len) return;
        for (std::size_t i = 1; i <= cells; ++i)
            for (std::uint64_t v = 0; v <= max_value; ++v) {
                t.ops.push_back(Op{Op::Kind::Write, i, v});
                recurse();
                t.ops.pop_back();
            }
    };
    recurse();
    return count;
}

// --- trace file format ------------------------------------------------------
//
// One op per line, "op arg1 [arg2]", preceded by a header line
// "universe=<u> seed=<s>".

inline void write_trace(std::ostream& out, const OpTrace& t) {
    out << "universe=" << t.universe << " seed=" << t.seed << "\n";
    for (const Op& op : t.ops) {
        out << op_name(op.kind);
        switch (op.kind) {
            case Op::Kind::Insert:
            case Op::Kind::Delete:
            case Op::Kind::Contains:
            case Op::Kind::Read:
                out << " " << op.a;
                break;
            case Op::Kind::Write:
                out << " " << op.a << " " << op.x;
                break;
            default:
                break;
        }
        out << "\n";
    }
}

struct TraceParse {
    bool ok = false;
    OpTrace trace;
    std::size_t error_line = 0;
    std::string error;
};

inline TraceParse parse_trace(std::istream& in) {
    TraceParse r;
    std::string line;
    std::size_t lineno = 0;
    const auto fail = [&](const std::string& why) {
        r.ok = false;
        r.error_line = lineno;
        r.error = why;
        return r;
    };
    if (!std::getline(in, line)) {
        lineno = 1;
        return fail("missing header line");
    }
    ++lineno;
    {
        std::istringstream hs(line);
        std::string ukey, skey;
        if (!(hs >> ukey >> skey) || ukey.rfind("universe=", 0) != 0 || skey.rfind("seed=", 0) != 0)
            return fail("bad header, expected 'universe=<u> seed=<s>'");
        try {
            r.trace.universe = std::stoull(ukey.substr(9));
            r.trace.seed = std::stoull(skey.substr(5));
        } catch (const std::exception&) {
            return fail("bad header numbers");
        }
        if (r.trace.universe == 0) return fail("universe must be positive");
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string name;
        ls >> name;
        Op op;
        bool need_a = false, need_x = false;
        if (name == "insert") { op.kind = Op::Kind::Insert; need_a = true; }
        else if (name == "delete") { op.kind = Op::Kind::Delete; need_a = true; }
        else if (name == "contains") { op.kind = Op::Kind::Contains; need_a = true; }
        else if (name == "choice") { op.kind = Op::Kind::Choice; }
        else if (name == "iterate-all") { op.kind = Op::Kind::IterateAll; }
        else if (name == "write") { op.kind = Op::Kind::Write; need_a = need_x = true; }
        else if (name == "read") { op.kind = Op::Kind::Read; need_a = true; }
        else if (name == "nonzero") { op.kind = Op::Kind::Nonzero; }
        else return fail("unknown op '" + name + "'");
        if (need_a && !(ls >> op.a)) return fail("missing argument for '" + name + "'");
        if (need_x && !(ls >> op.x)) return fail("missing second argument for 'write'");
        std::string extra;
        if (ls >> extra) return fail("trailing junk on op line");
        if (need_a && (op.a == 0 || op.a > r.trace.universe))
            return fail("argument outside universe");
        r.trace.ops.push_back(op);
    }
    r.ok = true;
    return r;
}

// --- differential runner -----------------------------------------------------

struct DiffReport {
    bool ok = true;
    std::size_t ops_run = 0;
    std::size_t divergence_at = 0;  // 0-based op index of first divergence
    std::string message;
    OpTrace minimal;  // greedily pruned counterexample (on divergence)
};

namespace detail {

// Replays set ops against ChoiceDict and NaiveSet; empty return = agreement.
inline std::string run_set_once(const OpTrace& t, const Config& cfg, bool check_invariants,
                                std::size_t* failed_at) {
    ChoiceDict subject(static_cast<std::size_t>(t.universe), cfg);
    NaiveSet oracle(static_cast<std::size_t>(t.universe));
    const auto diverged = [&](std::size_t at, const std::string& why) {
        if (failed_at) *failed_at = at;
        return why;
    };
    for (std::size_t at = 0; at < t.ops.size(); ++at) {
        const Op& op = t.ops[at];
        if (op.a > t.universe) return diverged(at, "op argument outside universe");
        switch (op.kind) {
            case Op::Kind::Insert:
                subject.insert(op.a);
                oracle.insert(op.a);
                break;
            case Op::Kind::Delete:
                subject.erase(op.a);
                oracle.erase(op.a);
                break;
            case Op::Kind::Contains:
                if (subject.contains(op.a) != oracle.contains(op.a))
                    return diverged(at, "contains mismatch");
                break;
            case Op::Kind::Choice: {
                const std::size_t c = subject.choice();
                if (oracle.empty() ? c != 0 : (c == 0 || !oracle.contains(c)))
                    return diverged(at, "choice mismatch");
                break;
            }
            case Op::Kind::IterateAll: {
                std::vector<std::size_t> got;
                auto st = subject.iter_reset();
                while (std::size_t e = subject.iter_next(st)) got.push_back(e);
                std::sort(got.begin(), got.end());
                if (got != oracle.elements()) return diverged(at, "iteration mismatch");
                break;
            }
            default:
                return diverged(at, "sequence op in a set trace");
        }
        if (check_invariants && subject.segments() != nullptr) {
            try {
                subject.segments()->check();
            } catch (const std::logic_error& e) {
                return diverged(at, std::string("invariant: ") + e.what());
            }
        }
    }
    return {};
}

inline std::string run_seq_once(const OpTrace& t, unsigned b, BarrierMode mode, const FillPolicy& fill,
                                bool check_invariants, std::size_t* failed_at,
                                std::size_t sweep_every = 1) {
    const std::size_t cells = static_cast<std::size_t>(t.universe);
    BitStore store(SegDict::region_bits(b, cells, mode), fill);
    SegDict subject(store, 0, b, cells, mode);
    ArraySeqOracle oracle(cells, b);
    const auto diverged = [&](std::size_t at, const std::string& why) {
        if (failed_at) *failed_at = at;
        return why;
    };
    for (std::size_t at = 0; at < t.ops.size(); ++at) {
        const Op& op = t.ops[at];
        if (op.a > cells) return diverged(at, "cell index outside range");
        switch (op.kind) {
            case Op::Kind::Write:
                subject.write(op.a, CellValue::from_uint(op.x, b));
                oracle.write(op.a, CellValue::from_uint(op.x, b));
                break;
            case Op::Kind::Read:
                if (subject.read(op.a) != oracle.read(op.a)) return diverged(at, "read mismatch");
                break;
            case Op::Kind::Nonzero: {
                const std::size_t i = subject.nonzero();
                if (oracle.any_nonzero() ? (i == 0 || oracle.read(i).zero()) : i != 0)
                    return diverged(at, "nonzero mismatch");
                break;
            }
            default:
                return diverged(at, "set op in a sequence trace");
        }
        // The touched cell always agrees; a full sweep runs per `sweep_every`.
        if (op.a >= 1 && subject.read(op.a) != oracle.read(op.a))
            return diverged(at, "target cell mismatch");
        if (at % sweep_every == 0 || at + 1 == t.ops.size()) {
            for (std::size_t i = 1; i <= cells; ++i)
                if (subject.read(i) != oracle.read(i)) return diverged(at, "post-op sweep mismatch");
        }
        if (subject.barrier() != oracle.zero_count()) return diverged(at, "barrier != zero count");
        if (check_invariants) {
            try {
                subject.check();
            } catch (const std::logic_error& e) {
                return diverged(at, std::string("invariant: ") + e.what());
            }
        }
    }
    return {};
}

template <typename RunOnce>
DiffReport run_and_shrink(const OpTrace& trace, const RunOnce& run_once) {
    DiffReport rep;
    std::size_t at = 0;
    std::string why = run_once(trace, &at);
    rep.ops_run = trace.ops.size();
    if (why.empty()) return rep;
    rep.ok = false;
    rep.divergence_at = at;
    rep.message = why;
    // Greedy tail-first pruning of the failing prefix.
    OpTrace min = trace;
    min.ops.resize(at + 1);
    for (std::size_t drop = min.ops.size(); drop-- > 0;) {
        OpTrace candidate = min;
        candidate.ops.erase(candidate.ops.begin() + static_cast<std::ptrdiff_t>(drop));
        if (candidate.ops.empty()) continue;
        std::size_t ignore = 0;
        if (!run_once(candidate, &ignore).empty()) min = std::move(candidate);
    }
    rep.minimal = std::move(min);
    return rep;
}

}  // namespace detail

inline DiffReport differential_run_set(const OpTrace& trace, const Config& cfg,
                                       bool check_invariants = true) {
    return detail::run_and_shrink(trace, [&](const OpTrace& t, std::size_t* at) {
        return detail::run_set_once(t, cfg, check_invariants, at);
    });
}

inline DiffReport differential_run_seq(const OpTrace& trace, unsigned b, BarrierMode mode,
                                       const FillPolicy& fill, bool check_invariants = true,
                                       std::size_t sweep_every = 1) {
    return detail::run_and_shrink(trace, [&](const OpTrace& t, std::size_t* at) {
        return detail::run_seq_once(t, b, mode, fill, check_invariants, at, sweep_every);
    });
}

inline bool is_seq_trace(const OpTrace& t) {
    for (const Op& op : t.ops)
        if (op.kind == Op::Kind::Write || op.kind == Op::Kind::Read || op.kind == Op::Kind::Nonzero)
            return true;
    return false;
}

}  // namespace chdict
