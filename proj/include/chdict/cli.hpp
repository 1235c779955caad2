#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chdict/choicedict.hpp"
#include "chdict/oracle.hpp"

// Command-line front end: replay traces against the reference oracles, run
// access-count benchmarks, and print exact space layouts.

namespace chdict::cli {

struct Options {
    std::vector<std::size_t> n_list;
    std::string b_policy = "2w";
    std::string mode = "hidden";
    std::string fill = "zeros";
    std::uint64_t seed = 1;
    std::size_t ops = 10000;
    std::string trace_file;
    bool machine_readable = false;
};

inline BPolicy parse_b_policy(const std::string& s) {
    if (s == "2w") return BPolicy::TwoWords;
    if (s == "w") return BPolicy::OneWord;
    if (s == "w/2") return BPolicy::HalfWord;
    throw std::invalid_argument("unknown b policy '" + s + "'");
}

inline Config make_config(const Options& opt) {
    Config cfg;
    cfg.b_policy = parse_b_policy(opt.b_policy);
    if (opt.mode == "hidden") {
        cfg.barrier = BarrierMode::Hidden;
    } else if (opt.mode == "plain") {
        cfg.barrier = BarrierMode::Plain;
    } else if (opt.mode == "self-contained") {
        cfg.barrier = BarrierMode::Hidden;
        cfg.sizing = Sizing::SelfContained;
    } else {
        throw std::invalid_argument("unknown mode '" + opt.mode + "'");
    }
    if (opt.fill == "zeros") {
        cfg.fill = FillPolicy::zeros();
    } else if (opt.fill == "ones") {
        cfg.fill = FillPolicy::ones();
    } else if (opt.fill.rfind("random:", 0) == 0) {
        cfg.fill = FillPolicy::random(std::stoull(opt.fill.substr(7)));
    } else if (opt.fill == "crafted") {
        // A fixed adversarial pattern: dense data with plausible-looking
        // reciprocal pointer fields.
        cfg.fill = FillPolicy::crafted({0xFFFFFFFFFFFFFFFFull, 0x0000000100000002ull,
                                        0xAAAAAAAAAAAAAAAAull, 0x0000000200000001ull});
    } else {
        throw std::invalid_argument("unknown fill '" + opt.fill + "'");
    }
    return cfg;
}

// --- replay ------------------------------------------------------------------

inline int cmd_replay(const Options& opt, std::ostream& out, std::ostream& err) {
    std::ifstream in(opt.trace_file);
    if (!in) {
        err << "replay: cannot open '" << opt.trace_file << "'\n";
        return 2;
    }
    const TraceParse parsed = parse_trace(in);
    if (!parsed.ok) {
        err << "replay: parse error, line " << parsed.error_line << ": " << parsed.error << "\n";
        return 2;
    }
    const Config cfg = make_config(opt);
    DiffReport rep;
    if (is_seq_trace(parsed.trace)) {
        rep = differential_run_seq(parsed.trace, half_width_of(cfg.b_policy), cfg.barrier, cfg.fill);
    } else {
        rep = differential_run_set(parsed.trace, cfg);
    }
    if (opt.machine_readable) {
        out << "replay ok=" << (rep.ok ? 1 : 0) << " ops=" << rep.ops_run;
        if (!rep.ok) out << " divergence_at=" << rep.divergence_at << " minimal_ops=" << rep.minimal.ops.size();
        out << "\n";
    } else if (rep.ok) {
        out << "replay: OK, " << rep.ops_run << " ops, no divergence\n";
    } else {
        out << "replay: DIVERGENCE at op " << rep.divergence_at << ": " << rep.message << "\n";
        out << "minimal failing trace (" << rep.minimal.ops.size() << " ops):\n";
        write_trace(out, rep.minimal);
    }
    return rep.ok ? 0 : 1;
}

// --- bench -------------------------------------------------------------------

struct OpCost {
    std::uint64_t max = 0;
    std::uint64_t total = 0;
    std::uint64_t count = 0;
    void note(std::uint64_t c) {
        max = std::max(max, c);
        total += c;
        ++count;
    }
    double mean() const { return count == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(count); }
};

struct BenchReport {
    std::size_t n = 0;
    unsigned b = 0;
    std::string mode;
    std::uint64_t init_accesses = 0;
    std::map<std::string, OpCost> per_op;
    double ns_per_op = 0.0;
    std::size_t footprint = 0;
    std::size_t footprint_expected = 0;
    bool footprint_ok = false;
};

inline BenchReport bench_one(std::size_t n, const Config& cfg, const std::string& mode_name,
                             std::uint64_t seed, std::size_t ops) {
    BenchReport rep;
    rep.n = n;
    rep.b = half_width_of(cfg.b_policy);
    rep.mode = mode_name;

    ChoiceDict d = [&] {
        ChoiceDict fresh(n, cfg);
        return fresh;
    }();
    rep.init_accesses = d.arena().accesses();  // construction-time fill is uncounted
    rep.footprint = d.footprint_bits();
    rep.footprint_expected = ChoiceDict::required_bits(n, cfg);
    rep.footprint_ok = rep.footprint == rep.footprint_expected;

    std::mt19937_64 rng(seed);
    const auto timed = [&](const char* name, auto&& body) {
        d.arena().reset_accesses();
        body();
        rep.per_op[name].note(d.arena().accesses());
    };
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t step = 0; step < ops; ++step) {
        const std::size_t ell = 1 + rng() % n;
        switch (rng() % 4) {
            case 0: timed("insert", [&] { d.insert(ell); }); break;
            case 1: timed("delete", [&] { d.erase(ell); }); break;
            case 2: timed("contains", [&] { (void)d.contains(ell); }); break;
            case 3: timed("choice", [&] { (void)d.choice(); }); break;
        }
    }
    auto st = d.iter_reset();
    for (;;) {
        d.arena().reset_accesses();
        const std::size_t e = d.iter_next(st);
        rep.per_op["iter-next"].note(d.arena().accesses());
        if (e == 0) break;
    }
    const auto stop = std::chrono::steady_clock::now();
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
    const std::uint64_t total_ops = ops + rep.per_op["iter-next"].count;
    rep.ns_per_op = total_ops == 0 ? 0.0 : static_cast<double>(ns) / static_cast<double>(total_ops);
    return rep;
}

inline int cmd_bench(const Options& opt, std::ostream& out, std::ostream& err) {
    if (opt.n_list.empty()) {
        err << "bench: need at least one --n\n";
        return 2;
    }
    const Config cfg = make_config(opt);
    std::vector<BenchReport> reports;
    for (const std::size_t n : opt.n_list)
        reports.push_back(bench_one(n, cfg, opt.mode, opt.seed, opt.ops));

    static const char* kOps[] = {"insert", "delete", "contains", "choice", "iter-next"};
    if (opt.machine_readable) {
        for (const auto& r : reports) {
            out << "bench n=" << r.n << " b=" << r.b << " mode=" << r.mode
                << " init_accesses=" << r.init_accesses;
            for (const char* o : kOps) {
                const auto it = r.per_op.find(o);
                const OpCost c = it == r.per_op.end() ? OpCost{} : it->second;
                std::string key(o);
                std::replace(key.begin(), key.end(), '-', '_');
                out << " " << key << "_max=" << c.max << " " << key << "_mean=" << std::fixed
                    << std::setprecision(2) << c.mean();
            }
            out << " ns_per_op=" << std::fixed << std::setprecision(1) << r.ns_per_op
                << " footprint=" << r.footprint << " footprint_ok=" << (r.footprint_ok ? 1 : 0) << "\n";
        }
    } else {
        out << std::left << std::setw(10) << "n" << std::setw(6) << "b" << std::setw(16) << "mode"
            << std::setw(6) << "init";
        for (const char* o : kOps) out << std::setw(14) << (std::string(o) + " max/mean");
        out << std::setw(12) << "ns/op" << std::setw(12) << "bits" << "space\n";
        for (const auto& r : reports) {
            out << std::left << std::setw(10) << r.n << std::setw(6) << r.b << std::setw(16) << r.mode
                << std::setw(6) << r.init_accesses;
            for (const char* o : kOps) {
                const auto it = r.per_op.find(o);
                const OpCost c = it == r.per_op.end() ? OpCost{} : it->second;
                std::ostringstream cell;
                cell << c.max << "/" << std::fixed << std::setprecision(1) << c.mean();
                out << std::setw(14) << cell.str();
            }
            std::ostringstream ns;
            ns << std::fixed << std::setprecision(1) << r.ns_per_op;
            out << std::setw(12) << ns.str() << std::setw(12) << r.footprint
                << (r.footprint_ok ? "ok" : "MISMATCH") << "\n";
        }
    }
    bool ceilings_equal = true;
    for (const char* o : kOps) {
        std::uint64_t first = 0;
        bool have = false;
        for (const auto& r : reports) {
            const auto it = r.per_op.find(o);
            const std::uint64_t mx = it == r.per_op.end() ? 0 : it->second.max;
            if (!have) {
                first = mx;
                have = true;
            } else if (mx != first) {
                ceilings_equal = false;
            }
        }
    }
    bool init_equal = true;
    for (const auto& r : reports) init_equal = init_equal && r.init_accesses == reports.front().init_accesses;
    if (opt.machine_readable) {
        out << "bench_summary ceilings_equal=" << (ceilings_equal ? 1 : 0)
            << " init_equal=" << (init_equal ? 1 : 0) << "\n";
    } else {
        out << "constant-time sanity: per-op access ceilings "
            << (ceilings_equal ? "identical" : "DIFFER") << " across n, init accesses "
            << (init_equal ? "identical" : "DIFFER") << "\n";
    }
    return 0;
}

// --- space -------------------------------------------------------------------

inline int cmd_space(const Options& opt, std::ostream& out, std::ostream& err) {
    if (opt.n_list.size() != 1) {
        err << "space: need exactly one --n\n";
        return 2;
    }
    const Config cfg = make_config(opt);
    const std::size_t n = opt.n_list.front();
    ChoiceDict d(n, cfg);
    const ChoiceDict::SpaceReport s = d.space_report();
    if (opt.machine_readable) {
        out << "space n=" << n << " header=" << s.header << " barrier=" << s.barrier
            << " cells=" << s.cells << " tail=" << s.tail << " total=" << s.total << "\n";
        return 0;
    }
    if (s.header > 0) out << "header=" << s.header << " ";
    if (cfg.barrier == BarrierMode::Hidden)
        out << "flag=" << s.barrier;
    else
        out << "k=" << s.barrier;
    out << " A=" << s.cells << " tail=" << s.tail << " total=" << s.total << "\n";
    return 0;
}

}  // namespace chdict::cli
