#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chdict/cli.hpp"

namespace {

std::vector<std::size_t> parse_n_list(const std::string& joined) {
    std::vector<std::size_t> out;
    std::stringstream ss(joined);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoull(item));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chdict: constant-time choice dictionary tool"};
    app.require_subcommand(1);

    chdict::cli::Options opt;
    std::string n_joined;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--n", n_joined, "universe size(s), comma separated");
        cmd->add_option("--b-policy", opt.b_policy, "half width policy: 2w, w, w/2");
        cmd->add_option("--mode", opt.mode, "layout: hidden, plain, self-contained");
        cmd->add_option("--fill", opt.fill, "arena fill: zeros, ones, random:SEED, crafted");
        cmd->add_option("--seed", opt.seed, "workload seed");
        cmd->add_option("--ops", opt.ops, "operations per benchmark run");
        cmd->add_option("--trace", opt.trace_file, "trace file to replay");
        cmd->add_flag("--machine-readable", opt.machine_readable, "key=value output");
    };

    CLI::App* replay = app.add_subcommand("replay", "replay a trace against the oracle");
    CLI::App* bench = app.add_subcommand("bench", "access-count and timing benchmark");
    CLI::App* space = app.add_subcommand("space", "print the exact bit layout");
    add_common(replay);
    add_common(bench);
    add_common(space);

    CLI11_PARSE(app, argc, argv);
    opt.n_list = parse_n_list(n_joined);

    try {
        if (replay->parsed()) return chdict::cli::cmd_replay(opt, std::cout, std::cerr);
        if (bench->parsed()) return chdict::cli::cmd_bench(opt, std::cout, std::cerr);
        if (space->parsed()) return chdict::cli::cmd_space(opt, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
