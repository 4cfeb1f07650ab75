#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "sfl/runner.hpp"
#include "sfl/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"sparse functional learning experiment runner"};
    app.set_version_flag("--version", std::string(sfl::kVersion));
    app.require_subcommand(1);

    struct Flags {
        std::string config;
        std::string out = ".";
        std::uint64_t seed = 0;
        bool seed_set = false;
        int trials = 0;
        int workers = 0;
    };

    std::vector<std::pair<std::string, CLI::App*>> subs;
    std::vector<Flags> flags(sfl::runner::subcommand_names().size());
    std::size_t idx = 0;
    for (const std::string& name : sfl::runner::subcommand_names()) {
        CLI::App* sub = app.add_subcommand(name);
        Flags& f = flags[idx++];
        sub->add_option("--config", f.config, "JSON config file");
        sub->add_option("--out", f.out, "output directory");
        sub->add_option("--seed", f.seed, "base seed for all randomness")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--trials", f.trials, "trial count override");
        sub->add_option("--workers", f.workers, "worker thread count");
        subs.emplace_back(name, sub);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < subs.size(); ++i) {
        const auto& [name, sub] = subs[i];
        if (!sub->parsed()) continue;
        const Flags& f = flags[i];
        try {
            sfl::io::json overrides = sfl::io::json::object();
            if (sub->count("--seed") > 0) overrides["seed"] = f.seed;
            if (f.trials > 0) overrides["trials"] = f.trials;
            if (f.workers > 0) overrides["workers"] = f.workers;
            const sfl::io::json config = sfl::runner::resolve_config(f.config, overrides);
            return sfl::runner::run(name, config, f.out);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 1;
        }
    }
    return 1;
}
