#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include <arena/runner.hpp>

using namespace arena;

int main(int argc, char** argv) {
    CLI::App app{"arena: swap-protocol bribery simulator"};
    app.require_subcommand(1);

    std::string scenario, out, mode, variant, path;
    std::uint64_t seed = 0;
    std::int64_t trials = 0;

    const char* cmds[] = {"simulate", "expect", "dominance", "lemmas", "pool", "ttc"};
    for (const char* name : cmds) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--scenario", scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "RNG seed (overrides the file)");
        sub->add_option("--trials", trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
        sub->add_option("--mode", mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
        sub->add_option("--out", out, "write the report here instead of stdout");
        if (std::string(name) == "ttc") {
            sub->add_option("--variant", variant)->check(CLI::IsMember({"mad", "he", "demba"}));
            sub->add_option("--path", path)->check(CLI::IsMember({"alice-redeems", "bob-collateral", "bob-both"}));
        }
    }
    CLI11_PARSE(app, argc, argv);

    Options o;
    for (auto* sub : app.get_subcommands()) {
        if (sub->count("--seed")) o.seed = seed;
        if (sub->count("--trials")) o.trials = trials;
    }
    if (!mode.empty()) o.mode = mode;
    o.variant = variant;
    o.path = path;

    std::string cmd = app.get_subcommands().front()->get_name();
    try {
        ScenarioFile f = load_scenario(scenario);
        Report r;
        if (cmd == "simulate") r = cmd_simulate(f, o);
        else if (cmd == "expect") r = cmd_expect(f, o);
        else if (cmd == "dominance") r = cmd_dominance(f, o);
        else if (cmd == "lemmas") r = cmd_lemmas(f, o);
        else if (cmd == "pool") r = cmd_pool(f, o);
        else r = cmd_ttc(f, o);
        std::string text = render(r);
        if (out.empty()) {
            std::cout << text;
        } else {
            std::ofstream os(out);
            if (!os) throw Error("io-error", "cannot write " + out);
            os << text;
        }
        return r.exit_code;
    } catch (const Error& e) {
        std::cerr << "arena: " << e.what() << "\n";
        return 1;
    }
}
