#include "strutlab/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace strutlab::cli;

    CLI::App app{"strutlab: planar elastic strut with a rate-dependent natural curvature"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    double alpha = 0.0;
    std::string alpha_range;
    std::string gamma_range;

    struct Spec {
        const char* name;
        const char* help;
    };
    const Spec specs[] = {
        {"simulate", "integrate the gradient flow from the configured initial state"},
        {"equilibria", "shoot the equilibrium branch over an alpha range"},
        {"spectrum", "linearised spectrum at one equilibrium"},
        {"sweep", "simulate over a gamma range and/or spectra over an alpha range"},
        {"validate", "simulate and check every invariant"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& s : specs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", config_path, "scenario INI file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
        sub->add_option("--alpha", alpha, "phi'(0) of the equilibrium (spectrum)");
        sub->add_option("--alpha-range", alpha_range, "a,b,n");
        sub->add_option("--gamma-range", gamma_range, "a,b,n");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : config_error;
    }

    CommandOptions opt;
    std::string command;
    for (CLI::App* sub : subs) {
        if (!sub->parsed())
            continue;
        command = sub->get_name();
        try {
            if (sub->count("--out"))
                opt.out_dir = out_dir;
            if (sub->count("--alpha"))
                opt.alpha = alpha;
            if (sub->count("--alpha-range"))
                opt.alpha_range = parse_range("--alpha-range", alpha_range);
            if (sub->count("--gamma-range"))
                opt.gamma_range = parse_range("--gamma-range", gamma_range);
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return config_error;
        }
    }
    try {
        return run_command(command, config_path, opt, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
