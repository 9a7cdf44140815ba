#include "hopflab/errors.hpp"
#include "hopflab/io/commands.hpp"
#include "hopflab/io/config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Args {
    std::string config;
    std::string out;
    std::string preset;
    std::vector<std::string> sets;
};

std::map<std::string, std::string> set_overrides(const std::vector<std::string>& sets) {
    std::string text;
    for (const auto& s : sets) {
        if (s.find('=') == std::string::npos)
            throw hopflab::ValidationError("--set expects key=value, got '" + s + "'");
        text += s + "\n";
    }
    return hopflab::io::parse_config_text(text, "--set");
}

int run(const std::string& verb, const Args& a) {
    using namespace hopflab;
    std::vector<std::map<std::string, std::string>> layers;
    if (!a.preset.empty()) layers.push_back(io::preset_values(a.preset));
    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) throw IoError("cannot read config file " + a.config);
        std::ostringstream ss;
        ss << in.rdbuf();
        layers.push_back(io::parse_config_text(ss.str(), a.config));
    }
    layers.push_back(set_overrides(a.sets));
    if (!a.out.empty()) layers.push_back({{"output_dir", a.out}});

    const io::RunConfig cfg = io::build_config(layers);
    const std::string started = io::utc_timestamp();
    io::prepare_output_dir(cfg.output_dir);
    const io::RunOutputs out = io::run_command(verb, cfg);
    io::write_outputs(verb, a.preset, cfg, out, started);
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& f : out.files) std::cout << cfg.output_dir << "/" << f.name << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hopf-link semimetal numerical laboratory"};
    app.require_subcommand(0, 1);
    bool list = false;
    app.add_flag("--list-presets", list, "Print preset names and exit");

    Args args;
    std::string chosen;
    for (const char* verb : {"gapmap", "nodal", "topology", "adiabatic"}) {
        CLI::App* sub = app.add_subcommand(verb);
        sub->add_option("--config", args.config, "key = value config file");
        sub->add_option("--out", args.out, "Output directory");
        sub->add_option("--preset", args.preset, "Named figure configuration");
        sub->add_option("--set", args.sets, "Override, key=value (repeatable)");
        sub->callback([&chosen, verb] { chosen = verb; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (list) {
        for (const auto& [name, text] : hopflab::io::presets()) std::cout << name << "\n";
        return 0;
    }
    if (chosen.empty()) {
        std::cerr << app.help();
        return 2;
    }

    try {
        return run(chosen, args);
    } catch (const hopflab::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const hopflab::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const hopflab::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    }
}
