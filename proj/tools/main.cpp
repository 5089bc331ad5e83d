#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

#include "parallel_spectra/commands.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string output_dir = ".";
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--output-dir", args.output_dir, "directory for emitted files");
    sub->add_option("--set", args.overrides,
                    "override a config field, e.g. --set params.gamma=1.5");
}

paraspec::RunConfig load(const CommonArgs& args) {
    nlohmann::json doc = paraspec::load_config_file(args.config_path);
    for (const auto& assignment : args.overrides)
        paraspec::apply_override(doc, assignment);
    return paraspec::parse_config(doc);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"parallel-spectra: non-Hermitian / Hermitian Hamiltonian "
                 "correspondence toolkit"};
    app.require_subcommand(1);

    CommonArgs spectrum_args, sweep_args, verify_args, zero_args, evolve_args;
    bool with_match = false;

    CLI::App* spectrum =
        app.add_subcommand("spectrum", "eigenvalues of the Hamiltonian triple");
    add_common(spectrum, spectrum_args);
    spectrum->add_flag("--match", with_match, "annotate the common real spectrum");

    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep with PT transitions");
    add_common(sweep, sweep_args);

    CLI::App* verify =
        app.add_subcommand("verify", "verify the eigenstate superposition per match");
    add_common(verify, verify_args);

    CLI::App* zero = app.add_subcommand("zero-modes", "closed-form zero-mode states");
    add_common(zero, zero_args);

    CLI::App* evolve = app.add_subcommand("evolve", "parallel time evolution with audit");
    add_common(evolve, evolve_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (spectrum->parsed())
            return paraspec::cmd_spectrum(load(spectrum_args), spectrum_args.output_dir,
                                          with_match);
        if (sweep->parsed()) return paraspec::cmd_sweep(load(sweep_args), sweep_args.output_dir);
        if (verify->parsed())
            return paraspec::cmd_verify(load(verify_args), verify_args.output_dir);
        if (zero->parsed())
            return paraspec::cmd_zero_modes(load(zero_args), zero_args.output_dir);
        if (evolve->parsed())
            return paraspec::cmd_evolve(load(evolve_args), evolve_args.output_dir);
    } catch (const paraspec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const paraspec::InvalidSpecError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const paraspec::SymmetryError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const paraspec::DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const paraspec::ConstraintError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const paraspec::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
