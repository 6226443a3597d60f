// mmpol: spectra, sweeps, figure datasets and the validation suite from the command line.
//
// Exit codes: 0 success, 1 validation or numerical failure, 2 usage or configuration error,
// 3 I/O error.

#include "mmpol/errors.hpp"
#include "mmpol/spectra.hpp"
#include "mmpol/sweep.hpp"
#include "mmpol/validate.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIO = 3;

struct CommonFlags {
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    std::optional<std::string> thermodynamic_limit;
    std::optional<std::string> format;
};

void add_common(CLI::App& cmd, CommonFlags& flags) {
    cmd.add_option("--out", flags.out, "Output directory");
    cmd.add_option("--threads", flags.threads, "Worker threads (0: available parallelism)");
    cmd.add_option("--thermodynamic-limit", flags.thermodynamic_limit, "Drop O(1/N) adiabatic terms")
        ->check(CLI::IsMember({"on", "off"}));
    cmd.add_option("--format", flags.format, "Output formats")->check(CLI::IsMember({"csv", "json", "both"}));
}

void apply_common(mmpol::RunConfig& config, const CommonFlags& flags) {
    if (flags.out) config.directory = *flags.out;
    if (flags.threads) config.threads = *flags.threads;
    if (flags.thermodynamic_limit) config.thermodynamic_limit = *flags.thermodynamic_limit == "on";
    if (flags.format) {
        config.formats = *flags.format == "csv"    ? mmpol::OutputFormats::csv
                         : *flags.format == "json" ? mmpol::OutputFormats::json
                                                   : mmpol::OutputFormats::both;
    }
    config.source_text = mmpol::config_echo(config);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::filesystem::filesystem_error("cannot read config", path, std::make_error_code(std::errc::no_such_file_or_directory));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (out) out << text;
    if (!out) throw std::filesystem::filesystem_error("cannot write", path, std::make_error_code(std::errc::io_error));
}

void report_written(const mmpol::WrittenFiles& files) {
    for (const auto& p : files.data) std::cout << p.string() << '\n';
    std::cout << files.manifest.string() << '\n';
}

int run_validation_to(const std::filesystem::path& path, const mmpol::ValidateOptions& options) {
    const auto report = mmpol::run_validation(options);
    const auto text = mmpol::report_json(report);
    if (path.empty())
        std::cout << text;
    else
        write_text(path, text);
    for (const auto& c : report.checks)
        std::cerr << (c.passed ? "PASS " : (c.gating ? "FAIL " : "INFO ")) << c.name << '\n';
    return report.passed() ? 0 : kExitValidation;
}

void print_branches(const std::vector<mmpol::PolaritonBranch>& branches) {
    std::vector<int> modes;
    for (const auto& [q, w] : branches.front().photon_fractions()) modes.push_back(q);
    std::cout << "label,energy,bandwidth,exciton_fraction";
    for (int q : modes) std::cout << ",photon_fraction_q" << q;
    std::cout << '\n';
    for (const auto& b : branches) {
        std::cout << b.label.to_string() << ',' << mmpol::format_cell(b.energy) << ',' << mmpol::format_cell(b.bandwidth) << ','
                  << mmpol::format_cell(b.exciton_fraction());
        for (int q : modes) std::cout << ',' << mmpol::format_cell(b.photon_fraction(q));
        std::cout << '\n';
    }
}

std::vector<mmpol::PolaritonBranch> solve(const mmpol::SystemSpec& spec) {
    if (spec.is_dicke()) return mmpol::solve_dicke(spec);
    const auto matrix = mmpol::build_full_matrix(spec);
    auto branches = mmpol::to_physical(mmpol::eig_dense(matrix), matrix);
    mmpol::classify_branches(branches, spec);
    return branches;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimode cavity polariton spectra and sweeps"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mmpol::kToolVersion));

    CommonFlags common;

    auto* spectrum = app.add_subcommand("spectrum", "Branch table of one system");
    std::string spectrum_config, spectrum_preset;
    std::vector<std::string> assignments;
    auto* config_opt = spectrum->add_option("--config", spectrum_config, "Config file (system only)");
    spectrum->add_option("--preset", spectrum_preset, "Named preset")->excludes(config_opt);
    spectrum->add_option("--set", assignments, "Override name=value (three-mode systems)");

    auto* sweep = app.add_subcommand("sweep", "Evaluate a configured grid");
    std::string sweep_config;
    sweep->add_option("--config", sweep_config, "Config file")->required();
    add_common(*sweep, common);

    auto* figure = app.add_subcommand("figure", "Write the dataset of a figure preset");
    std::string figure_id;
    figure->add_option("id", figure_id, "fig2a, fig2b, fig3 or fig4")->required();
    add_common(*figure, common);

    auto* validate = app.add_subcommand("validate", "Run the invariant suite");
    std::string validate_out;
    mmpol::ValidateOptions validate_options;
    std::string fault;
    validate->add_option("--out", validate_out, "Report path (default: stdout)");
    validate->add_option("--seed", validate_options.seed, "Seed for randomized specs");
    validate->add_option("--random-specs", validate_options.random_specs, "Randomized solver comparisons")
        ->check(CLI::PositiveNumber);
    validate->add_option("--inject-fault", fault, "Mutation test")->check(CLI::IsMember({"bandwidth-sign"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kExitUsage;
    }

    try {
        if (!mmpol::bandwidth_convention_self_test()) {
            std::cerr << "mmpol: bandwidth convention self-test failed\n";
            return kExitValidation;
        }

        if (*spectrum) {
            if (spectrum_config.empty() && spectrum_preset.empty()) throw mmpol::ConfigurationError("spectrum: need --config or --preset");
            mmpol::SystemSource system;
            if (!spectrum_config.empty()) {
                const auto config = mmpol::parse_run_config(read_file(spectrum_config));
                if (!config.sweep.empty()) throw mmpol::ConfigurationError("spectrum: config must not contain a sweep");
                system = config.system;
            } else {
                system = mmpol::preset_setup(spectrum_preset);
            }
            if (!assignments.empty()) {
                auto* setup = std::get_if<mmpol::ThreeModeSetup>(&system);
                if (!setup) throw mmpol::ConfigurationError("--set: only three-mode systems take overrides");
                for (const auto& a : assignments) {
                    const auto eq = a.find('=');
                    if (eq == std::string::npos) throw mmpol::ConfigurationError("--set: expected name=value, got '" + a + "'");
                    double value = 0.0;
                    try {
                        std::size_t used = 0;
                        value = std::stod(a.substr(eq + 1), &used);
                        if (used != a.size() - eq - 1) throw std::invalid_argument(a);
                    } catch (const std::logic_error&) {
                        throw mmpol::ConfigurationError("--set: bad number in '" + a + "'");
                    }
                    mmpol::apply_parameter(*setup, a.substr(0, eq), value);
                }
            }
            const auto spec = std::visit(
                [](const auto& s) -> mmpol::SystemSpec {
                    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, mmpol::ThreeModeSetup>)
                        return s.to_spec();
                    else
                        return s;
                },
                system);
            print_branches(solve(spec));
            return 0;
        }

        if (*sweep) {
            auto config = mmpol::parse_run_config(read_file(sweep_config));
            apply_common(config, common);
            report_written(mmpol::write_outputs(config, mmpol::run_sweep(config)));
            if (config.validation) {
                mmpol::ValidateOptions options;
                options.seed = config.seed;
                return run_validation_to(config.directory / (config.name + ".validation.json"), options);
            }
            return 0;
        }

        if (*figure) {
            for (const auto& name : mmpol::figure_presets(figure_id)) {
                auto config = mmpol::preset(name);
                apply_common(config, common);
                report_written(mmpol::write_outputs(config, mmpol::run_sweep(config)));
            }
            return 0;
        }

        if (*validate) {
            validate_options.flip_bandwidth_sign = fault == "bandwidth-sign";
            return run_validation_to(validate_out, validate_options);
        }
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "mmpol: " << e.what() << '\n';
        return kExitIO;
    } catch (const std::invalid_argument& e) {
        std::cerr << "mmpol: " << e.what() << '\n';
        return kExitUsage;
    } catch (const mmpol::DomainError& e) {
        std::cerr << "mmpol: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "mmpol: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
