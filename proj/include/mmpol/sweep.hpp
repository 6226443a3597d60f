// sweep.hpp: run configurations, figure presets and grid execution.
#pragma once

#include "mmpol/adiabatic.hpp"
#include "mmpol/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mmpol {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

// A q = -1, 0, +1 system with collective couplings Omega_{+/-1} = Omega_0 (1 +/- f)
// (Omega_{-1} = 0 when the lower mode is uncoupled) and side modes moved towards
// the reference by epsilon.
struct ThreeModeSetup {
    int N = 1;
    double omega_e = 2.0;
    double gamma = 0.1;
    double omega0 = 2.0;
    double kappa0 = 0.1;
    double omega_m1 = 1.0;
    double omega_p1 = 3.0;
    double kappa_m1 = 0.1;
    double kappa_p1 = 0.1;
    double Omega0 = 0.35;
    double f = 0.0;
    std::optional<double> delta_Omega;  // overrides f as delta_Omega / Omega0
    bool lower_coupled = true;
    double epsilon = 0.0;

    double effective_f() const;
    double Omega_m1() const;
    double Omega_p1() const;
    // Throws ConfigurationError or DomainError for inconsistent values.
    SystemSpec to_spec() const;
};

// Sweepable parameter names, in the order they are applied to a setup.
const std::vector<std::string>& sweep_parameters();
// Sets one parameter: Omega0, Delta (side modes at omega0 -/+ Delta), zeta (kappa0 -/+ zeta),
// delta_kappa (same as zeta), f, delta_Omega, epsilon, omega_e, gamma, kappa0.
void apply_parameter(ThreeModeSetup& setup, const std::string& name, double value);

struct AxisSpec {
    std::string parameter;
    double start = 0.0;
    double stop = 0.0;
    int count = 1;
    bool log_scale = false;
    std::vector<double> values;  // explicit list; replaces start/stop/count when non-empty

    std::vector<double> points() const;
};

struct Tracking {
    std::string parameter;
    bool from_stop = false;
};

enum class OutputFormats { csv, json, both };

// A system is a named preset, an explicit three-mode setup, or (spectrum only) a general spec.
using SystemSource = std::variant<ThreeModeSetup, SystemSpec>;

struct RunConfig {
    std::string name = "sweep";
    std::string preset;  // empty for literals
    SystemSource system = ThreeModeSetup{};
    std::vector<AxisSpec> sweep;
    std::optional<Tracking> tracking;
    std::filesystem::path directory = ".";
    OutputFormats formats = OutputFormats::csv;
    bool validation = false;
    bool thermodynamic_limit = true;
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0: hardware concurrency
    std::string source_text;  // canonical JSON echo for the manifest

    std::size_t grid_size() const;
};

// Parses the JSON form. Unknown keys, bad types and violated invariants throw ConfigurationError.
RunConfig parse_run_config(const std::string& text);
// Canonical JSON echo of a configuration (stable key order).
std::string config_echo(const RunConfig& config);

// Named presets: fig2a, fig2b, fig3 (= fig3-a), fig3-a, fig3-b-caption, fig3-b-text, fig4.
std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);
ThreeModeSetup preset_setup(const std::string& name);
// Presets written by `figure <id>`: fig3 expands to its three sub-presets.
std::vector<std::string> figure_presets(const std::string& figure);

// One CSV cell.
using Cell = std::variant<std::monostate, double, std::int64_t, bool, std::string>;

struct SweepTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// Stable column order of sweep records for a given axis list.
std::vector<std::string> record_columns(const std::vector<AxisSpec>& axes);

// Evaluates the grid on a worker pool; rows come back in grid order (first axis slowest).
// Throws ConfigurationError for grids above 1e7 points.
SweepTable run_sweep(const RunConfig& config);

struct WrittenFiles {
    std::vector<std::filesystem::path> data;
    std::filesystem::path manifest;
};

// Writes <name>.csv and/or <name>.json plus <name>.manifest.json. Throws std::filesystem errors on I/O failure.
WrittenFiles write_outputs(const RunConfig& config, const SweepTable& table);

std::string format_cell(const Cell& cell);
std::string to_csv(const SweepTable& table);
std::string sha256_hex(const std::string& bytes);

}  // namespace mmpol
