// Acceptance suite: one PASS/FAIL line per primary criterion; exits 1 if any criterion fails.

#include "mmpol/adiabatic.hpp"
#include "mmpol/perturbative.hpp"
#include "mmpol/sweep.hpp"
#include "mmpol/validate.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace mmpol;

namespace {

int failures = 0;

void report(const std::string& criterion, bool passed, const std::string& detail, double seconds) {
    std::printf("%s  %-34s %s [%.2f s]\n", passed ? "PASS" : "FAIL", criterion.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    failures += !passed;
}

const CheckResult& find(const ValidationReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return c;
    throw std::runtime_error("missing check " + name);
}

std::string num(double x, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;

    auto t0 = clock::now();
    ValidateOptions options;
    options.random_specs = 1000;
    const auto suite = run_validation(options);
    const double suite_seconds = seconds_since(t0);

    {
        const auto& c = find(suite, "single_mode_limit");
        report("single-mode limit", c.passed, "worst gap " + num(c.metrics.at("worst_gap")) + " eV (tol 1e-10)", 0.0);
    }
    {
        const auto& eq = find(suite, "solver_equivalence");
        const auto& dark = find(suite, "spectrum_inclusion");
        report("solver equivalence", eq.passed && dark.passed,
               "1000 specs, worst gap " + num(eq.metrics.at("worst_gap")) + " (tol 1e-10); dark multiplet gap " +
                   num(dark.metrics.at("worst_relative_gap")),
               suite_seconds);
    }
    {
        const auto& decay = find(suite, "oracle_decoupled_decay");
        const auto& fit = find(suite, "oracle_frequency_fit");
        double worst = 0.0;
        for (const auto& [k, v] : fit.metrics) worst = std::max(worst, v);
        report("oracle lock", decay.passed && fit.passed,
               "decoupled width gap " + num(decay.metrics.at("fitted_width_gap")) + " eV (tol 1e-6); worst fit gap " + num(worst) +
                   " eV (tol 1e-4)",
               0.0);
    }
    {
        t0 = clock::now();
        const auto study = linear_zeta_study(0.35, -0.1, 0.05, 0.35, 15);
        double worst_sum = 0.0;
        for (double r : study.ratio) {
            const auto g = bandwidths_linear_zeta(0.35, 0.35 / r, -0.1, 0.15);
            worst_sum = std::max(worst_sum, std::abs(g.lp + g.up - 0.3));
        }
        const double e = study.fit.exponent;
        report("linear-zeta accuracy band", e >= 1.7 && e <= 2.3 && worst_sum <= 1e-15,
               "error exponent " + num(e) + " (band [1.7, 2.3]); width sum gap " + num(worst_sum), seconds_since(t0));
    }
    {
        t0 = clock::now();
        const auto study = adiabatic_study(0.35, 0.1);
        report("adiabatic convergence", study.fit.exponent >= 2.7,
               "fitted exponent " + num(study.fit.exponent) + " (cubic needs >= 2.7); C = " + num(study.bound_constant(3.0)) +
                   ", max error " + num(study.error.back()),
               seconds_since(t0));
    }
    {
        const auto& c = find(suite, "two_body_rate_bound");
        report("two-body rate magnitude", c.passed,
               "max |NJ'| " + num(std::max(c.metrics.at("max_abs_two_mode"), c.metrics.at("max_abs_three_mode"))) +
                   " eV (< 0.026); printed/exact ratio up to " + num(c.metrics.at("max_ratio_printed_to_exact")),
               0.0);
    }
    {
        const auto& trend = find(suite, "fig4_exciton_trend");
        const auto& low = find(suite, "fig4_low_finesse_threshold");
        std::string detail = "X_LP " + num(trend.metrics.at("first")) + " -> " + num(trend.metrics.at("last"));
        for (const auto& [k, v] : low.metrics) detail += "; " + k + ": X_LP " + num(v);
        report("Fig. 4 reproduction", trend.passed && low.passed, detail, 0.0);
    }
    {
        const auto& bound = find(suite, "fig3_splitting_bound");
        const auto& asym = find(suite, "fig3_bandwidth_asymmetry");
        report("Fig. 3 reproduction", bound.passed && asym.passed,
               "min 2 Omega_0 - Omega_R " + num(bound.metrics.at("smallest_margin")) + " eV; asymmetry " +
                   (asym.passed ? "holds" : "violated"),
               0.0);
    }
    {
        t0 = clock::now();
        const auto base = std::filesystem::temp_directory_path() / "mmpol_acceptance";
        std::filesystem::remove_all(base);
        bool same = true;
        std::size_t files = 0;
        for (const auto& figure : {"fig2a", "fig2b", "fig3", "fig4"}) {
            for (const auto& name : figure_presets(figure)) {
                std::string bytes[2];
                for (int run = 0; run < 2; ++run) {
                    auto c = preset(name);
                    c.directory = base / std::to_string(run);
                    c.threads = run == 0 ? 1 : 3;
                    const auto written = write_outputs(c, run_sweep(c));
                    bytes[run] = slurp(written.data.front()) + slurp(written.manifest);
                }
                same = same && bytes[0] == bytes[1];
                ++files;
            }
        }
        std::filesystem::remove_all(base);
        report("determinism", same, std::to_string(files) + " preset CSVs and manifests compared across two runs", seconds_since(t0));
    }

    std::printf("%d criterion failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}
