#include "doctest.h"

#include "mmpol/errors.hpp"
#include "mmpol/sweep.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace mmpol;

namespace {

std::size_t column(const SweepTable& t, const std::string& name) {
    const auto it = std::find(t.columns.begin(), t.columns.end(), name);
    REQUIRE(it != t.columns.end());
    return static_cast<std::size_t>(it - t.columns.begin());
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("presets carry the figure parameters") {
    const auto f4 = preset_setup("fig4");
    CHECK(f4.omega_e == 2.15);
    CHECK(f4.gamma == 0.37);
    CHECK(f4.omega_m1 == 1.45);
    CHECK(f4.omega0 == 2.14);
    CHECK(f4.omega_p1 == 2.76);
    CHECK(f4.kappa_m1 == 0.038);
    CHECK(f4.kappa0 == 0.09);
    CHECK(f4.kappa_p1 == 0.09);
    const auto f2 = preset_setup("fig2b");
    CHECK(f2.Omega0 == 0.35);
    CHECK(f2.omega_p1 - f2.omega0 == doctest::Approx(1.0));
    CHECK_FALSE(preset_setup("fig2a").lower_coupled);
    CHECK(preset_setup("fig3-a").kappa0 == 0.15);
    CHECK(preset_setup("fig3-b-caption").kappa0 == 0.1);
    CHECK(preset_setup("fig3-b-text").kappa_p1 - preset_setup("fig3-b-text").kappa0 == doctest::Approx(-0.05));
    CHECK(figure_presets("fig3").size() == 3);
    CHECK_THROWS_AS(preset("fig9"), ConfigurationError);
    CHECK(preset("fig3").grid_size() == 10000);
}

TEST_CASE("config parsing") {
    const auto c = parse_run_config(R"({"name": "t", "system": "fig4",
        "sweep": {"Omega0": {"start": 0.1, "stop": 0.5, "count": 5}},
        "outputs": {"formats": ["csv", "json"]}, "thermodynamic_limit": "off", "seed": 3})");
    CHECK(c.name == "t");
    CHECK(c.sweep.size() == 1);
    CHECK(c.formats == OutputFormats::both);
    CHECK_FALSE(c.thermodynamic_limit);
    CHECK(c.seed == 3);
    CHECK(c.sweep[0].points().back() == doctest::Approx(0.5));

    CHECK_THROWS_AS(parse_run_config(R"({"system": "fig4", "colour": 1})"), ConfigurationError);
    CHECK_THROWS_AS(parse_run_config(R"({"system": "fig4", "sweep": {"Omega0": {"start": 0.5, "stop": 0.1, "count": 5}}})"),
                    ConfigurationError);
    CHECK_THROWS_AS(parse_run_config(R"({"system": "fig4", "sweep": {"Omega0": {"start": 0.1, "stop": 0.5, "count": 0}}})"),
                    ConfigurationError);
    CHECK_THROWS_AS(parse_run_config(R"({"system": "nope"})"), ConfigurationError);
    CHECK_THROWS_AS(parse_run_config("{not json"), ConfigurationError);
    CHECK_THROWS_AS(parse_run_config(R"({"system": {"base": "fig4", "omgea0": 1.0}})"), ConfigurationError);
}

TEST_CASE("log axes are geometric") {
    const auto c = parse_run_config(R"({"system": "fig4", "sweep": {"Omega0": {"start": 0.01, "stop": 1.0, "count": 3, "scale": "log"}}})");
    const auto p = c.sweep[0].points();
    CHECK(p[1] == doctest::Approx(0.1));
}

TEST_CASE("general system literal for a spectrum") {
    const auto c = parse_run_config(R"({"system": {"modes": [{"q": 0, "omega": 2.0, "kappa": 0.1}],
        "emitters": {"N": 2, "omega": 2.0, "gamma": 0.1}, "couplings": {"collective": {"0": 0.3}}}})");
    CHECK(std::holds_alternative<SystemSpec>(c.system));
}

TEST_CASE("grids over ten million points are refused") {
    auto c = preset("fig4");
    c.sweep[1].count = 3000000;
    CHECK_THROWS_AS(run_sweep(c), ConfigurationError);
}

TEST_CASE("Fig. 2b centre has vanishing two-body loss") {
    auto c = parse_run_config(R"({"system": "fig2b", "sweep": {"delta_Omega": {"values": [0.0]}, "delta_kappa": {"values": [0.0, 0.1]}}})");
    const auto t = run_sweep(c);
    REQUIRE(t.rows.size() == 2);
    CHECK(std::get<double>(t.rows[0][column(t, "NJ_prime")]) == 0.0);
    CHECK(std::get<double>(t.rows[1][column(t, "NJ_prime")]) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("Fig. 4 record at Omega_0 = 0.35") {
    auto c = parse_run_config(R"({"system": "fig4", "sweep": {"Omega0": {"values": [0.35]}}})");
    const auto t = run_sweep(c);
    CHECK(std::get<double>(t.rows[0][column(t, "exciton_fraction_LP")]) < 0.5);
    CHECK(std::get<std::string>(t.rows[0][column(t, "status")]) == "ok");
}

TEST_CASE("records: stable columns, input echo, explicit nulls") {
    auto c = preset("fig4");
    c.sweep[1].count = 3;
    const auto t = run_sweep(c);
    CHECK(t.columns == record_columns(c.sweep));
    CHECK(t.columns[0] == "epsilon");
    CHECK(t.columns[1] == "Omega0");
    CHECK(t.rows.size() == 12);
    for (const auto& name : {"omega_e", "gamma", "omega_m1", "kappa_p1", "Omega_0"}) CHECK(column(t, name) > 1);
    // Two-mode figure has no -1 coupling; the linear-zeta value does not apply there.
    auto two = parse_run_config(R"({"system": "fig2a", "sweep": {"delta_kappa": {"values": [0.05]}}})");
    const auto t2 = run_sweep(two);
    CHECK(std::holds_alternative<std::monostate>(t2.rows[0][column(t2, "omega_R_linear_zeta")]));
    CHECK(format_cell(Cell{}) == "null");
    CHECK(format_cell(Cell{std::nan("")}) == "null");
    CHECK(format_cell(Cell{0.1}) == "0.10000000000000001");
}

TEST_CASE("thread count does not change the bytes") {
    auto c = preset("fig3-b-text");
    c.threads = 1;
    const auto a = to_csv(run_sweep(c));
    c.threads = 4;
    CHECK(a == to_csv(run_sweep(c)));
}

TEST_CASE("manifest checksums match the written files") {
    const auto dir = std::filesystem::temp_directory_path() / "mmpol_manifest_test";
    std::filesystem::remove_all(dir);
    auto c = preset("fig4");
    c.sweep[1].count = 5;
    c.directory = dir;
    c.formats = OutputFormats::both;
    const auto files = write_outputs(c, run_sweep(c));
    CHECK(files.data.size() == 2);
    const auto m = nlohmann::json::parse(slurp(files.manifest));
    CHECK(m["schema_version"] == kSchemaVersion);
    CHECK(m["tool_version"] == kToolVersion);
    CHECK(m["row_count"] == 20);
    CHECK(m["config"]["system"]["omega_e"] == 2.15);
    for (const auto& f : m["files"]) {
        const auto bytes = slurp(dir / f["path"].get<std::string>());
        CHECK(f["bytes"] == bytes.size());
        CHECK(f["sha256"] == sha256_hex(bytes));
    }
    const auto rows = nlohmann::json::parse(slurp(dir / "fig4.json"));
    CHECK(rows.size() == 20);
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    std::filesystem::remove_all(dir);
}

TEST_CASE("unwritable output directory") {
    auto c = preset("fig4");
    c.sweep[1].count = 2;
    c.directory = "/proc/mmpol-cannot-write";
    CHECK_THROWS_AS(write_outputs(c, run_sweep(c)), std::filesystem::filesystem_error);
}
