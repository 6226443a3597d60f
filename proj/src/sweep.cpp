#include "mmpol/sweep.hpp"

#include "mmpol/errors.hpp"
#include "mmpol/observables.hpp"
#include "mmpol/perturbative.hpp"
#include "mmpol/spectra.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <thread>

namespace mmpol {

using ojson = nlohmann::ordered_json;

// ------------------------------ ThreeModeSetup -------------------------------

double ThreeModeSetup::effective_f() const {
    if (!delta_Omega) return f;
    if (Omega0 == 0.0) throw DomainError("delta_Omega needs Omega0 != 0");
    return *delta_Omega / Omega0;
}

double ThreeModeSetup::Omega_m1() const { return lower_coupled ? Omega0 * (1.0 - effective_f()) : 0.0; }
double ThreeModeSetup::Omega_p1() const { return Omega0 * (1.0 + effective_f()); }

SystemSpec ThreeModeSetup::to_spec() const {
    if (!(std::abs(effective_f()) < 1.0)) throw DomainError("three-mode setup: requires |f| < 1");
    if (!(Omega0 >= 0.0)) throw ConfigurationError("three-mode setup: Omega0 must be >= 0");
    CavityModeSet modes({{-1, omega_m1, kappa_m1}, {0, omega0, kappa0}, {1, omega_p1, kappa_p1}});
    SystemSpec spec(std::move(modes), EmitterEnsemble::homogeneous(N, omega_e, gamma),
                    CouplingMap::collective({{-1, Omega_m1()}, {0, Omega0}, {1, Omega_p1()}}));
    return epsilon == 0.0 ? spec : mode_shift_scan(spec, epsilon);
}

const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> names{"kappa0", "omega_e", "gamma", "Omega0", "Delta", "zeta",
                                                "delta_kappa", "f", "delta_Omega", "epsilon"};
    return names;
}

void apply_parameter(ThreeModeSetup& s, const std::string& name, double value) {
    if (name == "kappa0") {
        s.kappa0 = value;
    } else if (name == "omega_e") {
        s.omega_e = value;
    } else if (name == "gamma") {
        s.gamma = value;
    } else if (name == "Omega0") {
        s.Omega0 = value;
    } else if (name == "Delta") {
        s.omega_m1 = s.omega0 - value;
        s.omega_p1 = s.omega0 + value;
    } else if (name == "zeta" || name == "delta_kappa") {
        s.kappa_m1 = s.kappa0 - value;
        s.kappa_p1 = s.kappa0 + value;
    } else if (name == "f") {
        s.f = value;
        s.delta_Omega.reset();
    } else if (name == "delta_Omega") {
        s.delta_Omega = value;
    } else if (name == "epsilon") {
        s.epsilon = value;
    } else {
        throw ConfigurationError("unknown sweep parameter '" + name + "'");
    }
}

// --------------------------------- AxisSpec ----------------------------------

std::vector<double> AxisSpec::points() const {
    if (!values.empty()) return values;
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        if (count == 1) {
            out[0] = start;
        } else if (i == count - 1) {
            out[static_cast<std::size_t>(i)] = stop;
        } else {
            const double u = static_cast<double>(i) / (count - 1);
            out[static_cast<std::size_t>(i)] =
                log_scale ? start * std::pow(stop / start, u) : start + u * (stop - start);
        }
    }
    return out;
}

std::size_t RunConfig::grid_size() const {
    double total = 1.0;
    for (const auto& a : sweep) total *= static_cast<double>(a.points().size());
    return total > 1e18 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(total);
}

// --------------------------------- presets -----------------------------------

namespace {

ThreeModeSetup fig2_setup(bool lower_coupled) {
    ThreeModeSetup s;
    s.omega_e = 2.0;
    s.omega0 = 2.0;
    s.gamma = 0.1;
    s.kappa0 = 0.1;
    s.kappa_m1 = s.kappa_p1 = 0.1;
    s.Omega0 = 0.35;
    s.lower_coupled = lower_coupled;
    apply_parameter(s, "Delta", 1.0);
    return s;
}

ThreeModeSetup fig3_setup(double kappa, double zeta) {
    ThreeModeSetup s;
    s.omega_e = 3.0;
    s.omega0 = 3.0;
    s.gamma = kappa;
    s.kappa0 = kappa;
    s.Omega0 = 0.35;
    apply_parameter(s, "Delta", 1.0);
    apply_parameter(s, "zeta", zeta);
    return s;
}

ThreeModeSetup fig4_setup() {
    ThreeModeSetup s;
    s.omega_e = 2.15;
    s.gamma = 0.37;
    s.omega_m1 = 1.45;
    s.omega0 = 2.14;
    s.omega_p1 = 2.76;
    s.kappa_m1 = 0.038;
    s.kappa0 = 0.09;
    s.kappa_p1 = 0.09;
    s.Omega0 = 0.35;
    return s;
}

AxisSpec linear_axis(std::string name, double start, double stop, int count) {
    return {std::move(name), start, stop, count, false, {}};
}

AxisSpec list_axis(std::string name, std::vector<double> values) {
    AxisSpec a{std::move(name), values.front(), values.back(), static_cast<int>(values.size()), false, {}};
    a.values = std::move(values);
    return a;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig2a", "fig2b", "fig3", "fig3-a", "fig3-b-caption", "fig3-b-text", "fig4"};
}

ThreeModeSetup preset_setup(const std::string& name) {
    if (name == "fig2a") return fig2_setup(false);
    if (name == "fig2b") return fig2_setup(true);
    if (name == "fig3" || name == "fig3-a" || name == "fig3-b-text") return fig3_setup(0.15, name == "fig3-b-text" ? -0.05 : -0.1);
    if (name == "fig3-b-caption") return fig3_setup(0.1, -0.1);
    if (name == "fig4") return fig4_setup();
    throw ConfigurationError("unknown preset '" + name + "'");
}

RunConfig preset(const std::string& name) {
    RunConfig c;
    c.name = name == "fig3" ? "fig3-a" : name;
    c.preset = name;
    c.system = preset_setup(name);
    if (name == "fig2a" || name == "fig2b") {
        c.sweep = {linear_axis("delta_Omega", -0.1, 0.1, 201), linear_axis("delta_kappa", -0.1, 0.1, 201)};
    } else if (name == "fig3" || name == "fig3-a") {
        c.sweep = {linear_axis("Omega0", 0.05, 0.5, 100), linear_axis("Delta", 0.4, 2.0, 100)};
        c.tracking = Tracking{"Delta", true};
    } else if (name == "fig3-b-caption" || name == "fig3-b-text") {
        c.sweep = {list_axis("Omega0", {0.1, 0.2, 0.3, 0.35, 0.4}), linear_axis("Delta", 0.4, 2.0, 161)};
        c.tracking = Tracking{"Delta", true};
    } else if (name == "fig4") {
        c.sweep = {list_axis("epsilon", {0.0, 0.17, 0.215, 0.26}), linear_axis("Omega0", 0.1, 0.5, 81)};
        c.tracking = Tracking{"Omega0", false};
    }
    c.source_text = config_echo(c);
    return c;
}

std::vector<std::string> figure_presets(const std::string& figure) {
    if (figure == "fig3") return {"fig3-a", "fig3-b-caption", "fig3-b-text"};
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), figure) == names.end())
        throw ConfigurationError("unknown figure '" + figure + "'");
    return {figure};
}

// ---------------------------------- parsing ----------------------------------

namespace {

void reject_unknown(const ojson& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigurationError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw ConfigurationError(where + ": unknown key '" + key + "'");
    }
}

double get_number(const ojson& v, const std::string& where) {
    if (!v.is_number()) throw ConfigurationError(where + ": expected a number");
    return v.get<double>();
}

bool get_switch(const ojson& v, const std::string& where) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "on") return true;
        if (s == "off") return false;
    }
    throw ConfigurationError(where + ": expected \"on\" or \"off\"");
}

ThreeModeSetup parse_three_mode(const ojson& obj) {
    reject_unknown(obj,
                   {"base", "N", "omega_e", "gamma", "omega0", "kappa0", "omega_m1", "omega_p1", "kappa_m1",
                    "kappa_p1", "Omega0", "f", "delta_Omega", "lower_coupled", "epsilon", "Delta", "zeta"},
                   "system");
    ThreeModeSetup s;
    if (obj.contains("base")) {
        if (!obj["base"].is_string()) throw ConfigurationError("system.base: expected a preset name");
        s = preset_setup(obj["base"].get<std::string>());
    }
    const std::map<std::string, double*> fields{
        {"omega_e", &s.omega_e},   {"gamma", &s.gamma},       {"omega0", &s.omega0},     {"kappa0", &s.kappa0},
        {"omega_m1", &s.omega_m1}, {"omega_p1", &s.omega_p1}, {"kappa_m1", &s.kappa_m1}, {"kappa_p1", &s.kappa_p1},
        {"Omega0", &s.Omega0},     {"f", &s.f},               {"epsilon", &s.epsilon}};
    for (const auto& [key, target] : fields) {
        if (obj.contains(key)) *target = get_number(obj[key], "system." + key);
    }
    if (obj.contains("N")) {
        if (!obj["N"].is_number_integer() || obj["N"].get<long long>() < 1)
            throw ConfigurationError("system.N: expected a positive integer");
        s.N = obj["N"].get<int>();
    }
    if (obj.contains("delta_Omega")) s.delta_Omega = get_number(obj["delta_Omega"], "system.delta_Omega");
    if (obj.contains("lower_coupled")) {
        if (!obj["lower_coupled"].is_boolean()) throw ConfigurationError("system.lower_coupled: expected a boolean");
        s.lower_coupled = obj["lower_coupled"].get<bool>();
    }
    if (obj.contains("Delta")) apply_parameter(s, "Delta", get_number(obj["Delta"], "system.Delta"));
    if (obj.contains("zeta")) apply_parameter(s, "zeta", get_number(obj["zeta"], "system.zeta"));
    s.to_spec();
    return s;
}

cplx parse_complex(const ojson& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigurationError(where + ": expected a number or [re, im]");
}

SystemSpec parse_general(const ojson& obj) {
    reject_unknown(obj, {"modes", "emitters", "couplings"}, "system");
    if (!obj.contains("emitters") || !obj.contains("couplings"))
        throw ConfigurationError("system: a literal needs modes, emitters and couplings");
    if (!obj["modes"].is_array()) throw ConfigurationError("system.modes: expected an array");
    std::vector<CavityMode> modes;
    for (const auto& m : obj["modes"]) {
        reject_unknown(m, {"q", "omega", "kappa"}, "system.modes[]");
        if (!m.contains("q") || !m["q"].is_number_integer()) throw ConfigurationError("system.modes[].q: expected an integer");
        modes.push_back({m["q"].get<int>(), get_number(m.value("omega", ojson()), "system.modes[].omega"),
                         get_number(m.value("kappa", ojson()), "system.modes[].kappa")});
    }
    CavityModeSet mode_set(std::move(modes));

    const auto& e = obj["emitters"];
    reject_unknown(e, {"N", "omega", "gamma"}, "system.emitters");
    std::optional<EmitterEnsemble> emitters;
    if (e.contains("omega") && e["omega"].is_array()) {
        if (!e.contains("gamma") || !e["gamma"].is_array())
            throw ConfigurationError("system.emitters: per-emitter omega needs a per-emitter gamma list");
        std::vector<double> w, g;
        for (const auto& x : e["omega"]) w.push_back(get_number(x, "system.emitters.omega[]"));
        for (const auto& x : e["gamma"]) g.push_back(get_number(x, "system.emitters.gamma[]"));
        emitters = EmitterEnsemble::distinct(std::move(w), std::move(g));
    } else {
        if (!e.contains("N") || !e["N"].is_number_integer()) throw ConfigurationError("system.emitters.N: expected an integer");
        emitters = EmitterEnsemble::homogeneous(e["N"].get<int>(), get_number(e.value("omega", ojson()), "system.emitters.omega"),
                                                get_number(e.value("gamma", ojson()), "system.emitters.gamma"));
    }

    const auto& c = obj["couplings"];
    reject_unknown(c, {"collective", "per_pair"}, "system.couplings");
    if (c.contains("collective") == c.contains("per_pair"))
        throw ConfigurationError("system.couplings: give exactly one of collective, per_pair");
    if (c.contains("collective")) {
        std::map<int, double> rabi;
        for (const auto& [key, value] : c["collective"].items()) {
            int q = 0;
            try {
                std::size_t used = 0;
                q = std::stoi(key, &used);
                if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                throw ConfigurationError("system.couplings.collective: keys must be mode indices");
            }
            rabi[q] = get_number(value, "system.couplings.collective");
        }
        return SystemSpec(std::move(mode_set), *emitters, CouplingMap::collective(std::move(rabi)));
    }
    const auto& rows = c["per_pair"];
    if (!rows.is_array() || rows.empty()) throw ConfigurationError("system.couplings.per_pair: expected rows");
    Eigen::MatrixXcd g(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_array() || rows[i].size() != rows[0].size())
            throw ConfigurationError("system.couplings.per_pair: ragged rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_complex(rows[i][j], "system.couplings.per_pair");
    }
    return SystemSpec(std::move(mode_set), *emitters, CouplingMap::per_pair(std::move(g)));
}

AxisSpec parse_axis(const std::string& name, const ojson& obj) {
    const auto& names = sweep_parameters();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw ConfigurationError("sweep: unknown parameter '" + name + "'");
    reject_unknown(obj, {"start", "stop", "count", "scale", "values"}, "sweep." + name);
    AxisSpec a;
    a.parameter = name;
    if (obj.contains("values")) {
        if (obj.contains("start") || obj.contains("stop") || obj.contains("count") || obj.contains("scale"))
            throw ConfigurationError("sweep." + name + ": values excludes start/stop/count/scale");
        if (!obj["values"].is_array() || obj["values"].empty())
            throw ConfigurationError("sweep." + name + ".values: expected a non-empty array");
        for (const auto& v : obj["values"]) a.values.push_back(get_number(v, "sweep." + name + ".values[]"));
        a.start = a.values.front();
        a.stop = a.values.back();
        a.count = static_cast<int>(a.values.size());
        return a;
    }
    for (const char* key : {"start", "stop", "count"}) {
        if (!obj.contains(key)) throw ConfigurationError("sweep." + name + ": missing " + key);
    }
    a.start = get_number(obj["start"], "sweep." + name + ".start");
    a.stop = get_number(obj["stop"], "sweep." + name + ".stop");
    if (!obj["count"].is_number_integer() || obj["count"].get<long long>() < 1 || obj["count"].get<long long>() > 10'000'000)
        throw ConfigurationError("sweep." + name + ".count: expected an integer in [1, 1e7]");
    a.count = obj["count"].get<int>();
    if (a.start > a.stop) throw ConfigurationError("sweep." + name + ": start must not exceed stop");
    if (obj.contains("scale")) {
        const auto s = obj["scale"].is_string() ? obj["scale"].get<std::string>() : std::string();
        if (s != "linear" && s != "log") throw ConfigurationError("sweep." + name + ".scale: expected linear or log");
        a.log_scale = s == "log";
        if (a.log_scale && !(a.start > 0.0)) throw ConfigurationError("sweep." + name + ": log scale needs start > 0");
    }
    return a;
}

ojson setup_json(const ThreeModeSetup& s) {
    ojson j;
    j["N"] = s.N;
    j["omega_e"] = s.omega_e;
    j["gamma"] = s.gamma;
    j["omega0"] = s.omega0;
    j["kappa0"] = s.kappa0;
    j["omega_m1"] = s.omega_m1;
    j["omega_p1"] = s.omega_p1;
    j["kappa_m1"] = s.kappa_m1;
    j["kappa_p1"] = s.kappa_p1;
    j["Omega0"] = s.Omega0;
    j["f"] = s.f;
    if (s.delta_Omega) j["delta_Omega"] = *s.delta_Omega;
    j["lower_coupled"] = s.lower_coupled;
    j["epsilon"] = s.epsilon;
    return j;
}

ojson spec_json(const SystemSpec& spec) {
    ojson j;
    j["modes"] = ojson::array();
    for (const auto& m : spec.modes().modes()) j["modes"].push_back({{"q", m.q}, {"omega", m.omega}, {"kappa", m.kappa}});
    const auto& e = spec.emitters();
    if (e.is_homogeneous()) {
        j["emitters"] = {{"N", e.count()}, {"omega", e.omega(0)}, {"gamma", e.gamma(0)}};
    } else {
        ojson w = ojson::array(), g = ojson::array();
        for (int i = 0; i < e.count(); ++i) {
            w.push_back(e.omega(i));
            g.push_back(e.gamma(i));
        }
        j["emitters"] = {{"omega", w}, {"gamma", g}};
    }
    if (spec.couplings().is_collective()) {
        ojson c = ojson::object();
        for (const auto& [q, v] : spec.couplings().collective_rabi()) c[std::to_string(q)] = v;
        j["couplings"] = {{"collective", c}};
    } else {
        const auto& g = spec.couplings().per_pair_matrix();
        ojson rows = ojson::array();
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            ojson row = ojson::array();
            for (Eigen::Index k = 0; k < g.cols(); ++k) row.push_back({g(i, k).real(), g(i, k).imag()});
            rows.push_back(row);
        }
        j["couplings"] = {{"per_pair", rows}};
    }
    return j;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    ojson root;
    try {
        root = ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        throw ConfigurationError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(root, {"name", "system", "sweep", "tracking", "outputs", "validation", "thermodynamic_limit", "seed", "threads"},
                   "config");
    RunConfig c;
    if (root.contains("name")) {
        if (!root["name"].is_string() || root["name"].get<std::string>().empty())
            throw ConfigurationError("name: expected a non-empty string");
        c.name = root["name"].get<std::string>();
        if (c.name.find_first_of("/\\") != std::string::npos) throw ConfigurationError("name: must not contain path separators");
    }
    if (!root.contains("system")) throw ConfigurationError("config: missing system");
    const auto& sys = root["system"];
    if (sys.is_string()) {
        c.preset = sys.get<std::string>();
        c.system = preset_setup(c.preset);
    } else if (sys.is_object() && sys.contains("modes")) {
        c.system = parse_general(sys);
    } else {
        c.system = parse_three_mode(sys);
    }
    if (root.contains("sweep")) {
        if (!root["sweep"].is_object()) throw ConfigurationError("sweep: expected an object");
        std::set<std::string> seen;
        for (const auto& [name, axis] : root["sweep"].items()) {
            c.sweep.push_back(parse_axis(name, axis));
            seen.insert(name);
        }
        if (seen.count("zeta") && seen.count("delta_kappa")) throw ConfigurationError("sweep: zeta and delta_kappa are the same axis");
        if (seen.count("f") && seen.count("delta_Omega")) throw ConfigurationError("sweep: f and delta_Omega are the same axis");
        if (!c.sweep.empty() && !std::holds_alternative<ThreeModeSetup>(c.system))
            throw ConfigurationError("sweep: grids need a three-mode system");
    }
    if (root.contains("tracking")) {
        const auto& t = root["tracking"];
        reject_unknown(t, {"parameter", "anchor"}, "tracking");
        if (!t.contains("parameter") || !t["parameter"].is_string()) throw ConfigurationError("tracking.parameter: expected a string");
        Tracking tr{t["parameter"].get<std::string>(), false};
        if (std::none_of(c.sweep.begin(), c.sweep.end(), [&](const AxisSpec& a) { return a.parameter == tr.parameter; }))
            throw ConfigurationError("tracking.parameter: '" + tr.parameter + "' is not a sweep axis");
        if (t.contains("anchor")) {
            const auto a = t["anchor"].is_string() ? t["anchor"].get<std::string>() : std::string();
            if (a != "start" && a != "stop") throw ConfigurationError("tracking.anchor: expected start or stop");
            tr.from_stop = a == "stop";
        }
        c.tracking = tr;
    }
    if (root.contains("outputs")) {
        const auto& o = root["outputs"];
        reject_unknown(o, {"directory", "formats"}, "outputs");
        if (o.contains("directory")) {
            if (!o["directory"].is_string()) throw ConfigurationError("outputs.directory: expected a string");
            c.directory = o["directory"].get<std::string>();
        }
        if (o.contains("formats")) {
            if (!o["formats"].is_array() || o["formats"].empty()) throw ConfigurationError("outputs.formats: expected a non-empty array");
            bool csv = false, json = false;
            for (const auto& f : o["formats"]) {
                const auto s = f.is_string() ? f.get<std::string>() : std::string();
                if (s == "csv") csv = true;
                else if (s == "json") json = true;
                else throw ConfigurationError("outputs.formats: expected csv or json");
            }
            c.formats = csv && json ? OutputFormats::both : (json ? OutputFormats::json : OutputFormats::csv);
        }
    }
    if (root.contains("validation")) c.validation = get_switch(root["validation"], "validation");
    if (root.contains("thermodynamic_limit")) c.thermodynamic_limit = get_switch(root["thermodynamic_limit"], "thermodynamic_limit");
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned()) throw ConfigurationError("seed: expected a non-negative integer");
        c.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("threads")) {
        if (!root["threads"].is_number_unsigned()) throw ConfigurationError("threads: expected a non-negative integer");
        c.threads = root["threads"].get<unsigned>();
    }
    c.source_text = config_echo(c);
    return c;
}

std::string config_echo(const RunConfig& c) {
    ojson j;
    j["name"] = c.name;
    j["preset"] = c.preset;
    if (const auto* s = std::get_if<ThreeModeSetup>(&c.system))
        j["system"] = setup_json(*s);
    else
        j["system"] = spec_json(std::get<SystemSpec>(c.system));
    ojson sweep = ojson::object();
    for (const auto& a : c.sweep) {
        if (!a.values.empty())
            sweep[a.parameter] = {{"values", a.values}};
        else
            sweep[a.parameter] = {{"start", a.start}, {"stop", a.stop}, {"count", a.count}, {"scale", a.log_scale ? "log" : "linear"}};
    }
    j["sweep"] = sweep;
    if (c.tracking)
        j["tracking"] = {{"parameter", c.tracking->parameter}, {"anchor", c.tracking->from_stop ? "stop" : "start"}};
    else
        j["tracking"] = nullptr;
    j["formats"] = c.formats == OutputFormats::both ? ojson{"csv", "json"}
                   : c.formats == OutputFormats::json ? ojson{"json"}
                                                      : ojson{"csv"};
    j["validation"] = c.validation ? "on" : "off";
    j["thermodynamic_limit"] = c.thermodynamic_limit ? "on" : "off";
    j["seed"] = c.seed;
    return j.dump();
}

// --------------------------------- records -----------------------------------

namespace {

const std::vector<std::string>& fixed_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c{"N",        "omega_e",  "gamma",    "omega_m1", "omega_0", "omega_p1",
                                   "kappa_m1", "kappa_0",  "kappa_p1", "Omega_m1", "Omega_0", "Omega_p1",
                                   "fsr",      "finesse",  "omega_R_exact", "E_LP", "E_UP", "Gamma_LP", "Gamma_UP",
                                   "exciton_fraction_LP", "exciton_fraction_UP"};
        for (const char* b : {"LP", "UP"}) {
            for (const char* q : {"m1", "0", "p1"}) c.push_back(std::string("photon_fraction_") + b + "_" + q);
        }
        for (int k = 0; k < 4; ++k) {
            const std::string p = "branch" + std::to_string(k) + "_";
            for (const char* f : {"label", "energy", "bandwidth", "exciton_fraction"}) c.push_back(p + f);
        }
        for (const char* n : {"omega_R_single_mode", "Gamma_single_mode", "omega_R_linear_zeta", "Gamma_LP_linear_zeta",
                              "Gamma_UP_linear_zeta", "omega_R_perturbative", "Gamma_LP_perturbative", "Gamma_UP_perturbative",
                              "omega_R_adiabatic", "delta_N", "delta_Gamma_N", "NJ_prime", "NJ_dprime",
                              "NJ_prime_closed_exact", "NJ_prime_closed_printed", "has_LP", "has_UP", "quasi_static_valid",
                              "status", "linear_zeta_rel_gap", "perturbative_abs_gap", "perturbative_rel_gap",
                              "adiabatic_rel_gap"})
            c.push_back(n);
        return c;
    }();
    return cols;
}

Cell opt(const std::optional<double>& v) {
    if (v && std::isfinite(*v)) return *v;
    return std::monostate{};
}

struct PointResult {
    std::vector<PolaritonBranch> branches;
    std::vector<Cell> cells;
};

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

// Fills everything but the labels-dependent columns once branches are labelled.
class PointEvaluator {
public:
    PointEvaluator(const RunConfig& config) : config_(config) {}

    std::optional<std::vector<PolaritonBranch>> solve(const SystemSpec& spec) const {
        const auto matrix = build_dicke_matrix(spec);
        auto branches = to_physical(eig_arrowhead(matrix).pairs, matrix);
        classify_branches(branches, spec);
        return branches;
    }

    std::vector<Cell> cells(const std::vector<double>& axis_values, const ThreeModeSetup& setup,
                            const std::optional<SystemSpec>& spec, const std::vector<PolaritonBranch>& branches,
                            const std::string& status) const {
        std::map<std::string, Cell> v;
        v["N"] = static_cast<std::int64_t>(setup.N);
        v["status"] = status;
        if (spec) fill(*spec, setup, branches, v);
        std::vector<Cell> row;
        for (double x : axis_values) row.emplace_back(x);
        for (const auto& name : fixed_columns()) {
            auto it = v.find(name);
            row.push_back(it == v.end() ? Cell{} : it->second);
        }
        return row;
    }

private:
    void fill(const SystemSpec& spec, const ThreeModeSetup& setup, const std::vector<PolaritonBranch>& branches,
              std::map<std::string, Cell>& v) const {
        const auto& modes = spec.modes();
        const double w0 = modes.reference().omega, k0 = modes.reference().kappa;
        const double wm = modes.mode(-1).omega, wp = modes.mode(1).omega;
        const double km = modes.mode(-1).kappa, kp = modes.mode(1).kappa;
        v["omega_e"] = setup.omega_e;
        v["gamma"] = setup.gamma;
        v["omega_m1"] = wm;
        v["omega_0"] = w0;
        v["omega_p1"] = wp;
        v["kappa_m1"] = km;
        v["kappa_0"] = k0;
        v["kappa_p1"] = kp;
        v["Omega_m1"] = spec.collective_rabi(-1);
        v["Omega_0"] = spec.collective_rabi(0);
        v["Omega_p1"] = spec.collective_rabi(1);
        v["fsr"] = opt(modes.fsr());
        v["finesse"] = opt(modes.finesse());

        const auto summary = summarize(branches, spec);
        v["omega_R_exact"] = opt(summary.omega_R);
        v["E_LP"] = opt(summary.E_LP);
        v["E_UP"] = opt(summary.E_UP);
        v["Gamma_LP"] = opt(summary.Gamma_LP);
        v["Gamma_UP"] = opt(summary.Gamma_UP);
        v["exciton_fraction_LP"] = opt(summary.exciton_fraction_LP);
        v["exciton_fraction_UP"] = opt(summary.exciton_fraction_UP);
        const std::pair<int, const char*> qs[] = {{-1, "m1"}, {0, "0"}, {1, "p1"}};
        for (const auto& [q, tag] : qs) {
            if (summary.has_LP()) v[std::string("photon_fraction_LP_") + tag] = summary.photon_fractions_LP.at(q);
            if (summary.has_UP()) v[std::string("photon_fraction_UP_") + tag] = summary.photon_fractions_UP.at(q);
        }
        auto ordered = branches;
        std::stable_sort(ordered.begin(), ordered.end(),
                         [](const PolaritonBranch& a, const PolaritonBranch& b) { return a.energy < b.energy; });
        for (std::size_t k = 0; k < ordered.size() && k < 4; ++k) {
            const std::string p = "branch" + std::to_string(k) + "_";
            v[p + "label"] = ordered[k].label.to_string();
            v[p + "energy"] = ordered[k].energy;
            v[p + "bandwidth"] = ordered[k].bandwidth;
            v[p + "exciton_fraction"] = ordered[k].exciton_fraction();
        }
        v["omega_R_single_mode"] = summary.omega_R_single_mode;
        v["Gamma_single_mode"] = summary.Gamma_single_mode;

        const double rabi0 = spec.collective_rabi(0);
        const double fsr = wp - w0;
        const double zeta = kp - k0;
        const bool symmetric = near(fsr, w0 - wm) && near(zeta, k0 - km) && setup.lower_coupled;
        const bool matched = near(setup.omega_e, w0) && near(setup.gamma, k0);
        std::optional<double> linear_zeta;
        if (symmetric && matched && setup.effective_f() == 0.0 && fsr > 0.0) {
            linear_zeta = splitting_linear_zeta(rabi0, fsr, zeta);
            const auto g = bandwidths_linear_zeta(rabi0, fsr, zeta, k0);
            v["omega_R_linear_zeta"] = *linear_zeta;
            v["Gamma_LP_linear_zeta"] = g.lp;
            v["Gamma_UP_linear_zeta"] = g.up;
        }
        if (symmetric && fsr > 0.0) {
            const auto nj = nj_prime_homogeneous(rabi0, setup.effective_f(), fsr, zeta);
            v["NJ_prime_closed_exact"] = nj.exact;
            v["NJ_prime_closed_printed"] = nj.approximate;
        }

        const auto matrix = build_dicke_matrix(spec);
        std::optional<PerturbativeResult> pert;
        try {
            pert = x_correction(matrix);
            v["omega_R_perturbative"] = pert->Omega_R;
            v["Gamma_LP_perturbative"] = pert->Gamma_LP;
            v["Gamma_UP_perturbative"] = pert->Gamma_UP;
        } catch (const DomainError&) {
        }

        std::optional<double> adiabatic;
        try {
            const auto c = effective_parameters(spec, {config_.thermodynamic_limit});
            const cplx a(c.delta_N, c.delta_Gamma_N);
            adiabatic = std::sqrt(a * a + 4.0 * rabi0 * rabi0).real();
            v["omega_R_adiabatic"] = *adiabatic;
            v["delta_N"] = c.delta_N;
            v["delta_Gamma_N"] = c.delta_Gamma_N;
            v["NJ_prime"] = c.collective_loss;
            v["NJ_dprime"] = c.collective_shift;
        } catch (const SingularModeError&) {
        }

        v["has_LP"] = summary.has_LP();
        v["has_UP"] = summary.has_UP();
        v["quasi_static_valid"] = spec.quasi_static_valid(-1) && spec.quasi_static_valid(1);

        if (config_.validation && summary.omega_R && *summary.omega_R != 0.0) {
            const double exact = *summary.omega_R;
            if (linear_zeta) v["linear_zeta_rel_gap"] = std::abs(*linear_zeta - exact) / std::abs(exact);
            if (adiabatic) v["adiabatic_rel_gap"] = std::abs(*adiabatic - exact) / std::abs(exact);
            if (pert) {
                const auto cmp = compare_with_exact(matrix, *pert);
                v["perturbative_abs_gap"] = cmp.abs_gap;
                v["perturbative_rel_gap"] = cmp.rel_gap_splitting;
            }
        }
    }

    const RunConfig& config_;
};

std::string sanitize(std::string s) {
    std::replace_if(s.begin(), s.end(), [](char ch) { return ch == ',' || ch == '\n' || ch == '\r' || ch == '"'; }, ';');
    return s;
}

}  // namespace

std::vector<std::string> record_columns(const std::vector<AxisSpec>& axes) {
    std::vector<std::string> cols;
    for (const auto& a : axes) cols.push_back(a.parameter);
    const auto& fixed = fixed_columns();
    cols.insert(cols.end(), fixed.begin(), fixed.end());
    return cols;
}

SweepTable run_sweep(const RunConfig& config) {
    const auto* base = std::get_if<ThreeModeSetup>(&config.system);
    if (!base) throw ConfigurationError("run_sweep: needs a three-mode system");
    for (const auto& a : config.sweep) {
        if (a.count < 1) throw ConfigurationError("sweep." + a.parameter + ": count must be >= 1");
    }
    if (config.grid_size() > 10'000'000) throw ConfigurationError("sweep: grid exceeds 1e7 points");

    std::vector<std::vector<double>> axes;
    for (const auto& a : config.sweep) axes.push_back(a.points());
    const std::size_t n_axes = axes.size();

    // Lines run along the tracked axis, or the last axis.
    std::size_t line_axis = n_axes == 0 ? 0 : n_axes - 1;
    bool reverse = false;
    if (config.tracking) {
        for (std::size_t k = 0; k < n_axes; ++k) {
            if (config.sweep[k].parameter == config.tracking->parameter) line_axis = k;
        }
        reverse = config.tracking->from_stop;
    }
    const std::size_t line_len = n_axes == 0 ? 1 : axes[line_axis].size();
    const std::size_t total = config.grid_size();
    const std::size_t n_lines = total / line_len;

    // Row-major strides, first axis slowest.
    std::vector<std::size_t> stride(n_axes, 1);
    for (std::size_t k = n_axes; k-- > 1;) stride[k - 1] = stride[k] * axes[k].size();

    auto line_start = [&](std::size_t line) {
        std::vector<std::size_t> idx(n_axes, 0);
        std::size_t rem = line;
        for (std::size_t k = n_axes; k-- > 0;) {
            if (k == line_axis) continue;
            idx[k] = rem % axes[k].size();
            rem /= axes[k].size();
        }
        return idx;
    };

    // Canonical application order of parameters.
    std::vector<std::size_t> order(n_axes);
    for (std::size_t k = 0; k < n_axes; ++k) order[k] = k;
    const auto& canon = sweep_parameters();
    auto rank = [&](const std::string& p) { return std::find(canon.begin(), canon.end(), p) - canon.begin(); };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rank(config.sweep[a].parameter) < rank(config.sweep[b].parameter); });

    SweepTable table;
    table.columns = record_columns(config.sweep);
    table.rows.assign(total, {});
    const PointEvaluator eval(config);

    auto run_line = [&](std::size_t line) {
        auto idx = line_start(line);
        std::optional<std::vector<PolaritonBranch>> previous;
        for (std::size_t step = 0; step < line_len; ++step) {
            if (n_axes > 0) idx[line_axis] = reverse ? line_len - 1 - step : step;
            std::vector<double> values(n_axes);
            for (std::size_t k = 0; k < n_axes; ++k) values[k] = axes[k][idx[k]];
            ThreeModeSetup setup = *base;
            std::optional<SystemSpec> spec;
            std::vector<PolaritonBranch> branches;
            std::string status = "ok";
            try {
                for (std::size_t k : order) apply_parameter(setup, config.sweep[k].parameter, values[k]);
                spec = setup.to_spec();
                branches = *eval.solve(*spec);
                if (config.tracking && previous) track_labels(*previous, branches);
                previous = branches;
            } catch (const std::exception& e) {
                spec.reset();
                previous.reset();
                status = sanitize(e.what());
            }
            std::size_t flat = 0;
            for (std::size_t k = 0; k < n_axes; ++k) flat += idx[k] * stride[k];
            try {
                table.rows[flat] = eval.cells(values, setup, spec, branches, status);
            } catch (const std::exception& e) {
                table.rows[flat] = eval.cells(values, setup, std::nullopt, {}, sanitize(e.what()));
            }
        }
    };

    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_lines));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t line = next++; line < n_lines; line = next++) run_line(line);
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return table;
}

}  // namespace mmpol
