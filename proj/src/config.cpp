#include "dynloc/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "dynloc/errors.hpp"
#include "dynloc/quantum.hpp"

namespace dynloc {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v)
{
    return fmt::format("{:.17g}", v);
}

struct UnitFactor {
    const char* unit;
    double factor;
};

const std::vector<UnitFactor>& units_for(Dimension dim)
{
    static const std::vector<UnitFactor> frequency{
        {"rad/s", 1.0},           {"krad/s", 1e3},          {"Mrad/s", 1e6},
        {"Hz", two_pi},           {"kHz", two_pi * 1e3},    {"MHz", two_pi * 1e6},
        {"GHz", two_pi * 1e9}};
    static const std::vector<UnitFactor> length{{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}};
    static const std::vector<UnitFactor> power{{"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}};
    static const std::vector<UnitFactor> time{{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}};
    static const std::vector<UnitFactor> none{{"dimensionless", 1.0}};
    switch (dim) {
    case Dimension::frequency:
        return frequency;
    case Dimension::length:
        return length;
    case Dimension::power:
        return power;
    case Dimension::time:
        return time;
    case Dimension::dimensionless:
        break;
    }
    return none;
}

const char* canonical_unit(Dimension dim)
{
    switch (dim) {
    case Dimension::frequency:
        return "rad/s";
    case Dimension::length:
        return "m";
    case Dimension::power:
        return "W";
    case Dimension::time:
        return "s";
    case Dimension::dimensionless:
        break;
    }
    return "";
}

double parse_number(const std::string& text, const std::string& key)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse number '" + text + "' for " + key);
    }
}

std::size_t parse_count(const std::string& text, const std::string& key)
{
    const double v = parse_number(text, key);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e15)
        throw ConfigError("expected a non-negative integer for " + key + ", got '" + text + "'");
    return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& text, const std::string& key)
{
    if (text == "true" || text == "1" || text == "yes" || text == "on")
        return true;
    if (text == "false" || text == "0" || text == "no" || text == "off")
        return false;
    throw ConfigError("expected a boolean for " + key + ", got '" + text + "'");
}

std::vector<double> parse_list(const std::string& text, const std::string& key)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(parse_number(item, key));
    }
    return out;
}

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ", ";
        s += fmt_double(v[i]);
    }
    return s;
}

struct Entry {
    std::string key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

Entry quantity(std::string key, Dimension dim, double RunConfig::*group_member)
{
    return {key,
            [=](RunConfig& c, const std::string& v) { c.*group_member = parse_quantity(v, dim); },
            [=](const RunConfig& c) {
                const std::string u = canonical_unit(dim);
                return fmt_double(c.*group_member) + (u.empty() ? "" : " " + u);
            }};
}

template <typename Getter>
Entry physical(std::string key, Dimension dim, Getter member)
{
    return {key,
            [=](RunConfig& c, const std::string& v) {
                c.physical.*member = parse_quantity(v, dim);
            },
            [=](const RunConfig& c) {
                const std::string u = canonical_unit(dim);
                return fmt_double(c.physical.*member) + (u.empty() ? "" : " " + u);
            }};
}

Entry effective(std::string key, double EffectiveParams::*member)
{
    return {key,
            [=](RunConfig& c, const std::string& v) {
                c.effective.*member = parse_quantity(v, Dimension::dimensionless);
            },
            [=](const RunConfig& c) { return fmt_double(c.effective.*member); }};
}

Entry count(std::string key, std::size_t RunConfig::*member)
{
    return {key,
            [=](RunConfig& c, const std::string& v) { c.*member = parse_count(v, key); },
            [=](const RunConfig& c) { return std::to_string(c.*member); }};
}

Entry plain(std::string key, double RunConfig::*member)
{
    return quantity(std::move(key), Dimension::dimensionless, member);
}

const std::vector<Entry>& entries()
{
    static const std::vector<Entry> table = [] {
        std::vector<Entry> t;
        t.push_back({"experiment",
                     [](RunConfig& c, const std::string& v) { c.experiment = parse_experiment(v); },
                     [](const RunConfig& c) { return to_string(c.experiment); }});
        t.push_back({"seed",
                     [](RunConfig& c, const std::string& v) {
                         try {
                             std::size_t used = 0;
                             c.seed = std::stoull(v, &used);
                             if (used != v.size())
                                 throw std::invalid_argument(v);
                         } catch (const std::exception&) {
                             throw ConfigError("cannot parse seed '" + v + "'");
                         }
                     },
                     [](const RunConfig& c) { return std::to_string(c.seed); }});

        t.push_back(physical("pump_power", Dimension::power, &PhysicalParams::pump_power));
        t.push_back(physical("pump_frequency", Dimension::frequency, &PhysicalParams::pump_frequency));
        t.push_back(physical("pump_wavelength", Dimension::length, &PhysicalParams::pump_wavelength));
        t.push_back(physical("pump_coupling", Dimension::frequency, &PhysicalParams::pump_coupling));
        t.push_back(
            physical("cavity_frequency", Dimension::frequency, &PhysicalParams::cavity_frequency));
        t.push_back(
            physical("recoil_frequency", Dimension::frequency, &PhysicalParams::recoil_frequency));
        t.push_back(physical("cavity_length", Dimension::length, &PhysicalParams::cavity_length));
        t.push_back(physical("cavity_decay", Dimension::frequency, &PhysicalParams::cavity_decay));
        t.push_back(
            physical("mirror_frequency", Dimension::frequency, &PhysicalParams::mirror_frequency));
        t.push_back(
            physical("mirror_coupling", Dimension::frequency, &PhysicalParams::mirror_coupling));
        t.push_back(physical("condensate_coupling", Dimension::frequency,
                             &PhysicalParams::condensate_coupling));
        t.push_back(physical("detuning", Dimension::frequency, &PhysicalParams::detuning));
        t.push_back(physical("rabi", Dimension::frequency, &PhysicalParams::rabi));
        t.push_back(physical("atom_number", Dimension::dimensionless, &PhysicalParams::atom_number));
        t.push_back(
            physical("mirror_amplitude", Dimension::dimensionless, &PhysicalParams::mirror_amplitude));

        t.push_back({"effective_source",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "preset")
                             c.effective_source = EffectiveSource::preset;
                         else if (v == "derived")
                             c.effective_source = EffectiveSource::derived;
                         else
                             throw ConfigError("effective_source must be preset or derived");
                     },
                     [](const RunConfig& c) {
                         return std::string(c.effective_source == EffectiveSource::preset ? "preset"
                                                                                          : "derived");
                     }});
        t.push_back(effective("gamma", &EffectiveParams::gamma));
        t.push_back(effective("beta", &EffectiveParams::beta));
        t.push_back(effective("mu", &EffectiveParams::mu));
        t.push_back(effective("mu1", &EffectiveParams::mu1));
        t.push_back({"lambda_eff",
                     [](RunConfig& c, const std::string& v) {
                         c.effective = with_lambda_eff(c.effective,
                                                       parse_quantity(v, Dimension::dimensionless));
                     },
                     [](const RunConfig& c) { return fmt_double(c.effective.lambda_eff); }});
        t.push_back(effective("gamma_eff", &EffectiveParams::gamma_eff));
        t.push_back(effective("kbar", &EffectiveParams::kbar));
        t.push_back(plain("lambda_eff_scale", &RunConfig::lambda_eff_scale));

        t.push_back({"x_min", [](RunConfig& c, const std::string& v) {
                         c.grid.x_min = parse_quantity(v, Dimension::dimensionless);
                     },
                     [](const RunConfig& c) { return fmt_double(c.grid.x_min); }});
        t.push_back({"x_max", [](RunConfig& c, const std::string& v) {
                         c.grid.x_max = parse_quantity(v, Dimension::dimensionless);
                     },
                     [](const RunConfig& c) { return fmt_double(c.grid.x_max); }});
        t.push_back({"grid_n", [](RunConfig& c, const std::string& v) {
                         c.grid.n = parse_count(v, "grid_n");
                     },
                     [](const RunConfig& c) { return std::to_string(c.grid.n); }});
        t.push_back(plain("packet_x0", &RunConfig::packet_x0));
        t.push_back(plain("packet_p0", &RunConfig::packet_p0));
        t.push_back({"packet_dx",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "auto")
                             c.packet_dx.reset();
                         else
                             c.packet_dx = parse_quantity(v, Dimension::dimensionless);
                     },
                     [](const RunConfig& c) {
                         return c.packet_dx ? fmt_double(*c.packet_dx) : std::string("auto");
                     }});

        t.push_back(count("ensemble_size", &RunConfig::ensemble_size));
        t.push_back(plain("section_bound", &RunConfig::section_bound));
        t.push_back(count("section_trajectories", &RunConfig::section_trajectories));
        t.push_back(count("section_periods", &RunConfig::section_periods));

        t.push_back(count("steps_per_period", &RunConfig::steps_per_period));
        t.push_back({"tau_final",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "auto")
                             c.tau_final.reset();
                         else
                             c.tau_final = parse_quantity(v, Dimension::dimensionless);
                     },
                     [](const RunConfig& c) {
                         return c.tau_final ? fmt_double(*c.tau_final) : std::string("auto");
                     }});
        t.push_back(quantity("t_final", Dimension::time, &RunConfig::t_final));
        t.push_back(count("strobe_stride", &RunConfig::strobe_stride));
        t.push_back(plain("time_average_fraction", &RunConfig::time_average_fraction));

        t.push_back({"kbar_list",
                     [](RunConfig& c, const std::string& v) { c.kbar_list = parse_list(v, "kbar_list"); },
                     [](const RunConfig& c) { return join(c.kbar_list); }});
        t.push_back({"lambda_list",
                     [](RunConfig& c, const std::string& v) {
                         c.lambda_list = v == "auto" ? std::vector<double>{} : parse_list(v, "lambda_list");
                     },
                     [](const RunConfig& c) {
                         return c.lambda_list.empty() ? std::string("auto") : join(c.lambda_list);
                     }});
        t.push_back(count("lambda_points", &RunConfig::lambda_points));
        t.push_back({"fig3_time_average",
                     [](RunConfig& c, const std::string& v) {
                         c.fig3_time_average = parse_bool(v, "fig3_time_average");
                     },
                     [](const RunConfig& c) {
                         return std::string(c.fig3_time_average ? "true" : "false");
                     }});
        t.push_back(count("kbar_curve_points", &RunConfig::kbar_curve_points));
        t.push_back(quantity("fig3_t_final", Dimension::time, &RunConfig::fig3_t_final));

        t.push_back(count("map_bins", &RunConfig::map_bins));
        t.push_back(plain("map_x_range", &RunConfig::map_x_range));
        t.push_back(plain("map_p_range", &RunConfig::map_p_range));
        t.push_back(count("dist_bins", &RunConfig::dist_bins));
        t.push_back(plain("dist_range", &RunConfig::dist_range));
        t.push_back(plain("x_scale_si", &RunConfig::x_scale_si));
        t.push_back(plain("p_scale_si", &RunConfig::p_scale_si));

        t.push_back({"coupled_coupling",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "side_mode_position")
                             c.coupling = CavityCoupling::side_mode_position;
                         else if (v == "constant")
                             c.coupling = CavityCoupling::constant;
                         else
                             throw ConfigError(
                                 "coupled_coupling must be side_mode_position or constant");
                     },
                     [](const RunConfig& c) {
                         return std::string(c.coupling == CavityCoupling::side_mode_position
                                                ? "side_mode_position"
                                                : "constant");
                     }});
        t.push_back({"detuning_tilde",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "auto")
                             c.detuning_tilde.reset();
                         else
                             c.detuning_tilde = parse_quantity(v, Dimension::frequency);
                     },
                     [](const RunConfig& c) {
                         return c.detuning_tilde ? fmt_double(*c.detuning_tilde) + " rad/s"
                                                 : std::string("auto");
                     }});
        t.push_back(quantity("mech_damping", Dimension::frequency, &RunConfig::mech_damping));
        t.push_back(quantity("sm_damping", Dimension::frequency, &RunConfig::sm_damping));
        t.push_back(count("coupled_periods", &RunConfig::coupled_periods));
        t.push_back(count("coupled_samples_per_period", &RunConfig::coupled_samples_per_period));
        t.push_back(plain("coupled_q0", &RunConfig::coupled_q0));
        t.push_back(count("coupled_xi_points", &RunConfig::coupled_xi_points));
        return t;
    }();
    return table;
}

}  // namespace

std::string to_string(Experiment e)
{
    switch (e) {
    case Experiment::fig1:
        return "fig1";
    case Experiment::fig2:
        return "fig2";
    case Experiment::fig3:
        return "fig3";
    case Experiment::kbar_sweep:
        return "kbar-sweep";
    case Experiment::coupled_check:
        return "coupled-check";
    case Experiment::custom:
        return "custom";
    }
    return "custom";
}

Experiment parse_experiment(const std::string& name)
{
    for (auto e : {Experiment::fig1, Experiment::fig2, Experiment::fig3, Experiment::kbar_sweep,
                   Experiment::coupled_check, Experiment::custom})
        if (to_string(e) == name)
            return e;
    throw ConfigError("unknown experiment '" + name + "'");
}

double parse_quantity(const std::string& text, Dimension dim)
{
    const std::string s = trim(text);
    const auto space = s.find_first_of(" \t");
    const std::string number = space == std::string::npos ? s : s.substr(0, space);
    const std::string unit = space == std::string::npos ? "" : trim(s.substr(space));
    const double v = parse_number(number, text);
    if (!std::isfinite(v))
        throw ConfigError("non-finite value '" + text + "'");
    if (unit.empty()) {
        if (dim == Dimension::dimensionless || dim == Dimension::time ||
            dim == Dimension::length || dim == Dimension::power)
            return v;
        throw ConfigError("frequency '" + text + "' needs a unit (Hz, kHz, MHz, rad/s)");
    }
    for (const auto& u : units_for(dim))
        if (unit == u.unit)
            return v * u.factor;
    throw ConfigError("unit '" + unit + "' does not fit this quantity in '" + text + "'");
}

EffectiveParams RunConfig::resolved_effective() const
{
    EffectiveParams e = effective;
    if (effective_source == EffectiveSource::derived)
        e = derive_effective(physical, physical.mirror_amplitude, effective.kbar).params;
    return with_lambda_eff(e, e.lambda_eff * lambda_eff_scale);
}

double RunConfig::dtau() const
{
    return drive_period / static_cast<double>(steps_per_period);
}

std::size_t RunConfig::total_periods() const
{
    const double tau = tau_final ? *tau_final : tau_of_t(t_final, physical.mirror_frequency);
    return static_cast<std::size_t>(std::llround(tau / drive_period));
}

double RunConfig::resolved_tau_final() const
{
    return static_cast<double>(total_periods()) * drive_period;
}

double RunConfig::initial_packet_dx(double kbar) const
{
    return packet_dx ? *packet_dx : std::sqrt(kbar / 2.0);
}

void RunConfig::validate() const
{
    try {
        physical.validate();
        resolved_effective().validate();
        Grid(grid.x_min, grid.x_max, grid.n, effective.kbar);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (steps_per_period == 0)
        throw ConfigError("steps_per_period must be positive");
    if (strobe_stride == 0)
        throw ConfigError("strobe_stride must be positive");
    if (total_periods() == 0)
        throw ConfigError("evolution time must cover at least one drive period");
    if (ensemble_size < 2)
        throw ConfigError("ensemble_size must be at least 2");
    if (!(time_average_fraction > 0.0) || time_average_fraction > 1.0)
        throw ConfigError("time_average_fraction must lie in (0, 1]");
    if (!(lambda_eff_scale >= 0.0))
        throw ConfigError("lambda_eff_scale must be non-negative");
    if (experiment == Experiment::fig1 && (section_trajectories == 0 || section_periods < 8))
        throw ConfigError("Poincare section needs trajectories and at least 8 periods");
    if (map_bins == 0 || !(map_x_range > 0.0) || !(map_p_range > 0.0))
        throw ConfigError("map bins and ranges must be positive");
    if (dist_bins == 0 || !(dist_range > 0.0))
        throw ConfigError("dist_bins and dist_range must be positive");
    if (experiment == Experiment::fig3 && lambda_list.empty() && lambda_points == 0)
        throw ConfigError("fig3 needs a nonempty modulation list");
    if (experiment == Experiment::kbar_sweep) {
        if (kbar_list.empty())
            throw ConfigError("kbar_list must be nonempty");
        for (std::size_t i = 0; i < kbar_list.size(); ++i) {
            if (!(kbar_list[i] > 0.0))
                throw ConfigError("kbar_list entries must be positive");
            if (i > 0 && !(kbar_list[i] < kbar_list[i - 1]))
                throw ConfigError("kbar_list must be strictly descending");
        }
        if (kbar_curve_points == 1 || kbar_curve_points == 2)
            throw ConfigError("kbar_curve_points must be 0 or at least 3");
    }
    for (double l : lambda_list)
        if (!(l >= 0.0) || !std::isfinite(l))
            throw ConfigError("lambda_list entries must be finite and non-negative");
    if (experiment == Experiment::coupled_check) {
        if (coupled_periods == 0 || coupled_samples_per_period == 0)
            throw ConfigError("coupled run needs periods and samples");
        if (coupled_q0 == 0.0)
            throw ConfigError("coupled_q0 must be nonzero");
        if (coupled_xi_points < 2)
            throw ConfigError("coupled_xi_points must be at least 2");
    }
}

RunConfig default_config(Experiment experiment)
{
    const Preset preset = reference_preset();
    RunConfig c;
    c.experiment = experiment;
    c.physical = preset.physical;
    c.effective = preset.effective;
    switch (experiment) {
    case Experiment::fig1:
    case Experiment::fig2:
    case Experiment::kbar_sweep:
        c.t_final = 4.19e-2;
        break;
    case Experiment::fig3:
        c.t_final = 2.09e-2;
        break;
    case Experiment::coupled_check:
        c.t_final = 0.0;
        c.tau_final = drive_period;
        break;
    case Experiment::custom:
        c.tau_final = 100.0 * drive_period;
        break;
    }
    return c;
}

RunConfig parse_config(std::istream& in, RunConfig base)
{
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.rfind("run.", 0) == 0 || key.rfind("result.", 0) == 0)
            continue;
        const auto& table = entries();
        const auto it = std::find_if(table.begin(), table.end(),
                                     [&](const Entry& e) { return e.key == key; });
        if (it == table.end())
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        try {
            it->set(base, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, std::move(base));
}

std::vector<std::pair<std::string, std::string>> to_key_values(const RunConfig& config)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : entries())
        out.emplace_back(e.key, e.get(config));
    return out;
}

}  // namespace dynloc
