#include "pnsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "pnsim/csv.hpp"

namespace pnsim {
namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& v) {
    double x = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x))
        throw std::invalid_argument("expected a number, got '" + v + "'");
    return x;
}

long long to_integer(const std::string& v) {
    long long x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw std::invalid_argument("expected an integer, got '" + v + "'");
    return x;
}

int to_int(const std::string& v) {
    const long long x = to_integer(v);
    if (x < -(1LL << 31) || x >= (1LL << 31)) throw std::invalid_argument("integer out of range: " + v);
    return static_cast<int>(x);
}

std::uint64_t to_seed(const std::string& v) {
    std::uint64_t x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw std::invalid_argument("expected a non-negative integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw std::invalid_argument("expected true/false, got '" + v + "'");
}

// "0, 3, 5..8" -> {0, 3, 5, 6, 7, 8}
std::vector<int> to_int_list(const std::string& v) {
    std::vector<int> out;
    for (const auto& item : split_list(v)) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_int(item));
            continue;
        }
        const int lo = to_int(trim(item.substr(0, dots)));
        const int hi = to_int(trim(item.substr(dots + 2)));
        if (hi < lo) throw std::invalid_argument("empty range '" + item + "'");
        for (int i = lo; i <= hi; ++i) out.push_back(i);
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

template <typename E>
E to_enum(const std::string& v, const std::map<std::string, E>& names) {
    auto it = names.find(v);
    if (it != names.end()) return it->second;
    std::string known;
    for (const auto& [name, _] : names) known += (known.empty() ? "" : "|") + name;
    throw std::invalid_argument("unknown value '" + v + "' (expected " + known + ")");
}

const std::map<std::string, Estimator> kEstimators{
    {"pna_ofdm", Estimator::pna_ofdm}, {"pna_sc", Estimator::pna_sc}, {"unaware", Estimator::unaware}};
const std::map<std::string, Scheme> kSchemes{
    {"mr", Scheme::mr}, {"lp_mmse", Scheme::lp_mmse}, {"p_mmse", Scheme::p_mmse}, {"mmse", Scheme::mmse}};

template <typename E>
std::vector<E> to_enum_list(const std::string& v, const std::map<std::string, E>& names) {
    std::vector<E> out;
    for (const auto& item : split_list(v)) {
        const E e = to_enum(item, names);
        if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

int default_cp_length(int n) { return static_cast<int>(std::lround(0.07 * n)); }

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"experiment", [](auto& c, const auto& v) { c.experiment = v; }},
        {"N", [](auto& c, const auto& v) { c.layout.num_subcarriers = to_int(v); }},
        {"N_cp", [](auto& c, const auto& v) { c.layout.cp_length = to_int(v); }},
        {"delta_f", [](auto& c, const auto& v) { c.layout.subcarrier_spacing = to_double(v); }},
        {"N_c", [](auto& c, const auto& v) { c.layout.block_subcarriers = to_int(v); }},
        {"tau_c", [](auto& c, const auto& v) { c.layout.block_symbols = to_int(v); }},
        {"tau_p", [](auto& c, const auto& v) { c.layout.pilot_length = to_int(v); }},
        {"pilot_subcarriers", [](auto& c, const auto& v) { c.layout.pilot_subcarriers = to_int_list(v); }},
        {"pilot_symbols", [](auto& c, const auto& v) { c.layout.pilot_symbols = to_int_list(v); }},
        {"L", [](auto& c, const auto& v) { c.layout.num_aps = to_int(v); }},
        {"K", [](auto& c, const auto& v) { c.layout.num_ues = to_int(v); }},
        {"K_sweep",
         [](auto& c, const auto& v) { c.ue_counts = v == "none" ? std::vector<int>{} : to_int_list(v); }},
        {"area_side", [](auto& c, const auto& v) { c.layout.area_side = to_double(v); }},
        {"f_c", [](auto& c, const auto& v) { c.pn.carrier_frequency = to_double(v); }},
        {"gamma_ap", [](auto& c, const auto& v) { c.pn.gamma_ap = to_double(v); }},
        {"gamma_ue", [](auto& c, const auto& v) { c.pn.gamma_ue = to_double(v); }},
        {"pathloss_intercept_db", [](auto& c, const auto& v) { c.prop.pathloss_intercept_db = to_double(v); }},
        {"pathloss_slope_db", [](auto& c, const auto& v) { c.prop.pathloss_slope_db = to_double(v); }},
        {"shadow_sigma_db", [](auto& c, const auto& v) { c.prop.shadow_sigma_db = to_double(v); }},
        {"min_distance", [](auto& c, const auto& v) { c.prop.min_distance = to_double(v); }},
        {"wraparound", [](auto& c, const auto& v) { c.prop.wraparound = to_bool(v); }},
        {"p_ue", [](auto& c, const auto& v) { c.prop.ue_power = to_double(v); }},
        {"noise_figure_db", [](auto& c, const auto& v) { c.prop.noise_figure_db = to_double(v); }},
        {"pilot_assignment",
         [](auto& c, const auto& v) {
             c.pilot_policy = to_enum<PilotPolicy>(
                 v, {{"round_robin", PilotPolicy::round_robin}, {"greedy", PilotPolicy::greedy}});
         }},
        {"estimators", [](auto& c, const auto& v) { c.estimators = to_enum_list(v, kEstimators); }},
        {"schemes", [](auto& c, const auto& v) { c.schemes = to_enum_list(v, kSchemes); }},
        {"ici_mode",
         [](auto& c, const auto& v) {
             c.ici_model = to_enum<IciModel>(
                 v, {{"as_printed", IciModel::as_printed}, {"independent_data", IciModel::independent_data}});
         }},
        {"ici_synthesis",
         [](auto& c, const auto& v) {
             c.ici_synthesis = to_enum<IciSynthesis>(
                 v, {{"exact", IciSynthesis::exact}, {"gaussian_ici", IciSynthesis::gaussian}});
         }},
        {"cp_consistent_correlation",
         [](auto& c, const auto& v) { c.stride = to_bool(v) ? StrideMode::cp_consistent : StrideMode::fft_length; }},
        {"data_symbols",
         [](auto& c, const auto& v) {
             c.data_symbols =
                 to_enum<DataSymbols>(v, {{"gaussian", DataSymbols::gaussian}, {"qpsk", DataSymbols::qpsk}});
         }},
        {"phase_noise",
         [](auto& c, const auto& v) {
             if (v == "both")
                 c.phase_noise = {true, false};
             else
                 c.phase_noise = {to_bool(v)};
         }},
        {"channel_uses",
         [](auto& c, const auto& v) { c.channel_uses = v == "all" ? std::vector<int>{} : to_int_list(v); }},
        {"n_geometries", [](auto& c, const auto& v) { c.n_geometries = to_int(v); }},
        {"n_trials", [](auto& c, const auto& v) { c.n_trials = to_int(v); }},
        {"min_trials", [](auto& c, const auto& v) { c.min_trials = to_int(v); }},
        {"max_invalid_fraction", [](auto& c, const auto& v) { c.max_invalid_fraction = to_double(v); }},
        {"master_seed", [](auto& c, const auto& v) { c.master_seed = to_seed(v); }},
        {"output", [](auto& c, const auto& v) { c.output = v == "-" ? std::string() : v; }},
    };
    return table;
}

void assign(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line) {
    const auto& table = setters();
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown key '" + key + "'", line);
    try {
        it->second(cfg, value);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key + ": " + e.what(), line);
    }
}

template <typename T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (const auto& x : xs) {
        if (!out.empty()) out += ", ";
        if constexpr (std::is_same_v<T, int>)
            out += std::to_string(x);
        else
            out += to_string(x);
    }
    return out;
}

}  // namespace

std::string to_string(Estimator e) {
    switch (e) {
        case Estimator::pna_ofdm: return "pna_ofdm";
        case Estimator::pna_sc: return "pna_sc";
        case Estimator::unaware: return "unaware";
    }
    return "?";
}

std::string to_string(IciModel m) { return m == IciModel::as_printed ? "as_printed" : "independent_data"; }

void ExperimentConfig::validate() const {
    layout.validate();
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(n_geometries >= 1, "n_geometries must be >= 1");
    require(n_trials >= 1, "n_trials must be >= 1");
    require(min_trials >= 1, "min_trials must be >= 1");
    require(n_trials >= min_trials, "n_trials must be >= min_trials");
    require(max_invalid_fraction >= 0.0, "max_invalid_fraction must be >= 0");
    require(pn.carrier_frequency >= 0 && pn.gamma_ap >= 0 && pn.gamma_ue >= 0, "PN parameters must be >= 0");
    require(prop.ue_power > 0, "p_ue must be > 0");
    require(prop.min_distance > 0, "min_distance must be > 0");
    require(prop.shadow_sigma_db >= 0, "shadow_sigma_db must be >= 0");
    require(!estimators.empty() && !schemes.empty() && !phase_noise.empty(), "estimator, scheme and PN lists must be non-empty");
    for (int c : channel_uses)
        require(c >= 1 && c <= layout.channel_uses_per_block(),
                "channel use " + std::to_string(c) + " outside [1, N_c * tau_c]");
    for (int k : ue_counts) require(k >= 1, "K_sweep entries must be >= 1");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
    std::string raw;
    int line = 0;
    bool n_set = false;
    bool cp_set = false;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key", line);
        if (value.empty()) throw ConfigError("missing value for '" + key + "'", line);
        assign(base, key, value, line);
        n_set |= key == "N";
        cp_set |= key == "N_cp";
    }
    if (n_set && !cp_set) base.layout.cp_length = default_cp_length(base.layout.num_subcarriers);
    return base;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = trim(assignment.substr(0, eq));
    assign(cfg, key, trim(assignment.substr(eq + 1)), 0);
    if (key == "N") cfg.layout.cp_length = default_cp_length(cfg.layout.num_subcarriers);
}

void echo_config(std::ostream& os, const ExperimentConfig& c) {
    const auto& y = c.layout;
    auto num = [](double x) { return csv_number(x); };
    PnParams pn = c.pn;
    pn.sample_time = y.sample_time();
    os << "experiment = " << c.experiment << '\n'
       << "N = " << y.num_subcarriers << '\n'
       << "N_cp = " << y.cp_length << '\n'
       << "delta_f = " << num(y.subcarrier_spacing) << '\n'
       << "N_c = " << y.block_subcarriers << '\n'
       << "tau_c = " << y.block_symbols << '\n'
       << "tau_p = " << y.pilot_length << '\n'
       << "pilot_subcarriers = " << join(y.pilot_subcarriers) << '\n'
       << "pilot_symbols = " << join(y.pilot_symbols) << '\n'
       << "L = " << y.num_aps << '\n'
       << "K = " << y.num_ues << '\n'
       << "K_sweep = " << (c.ue_counts.empty() ? std::string("none") : join(c.ue_counts)) << '\n'
       << "area_side = " << num(y.area_side) << '\n'
       << "f_c = " << num(c.pn.carrier_frequency) << '\n'
       << "gamma_ap = " << num(c.pn.gamma_ap) << '\n'
       << "gamma_ue = " << num(c.pn.gamma_ue) << '\n'
       << "pathloss_intercept_db = " << num(c.prop.pathloss_intercept_db) << '\n'
       << "pathloss_slope_db = " << num(c.prop.pathloss_slope_db) << '\n'
       << "shadow_sigma_db = " << num(c.prop.shadow_sigma_db) << '\n'
       << "min_distance = " << num(c.prop.min_distance) << '\n'
       << "wraparound = " << (c.prop.wraparound ? "true" : "false") << '\n'
       << "p_ue = " << num(c.prop.ue_power) << '\n'
       << "noise_figure_db = " << num(c.prop.noise_figure_db) << '\n'
       << "pilot_assignment = " << (c.pilot_policy == PilotPolicy::greedy ? "greedy" : "round_robin") << '\n'
       << "estimators = " << join(c.estimators) << '\n'
       << "schemes = " << join(c.schemes) << '\n'
       << "ici_mode = " << to_string(c.ici_model) << '\n'
       << "ici_synthesis = " << (c.ici_synthesis == IciSynthesis::exact ? "exact" : "gaussian_ici") << '\n'
       << "cp_consistent_correlation = " << (c.stride == StrideMode::cp_consistent ? "true" : "false") << '\n'
       << "data_symbols = " << (c.data_symbols == DataSymbols::qpsk ? "qpsk" : "gaussian") << '\n'
       << "phase_noise = "
       << (c.phase_noise.size() > 1 ? "both" : (c.phase_noise.front() ? "on" : "off")) << '\n'
       << "channel_uses = " << (c.channel_uses.empty() ? std::string("all") : join(c.channel_uses)) << '\n'
       << "n_geometries = " << c.n_geometries << '\n'
       << "n_trials = " << c.n_trials << '\n'
       << "min_trials = " << c.min_trials << '\n'
       << "max_invalid_fraction = " << num(c.max_invalid_fraction) << '\n'
       << "master_seed = " << c.master_seed << '\n'
       << "output = " << (c.output.empty() ? std::string("-") : c.output) << '\n'
       << "# derived: bandwidth_hz = " << num(y.bandwidth()) << '\n'
       << "# derived: sample_time_s = " << num(y.sample_time()) << '\n'
       << "# derived: blocks_per_symbol = " << y.num_blocks() << '\n'
       << "# derived: pn_variance_ap = " << num(pn.sigma2_ap()) << '\n'
       << "# derived: pn_variance_ue = " << num(pn.sigma2_ue()) << '\n'
       << "# derived: noise_power_w = " << num(c.prop.noise_power(y.bandwidth())) << '\n';
}

ExperimentConfig preset_fig2() {
    ExperimentConfig c;
    c.experiment = "fig2";
    c.phase_noise = {true, false};
    return c;
}

ExperimentConfig preset_fig3() {
    ExperimentConfig c;
    c.experiment = "fig3";
    c.ue_counts = {1, 6, 10, 20, 100};
    c.channel_uses = {60};
    return c;
}

ExperimentConfig preset_ci() {
    ExperimentConfig c;
    c.experiment = "ci";
    auto& y = c.layout;
    y.num_subcarriers = 120;
    y.cp_length = default_cp_length(120);
    y.block_subcarriers = 12;
    y.block_symbols = 5;
    y.pilot_length = 4;
    y.pilot_subcarriers = {0};
    y.pilot_symbols = {1, 2, 3, 4};
    y.num_aps = 30;
    y.num_ues = 5;
    c.prop.shadow_sigma_db = 0.0;
    c.n_geometries = 5;
    c.n_trials = 50;
    return c;
}

}  // namespace pnsim
