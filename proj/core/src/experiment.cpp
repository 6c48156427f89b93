// SPDX-License-Identifier: Apache-2.0
//
// dsce-sim: link-level simulation of FDD FD-MIMO downlink CSIT acquisition
// via directional spatial channel estimation.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "dsce/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace dsce
{

namespace
{

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_list(const std::vector<double> &values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (i)
            out += ",";
        out += fmt_double(values[i]);
    }
    return out;
}

std::string fmt_arrays(const std::vector<ArraySize> &values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (i)
            out += ",";
        out += std::to_string(values[i].n_h) + "x" + std::to_string(values[i].n_v);
    }
    return out;
}

std::string fmt_strings(const std::vector<std::string> &values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (i)
            out += ",";
        out += values[i];
    }
    return out;
}

std::string trim(const std::string &s)
{
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string &s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream stream(s);
    while (std::getline(stream, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

[[noreturn]] void bad_key(const std::string &key, const std::string &why)
{
    throw std::invalid_argument("config key '" + key + "': " + why);
}

double parse_double(const std::string &key, const std::string &value)
{
    std::size_t pos = 0;
    double v = 0.0;
    try
    {
        v = std::stod(value, &pos);
    }
    catch (const std::exception &)
    {
        bad_key(key, "expected a number, got '" + value + "'");
    }
    if (pos != value.size())
        bad_key(key, "expected a number, got '" + value + "'");
    return v;
}

int parse_int(const std::string &key, const std::string &value)
{
    const double v = parse_double(key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        bad_key(key, "expected an integer, got '" + value + "'");
    return i;
}

std::uint64_t parse_u64(const std::string &key, const std::string &value)
{
    try
    {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("trailing characters");
        return v;
    }
    catch (const std::exception &)
    {
        bad_key(key, "expected an unsigned integer, got '" + value + "'");
    }
}

std::vector<double> parse_double_list(const std::string &key, const std::string &value)
{
    std::vector<double> out;
    for (const std::string &item : split_list(value))
        out.push_back(parse_double(key, item));
    if (out.empty())
        bad_key(key, "expected a non-empty comma-separated list");
    return out;
}

std::vector<ArraySize> parse_array_list(const std::string &key, const std::string &value)
{
    std::vector<ArraySize> out;
    for (const std::string &item : split_list(value))
    {
        const auto x = item.find('x');
        if (x == std::string::npos)
            bad_key(key, "expected entries like 8x8, got '" + item + "'");
        ArraySize a;
        a.n_h = parse_int(key, item.substr(0, x));
        a.n_v = parse_int(key, item.substr(x + 1));
        out.push_back(a);
    }
    if (out.empty())
        bad_key(key, "expected a non-empty comma-separated list");
    return out;
}

} // namespace

ScenarioConfig ExperimentConfig::scenario() const
{
    ScenarioConfig scen;
    scen.array.n_h = n_h;
    scen.array.n_v = n_v;
    scen.array.delta_h = delta_h;
    scen.array.delta_v = delta_v;
    scen.array.f_ul_hz = f_ul_hz;
    scen.array.f_dl_hz = f_ul_hz + omega_hz;
    scen.m_r = m_r;
    scen.ue_delta = ue_delta;
    scen.k_users = k_users;
    scen.d_streams = d_streams;
    scen.los_probability = los_probability;
    scen.clusters_los = clusters_los;
    scen.clusters_nlos = clusters_nlos;
    scen.rays_per_cluster = rays_per_cluster;
    scen.ray_spread_az_deg = ray_spread_az_deg;
    scen.ray_spread_el_deg = ray_spread_el_deg;
    scen.cluster_elevation_spread_deg = cluster_elevation_spread_deg;
    scen.cluster_delay_spread_ns = cluster_delay_spread_ns;
    scen.ray_delay_spread_ns = ray_delay_spread_ns;
    scen.cluster_shadow_db = cluster_shadow_db;
    scen.cluster_power_decay = cluster_power_decay;
    scen.pathloss_exponent = pathloss_exponent;
    scen.propagation_constant = propagation_constant;
    scen.shadow_sigma_db = shadow_sigma_db;
    scen.cell_radius_m = cell_radius_m;
    scen.speed_kmh = speed_kmh;
    return scen;
}

DsceConfig ExperimentConfig::dsce() const
{
    DsceConfig cfg;
    cfg.q = q;
    cfg.u = u;
    cfg.rotation_mode = rotation_mode == "paper-diagonal" ? RotationMode::paper_diagonal
                                                          : RotationMode::regenerate_at_dl;
    cfg.mmse_noise_var = mmse_noise_var;
    cfg.capon_loading = capon_loading;
    return cfg;
}

SweepConfig ExperimentConfig::sweep_config() const
{
    SweepConfig cfg;
    cfg.scenario = scenario();
    cfg.dsce = dsce();
    cfg.estimators = estimators;
    cfg.snr_grid_db = snr_grid_db;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.ecsirs_l = ecsirs_l;
    cfg.ecsirs_bits = ecsirs_bits;
    cfg.kp_t_count = kp_t_count;
    cfg.kp_elevation_words = kp_elevation_words;
    cfg.rvq_bits = rvq_bits;
    if (sweep == "q")
    {
        cfg.sweep_variable = SweepVariable::q;
        cfg.sweep_points = q_list;
    }
    else if (sweep == "u")
    {
        cfg.sweep_variable = SweepVariable::u;
        cfg.sweep_points = u_list;
    }
    else if (sweep == "ul_error")
    {
        cfg.sweep_variable = SweepVariable::ul_error_var;
        cfg.sweep_points = ul_error_list;
    }
    else if (sweep == "array")
    {
        cfg.sweep_variable = SweepVariable::array_size;
        cfg.array_points = array_list;
    }
    return cfg;
}

void ExperimentConfig::validate() const
{
    static const std::set<std::string> presets{"fig2", "fig5", "fig6", "fig7",
                                               "fig8", "fig9", "custom"};
    if (presets.find(preset) == presets.end())
        bad_key("preset", "unknown preset '" + preset + "'");
    if (trials < 1)
        bad_key("trials", "must be >= 1");
    if (threads < 0)
        bad_key("threads", "must be >= 0");
    if (n_h < 1)
        bad_key("n_h", "must be >= 1");
    if (n_v < 1)
        bad_key("n_v", "must be >= 1");
    if (!(delta_h > 0.0))
        bad_key("delta_h", "must be > 0");
    if (!(delta_v > 0.0))
        bad_key("delta_v", "must be > 0");
    if (!(f_ul_hz > 0.0))
        bad_key("f_ul_hz", "must be > 0");
    if (omega_hz < 0.0)
        bad_key("omega_hz", "must be >= 0");
    if (m_r < 1)
        bad_key("m_r", "must be >= 1");
    if (!(ue_delta > 0.0))
        bad_key("ue_delta", "must be > 0");
    if (k_users < 1)
        bad_key("k_users", "must be >= 1");
    if (d_streams < 1 || d_streams > 2)
        bad_key("d_streams", "must be 1 or 2");
    if (q < 1)
        bad_key("q", "must be >= 1");
    if (u < 1)
        bad_key("u", "must be >= 1");
    if (rotation_mode != "regenerate-at-dl" && rotation_mode != "paper-diagonal")
        bad_key("rotation_mode", "must be regenerate-at-dl or paper-diagonal");
    if (mmse_noise_var < 0.0)
        bad_key("mmse_noise_var", "must be >= 0");
    if (snr_grid_db.empty())
        bad_key("snr_grid_db", "must be non-empty");
    if (sweep != "none" && sweep != "q" && sweep != "u" && sweep != "ul_error" && sweep != "array")
        bad_key("sweep", "must be one of none|q|u|ul_error|array");
    if (estimators.empty())
        bad_key("estimators", "must be non-empty");
    if (los_probability < 0.0 || los_probability > 1.0)
        bad_key("los_probability", "must be in [0, 1]");
    if (clusters_los < 1)
        bad_key("clusters_los", "must be >= 1");
    if (clusters_nlos < 1)
        bad_key("clusters_nlos", "must be >= 1");
    if (rays_per_cluster < 1)
        bad_key("rays_per_cluster", "must be >= 1");
    if (ecsirs_l < 1)
        bad_key("ecsirs_l", "must be >= 1");
    if (ecsirs_bits < 0)
        bad_key("ecsirs_bits", "must be >= 0");
    if (kp_t_count < 1)
        bad_key("kp_t_count", "must be >= 1");
    if (kp_elevation_words < 1)
        bad_key("kp_elevation_words", "must be >= 1");
    if (rvq_bits < 0)
        bad_key("rvq_bits", "must be >= 0");
    // Cross-field checks route through the library validators.
    scenario().validate();
    sweep_config().validate();
}

namespace
{

// One handler pair per key; the canonical order is the order of this table.
struct KeyHandler
{
    std::function<void(ExperimentConfig &, const std::string &)> set;
    std::function<std::string(const ExperimentConfig &)> get;
};

const std::vector<std::pair<std::string, KeyHandler>> &key_table()
{
    static const std::vector<std::pair<std::string, KeyHandler>> table = {
        {"preset",
         {[](ExperimentConfig &c, const std::string &v) { c.preset = v; },
          [](const ExperimentConfig &c) { return c.preset; }}},
        {"out_dir",
         {[](ExperimentConfig &c, const std::string &v) { c.out_dir = v; },
          [](const ExperimentConfig &c) { return c.out_dir; }}},
        {"seed",
         {[](ExperimentConfig &c, const std::string &v) { c.seed = parse_u64("seed", v); },
          [](const ExperimentConfig &c) { return std::to_string(c.seed); }}},
        {"trials",
         {[](ExperimentConfig &c, const std::string &v) { c.trials = parse_int("trials", v); },
          [](const ExperimentConfig &c) { return std::to_string(c.trials); }}},
        {"threads",
         {[](ExperimentConfig &c, const std::string &v) { c.threads = parse_int("threads", v); },
          [](const ExperimentConfig &c) { return std::to_string(c.threads); }}},
        {"n_h",
         {[](ExperimentConfig &c, const std::string &v) { c.n_h = parse_int("n_h", v); },
          [](const ExperimentConfig &c) { return std::to_string(c.n_h); }}},
        {"n_v",
         {[](ExperimentConfig &c, const std::string &v) { c.n_v = parse_int("n_v", v); },
          [](const ExperimentConfig &c) { return std::to_string(c.n_v); }}},
        {"delta_h",
         {[](ExperimentConfig &c, const std::string &v) { c.delta_h = parse_double("delta_h", v); },
          [](const ExperimentConfig &c) { return fmt_double(c.delta_h); }}},
        {"delta_v",
         {[](ExperimentConfig &c, const std::string &v) { c.delta_v = parse_double("delta_v", v); },
          [](const ExperimentConfig &c) { return fmt_double(c.delta_v); }}},
        {"f_ul_hz",
         {[](ExperimentConfig &c, const std::string &v) { c.f_ul_hz = parse_double("f_ul_hz", v); },
          [](const ExperimentConfig &c) { return fmt_double(c.f_ul_hz); }}},
        {"omega_hz",
         {[](ExperimentConfig &c, const std::string &v) { c.omega_hz = parse_double("omega_hz", v); },
          [](const ExperimentConfig &c) { return fmt_double(c.omega_hz); }}},
        {"m_r",
         {[](ExperimentConfig &c, const std::string &v) { c.m_r = parse_int("m_r", v); },
          [](const ExperimentConfig &c) { return std::to_string(c.m_r); }}},
        {"ue_delta",
         {[](ExperimentConfig &c, const std::string &v) { c.ue_delta = parse_double("ue_delta", v); },
          [](const ExperimentConfig &c) { return fmt_double(c.ue_delta); }}},
        {"k_users",
         {[](ExperimentConfig &c, const std::string &v) { c.k_users = parse_int("k_users", v); },
          [](const ExperimentConfig &c) { return std::to_string(c.k_users); }}},
        {"d_streams",
         {[](ExperimentConfig &c, const std::string &v) { c.d_streams = parse_int("d_streams", v); },
          [](const ExperimentConfig &c) { return std::to_string(c.d_streams); }}},
        {"q",
         {[](ExperimentConfig &c, const std::string &v) { c.q = parse_int("q", v); },
          [](const ExperimentConfig &c) { return std::to_string(c.q); }}},
        {"u",
         {[](ExperimentConfig &c, const std::string &v) { c.u = parse_int("u", v); },
          [](const ExperimentConfig &c) { return std::to_string(c.u); }}},
        {"rotation_mode",
         {[](ExperimentConfig &c, const std::string &v) { c.rotation_mode = v; },
          [](const ExperimentConfig &c) { return c.rotation_mode; }}},
        {"mmse_noise_var",
         {[](ExperimentConfig &c, const std::string &v) {
              c.mmse_noise_var = parse_double("mmse_noise_var", v);
          },
          [](const ExperimentConfig &c) { return fmt_double(c.mmse_noise_var); }}},
        {"capon_loading",
         {[](ExperimentConfig &c, const std::string &v) {
              c.capon_loading = (v == "auto") ? kAutoLoading : parse_double("capon_loading", v);
              if (v != "auto" && c.capon_loading < 0.0)
                  bad_key("capon_loading", "must be >= 0 or 'auto'");
          },
          [](const ExperimentConfig &c) {
              return c.capon_loading < 0.0 ? std::string("auto") : fmt_double(c.capon_loading);
          }}},
        {"estimators",
         {[](ExperimentConfig &c, const std::string &v) { c.estimators = split_list(v); },
          [](const ExperimentConfig &c) { return fmt_strings(c.estimators); }}},
        {"snr_grid_db",
         {[](ExperimentConfig &c, const std::string &v) {
              c.snr_grid_db = parse_double_list("snr_grid_db", v);
          },
          [](const ExperimentConfig &c) { return fmt_list(c.snr_grid_db); }}},
        {"sweep",
         {[](ExperimentConfig &c, const std::string &v) { c.sweep = v; },
          [](const ExperimentConfig &c) { return c.sweep; }}},
        {"q_list",
         {[](ExperimentConfig &c, const std::string &v) { c.q_list = parse_double_list("q_list", v); },
          [](const ExperimentConfig &c) { return fmt_list(c.q_list); }}},
        {"u_list",
         {[](ExperimentConfig &c, const std::string &v) { c.u_list = parse_double_list("u_list", v); },
          [](const ExperimentConfig &c) { return fmt_list(c.u_list); }}},
        {"ul_error_list",
         {[](ExperimentConfig &c, const std::string &v) {
              c.ul_error_list = parse_double_list("ul_error_list", v);
          },
          [](const ExperimentConfig &c) { return fmt_list(c.ul_error_list); }}},
        {"array_list",
         {[](ExperimentConfig &c, const std::string &v) {
              c.array_list = parse_array_list("array_list", v);
          },
          [](const ExperimentConfig &c) { return fmt_arrays(c.array_list); }}},
        {"omega_list_hz",
         {[](ExperimentConfig &c, const std::string &v) {
              c.omega_list_hz = parse_double_list("omega_list_hz", v);
          },
          [](const ExperimentConfig &c) { return fmt_list(c.omega_list_hz); }}},
        {"los_probability",
         {[](ExperimentConfig &c, const std::string &v) {
              c.los_probability = parse_double("los_probability", v);
          },
          [](const ExperimentConfig &c) { return fmt_double(c.los_probability); }}},
        {"clusters_los",
         {[](ExperimentConfig &c, const std::string &v) {
              c.clusters_los = parse_int("clusters_los", v);
          },
          [](const ExperimentConfig &c) { return std::to_string(c.clusters_los); }}},
        {"clusters_nlos",
         {[](ExperimentConfig &c, const std::string &v) {
              c.clusters_nlos = parse_int("clusters_nlos", v);
          },
          [](const ExperimentConfig &c) { return std::to_string(c.clusters_nlos); }}},
        {"rays_per_cluster",
         {[](ExperimentConfig &c, const std::string &v) {
              c.rays_per_cluster = parse_int("rays_per_cluster", v);
          },
          [](const ExperimentConfig &c) { return std::to_string(c.rays_per_cluster); }}},
        {"ray_spread_az_deg",
         {[](ExperimentConfig &c, const std::string &v) {
              c.ray_spread_az_deg = parse_double("ray_spread_az_deg", v);
          },
          [](const ExperimentConfig &c) { return fmt_double(c.ray_spread_az_deg); }}},
        {"ray_spread_el_deg",
         {[](ExperimentConfig &c, const std::string &v) {
              c.ray_spread_el_deg = parse_double("ray_spread_el_deg", v);
          },
          [](const ExperimentConfig &c) { return fmt_double(c.ray_spread_el_deg); }}},
        {"cluster_elevation_spread_deg",
         {[](ExperimentConfig &c, const std::string &v) {
              c.cluster_elevation_spread_deg = parse_double("cluster_elevation_spread_deg", v);
          },
          [](const ExperimentConfig &c) { return fmt_double(c.cluster_elevation_spread_deg); }}},
        {"cluster_delay_spread_ns",
         {[](ExperimentConfig &c, const std::string &v) {
              c.cluster_delay_spread_ns = parse_double("cluster_delay_spread_ns", v);
          },
          [](const ExperimentConfig &c) { return fmt_double(c.cluster_delay_spread_ns); }}},
        {"ray_delay_spread_ns",
         {[](ExperimentConfig &c, const std::string &v) {
              c.ray_delay_spread_ns = parse_double("ray_delay_spread_ns", v);
          },
          [](const ExperimentConfig &c) { return fmt_double(c.ray_delay_spread_ns); }}},
        {"cluster_shadow_db",
         {[](ExperimentConfig &c, const std::string &v) {
              c.cluster_shadow_db = parse_double("cluster_shadow_db", v);
          },
          [](const ExperimentConfig &c) { return fmt_double(c.cluster_shadow_db); }}},
        {"cluster_power_decay",
         {[](ExperimentConfig &c, const std::string &v) {
              c.cluster_power_decay = parse_double("cluster_power_decay", v);
          },
          [](const ExperimentConfig &c) { return fmt_double(c.cluster_power_decay); }}},
        {"pathloss_exponent",
         {[](ExperimentConfig &c, const std::string &v) {
              c.pathloss_exponent = parse_double("pathloss_exponent", v);
          },
          [](const ExperimentConfig &c) { return fmt_double(c.pathloss_exponent); }}},
        {"propagation_constant",
         {[](ExperimentConfig &c, const std::string &v) {
              c.propagation_constant = parse_double("propagation_constant", v);
          },
          [](const ExperimentConfig &c) { return fmt_double(c.propagation_constant); }}},
        {"shadow_sigma_db",
         {[](ExperimentConfig &c, const std::string &v) {
              c.shadow_sigma_db = parse_double("shadow_sigma_db", v);
          },
          [](const ExperimentConfig &c) { return fmt_double(c.shadow_sigma_db); }}},
        {"cell_radius_m",
         {[](ExperimentConfig &c, const std::string &v) {
              c.cell_radius_m = parse_double("cell_radius_m", v);
          },
          [](const ExperimentConfig &c) { return fmt_double(c.cell_radius_m); }}},
        {"speed_kmh",
         {[](ExperimentConfig &c, const std::string &v) {
              c.speed_kmh = parse_double("speed_kmh", v);
          },
          [](const ExperimentConfig &c) { return fmt_double(c.speed_kmh); }}},
        {"ecsirs_l",
         {[](ExperimentConfig &c, const std::string &v) { c.ecsirs_l = parse_int("ecsirs_l", v); },
          [](const ExperimentConfig &c) { return std::to_string(c.ecsirs_l); }}},
        {"ecsirs_bits",
         {[](ExperimentConfig &c, const std::string &v) {
              c.ecsirs_bits = parse_int("ecsirs_bits", v);
          },
          [](const ExperimentConfig &c) { return std::to_string(c.ecsirs_bits); }}},
        {"kp_t_count",
         {[](ExperimentConfig &c, const std::string &v) { c.kp_t_count = parse_int("kp_t_count", v); },
          [](const ExperimentConfig &c) { return std::to_string(c.kp_t_count); }}},
        {"kp_elevation_words",
         {[](ExperimentConfig &c, const std::string &v) {
              c.kp_elevation_words = parse_int("kp_elevation_words", v);
          },
          [](const ExperimentConfig &c) { return std::to_string(c.kp_elevation_words); }}},
        {"rvq_bits",
         {[](ExperimentConfig &c, const std::string &v) { c.rvq_bits = parse_int("rvq_bits", v); },
          [](const ExperimentConfig &c) { return std::to_string(c.rvq_bits); }}},
    };
    return table;
}

} // namespace

ExperimentConfig parse_config_text(const std::string &text)
{
    ExperimentConfig config;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line))
    {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        bool found = false;
        for (const auto &[name, handler] : key_table())
            if (name == key)
            {
                handler.set(config, value);
                found = true;
                break;
            }
        if (!found)
            throw std::invalid_argument("config key '" + key + "': unknown key");
    }
    config.validate();
    return config;
}

ExperimentConfig parse_config_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot read config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

std::string serialize_config(const ExperimentConfig &config)
{
    std::string out;
    for (const auto &[name, handler] : key_table())
    {
        out += name;
        out += " = ";
        out += handler.get(config);
        out += "\n";
    }
    return out;
}

std::string config_hash(const ExperimentConfig &config)
{
    const std::string text = serialize_config(config);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char ch : text)
    {
        hash ^= ch;
        hash *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

void write_se_csv(const std::string &path, const SeResult &result)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "estimator,sweep_var,snr_db,mean_se,stderr,trials\n";
    for (const SeCell &cell : result.cells)
        out << cell.estimator << ',' << cell.sweep_label << ',' << fmt_double(cell.snr_db) << ','
            << fmt_double(cell.mean_se) << ',' << fmt_double(cell.std_error) << ',' << cell.trials
            << '\n';
}

void write_ecdf_csv(const std::string &path, const std::map<double, EcdfTable> &tables)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "omega_hz,rho,cdf\n";
    for (const auto &[omega, table] : tables)
        for (arma::uword i = 0; i < table.values.n_elem; ++i)
            out << fmt_double(omega) << ',' << fmt_double(table.values(i)) << ','
                << fmt_double(table.probs(i)) << '\n';
}

void write_spectrum_csv(const std::string &path, const SpatialSpectrum &spectrum)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "theta_deg,phi_deg,power\n";
    for (arma::uword u = 0; u < spectrum.phi_deg.n_elem; ++u)
        for (arma::uword q = 0; q < spectrum.theta_deg.n_elem; ++q)
            out << fmt_double(spectrum.theta_deg(q)) << ',' << fmt_double(spectrum.phi_deg(u))
                << ',' << fmt_double(spectrum.values(q, u)) << '\n';
}

namespace
{

void write_manifest(const std::string &path, const ExperimentConfig &config,
                    const std::vector<std::string> &outputs)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "{\n";
    out << "  \"preset\": \"" << config.preset << "\",\n";
    out << "  \"seed\": " << config.seed << ",\n";
    out << "  \"trials\": " << config.trials << ",\n";
    out << "  \"config_hash\": \"" << config_hash(config) << "\",\n";
    out << "  \"version\": \"0.1.0\",\n";
    out << "  \"outputs\": [";
    for (std::size_t i = 0; i < outputs.size(); ++i)
        out << (i ? ", " : "") << '"' << outputs[i] << '"';
    out << "],\n";
    out << "  \"config\": [\n";
    const std::string canonical = serialize_config(config);
    std::istringstream lines(canonical);
    std::string line;
    bool first = true;
    while (std::getline(lines, line))
    {
        if (!first)
            out << ",\n";
        out << "    \"" << line << '"';
        first = false;
    }
    out << "\n  ]\n}\n";
}

ExperimentConfig apply_preset(const std::string &name, ExperimentConfig config)
{
    config.preset = name;
    if (name == "fig2")
    {
        // correlation experiment; trials interpreted as channel pairs
    }
    else if (name == "fig5")
    {
        config.sweep = "array";
        config.d_streams = 2;
        config.estimators = {"perfect", "dsce"};
    }
    else if (name == "fig6")
    {
        config.sweep = "none";
        config.d_streams = 1;
        config.estimators = {"perfect", "dsce", "ecsirs", "kp", "fmmsce2d", "rvq2d"};
    }
    else if (name == "fig7")
    {
        config.sweep = "ul_error";
        config.d_streams = 1;
        config.estimators = {"perfect", "dsce"};
    }
    else if (name == "fig8")
    {
        config.sweep = "q";
        config.d_streams = 1;
        config.estimators = {"perfect", "dsce"};
    }
    else if (name == "fig9")
    {
        config.sweep = "u";
        config.d_streams = 1;
        config.estimators = {"perfect", "dsce"};
    }
    else if (name != "custom")
    {
        throw std::invalid_argument("run_preset: unknown preset '" + name + "'");
    }
    config.validate();
    return config;
}

} // namespace

std::string run_preset(const std::string &name, const ExperimentConfig &base,
                       const std::string &out_dir)
{
    const ExperimentConfig config = apply_preset(name, base);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + out_dir + ": " + ec.message());

    std::string csv_path;
    if (name == "fig2")
    {
        const auto tables = correlation_experiment(config.scenario(), config.omega_list_hz,
                                                   config.trials, config.seed, config.q, config.u,
                                                   config.threads);
        csv_path = (std::filesystem::path(out_dir) / (name + "_ecdf.csv")).string();
        write_ecdf_csv(csv_path, tables);
    }
    else
    {
        const SeResult result = run_sweep(config.sweep_config());
        csv_path = (std::filesystem::path(out_dir) / (name + "_se.csv")).string();
        write_se_csv(csv_path, result);
    }

    const std::string manifest =
        (std::filesystem::path(out_dir) / (name + "_manifest.json")).string();
    write_manifest(manifest, config, {std::filesystem::path(csv_path).filename().string()});
    emit_plot_script(csv_path, name);
    return csv_path;
}

std::string emit_plot_script(const std::string &result_csv, const std::string &preset)
{
    std::ifstream in(result_csv);
    if (!in)
        throw std::invalid_argument("emit_plot_script: cannot read " + result_csv);
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r')
        header.pop_back();

    const bool is_ecdf = preset == "fig2";
    const std::vector<std::string> expected =
        is_ecdf ? std::vector<std::string>{"omega_hz", "rho", "cdf"}
                : std::vector<std::string>{"estimator", "sweep_var", "snr_db",
                                           "mean_se",   "stderr",    "trials"};
    const std::vector<std::string> columns = split_list(header);
    for (const std::string &col : expected)
        if (std::find(columns.begin(), columns.end(), col) == columns.end())
            throw std::invalid_argument("emit_plot_script: CSV schema mismatch, missing column '" +
                                        col + "'");

    const std::filesystem::path csv(result_csv);
    const std::string script_path = (csv.parent_path() / (csv.stem().string() + ".gp")).string();
    const std::string csv_name = csv.filename().string();

    std::ofstream out(script_path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + script_path);

    // Enumerate the distinct series from the data so the script stands alone.
    std::vector<std::string> series;
    std::set<std::string> seen;
    std::string line;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        const auto c1 = line.find(',');
        if (c1 == std::string::npos)
            continue;
        std::string key = line.substr(0, c1);
        if (!is_ecdf)
        {
            const auto c2 = line.find(',', c1 + 1);
            key = line.substr(0, c2);
        }
        if (seen.insert(key).second)
            series.push_back(key);
    }

    out << "# gnuplot script generated for preset " << preset << "\n";
    out << "set datafile separator ','\n";
    out << "set key bottom right\n";
    out << "set grid\n";
    if (is_ecdf)
    {
        out << "set xlabel 'spectral correlation rho'\n";
        out << "set ylabel 'ECDF'\n";
        out << "plot \\\n";
        for (std::size_t i = 0; i < series.size(); ++i)
            out << "  '" << csv_name << "' using (strcol(1) eq '" << series[i]
                << "' ? $2 : 1/0):3 with steps title 'omega = " << series[i] << " Hz'"
                << (i + 1 < series.size() ? ", \\\n" : "\n");
    }
    else
    {
        out << "set xlabel 'SNR (dB)'\n";
        out << "set ylabel 'sum spectral efficiency (bits/s/Hz)'\n";
        out << "plot \\\n";
        for (std::size_t i = 0; i < series.size(); ++i)
        {
            const auto comma = series[i].find(',');
            const std::string est = series[i].substr(0, comma);
            const std::string sweep = series[i].substr(comma + 1);
            const std::string title = sweep == "-" ? est : est + " (" + sweep + ")";
            out << "  '" << csv_name << "' using (strcol(1) eq '" << est
                << "' && strcol(2) eq '" << sweep << "' ? $3 : 1/0):4:5 with yerrorlines title '"
                << title << "'" << (i + 1 < series.size() ? ", \\\n" : "\n");
        }
    }
    return script_path;
}

} // namespace dsce
