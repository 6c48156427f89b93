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

#ifndef DSCE_EXPERIMENT_HPP
#define DSCE_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "dsce/link.hpp"

namespace dsce
{

/// Flat, declarative mirror of the scenario / estimator / sweep knobs.
/// Parsed from `key = value` text with `#` comments; unknown keys are
/// rejected and every key has a default matching the bundled scenario
/// parameters (8x8 URA at 0.5 lambda, 2x1 UE, Q=120, U=4, 30 km/h).
struct ExperimentConfig
{
    std::string preset = "custom"; // fig2|fig5|fig6|fig7|fig8|fig9|custom
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int trials = 500;
    int threads = 0;

    // array
    int n_h = 8, n_v = 8;
    double delta_h = 0.5, delta_v = 0.5;
    double f_ul_hz = 2.0e9;
    double omega_hz = 200.0e6; // f_dl = f_ul + omega

    // users
    int m_r = 2;
    double ue_delta = 0.5;
    int k_users = 4;
    int d_streams = 1;

    // estimator grids
    int q = 120, u = 4;
    std::string rotation_mode = "regenerate-at-dl"; // or "paper-diagonal"
    double mmse_noise_var = 8.0;
    double capon_loading = kAutoLoading; // < 0 encodes "auto"

    // sweep
    std::vector<std::string> estimators{"perfect", "dsce"};
    std::vector<double> snr_grid_db{-5, 0, 5, 10, 15, 20, 25};
    std::string sweep = "none"; // none|q|u|ul_error|array
    std::vector<double> q_list{16, 32, 64, 120};
    std::vector<double> u_list{1, 2, 4, 8};
    std::vector<double> ul_error_list{0.0, 0.1, 0.2, 0.3};
    std::vector<ArraySize> array_list{{8, 8}, {4, 8}, {4, 4}};
    std::vector<double> omega_list_hz{100.0e6, 200.0e6, 400.0e6};

    // scenario statistics
    double los_probability = 0.5;
    int clusters_los = 12, clusters_nlos = 20, rays_per_cluster = 20;
    double ray_spread_az_deg = 5.0, ray_spread_el_deg = 2.0;
    double cluster_elevation_spread_deg = 1.0;
    double cluster_delay_spread_ns = 0.8, ray_delay_spread_ns = 0.2;
    double cluster_shadow_db = 3.0, cluster_power_decay = 2.0;
    double pathloss_exponent = 3.5, propagation_constant = 1.0;
    double shadow_sigma_db = 8.0, cell_radius_m = 250.0;
    double speed_kmh = 30.0;

    // baselines
    int ecsirs_l = 64, ecsirs_bits = 7;
    int kp_t_count = 256, kp_elevation_words = 4;
    int rvq_bits = 9;

    [[nodiscard]] ScenarioConfig scenario() const;
    [[nodiscard]] DsceConfig dsce() const;
    [[nodiscard]] SweepConfig sweep_config() const;
    void validate() const; // names the offending key
};

/// Parses the documented key-value format (text, not a path).
ExperimentConfig parse_config_text(const std::string &text);

/// Reads and parses a config file.
ExperimentConfig parse_config_file(const std::string &path);

/// Canonical serialization: every key in fixed order, normalized values.
/// serialize(parse(x)) is idempotent.
std::string serialize_config(const ExperimentConfig &config);

/// FNV-1a hash of the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig &config);

/// Runs one named preset and writes its CSV outputs, a JSON manifest, and a
/// gnuplot script into out_dir. Returns the written CSV path.
std::string run_preset(const std::string &name, const ExperimentConfig &config,
                       const std::string &out_dir);

/// Writes a standalone gnuplot script next to the CSV. Validates the CSV
/// header against the preset's schema and names any missing column.
std::string emit_plot_script(const std::string &result_csv, const std::string &preset);

/// CSV writers with byte-stable number formatting.
void write_se_csv(const std::string &path, const SeResult &result);
void write_ecdf_csv(const std::string &path, const std::map<double, EcdfTable> &tables);
void write_spectrum_csv(const std::string &path, const SpatialSpectrum &spectrum);

} // namespace dsce

#endif
