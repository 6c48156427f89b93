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

#ifndef DSCE_LINK_HPP
#define DSCE_LINK_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <armadillo>

#include "dsce/baselines.hpp"
#include "dsce/channel.hpp"

namespace dsce
{

/// Per-stream SINRs are capped here (+60 dB) so noiseless ZF stays finite
/// in the rate logs.
constexpr double kSinrCap = 1.0e6;

/// Zero-forcing precoder V = H^H (H H^H)^{-1} with unit-norm columns.
/// h_stack is (K*d) x n_t and must be full row rank.
arma::cx_mat zf_precoder(const arma::cx_mat &h_stack);

/// Per-stream SINRs read off the true effective channels E_k = H_k V.
/// user_channels[k] holds user k's d x n_t true rows (stream s on row s);
/// stream s of user k occupies precoder column k*d + s and carries symbol
/// power `power / d`.
std::vector<double> user_sinr(const std::vector<arma::cx_mat> &user_channels,
                              const arma::cx_mat &v, double power, double noise_var);

/// Sum log2(1 + SINR) over all streams, bits/s/Hz.
double sum_spectral_efficiency(const std::vector<double> &sinrs);

/// H' = H + Y with Y i.i.d. CN(0, sigma2) per entry.
arma::cx_mat inject_ul_error(const arma::cx_mat &h_ul, double sigma2, SeedStream &rng);

enum class SweepVariable
{
    none,
    q,
    u,
    ul_error_var,
    array_size
};

struct ArraySize
{
    int n_h = 8;
    int n_v = 8;
};

/// Known estimator identifiers: "perfect", "dsce", "ecsirs", "kp",
/// "fmmsce2d", "rvq2d".
struct SweepConfig
{
    ScenarioConfig scenario;
    DsceConfig dsce;
    std::vector<std::string> estimators{"perfect", "dsce"};
    std::vector<double> snr_grid_db{-5, 0, 5, 10, 15, 20, 25};
    int trials = 500;
    std::uint64_t seed = 1;

    SweepVariable sweep_variable = SweepVariable::none;
    std::vector<double> sweep_points;     // q / u / ul_error_var values
    std::vector<ArraySize> array_points;  // array_size sweep

    // Baseline presets.
    int ecsirs_l = 64;       // CSI-RS span; 64 = full unitary DFT
    int ecsirs_bits = 7;     // N = 2^bits selection words
    int kp_t_count = 256;
    int kp_elevation_words = 4;
    int rvq_bits = 9;

    // The UL-error sweep feeds sigma_ul^2 into the refinement gram:
    // sigma^2_eff = mmse_noise_var + sigma_ul^2 * n_t.
    bool couple_mmse_to_ul_error = true;

    int threads = 0; // 0 = hardware concurrency

    void validate() const;
    [[nodiscard]] bool d_streams_need_full_channel() const;
};

/// One (estimator, sweep point, SNR) cell with its per-trial samples.
struct SeCell
{
    std::string estimator;
    std::string sweep_label;
    double snr_db = 0.0;
    double mean_se = 0.0;
    double std_error = 0.0;
    int trials = 0;
    arma::vec trial_se; // per-trial sum SE, index = trial
};

struct SeResult
{
    std::vector<SeCell> cells;

    [[nodiscard]] const SeCell *find(const std::string &estimator, const std::string &label,
                                     double snr_db) const;
};

/// Monte-Carlo sweep: per trial draws the users' channel pairs, runs every
/// estimator on the UL observations (or DL feedback), builds ZF from the
/// estimates, and evaluates SINR on the true DL channels. Per-trial seeds
/// derive from the master seed by index, so results are independent of the
/// thread count; the perfect-CSIT reference is always included.
SeResult run_sweep(const SweepConfig &config);

/// Fig.-2-style experiment: per trial and band gap, realize the pair over
/// the same geometry, Capon both links on matched grids, correlate. Returns
/// one ECDF per band gap (keyed by omega in Hz).
std::map<double, EcdfTable> correlation_experiment(const ScenarioConfig &scenario,
                                                   const std::vector<double> &omega_list_hz,
                                                   int trials, std::uint64_t seed, int q = 120,
                                                   int u = 4, int threads = 0);

} // namespace dsce

#endif
