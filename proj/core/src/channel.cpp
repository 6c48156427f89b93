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

#include "dsce/channel.hpp"

#include <algorithm>
#include <cmath>

namespace dsce
{

namespace
{
constexpr double kLaplaceTruncStds = 2.5; // ray/center offsets are bounded draws
} // namespace

void ScenarioConfig::validate() const
{
    array.validate();
    sector.validate();
    if (m_r < 1)
        throw std::invalid_argument("ScenarioConfig: m_r must be >= 1");
    if (k_users < 1)
        throw std::invalid_argument("ScenarioConfig: k_users must be >= 1");
    if (d_streams < 1 || d_streams > 2)
        throw std::invalid_argument("ScenarioConfig: d_streams must be 1 or 2");
    if (d_streams > m_r)
        throw std::invalid_argument("ScenarioConfig: d_streams must not exceed m_r");
    if (d_streams * k_users > array.n_t())
        throw std::invalid_argument("ScenarioConfig: d_streams * k_users must not exceed n_t");
    if (!(ue_delta > 0.0))
        throw std::invalid_argument("ScenarioConfig: ue_delta must be > 0");
    if (los_probability < 0.0 || los_probability > 1.0)
        throw std::invalid_argument("ScenarioConfig: los_probability must be in [0, 1]");
    if (clusters_los < 1 || clusters_nlos < 1 || rays_per_cluster < 1)
        throw std::invalid_argument("ScenarioConfig: cluster and ray counts must be >= 1");
}

ClusterSet draw_clusters(const ScenarioConfig &scenario, SeedStream &rng)
{
    scenario.validate();
    const Sector &sec = scenario.sector;

    ClusterSet set;
    set.los = rng.uniform() < scenario.los_probability;
    const int c_count = set.los ? scenario.clusters_los : scenario.clusters_nlos;
    set.clusters.resize(static_cast<std::size_t>(c_count));

    // Azimuth centers are uniform across the sector; elevation centers
    // concentrate around a per-user anchor (one dominant elevation subspace).
    const double el_anchor = rng.uniform(sec.el_start_deg, sec.el_end_deg());

    const double mean_tau = scenario.cluster_delay_spread_ns * 1.0e-9;
    arma::vec power(static_cast<arma::uword>(c_count));

    for (int c = 0; c < c_count; ++c)
    {
        Cluster &cl = set.clusters[static_cast<std::size_t>(c)];
        cl.azimuth_deg = rng.uniform(sec.az_start_deg, sec.az_end_deg());
        cl.elevation_deg = std::clamp(
            el_anchor + rng.truncated_laplace(scenario.cluster_elevation_spread_deg, kLaplaceTruncStds),
            sec.el_start_deg, sec.el_end_deg());
        cl.delay_s = rng.exponential(mean_tau);

        const double shadow = std::pow(10.0, scenario.cluster_shadow_db * rng.normal() / 10.0);
        power(static_cast<arma::uword>(c)) =
            std::exp(-scenario.cluster_power_decay * cl.delay_s / mean_tau) * shadow;

        cl.rays.resize(static_cast<std::size_t>(scenario.rays_per_cluster));
        for (Ray &ray : cl.rays)
        {
            ray.az_offset_deg = rng.truncated_laplace(scenario.ray_spread_az_deg, kLaplaceTruncStds);
            ray.el_offset_deg = rng.truncated_laplace(scenario.ray_spread_el_deg, kLaplaceTruncStds);
            ray.delay_offset_s =
                rng.truncated_laplace(scenario.ray_delay_spread_ns * 1.0e-9, kLaplaceTruncStds);
            ray.phase_rad = rng.uniform(0.0, 2.0 * pi);
        }
    }

    // User-level large-scale factor alpha = ell * eps^beta * mu. It scales
    // every cluster equally, so the Sum(power) = C normalization removes it
    // again; drawn anyway so the scenario knobs stay live.
    const double eps = rng.uniform(0.1 * scenario.cell_radius_m, scenario.cell_radius_m);
    const double mu = std::pow(10.0, scenario.shadow_sigma_db * rng.normal() / 10.0);
    const double alpha =
        scenario.propagation_constant * std::pow(eps, -scenario.pathloss_exponent) * mu;
    power *= alpha;
    power *= static_cast<double>(c_count) / arma::accu(power);

    for (int c = 0; c < c_count; ++c)
    {
        Cluster &cl = set.clusters[static_cast<std::size_t>(c)];
        cl.gain = std::sqrt(power(static_cast<arma::uword>(c))) * rng.cnormal();
    }
    return set;
}

namespace
{

// DL-form channel at carrier f: H(f) = (1/sqrt(C)) sum_c g_c (1/sqrt(Z))
// sum_z exp(j Phi_z(f)) u(f) b(f)^H, with Phi_z(f) = psi_z + 2 pi f tau_z.
// The UL matrix is the Hermitian of this evaluated at f_ul, so the pair is
// exactly reciprocal at zero band gap.
arma::cx_mat band_channel(const ClusterSet &set, const ScenarioConfig &scenario,
                          const std::vector<double> &ue_az_deg,
                          const std::vector<std::vector<double>> &ue_az_offset_deg, double f_hz)
{
    const ArrayConfig &array = scenario.array;
    const Sector &sec = scenario.sector;
    const double scale = f_hz / array.f_ul_hz;
    const int n_t = array.n_t();
    const int m_r = scenario.m_r;

    arma::cx_mat h(static_cast<arma::uword>(m_r), static_cast<arma::uword>(n_t),
                   arma::fill::zeros);
    const std::size_t c_count = set.clusters.size();
    const double z = static_cast<double>(scenario.rays_per_cluster);

    for (std::size_t c = 0; c < c_count; ++c)
    {
        const Cluster &cl = set.clusters[c];
        arma::cx_mat acc(static_cast<arma::uword>(m_r), static_cast<arma::uword>(n_t),
                         arma::fill::zeros);
        for (std::size_t r = 0; r < cl.rays.size(); ++r)
        {
            const Ray &ray = cl.rays[r];
            const double az =
                std::clamp(cl.azimuth_deg + ray.az_offset_deg, sec.az_start_deg, sec.az_end_deg());
            const double el =
                std::clamp(cl.elevation_deg + ray.el_offset_deg, sec.el_start_deg, sec.el_end_deg());

            const arma::cx_vec bh =
                steering_vector(Axis::horizontal, az, array.n_h, array.delta_h * scale);
            const arma::cx_vec bv =
                steering_vector(Axis::vertical, el, array.n_v, array.delta_v * scale);
            const arma::cx_vec b = arma::kron(bh, bv);

            const arma::cx_vec u = steering_vector(
                Axis::horizontal, ue_az_deg[c] + ue_az_offset_deg[c][r], m_r, scenario.ue_delta * scale);

            const double tau = cl.delay_s + ray.delay_offset_s;
            const cx phase = std::polar(1.0, ray.phase_rad + 2.0 * pi * f_hz * tau);
            acc += phase * (u * b.t()); // u * b^H
        }
        h += (cl.gain / std::sqrt(z)) * acc;
    }
    return h / std::sqrt(static_cast<double>(c_count));
}

} // namespace

ChannelPair realize_channel_pair(const ClusterSet &clusters, const ScenarioConfig &scenario,
                                 SeedStream &rng)
{
    scenario.validate();
    if (clusters.clusters.empty())
        throw std::invalid_argument("realize_channel_pair: empty ClusterSet");

    // UE-side geometry, shared by both links of the pair.
    const std::size_t c_count = clusters.clusters.size();
    std::vector<double> ue_az(c_count);
    std::vector<std::vector<double>> ue_off(c_count);
    for (std::size_t c = 0; c < c_count; ++c)
    {
        ue_az[c] = rng.uniform(0.0, 180.0);
        ue_off[c].resize(clusters.clusters[c].rays.size());
        for (double &o : ue_off[c])
            o = rng.truncated_laplace(scenario.ray_spread_az_deg, kLaplaceTruncStds);
    }

    ChannelPair pair;
    pair.m_r = scenario.m_r;
    pair.clusters = clusters;
    pair.h_dl = band_channel(clusters, scenario, ue_az, ue_off, scenario.array.f_dl_hz);
    pair.h_ul = band_channel(clusters, scenario, ue_az, ue_off, scenario.array.f_ul_hz).t();
    return pair;
}

cx average_cluster_gain(const ClusterSet &clusters, int n_t)
{
    if (clusters.clusters.empty())
        throw std::invalid_argument("average_cluster_gain: empty ClusterSet");
    if (n_t < 1)
        throw std::invalid_argument("average_cluster_gain: n_t must be >= 1");

    cx sum = 0.0;
    for (const Cluster &cl : clusters.clusters)
        sum += cl.gain;
    const double c = static_cast<double>(clusters.clusters.size());
    return sum / c / (static_cast<double>(n_t) * std::sqrt(c));
}

} // namespace dsce
