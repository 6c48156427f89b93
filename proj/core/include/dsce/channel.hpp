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

#ifndef DSCE_CHANNEL_HPP
#define DSCE_CHANNEL_HPP

#include <vector>

#include <armadillo>

#include "dsce/array.hpp"
#include "dsce/rng.hpp"

namespace dsce
{

/// Per-ray perturbation around the cluster center. Angle offsets are
/// truncated-Laplacian draws; the delay offset feeds the frequency-dependent
/// part of the ray phase, which is what decorrelates UL and DL small-scale
/// gains as the band gap grows.
struct Ray
{
    double az_offset_deg = 0.0;
    double el_offset_deg = 0.0;
    double delay_offset_s = 0.0;
    double phase_rad = 0.0; // frequency-independent initial phase
};

/// One scattering cluster: BS-side central direction, complex gain
/// (per-cluster power times a CN(0,1) small-scale factor, shared by UL and
/// DL), excess delay, and its rays.
struct Cluster
{
    double azimuth_deg = 90.0;
    double elevation_deg = 90.0;
    cx gain = 0.0;
    double delay_s = 0.0;
    std::vector<Ray> rays;
};

/// Ground-truth scattering geometry, shared by the UL and DL channels of one
/// user. Only frequency-dependent phase terms differ between the links.
struct ClusterSet
{
    std::vector<Cluster> clusters;
    bool los = false;

    [[nodiscard]] int count() const { return static_cast<int>(clusters.size()); }
};

/// Scenario defaults follow Table-I-style numbers: 8x8 URA at 0.5 lambda,
/// 2x1 UE ULA, 30 km/h, C=12 (LoS) / 20 (NLoS), Z=20. The remaining
/// constants parameterize the surrogate cluster statistics and are
/// configurable.
struct ScenarioConfig
{
    ArrayConfig array;
    int m_r = 2;        // UE antennas
    int k_users = 4;
    int d_streams = 1;  // spatial streams per UE (1 or 2)
    double ue_delta = 0.5;

    double los_probability = 0.5;
    int clusters_los = 12;
    int clusters_nlos = 20;
    int rays_per_cluster = 20;

    double ray_spread_az_deg = 5.0;
    double ray_spread_el_deg = 2.0;
    double cluster_elevation_spread_deg = 1.0; // cluster centers about the user's elevation anchor
    double cluster_delay_spread_ns = 0.8;      // exponential mean of cluster excess delay
    double ray_delay_spread_ns = 0.2;          // Laplacian std of intra-cluster delay offsets
    double cluster_shadow_db = 3.0;            // per-cluster lognormal power spread
    double cluster_power_decay = 2.0;          // power ~ exp(-decay * tau / mean_tau)

    // Large-scale terms alpha = ell * eps^beta * mu. They multiply every
    // cluster of a user equally and therefore cancel under the E||H||_F^2 =
    // n_t * m_r normalization; kept configurable for completeness.
    double pathloss_exponent = 3.5;
    double propagation_constant = 1.0;
    double shadow_sigma_db = 8.0;
    double cell_radius_m = 250.0;
    double speed_kmh = 30.0; // gains are assumed slowly varying over one UL/DL round trip

    Sector sector{};

    void validate() const;
};

/// One joint UL/DL realization over the same ClusterSet.
/// h_ul is n_t x m_r (BS receive side), h_dl is m_r x n_t (UE receive side).
/// The generator is calibrated so that E||H||_F^2 = n_t * m_r over
/// realizations, and h_dl == h_ul^H exactly when the band gap is zero.
struct ChannelPair
{
    arma::cx_mat h_ul;
    arma::cx_mat h_dl;
    ClusterSet clusters;
    int m_r = 0;
};

/// Draws cluster centers, gains, delays, and per-ray offsets/phases.
/// Azimuth centers are uniform across the sector; elevation centers
/// concentrate around a per-user anchor drawn uniformly in the sector.
ClusterSet draw_clusters(const ScenarioConfig &scenario, SeedStream &rng);

/// Realizes the UL/DL pair from a ClusterSet. The stream drives the UE-side
/// geometry (per-cluster arrival direction and per-ray offsets), which is
/// shared by the two links of the pair.
ChannelPair realize_channel_pair(const ClusterSet &clusters, const ScenarioConfig &scenario,
                                 SeedStream &rng);

/// Average cluster gain zeta = mean(gain) / (n_t * sqrt(C)); the sample mean
/// stands in for the expectation. Complex because cluster gains are complex.
cx average_cluster_gain(const ClusterSet &clusters, int n_t);

} // namespace dsce

#endif
