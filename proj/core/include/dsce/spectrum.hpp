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

#ifndef DSCE_SPECTRUM_HPP
#define DSCE_SPECTRUM_HPP

#include <vector>

#include <armadillo>

#include "dsce/codebook.hpp"

namespace dsce
{

/// Sentinel for capon_spectrum: loading = 1e-3 * tr(H H^H) / n_t.
constexpr double kAutoLoading = -1.0;

/// Capon-style spatial power estimate over a codebook grid.
struct SpatialSpectrum
{
    arma::mat values; // Q x U, non-negative
    arma::vec theta_deg;
    arma::vec phi_deg;
    double loading = 0.0; // diagonal loading actually used
};

/// P(q, u) = [ w^H (H H^H + loading I)^{-1} w ]^{-1} for codeword w.
/// The loading regularizes the rank-m_r covariance; loading = 0 on a
/// rank-deficient covariance raises SingularMatrixError.
SpatialSpectrum capon_spectrum(const arma::cx_mat &h, const FdCodebook &codebook,
                               double loading = kAutoLoading);

/// DFT-domain samples of a single cluster:
/// entry b = sum_n g exp(-j 2 pi delta n cos(phi_c)) exp(-j 2 pi b n / n_t).
arma::cx_vec dft_cluster_samples(cx gain, double phi_c_deg, double delta, int n_t);

/// Closed-form magnitude of the b-th DFT sample (Dirichlet kernel),
/// |g| |sin(n_t x / 2) / sin(x / 2)| with x = 2 pi delta cos(phi_c)
/// + 2 pi b / n_t; the removable singularity at x == 0 (mod 2 pi) returns
/// |g| n_t.
double dirichlet_magnitude(cx gain, double phi_c_deg, double delta, int n_t, int b);

/// Pearson correlation of two spectra on matching grids.
/// Throws std::domain_error when either spectrum has zero variance.
double spectra_correlation(const SpatialSpectrum &p_a, const SpatialSpectrum &p_b);

/// Empirical CDF table. eval(x) returns the fraction of samples <= x.
struct EcdfTable
{
    arma::vec values; // sorted ascending
    arma::vec probs;  // k / n, non-decreasing, ends at 1

    [[nodiscard]] double eval(double x) const;
    [[nodiscard]] double quantile(double p) const; // inverse ECDF (lower)
};

EcdfTable ecdf(const std::vector<double> &samples);

} // namespace dsce

#endif
