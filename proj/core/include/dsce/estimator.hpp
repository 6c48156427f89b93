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

#ifndef DSCE_ESTIMATOR_HPP
#define DSCE_ESTIMATOR_HPP

#include <optional>
#include <utility>
#include <vector>

#include <armadillo>

#include "dsce/spectrum.hpp"

namespace dsce
{

enum class RotationMode
{
    paper_diagonal,   // A_T = diag(F) A_R, F_n = exp(-j 2 pi n f_dl/f_ul)
    regenerate_at_dl  // A_T column n = fd_response(theta_n, phi_u, dl)
};

struct DsceConfig
{
    int q = 120; // azimuth grid precision
    int u = 4;   // elevation grid precision
    RotationMode rotation_mode = RotationMode::regenerate_at_dl;
    double mmse_noise_var = 8.0;          // sigma^2 of the refinement gram
    double capon_loading = kAutoLoading;
};

struct DsceMetrics
{
    double rel_mse_rough = 0.0;
    double rel_mse_refined = 0.0;
    double cos_sim_rough = 0.0;
    double cos_sim_refined = 0.0;
};

/// Every intermediate of one estimation run. With a Q-point azimuth grid the
/// pipeline selects k = min(Q, n_t) directions, so a_r/a_t are n_t x k and
/// h1 is the m_r x k beam-domain rough estimate; h2 is always m_r x n_t.
struct DsceReport
{
    SpatialSpectrum spectrum;
    int u_hat = 0;
    std::vector<int> theta_idx;  // selected azimuth cells, descending power
    arma::vec theta_hat_deg;     // same order as theta_idx
    arma::cx_mat a_r;
    arma::cx_mat a_t;
    arma::cx_mat h1;
    arma::cx_mat g;
    arma::cx_mat h2;
    std::optional<DsceMetrics> metrics;
};

/// Principal elevation subspace: argmax_u of mean_q P(q, u)^2, ties toward
/// the smaller index.
int select_elevation(const SpatialSpectrum &spectrum);

/// Indices of the n_t strongest azimuth cells in elevation row u_hat, by
/// descending power with ascending-index tie-break. Requires Q >= n_t.
std::vector<int> select_azimuth_indices(const SpatialSpectrum &spectrum, int u_hat, int n_t);

/// Same selection, returned as grid angles.
arma::vec select_azimuth_top_nt(const SpatialSpectrum &spectrum, int u_hat, int n_t);

/// Column n = a_h_ul(theta_n) (x) a_v_ul(phi_u); column norms are sqrt(n_t).
arma::cx_mat build_receive_matrix(const arma::vec &theta_hat_deg, double phi_u_hat_deg,
                                  const ArrayConfig &array);

/// Band-gap compensation; see RotationMode. Both modes leave a_r unchanged
/// when f_dl == f_ul.
arma::cx_mat rotate_to_transmit(const arma::cx_mat &a_r, const ArrayConfig &array,
                                RotationMode mode, const arma::vec &theta_hat_deg,
                                double phi_u_hat_deg);

/// Rough (beam-domain) estimate H1 = H_ul^H A_T.
arma::cx_mat rough_estimate(const arma::cx_mat &h_ul, const arma::cx_mat &a_t);

struct MmseResult
{
    arma::cx_mat g;  // n_t x k ridge fit map A_R (A_R^H A_R + sigma^2 I)^{-1}
    arma::cx_mat h2; // m_r x n_t refined estimate H_ul^H G A_T^H
};

/// MMSE refinement: ridge-fits beam coefficients C = H_ul^H G against the
/// receive dictionary (minimizing ||C A_R^H - H_ul^H||_F^2 + sigma^2
/// ||C||_F^2) and re-synthesizes with the rotated transmit dictionary.
/// sigma2 == 0 requires a nonsingular gram and otherwise raises
/// SingularMatrixError.
MmseResult mmse_refine(const arma::cx_mat &h_ul, const arma::cx_mat &a_r,
                       const arma::cx_mat &a_t, double sigma2);

/// Full pipeline: Capon spectrum -> elevation subspace -> top azimuth cells
/// -> receive matrix -> rotation -> rough estimate -> MMSE refinement.
/// Fills metrics when ground truth is supplied. The codebook must be an UL
/// codebook.
DsceReport run_dsce(const arma::cx_mat &h_ul, const arma::cx_mat *h_dl_truth,
                    const FdCodebook &codebook, const DsceConfig &config);

/// Exhaustive argmax over codewords of ||H_dl w||^2; upper-bound reference.
/// Ties break toward the smaller index.
std::pair<arma::uword, double> oracle_best_codeword(const arma::cx_mat &h_dl,
                                                    const FdCodebook &codebook);

/// ||estimate - truth||_F^2 / ||truth||_F^2.
double relative_mse(const arma::cx_mat &estimate, const arma::cx_mat &truth);

/// Mean over rows of |<estimate_row, truth_row>| / (norms product).
double mean_row_cosine(const arma::cx_mat &estimate, const arma::cx_mat &truth);

} // namespace dsce

#endif
