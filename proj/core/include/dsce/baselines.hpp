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

#ifndef DSCE_BASELINES_HPP
#define DSCE_BASELINES_HPP

#include <armadillo>

#include "dsce/estimator.hpp"
#include "dsce/rng.hpp"

namespace dsce
{

enum class CodebookOrigin
{
    dft,
    kp,
    rvq
};

/// Flat quantization codebook: N unit-norm columns, B = log2(N) nominal
/// feedback bits.
struct QuantizerCodebook
{
    arma::cx_mat words;
    double bits = 0.0;
    CodebookOrigin origin = CodebookOrigin::dft;

    [[nodiscard]] arma::uword size() const { return words.n_cols; }
};

/// Outcome of one limited-feedback selection. h_hat is the implied BS-side
/// channel row (the selected codeword's Hermitian, 1 x n_t), usable directly
/// in a ZF stack.
struct FeedbackResult
{
    arma::uword index = 0;
    double bits_used = 0.0;
    arma::cx_mat h_hat;
};

/// Beamformed CSI-RS with dual codebooks: the UE sees H_bf = H_dl J, forms
/// the de-beamformed approximation H_approx = H_bf J^H and feeds back the
/// index of the best-matching word of the N-word codebook.
FeedbackResult ecsirs_run(const arma::cx_mat &h_dl, const FdCodebook &j_codebook,
                          const QuantizerCodebook &t_codebook);

/// argmax over words w of ||H w||^2 with ascending-index tie-break.
FeedbackResult quantize_select(const arma::cx_mat &h, const QuantizerCodebook &codebook);

/// Kronecker-product double-codebook: azimuth word t is
/// (1/sqrt(n_h)) [w, exp(j pi t / 2) w] with w_k = exp(j 2 pi t k / 32),
/// k = 0..n_h/2-1, composed with a vertical DFT word per elevation grid
/// entry. n_h = 8 reproduces the standard layout exactly; other even n_h
/// generalize the half-array pattern.
QuantizerCodebook kp_codebook(int n_h, int n_v, int t_count, const arma::vec &elevation_grid_deg,
                              const ArrayConfig &array, Link link);

/// Vertical DFT beams on the symmetric u-space grid cos(phi) =
/// (2k + 1 - u_count)/u_count -- the standards-flavored (not
/// sector-calibrated) elevation grid used by the KP comparison preset.
arma::vec kp_elevation_grid(int u_count);

/// 2^bits isotropically random words spanning azimuth-only responses
/// (random unit vector on the horizontal axis, broadside vertical factor).
QuantizerCodebook rvq_codebook(int bits, const ArrayConfig &array, SeedStream &rng);

/// Azimuth-only variant of the estimation pipeline: identical to run_dsce
/// with the elevation grid collapsed to the single broadside cell.
/// The codebook must have u_count() == 1.
DsceReport fmmsce2d_run(const arma::cx_mat &h_ul, const FdCodebook &codebook_2d,
                        const DsceConfig &config);

/// Feedback overhead needed to track perfect CSIT:
/// B = (n_t - 1) log2(SNR_linear).
double feedback_bits(int n_t, double snr_db);

} // namespace dsce

#endif
