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

#include "dsce/baselines.hpp"

#include <cmath>

namespace dsce
{

FeedbackResult quantize_select(const arma::cx_mat &h, const QuantizerCodebook &codebook)
{
    if (codebook.words.n_cols == 0)
        throw std::invalid_argument("quantize_select: empty codebook");
    if (h.n_cols != codebook.words.n_rows)
        throw std::invalid_argument("quantize_select: channel/codebook shape mismatch");

    const arma::cx_mat projected = h * codebook.words;
    arma::uword best = 0;
    double best_gain = -1.0;
    for (arma::uword k = 0; k < projected.n_cols; ++k)
    {
        const double gain = std::pow(arma::norm(projected.col(k), 2), 2);
        if (gain > best_gain) // ascending-index tie-break
        {
            best_gain = gain;
            best = k;
        }
    }

    FeedbackResult result;
    result.index = best;
    result.bits_used = codebook.bits;
    result.h_hat = codebook.words.col(best).t(); // codeword^H as the implied channel row
    return result;
}

FeedbackResult ecsirs_run(const arma::cx_mat &h_dl, const FdCodebook &j_codebook,
                          const QuantizerCodebook &t_codebook)
{
    if (h_dl.n_cols != j_codebook.words.n_rows)
        throw std::invalid_argument("ecsirs_run: channel/CSI-RS codebook shape mismatch");
    if (j_codebook.words.n_cols > t_codebook.words.n_cols)
        throw std::invalid_argument("ecsirs_run: requires L <= N");

    const arma::cx_mat h_bf = h_dl * j_codebook.words;          // UE sees the beamformed channel
    const arma::cx_mat h_approx = h_bf * j_codebook.words.t();  // de-beamformed approximation
    return quantize_select(h_approx, t_codebook);
}

arma::vec kp_elevation_grid(int u_count)
{
    if (u_count < 1)
        throw std::invalid_argument("kp_elevation_grid: u_count must be >= 1");
    arma::vec grid(static_cast<arma::uword>(u_count));
    for (int k = 0; k < u_count; ++k)
    {
        const double u = (2.0 * k + 1.0 - u_count) / static_cast<double>(u_count);
        grid(static_cast<arma::uword>(k)) = rad2deg(std::acos(u));
    }
    return arma::sort(grid);
}

QuantizerCodebook kp_codebook(int n_h, int n_v, int t_count, const arma::vec &elevation_grid_deg,
                              const ArrayConfig &array, Link link)
{
    if (n_h < 2 || n_h % 2 != 0)
        throw std::invalid_argument("kp_codebook: n_h must be even (half-array co-phasing layout)");
    if (n_v < 1 || t_count < 1 || elevation_grid_deg.n_elem == 0)
        throw std::invalid_argument("kp_codebook: bad codebook sizes");

    const int half = n_h / 2;
    const double scale = array.spacing_scale(link);
    const double inv_sqrt_nh = 1.0 / std::sqrt(static_cast<double>(n_h));
    const double inv_sqrt_nv = 1.0 / std::sqrt(static_cast<double>(n_v));

    QuantizerCodebook book;
    book.origin = CodebookOrigin::kp;
    book.bits = std::log2(static_cast<double>(t_count) * elevation_grid_deg.n_elem);
    book.words.set_size(static_cast<arma::uword>(n_h * n_v),
                        static_cast<arma::uword>(t_count) * elevation_grid_deg.n_elem);

    arma::uword col = 0;
    for (int t = 0; t < t_count; ++t)
    {
        arma::cx_vec az(static_cast<arma::uword>(n_h));
        for (int k = 0; k < half; ++k)
        {
            const cx w = std::polar(1.0, 2.0 * pi * t * k / 32.0);
            az(static_cast<arma::uword>(k)) = inv_sqrt_nh * w;
            az(static_cast<arma::uword>(half + k)) =
                inv_sqrt_nh * std::polar(1.0, pi * t / 2.0) * w;
        }
        for (arma::uword ue = 0; ue < elevation_grid_deg.n_elem; ++ue)
        {
            const arma::cx_vec ev = inv_sqrt_nv * steering_vector(Axis::vertical,
                                                                  elevation_grid_deg(ue), n_v,
                                                                  array.delta_v * scale);
            book.words.col(col++) = arma::kron(az, ev);
        }
    }
    return book;
}

QuantizerCodebook rvq_codebook(int bits, const ArrayConfig &array, SeedStream &rng)
{
    if (bits < 0)
        throw std::invalid_argument("rvq_codebook: bits must be >= 0");
    array.validate();

    const arma::uword n_words = arma::uword(1) << bits;
    const arma::cx_vec broadside =
        arma::cx_vec(static_cast<arma::uword>(array.n_v),
                     arma::fill::value(cx(1.0 / std::sqrt(static_cast<double>(array.n_v)), 0.0)));

    QuantizerCodebook book;
    book.origin = CodebookOrigin::rvq;
    book.bits = static_cast<double>(bits);
    book.words.set_size(static_cast<arma::uword>(array.n_t()), n_words);
    for (arma::uword k = 0; k < n_words; ++k)
    {
        arma::cx_vec x(static_cast<arma::uword>(array.n_h));
        for (auto &v : x)
            v = rng.cnormal();
        x /= arma::norm(x, 2);
        book.words.col(k) = arma::kron(x, broadside);
    }
    return book;
}

DsceReport fmmsce2d_run(const arma::cx_mat &h_ul, const FdCodebook &codebook_2d,
                        const DsceConfig &config)
{
    if (codebook_2d.u_count() != 1)
        throw std::invalid_argument("fmmsce2d_run: codebook must have a single elevation cell");
    return run_dsce(h_ul, nullptr, codebook_2d, config);
}

double feedback_bits(int n_t, double snr_db)
{
    if (n_t < 1)
        throw std::invalid_argument("feedback_bits: n_t must be >= 1");
    // log2(10^(snr_db/10)); SNR_linear > 0 by construction.
    return (n_t - 1) * (snr_db / 10.0) * std::log2(10.0);
}

} // namespace dsce
