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

#include "dsce/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dsce
{

int select_elevation(const SpatialSpectrum &spectrum)
{
    if (spectrum.values.n_elem == 0)
        throw std::invalid_argument("select_elevation: empty spectrum");

    const arma::uword u_count = spectrum.values.n_cols;
    int best = 0;
    double best_power = -1.0;
    for (arma::uword u = 0; u < u_count; ++u)
    {
        const double p = arma::mean(arma::square(spectrum.values.col(u)));
        if (p > best_power) // ties break toward the smaller index
        {
            best_power = p;
            best = static_cast<int>(u);
        }
    }
    return best;
}

std::vector<int> select_azimuth_indices(const SpatialSpectrum &spectrum, int u_hat, int n_t)
{
    const int q = static_cast<int>(spectrum.values.n_rows);
    if (u_hat < 0 || u_hat >= static_cast<int>(spectrum.values.n_cols))
        throw std::invalid_argument("select_azimuth_indices: u_hat out of range");
    if (q < n_t)
        throw std::invalid_argument(
            "select_azimuth_indices: azimuth grid smaller than n_t (insufficient grid)");

    std::vector<int> idx(static_cast<std::size_t>(q));
    std::iota(idx.begin(), idx.end(), 0);
    const arma::vec row = spectrum.values.col(static_cast<arma::uword>(u_hat));
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        const double pa = row(static_cast<arma::uword>(a));
        const double pb = row(static_cast<arma::uword>(b));
        if (pa != pb)
            return pa > pb; // descending power
        return a < b;       // ascending grid index on ties
    });
    idx.resize(static_cast<std::size_t>(n_t));
    return idx;
}

arma::vec select_azimuth_top_nt(const SpatialSpectrum &spectrum, int u_hat, int n_t)
{
    const std::vector<int> idx = select_azimuth_indices(spectrum, u_hat, n_t);
    arma::vec angles(static_cast<arma::uword>(n_t));
    for (std::size_t i = 0; i < idx.size(); ++i)
        angles(static_cast<arma::uword>(i)) = spectrum.theta_deg(static_cast<arma::uword>(idx[i]));
    return angles;
}

arma::cx_mat build_receive_matrix(const arma::vec &theta_hat_deg, double phi_u_hat_deg,
                                  const ArrayConfig &array)
{
    if (theta_hat_deg.n_elem == 0)
        throw std::invalid_argument("build_receive_matrix: empty direction set");

    arma::cx_mat a_r(static_cast<arma::uword>(array.n_t()), theta_hat_deg.n_elem);
    for (arma::uword n = 0; n < theta_hat_deg.n_elem; ++n)
        a_r.col(n) = fd_response(theta_hat_deg(n), phi_u_hat_deg, array, Link::ul);
    return a_r;
}

arma::cx_mat rotate_to_transmit(const arma::cx_mat &a_r, const ArrayConfig &array,
                                RotationMode mode, const arma::vec &theta_hat_deg,
                                double phi_u_hat_deg)
{
    switch (mode)
    {
    case RotationMode::paper_diagonal:
    {
        const double ratio = array.f_dl_hz / array.f_ul_hz;
        arma::cx_mat a_t = a_r;
        for (arma::uword n = 0; n < a_t.n_rows; ++n)
        {
            // exp(-j 2 pi n ratio); the integer part of n*ratio is a full
            // turn, so reduce first and get an exact 1 at zero band gap.
            const double frac = std::remainder(static_cast<double>(n) * ratio, 1.0);
            a_t.row(n) *= std::polar(1.0, -2.0 * pi * frac);
        }
        return a_t;
    }
    case RotationMode::regenerate_at_dl:
    {
        if (theta_hat_deg.n_elem != a_r.n_cols)
            throw std::invalid_argument("rotate_to_transmit: direction set does not match a_r");
        arma::cx_mat a_t(a_r.n_rows, a_r.n_cols);
        for (arma::uword n = 0; n < theta_hat_deg.n_elem; ++n)
            a_t.col(n) = fd_response(theta_hat_deg(n), phi_u_hat_deg, array, Link::dl);
        return a_t;
    }
    }
    throw std::invalid_argument("rotate_to_transmit: unknown rotation mode");
}

arma::cx_mat rough_estimate(const arma::cx_mat &h_ul, const arma::cx_mat &a_t)
{
    if (h_ul.n_rows != a_t.n_rows)
        throw std::invalid_argument("rough_estimate: shape mismatch between h_ul and a_t");
    return h_ul.t() * a_t;
}

MmseResult mmse_refine(const arma::cx_mat &h_ul, const arma::cx_mat &a_r,
                       const arma::cx_mat &a_t, double sigma2)
{
    if (h_ul.n_rows != a_r.n_rows || a_r.n_rows != a_t.n_rows || a_r.n_cols != a_t.n_cols)
        throw std::invalid_argument("mmse_refine: shape mismatch");
    if (sigma2 < 0.0)
        throw std::invalid_argument("mmse_refine: sigma2 must be >= 0");

    arma::cx_mat gram = a_r.t() * a_r;
    gram.diag() += sigma2;

    arma::cx_mat chol_u;
    if (!arma::chol(chol_u, gram))
        throw SingularMatrixError(
            "mmse_refine: singular system at sigma2 = 0; use a positive sigma2");

    // G = A_R (A_R^H A_R + sigma^2 I)^{-1}; beam coefficients C = H_ul^H G
    // minimize ||C A_R^H - H_ul^H||_F^2 + sigma^2 ||C||_F^2.
    const arma::cx_mat inv_gram =
        arma::solve(arma::trimatu(chol_u),
                    arma::solve(arma::trimatl(chol_u.t()),
                                arma::cx_mat(arma::eye<arma::cx_mat>(gram.n_rows, gram.n_cols))));

    MmseResult result;
    result.g = a_r * inv_gram;
    result.h2 = (h_ul.t() * result.g) * a_t.t();
    return result;
}

double relative_mse(const arma::cx_mat &estimate, const arma::cx_mat &truth)
{
    const double denom = arma::accu(arma::square(arma::abs(truth)));
    return arma::accu(arma::square(arma::abs(estimate - truth))) / denom;
}

double mean_row_cosine(const arma::cx_mat &estimate, const arma::cx_mat &truth)
{
    double acc = 0.0;
    for (arma::uword m = 0; m < truth.n_rows; ++m)
    {
        const arma::cx_rowvec a = estimate.row(m);
        const arma::cx_rowvec b = truth.row(m);
        const double na = arma::norm(a, 2);
        const double nb = arma::norm(b, 2);
        acc += std::abs(arma::cdot(a, b)) / std::max(na * nb, 1.0e-300);
    }
    return acc / static_cast<double>(truth.n_rows);
}

DsceReport run_dsce(const arma::cx_mat &h_ul, const arma::cx_mat *h_dl_truth,
                    const FdCodebook &codebook, const DsceConfig &config)
{
    if (codebook.link != Link::ul)
        throw std::invalid_argument("run_dsce: the projection codebook must be an UL codebook");

    const int n_t = static_cast<int>(codebook.words.n_rows);

    DsceReport report;
    report.spectrum = capon_spectrum(h_ul, codebook, config.capon_loading);
    report.u_hat = select_elevation(report.spectrum);

    // With an under-provisioned grid (Q < n_t, the Fig.-8-style sweeps) all Q
    // cells are taken; otherwise exactly n_t.
    const int k_sel = std::min(codebook.q_count(), n_t);
    report.theta_idx = select_azimuth_indices(report.spectrum, report.u_hat, k_sel);
    report.theta_hat_deg.set_size(static_cast<arma::uword>(k_sel));
    for (std::size_t i = 0; i < report.theta_idx.size(); ++i)
        report.theta_hat_deg(static_cast<arma::uword>(i)) =
            report.spectrum.theta_deg(static_cast<arma::uword>(report.theta_idx[i]));

    const double phi_hat = report.spectrum.phi_deg(static_cast<arma::uword>(report.u_hat));

    report.a_r = build_receive_matrix(report.theta_hat_deg, phi_hat, codebook.array);
    report.a_t = rotate_to_transmit(report.a_r, codebook.array, config.rotation_mode,
                                    report.theta_hat_deg, phi_hat);
    report.h1 = rough_estimate(h_ul, report.a_t);

    const MmseResult mmse = mmse_refine(h_ul, report.a_r, report.a_t, config.mmse_noise_var);
    report.g = mmse.g;
    report.h2 = mmse.h2;

    if (h_dl_truth != nullptr)
    {
        DsceMetrics metrics;
        metrics.rel_mse_refined = relative_mse(report.h2, *h_dl_truth);
        metrics.cos_sim_refined = mean_row_cosine(report.h2, *h_dl_truth);
        // The rough estimate is beam-domain (m_r x k_sel); compare it in the
        // antenna domain only when shapes agree.
        if (report.h1.n_cols == h_dl_truth->n_cols)
        {
            metrics.rel_mse_rough = relative_mse(report.h1, *h_dl_truth);
            metrics.cos_sim_rough = mean_row_cosine(report.h1, *h_dl_truth);
        }
        report.metrics = metrics;
    }
    return report;
}

std::pair<arma::uword, double> oracle_best_codeword(const arma::cx_mat &h_dl,
                                                    const FdCodebook &codebook)
{
    if (h_dl.n_cols != codebook.words.n_rows)
        throw std::invalid_argument("oracle_best_codeword: channel/codebook shape mismatch");

    const arma::cx_mat projected = h_dl * codebook.words;
    arma::uword best = 0;
    double best_gain = -1.0;
    for (arma::uword k = 0; k < projected.n_cols; ++k)
    {
        const double gain = std::pow(arma::norm(projected.col(k), 2), 2);
        if (gain > best_gain) // ties break toward the smaller index
        {
            best_gain = gain;
            best = k;
        }
    }
    return {best, best_gain};
}

} // namespace dsce
