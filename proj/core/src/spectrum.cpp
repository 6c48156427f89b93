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

#include "dsce/spectrum.hpp"

#include <algorithm>
#include <cmath>

namespace dsce
{

SpatialSpectrum capon_spectrum(const arma::cx_mat &h, const FdCodebook &codebook, double loading)
{
    const arma::uword n_t = codebook.words.n_rows;
    if (h.n_rows != n_t)
        throw std::invalid_argument("capon_spectrum: channel rows must match the codebook's n_t");

    arma::cx_mat r = h * h.t();
    if (loading < 0.0)
        loading = 1.0e-3 * arma::trace(r).real() / static_cast<double>(n_t);
    r.diag() += loading;

    arma::cx_mat chol_u;
    if (!arma::chol(chol_u, r))
        throw SingularMatrixError(
            "capon_spectrum: H H^H is rank deficient; supply a positive diagonal loading");

    // P_k = 1 / (w_k^H R^{-1} w_k) via two triangular solves.
    const arma::cx_mat y = arma::solve(arma::trimatl(chol_u.t()), codebook.words);
    const arma::vec quad = arma::sum(arma::square(arma::abs(y)), 0).t();

    SpatialSpectrum spec;
    spec.theta_deg = codebook.theta_deg;
    spec.phi_deg = codebook.phi_deg;
    spec.loading = loading;
    spec.values.set_size(codebook.theta_deg.n_elem, codebook.phi_deg.n_elem);
    const arma::uword q = codebook.theta_deg.n_elem;
    for (arma::uword ui = 0; ui < codebook.phi_deg.n_elem; ++ui)
        for (arma::uword qi = 0; qi < q; ++qi)
            spec.values(qi, ui) = 1.0 / quad(ui * q + qi);
    return spec;
}

arma::cx_vec dft_cluster_samples(cx gain, double phi_c_deg, double delta, int n_t)
{
    if (n_t < 1)
        throw std::invalid_argument("dft_cluster_samples: n_t must be >= 1");

    const double c = std::cos(deg2rad(phi_c_deg));
    arma::cx_vec samples(static_cast<arma::uword>(n_t));
    for (int b = 0; b < n_t; ++b)
    {
        cx acc = 0.0;
        for (int n = 0; n < n_t; ++n)
        {
            const double phase = -2.0 * pi * delta * n * c - 2.0 * pi * b * n / n_t;
            acc += std::polar(1.0, phase);
        }
        samples(static_cast<arma::uword>(b)) = gain * acc;
    }
    return samples;
}

double dirichlet_magnitude(cx gain, double phi_c_deg, double delta, int n_t, int b)
{
    if (n_t < 1)
        throw std::invalid_argument("dirichlet_magnitude: n_t must be >= 1");
    if (b < 0 || b >= n_t)
        throw std::invalid_argument("dirichlet_magnitude: b must satisfy 0 <= b < n_t");

    const double x = 2.0 * pi * delta * std::cos(deg2rad(phi_c_deg)) + 2.0 * pi * b / n_t;
    const double r = std::remainder(x, 2.0 * pi);
    if (std::abs(r) < 1.0e-9)
        return std::abs(gain) * static_cast<double>(n_t);
    return std::abs(gain) * std::abs(std::sin(0.5 * n_t * r) / std::sin(0.5 * r));
}

double spectra_correlation(const SpatialSpectrum &p_a, const SpatialSpectrum &p_b)
{
    if (p_a.values.n_rows != p_b.values.n_rows || p_a.values.n_cols != p_b.values.n_cols)
        throw std::invalid_argument("spectra_correlation: spectra grids do not match");

    const arma::vec a = arma::vectorise(p_a.values);
    const arma::vec b = arma::vectorise(p_b.values);
    const arma::vec da = a - arma::mean(a);
    const arma::vec db = b - arma::mean(b);
    const double ssa = arma::dot(da, da);
    const double ssb = arma::dot(db, db);
    if (ssa <= 0.0 || ssb <= 0.0)
        throw std::domain_error("spectra_correlation: zero-variance spectrum, correlation undefined");
    return arma::dot(da, db) / std::sqrt(ssa * ssb);
}

double EcdfTable::eval(double x) const
{
    const auto *begin = values.begin();
    const auto *end = values.end();
    const auto count = std::upper_bound(begin, end, x) - begin;
    return static_cast<double>(count) / static_cast<double>(values.n_elem);
}

double EcdfTable::quantile(double p) const
{
    if (values.n_elem == 0)
        throw std::invalid_argument("EcdfTable::quantile: empty table");
    const double clamped = std::clamp(p, 0.0, 1.0);
    const auto idx = static_cast<arma::uword>(
        std::min<double>(std::ceil(clamped * static_cast<double>(values.n_elem)) - 1.0,
                         static_cast<double>(values.n_elem - 1)));
    return values(std::max<arma::sword>(0, static_cast<arma::sword>(idx)));
}

EcdfTable ecdf(const std::vector<double> &samples)
{
    if (samples.empty())
        throw std::invalid_argument("ecdf: empty sample list");

    EcdfTable table;
    table.values = arma::sort(arma::vec(samples));
    table.probs.set_size(table.values.n_elem);
    for (arma::uword i = 0; i < table.values.n_elem; ++i)
        table.probs(i) = static_cast<double>(i + 1) / static_cast<double>(table.values.n_elem);
    return table;
}

} // namespace dsce
