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

#include "dsce/codebook.hpp"

#include <cmath>
#include <iostream>

namespace dsce
{

namespace
{

void warn_if_underprovisioned(int q, int n_t, bool warn_dof)
{
    if (warn_dof && q < n_t)
        std::cerr << "dsce: warning: azimuth grid Q=" << q << " below n_t=" << n_t
                  << "; the array's spatial DoFs are under-provisioned\n";
}

} // namespace

FdCodebook build_fd_codebook(const ArrayConfig &array, const arma::vec &theta_deg,
                             const arma::vec &phi_deg, Link link, bool warn_dof)
{
    array.validate();
    if (theta_deg.n_elem == 0 || phi_deg.n_elem == 0)
        throw std::invalid_argument("build_fd_codebook: empty grid");
    for (arma::uword i = 1; i < theta_deg.n_elem; ++i)
        if (!(theta_deg(i) > theta_deg(i - 1)))
            throw std::invalid_argument("build_fd_codebook: azimuth grid must be strictly increasing");
    for (arma::uword i = 1; i < phi_deg.n_elem; ++i)
        if (!(phi_deg(i) > phi_deg(i - 1)))
            throw std::invalid_argument("build_fd_codebook: elevation grid must be strictly increasing");

    const int n_t = array.n_t();
    warn_if_underprovisioned(static_cast<int>(theta_deg.n_elem), n_t, warn_dof);

    FdCodebook book;
    book.theta_deg = theta_deg;
    book.phi_deg = phi_deg;
    book.link = link;
    book.array = array;
    book.words.set_size(static_cast<arma::uword>(n_t), theta_deg.n_elem * phi_deg.n_elem);

    const double inv_sqrt_nt = 1.0 / std::sqrt(static_cast<double>(n_t));
    for (arma::uword ui = 0; ui < phi_deg.n_elem; ++ui)
        for (arma::uword qi = 0; qi < theta_deg.n_elem; ++qi)
            book.words.col(ui * theta_deg.n_elem + qi) =
                inv_sqrt_nt * fd_response(theta_deg(qi), phi_deg(ui), array, link);
    return book;
}

FdCodebook build_fd_codebook(const ArrayConfig &array, int q, int u, Link link,
                             const Sector &sector, bool warn_dof)
{
    if (q < 1 || u < 1)
        throw std::invalid_argument("build_fd_codebook: q and u must be >= 1");
    sector.validate();

    arma::vec theta(static_cast<arma::uword>(q));
    arma::vec phi(static_cast<arma::uword>(u));
    for (int i = 0; i < q; ++i)
        theta(static_cast<arma::uword>(i)) =
            sector.az_start_deg + (i + 0.5) * sector.az_span_deg / q;
    for (int i = 0; i < u; ++i)
        phi(static_cast<arma::uword>(i)) = sector.el_start_deg + (i + 0.5) * sector.el_span_deg / u;
    return build_fd_codebook(array, theta, phi, link, warn_dof);
}

arma::vec dft_grid_angles(int n, double delta)
{
    if (n < 1)
        throw std::invalid_argument("dft_grid_angles: n must be >= 1");
    if (!(delta >= 0.5))
        throw std::invalid_argument("dft_grid_angles: spacing below lambda/2 leaves imaginary beams");

    arma::vec angles(static_cast<arma::uword>(n));
    for (int k = 0; k < n; ++k)
    {
        const int centered = k - n / 2;
        angles(static_cast<arma::uword>(k)) =
            rad2deg(std::acos(static_cast<double>(centered) / (static_cast<double>(n) * delta)));
    }
    return arma::sort(angles);
}

} // namespace dsce
