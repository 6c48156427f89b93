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

#ifndef DSCE_CODEBOOK_HPP
#define DSCE_CODEBOOK_HPP

#include <armadillo>

#include "dsce/array.hpp"

namespace dsce
{

/// Grid of unit-norm FD beamforming codewords over (theta_q, phi_u).
/// words is n_t x (Q*U); column (q, u) sits at index u*Q + q, i.e. elevation
/// subspaces are stored as contiguous azimuth blocks.
struct FdCodebook
{
    arma::vec theta_deg; // Q strictly increasing azimuth angles
    arma::vec phi_deg;   // U strictly increasing elevation angles
    arma::cx_mat words;
    Link link = Link::ul;
    ArrayConfig array;   // geometry the words were generated from

    [[nodiscard]] int q_count() const { return static_cast<int>(theta_deg.n_elem); }
    [[nodiscard]] int u_count() const { return static_cast<int>(phi_deg.n_elem); }
    [[nodiscard]] arma::uword col(int q, int u) const
    {
        return static_cast<arma::uword>(u) * theta_deg.n_elem + static_cast<arma::uword>(q);
    }
    [[nodiscard]] arma::cx_vec word(int q, int u) const { return words.col(col(q, u)); }
};

/// Codebook on the cell centers of q x u equal angular cells of the sector:
/// theta_q = az_start + (q + 0.5) * az_span / Q, likewise for phi_u.
/// Warns (once, stderr) when q < n_t since that under-provisions the array's
/// spatial DoFs; pass warn_dof = false for quantizer grids where the rule
/// does not apply.
FdCodebook build_fd_codebook(const ArrayConfig &array, int q, int u, Link link,
                             const Sector &sector = {}, bool warn_dof = true);

/// Codebook at explicit (strictly increasing) grid angles.
FdCodebook build_fd_codebook(const ArrayConfig &array, const arma::vec &theta_deg,
                             const arma::vec &phi_deg, Link link, bool warn_dof = true);

/// The n angles whose one-axis responses at the given effective spacing form
/// an orthonormal DFT family (sorted ascending). Requires n * delta >= n/2,
/// i.e. spacing >= lambda/2, so that all beams map to real angles.
arma::vec dft_grid_angles(int n, double delta);

} // namespace dsce

#endif
