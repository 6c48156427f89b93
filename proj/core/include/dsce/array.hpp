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

#ifndef DSCE_ARRAY_HPP
#define DSCE_ARRAY_HPP

#include <armadillo>

#include "dsce/common.hpp"

namespace dsce
{

enum class Axis
{
    horizontal,
    vertical
};

enum class Link
{
    ul,
    dl
};

/// Uniform rectangular array at the BS plus the FDD carrier pair.
/// Element spacings are given in UL wavelengths; the physical spacing is
/// fixed in meters, so the spacing measured in DL wavelengths is
/// delta * f_dl / f_ul.
struct ArrayConfig
{
    int n_h = 8;             // horizontal (azimuth) elements
    int n_v = 8;             // vertical (elevation) elements
    double delta_h = 0.5;    // horizontal spacing, UL wavelengths
    double delta_v = 0.5;    // vertical spacing, UL wavelengths
    double f_ul_hz = 2.0e9;
    double f_dl_hz = 2.2e9;

    [[nodiscard]] int n_t() const { return n_h * n_v; }
    [[nodiscard]] double band_gap_hz() const { return f_dl_hz - f_ul_hz; }
    [[nodiscard]] double spacing_scale(Link link) const
    {
        return link == Link::dl ? f_dl_hz / f_ul_hz : 1.0;
    }

    void validate() const; // throws std::invalid_argument
};

/// Angular coverage of the antenna sector (120 deg azimuth / 90 deg
/// elevation by default, both centered on broadside).
struct Sector
{
    double az_start_deg = 30.0;
    double az_span_deg = 120.0;
    double el_start_deg = 45.0;
    double el_span_deg = 90.0;

    [[nodiscard]] double az_end_deg() const { return az_start_deg + az_span_deg; }
    [[nodiscard]] double el_end_deg() const { return el_start_deg + el_span_deg; }
    void validate() const;
};

/// One-axis array response: entry m = exp(-j 2 pi delta m cos(angle)).
/// The axis tag records whether this is the horizontal or vertical factor;
/// both axes share the same phase law.
arma::cx_vec steering_vector(Axis axis, double angle_deg, int n, double delta);

/// Full-dimension response a_h(theta) (x) a_v(phi), length n_t.
/// For link == dl the spacings are rescaled by f_dl/f_ul.
arma::cx_vec fd_response(double theta_deg, double phi_deg, const ArrayConfig &array, Link link);

} // namespace dsce

#endif
