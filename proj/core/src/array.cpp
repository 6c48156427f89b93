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

#include "dsce/array.hpp"

#include <cmath>

namespace dsce
{

void ArrayConfig::validate() const
{
    if (n_h < 1 || n_v < 1)
        throw std::invalid_argument("ArrayConfig: n_h and n_v must be >= 1");
    if (!(delta_h > 0.0) || !(delta_v > 0.0))
        throw std::invalid_argument("ArrayConfig: element spacings must be > 0");
    if (!(f_ul_hz > 0.0) || !(f_dl_hz > 0.0))
        throw std::invalid_argument("ArrayConfig: carrier frequencies must be > 0");
    if (f_dl_hz < f_ul_hz)
        throw std::invalid_argument("ArrayConfig: band gap f_dl - f_ul must be >= 0");
}

void Sector::validate() const
{
    if (!(az_span_deg > 0.0) || !(el_span_deg > 0.0))
        throw std::invalid_argument("Sector: spans must be > 0");
}

arma::cx_vec steering_vector(Axis /*axis*/, double angle_deg, int n, double delta)
{
    if (n < 1)
        throw std::invalid_argument("steering_vector: n must be >= 1");
    if (!(delta > 0.0))
        throw std::invalid_argument("steering_vector: delta must be > 0");
    if (!std::isfinite(angle_deg))
        throw std::invalid_argument("steering_vector: angle must be finite");

    const double c = std::cos(deg2rad(angle_deg));
    arma::cx_vec a(static_cast<arma::uword>(n));
    for (int m = 0; m < n; ++m)
        a(static_cast<arma::uword>(m)) = std::polar(1.0, -2.0 * pi * delta * m * c);
    a(0) = 1.0; // exact unit first entry
    return a;
}

arma::cx_vec fd_response(double theta_deg, double phi_deg, const ArrayConfig &array, Link link)
{
    array.validate();
    const double s = array.spacing_scale(link);
    const arma::cx_vec ah = steering_vector(Axis::horizontal, theta_deg, array.n_h, array.delta_h * s);
    const arma::cx_vec av = steering_vector(Axis::vertical, phi_deg, array.n_v, array.delta_v * s);
    return arma::kron(ah, av);
}

} // namespace dsce
